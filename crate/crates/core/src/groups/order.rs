use rand::Rng;

use super::{GroupElement, GroupSpec};
use crate::error::{Error, Result};

/// Translation-invariant partial order on `Z^rank` whose positive cone is
/// `{x : L_i(x) >= 0 for all i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderSpec {
    rank: usize,
    functionals: Vec<Vec<i64>>,
}

impl OrderSpec {
    pub fn new(rank: usize, functionals: Vec<Vec<i64>>) -> Result<Self> {
        if functionals.iter().any(|l| l.len() != rank) {
            return Err(Error::InvalidSpec(format!("cone functionals must have length {rank}")));
        }
        Ok(OrderSpec { rank, functionals })
    }

    /// Product order: the positive cone is the first orthant.
    pub fn orthant(rank: usize) -> Self {
        let functionals = (0..rank)
            .map(|i| (0..rank).map(|j| i64::from(i == j)).collect())
            .collect();
        OrderSpec { rank, functionals }
    }

    /// The discrete order (`a <= b` iff `a = b`).
    pub fn discrete(rank: usize) -> Self {
        let mut functionals = Vec::new();
        for i in 0..rank {
            let e: Vec<i64> = (0..rank).map(|j| i64::from(i == j)).collect();
            functionals.push(e.iter().map(|x| -x).collect());
            functionals.push(e);
        }
        OrderSpec { rank, functionals }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn functionals(&self) -> &[Vec<i64>] {
        &self.functionals
    }

    pub fn is_positive(&self, x: &[i64]) -> bool {
        self.functionals
            .iter()
            .all(|l| l.iter().zip(x).map(|(a, b)| a * b).sum::<i64>() >= 0)
    }

    fn coords<'a>(&self, a: &'a GroupElement) -> Result<&'a [i64]> {
        a.coords()
            .filter(|c| c.len() == self.rank)
            .ok_or_else(|| Error::SpecMismatch(format!("{a} is not in Z^{}", self.rank)))
    }

    /// `a <= b` iff `b - a` lies in the positive cone.
    pub fn leq(&self, a: &GroupElement, b: &GroupElement) -> Result<bool> {
        let (x, y) = (self.coords(a)?, self.coords(b)?);
        let diff: Vec<i64> = y.iter().zip(x).map(|(p, q)| p - q).collect();
        Ok(self.is_positive(&diff))
    }

    pub fn lt(&self, a: &GroupElement, b: &GroupElement) -> Result<bool> {
        Ok(a != b && self.leq(a, b)?)
    }

    /// Checks `n ∈ N⁺ ⇒ θ(h)(n) ∈ N⁺` for sampled `h` and positive `n` of a
    /// semidirect product whose normal factor carries this order.
    pub fn check_h_invariance<R: Rng + ?Sized>(
        &self,
        group: &GroupSpec,
        rng: &mut R,
        samples: usize,
    ) -> Result<()> {
        let GroupSpec::Semidirect { n, h, .. } = group else {
            return Err(Error::SpecMismatch("H-invariance needs a semidirect product".into()));
        };
        let hs: Vec<GroupElement> = match h.elements() {
            Some(all) => all,
            None => (0..samples).map(|_| h.sample(rng, 4)).collect(),
        };
        let mut checked = 0;
        let mut attempts = 0;
        while checked < samples && attempts < samples * 50 {
            attempts += 1;
            let x = n.sample(rng, 6);
            if !self.is_positive(self.coords(&x)?) {
                continue;
            }
            checked += 1;
            for hh in &hs {
                let moved = group.act(hh, &x)?;
                if !self.is_positive(self.coords(&moved)?) {
                    return Err(Error::OrderNotHInvariant(format!("θ({hh})({x}) = {moved} leaves the cone")));
                }
            }
        }
        Ok(())
    }
}

/// Orders `elements` as `s_1, ..., s_r` with `s_i > s_j ⇒ i < j`: a stable
/// topological sort, larger elements first, ties broken by the smallest
/// canonical encoding.
pub fn linear_extension(order: &OrderSpec, elements: &[GroupElement]) -> Result<Vec<GroupElement>> {
    let mut remaining: Vec<GroupElement> = elements.to_vec();
    remaining.sort();
    remaining.dedup();
    let mut out = Vec::with_capacity(remaining.len());
    while !remaining.is_empty() {
        let mut pick = None;
        for (i, cand) in remaining.iter().enumerate() {
            let mut maximal = true;
            for other in &remaining {
                if order.lt(cand, other)? {
                    maximal = false;
                    break;
                }
            }
            if maximal {
                pick = Some(i);
                break;
            }
        }
        // a finite poset always has a maximal element
        out.push(remaining.remove(pick.expect("maximal element")));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn z(v: &[i64]) -> GroupElement {
        GroupElement::free(v.iter().copied())
    }

    #[test]
    fn leq_examples() {
        let std = OrderSpec::orthant(1);
        assert!(std.leq(&z(&[0]), &z(&[3])).unwrap());
        let quad = OrderSpec::orthant(2);
        assert!(!quad.leq(&z(&[0, 0]), &z(&[1, -1])).unwrap());
        // cone generated by (1,0), (1,1): L1(x,y) = y, L2(x,y) = x - y
        let cone = OrderSpec::new(2, vec![vec![0, 1], vec![1, -1]]).unwrap();
        assert!(cone.leq(&z(&[0, 0]), &z(&[2, 1])).unwrap());
        assert!(!cone.leq(&z(&[0, 0]), &z(&[1, 2])).unwrap());
        assert!(cone.is_positive(&[0, 0]));
    }

    #[test]
    fn linear_extension_puts_larger_first() {
        let std = OrderSpec::orthant(1);
        let s: Vec<GroupElement> = [0, 2, 1].iter().map(|&k| z(&[k])).collect();
        assert_eq!(linear_extension(&std, &s).unwrap(), vec![z(&[2]), z(&[1]), z(&[0])]);
        // incomparable elements fall back to lexicographic order
        let quad = OrderSpec::orthant(2);
        let s = vec![z(&[1, 0]), z(&[0, 1]), z(&[1, 1])];
        assert_eq!(
            linear_extension(&quad, &s).unwrap(),
            vec![z(&[1, 1]), z(&[0, 1]), z(&[1, 0])]
        );
    }

    proptest! {
        #[test]
        fn order_is_transitive_and_translation_invariant(
            a in prop::collection::vec(-4i64..4, 2),
            b in prop::collection::vec(-4i64..4, 2),
            c in prop::collection::vec(-4i64..4, 2),
            x in prop::collection::vec(-4i64..4, 2),
        ) {
            let cone = OrderSpec::new(2, vec![vec![0, 1], vec![1, -1]]).unwrap();
            let (a, b, c) = (z(&a), z(&b), z(&c));
            if cone.leq(&a, &b).unwrap() && cone.leq(&b, &c).unwrap() {
                prop_assert!(cone.leq(&a, &c).unwrap());
            }
            let g = GroupSpec::free_abelian(2);
            let xg = z(&x);
            let (xa, xb) = (g.compose(&xg, &a).unwrap(), g.compose(&xg, &b).unwrap());
            prop_assert_eq!(cone.leq(&a, &b).unwrap(), cone.leq(&xa, &xb).unwrap());
        }

        #[test]
        fn linear_extension_respects_order(pts in prop::collection::vec(prop::collection::vec(-3i64..3, 2), 1..8)) {
            let quad = OrderSpec::orthant(2);
            let s: Vec<GroupElement> = pts.iter().map(|p| z(p)).collect();
            let ext = linear_extension(&quad, &s).unwrap();
            for i in 0..ext.len() {
                for j in 0..ext.len() {
                    if quad.lt(&ext[j], &ext[i]).unwrap() {
                        prop_assert!(i < j);
                    }
                }
            }
        }
    }
}
