use super::GroupElement;
use crate::error::{Error, Result};
use crate::linalg::{self, IntMatrix};

/// An extension `1 -> N -> Z^r -> H -> 1` with `N` a saturated sublattice, so
/// that `H ≅ Z^(r-k)`.
///
/// Quotient coordinates come from a Smith form of the `N` basis. The section
/// sends `h` to the Hermite-reduced representative of its coset, which makes
/// it deterministic and independent of how the `N` basis was written down.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeExtension {
    rank: usize,
    n_basis: Vec<Vec<i64>>,
    hermite: IntMatrix,
    /// `r x (r-k)`: `g ↦ g · to_h` gives quotient coordinates.
    to_h: IntMatrix,
    /// `(r-k) x r`: rows lift the quotient basis back to `Z^r`.
    lift: IntMatrix,
}

impl LatticeExtension {
    pub fn new(rank: usize, n_basis: Vec<Vec<i64>>) -> Result<Self> {
        if n_basis.iter().any(|b| b.len() != rank) {
            return Err(Error::InvalidSpec(format!("N basis vectors must have length {rank}")));
        }
        let a: IntMatrix = n_basis.iter().map(|r| r.iter().map(|&x| i128::from(x)).collect()).collect();
        let k = if a.is_empty() { 0 } else { linalg::smith(&a, rank).rank };
        if k != n_basis.len() {
            return Err(Error::InvalidSpec("N basis is not linearly independent".into()));
        }
        let (v, v_inv) = if a.is_empty() {
            (linalg::identity(rank), linalg::identity(rank))
        } else {
            let s = linalg::smith(&a, rank);
            if s.diag.iter().any(|&d| d != 1) {
                return Err(Error::InvalidSpec("G/N has torsion; only saturated N is supported".into()));
            }
            let v_inv = linalg::unimodular_inverse(&s.v).expect("V is unimodular");
            (s.v, v_inv)
        };
        // N = span of the first k rows of V^{-1}
        let to_h = (0..rank).map(|i| (k..rank).map(|j| v[i][j]).collect()).collect();
        let lift = (k..rank).map(|i| v_inv[i].clone()).collect();
        let hermite = linalg::hermite_rows(&a, rank);
        Ok(LatticeExtension { rank, n_basis, hermite, to_h, lift })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn n_rank(&self) -> usize {
        self.n_basis.len()
    }

    pub fn h_rank(&self) -> usize {
        self.rank - self.n_basis.len()
    }

    pub fn n_basis(&self) -> &[Vec<i64>] {
        &self.n_basis
    }

    fn coords<'a>(&self, g: &'a GroupElement) -> Result<&'a [i64]> {
        g.coords()
            .filter(|c| c.len() == self.rank)
            .ok_or_else(|| Error::SpecMismatch(format!("{g} is not in Z^{}", self.rank)))
    }

    /// The quotient map `π: G -> H`.
    pub fn project(&self, g: &GroupElement) -> Result<GroupElement> {
        let x = self.coords(g)?;
        Ok(GroupElement::free((0..self.h_rank()).map(|j| {
            (0..self.rank).map(|i| i128::from(x[i]) * self.to_h[i][j]).sum::<i128>() as i64
        })))
    }

    /// The canonical section `σ: H -> G`.
    pub fn section(&self, h: &GroupElement) -> Result<GroupElement> {
        let y = h
            .coords()
            .filter(|c| c.len() == self.h_rank())
            .ok_or_else(|| Error::SpecMismatch(format!("{h} is not in H")))?;
        let lifted: Vec<i128> = (0..self.rank)
            .map(|j| (0..y.len()).map(|i| i128::from(y[i]) * self.lift[i][j]).sum())
            .collect();
        let rep = linalg::reduce_mod_hermite(&lifted, &self.hermite);
        Ok(GroupElement::free(rep.into_iter().map(|x| x as i64)))
    }

    pub fn contains_n(&self, g: &GroupElement) -> Result<bool> {
        Ok(self.project(g)?.coords().unwrap().iter().all(|&c| c == 0))
    }

    /// Coordinates of an element of `N` with respect to the `N` basis.
    pub fn n_coordinates(&self, g: &GroupElement) -> Result<Vec<i64>> {
        let x: Vec<i128> = self.coords(g)?.iter().map(|&c| i128::from(c)).collect();
        let a: IntMatrix = self.n_basis.iter().map(|r| r.iter().map(|&c| i128::from(c)).collect()).collect();
        linalg::solve_left(&a, &x)
            .map(|c| c.into_iter().map(|v| v as i64).collect())
            .ok_or_else(|| Error::InvalidElement(format!("{g} is not in N")))
    }

    /// Embeds `N`-coordinates into `G`.
    pub fn embed_n(&self, c: &[i64]) -> GroupElement {
        GroupElement::free((0..self.rank).map(|j| c.iter().zip(&self.n_basis).map(|(x, b)| x * b[j]).sum()))
    }

    pub fn project_and_section(&self, g: &GroupElement) -> Result<(GroupElement, GroupElement)> {
        let h = self.project(g)?;
        let s = self.section(&h)?;
        let n = GroupElement::free(self.coords(g)?.iter().zip(s.coords().unwrap()).map(|(a, b)| a - b));
        Ok((h, n))
    }

    /// Pulls cone functionals on `G` that vanish on `N` back to `H`.
    pub fn functionals_on_h(&self, functionals: &[Vec<i64>]) -> Vec<Vec<i64>> {
        functionals
            .iter()
            .map(|l| {
                (0..self.h_rank())
                    .map(|i| (0..self.rank).map(|j| self.lift[i][j] as i64 * l[j]).sum())
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::GroupSpec;

    #[test]
    fn section_example() {
        let e = LatticeExtension::new(2, vec![vec![1, 0]]).unwrap();
        let (h, n) = e.project_and_section(&GroupElement::free([3, 5])).unwrap();
        assert_eq!(h, GroupElement::free([5]));
        assert_eq!(n, GroupElement::free([3, 0]));
        assert_eq!(e.section(&h).unwrap(), GroupElement::free([0, 5]));
    }

    #[test]
    fn elements_of_n_project_to_identity() {
        let g = GroupSpec::extension(3, vec![vec![1, 1, 0], vec![0, 1, 1]]).unwrap();
        let x = GroupElement::free([2, 5, 3]);
        let (h, n) = g.project_and_section(&x).unwrap();
        assert_eq!(h, GroupElement::free([0]));
        assert_eq!(n, x);
    }

    #[test]
    fn projection_is_a_homomorphism_with_right_inverse() {
        let e = LatticeExtension::new(3, vec![vec![1, 2, 0], vec![0, 1, 3]]).unwrap();
        let pts: Vec<GroupElement> = (-2..=2)
            .flat_map(|a| (-2..=2).map(move |b| GroupElement::free([a, b, a - b])))
            .collect();
        for x in &pts {
            for y in &pts {
                let xy = GroupElement::free(x.coords().unwrap().iter().zip(y.coords().unwrap()).map(|(p, q)| p + q));
                let px = e.project(x).unwrap();
                let py = e.project(y).unwrap();
                let sum = GroupElement::free(px.coords().unwrap().iter().zip(py.coords().unwrap()).map(|(p, q)| p + q));
                assert_eq!(e.project(&xy).unwrap(), sum);
            }
            let h = e.project(x).unwrap();
            assert_eq!(e.project(&e.section(&h).unwrap()).unwrap(), h);
            let (_, n) = e.project_and_section(x).unwrap();
            assert!(e.contains_n(&n).unwrap());
            let c = e.n_coordinates(&n).unwrap();
            assert_eq!(e.embed_n(&c), n);
        }
    }

    #[test]
    fn torsion_quotients_rejected() {
        assert!(LatticeExtension::new(1, vec![vec![2]]).is_err());
        assert!(LatticeExtension::new(2, vec![vec![1, 0], vec![2, 0]]).is_err());
    }
}
