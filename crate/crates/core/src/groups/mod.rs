//! Grading groups: free abelian lattices, finite multiplication tables,
//! semidirect products and lattice extensions with a canonical section.

mod extension;
mod finite;
mod order;

pub use extension::LatticeExtension;
pub use finite::FiniteTable;
pub use order::{linear_extension, OrderSpec};

use std::fmt;

use rand::Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};

/// An element of a grading group, in canonical form for its owning group.
///
/// Elements of a semidirect product `N ⋊ H` are pairs `(n, h)`; elements of a
/// lattice extension are coordinate vectors in the ambient lattice `G`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroupElement {
    Free(Vec<i64>),
    Table(usize),
    Pair(Box<GroupElement>, Box<GroupElement>),
}

impl GroupElement {
    pub fn free<I: IntoIterator<Item = i64>>(coords: I) -> Self {
        GroupElement::Free(coords.into_iter().collect())
    }

    pub fn pair(n: GroupElement, h: GroupElement) -> Self {
        GroupElement::Pair(Box::new(n), Box::new(h))
    }

    pub fn coords(&self) -> Option<&[i64]> {
        match self {
            GroupElement::Free(v) => Some(v),
            _ => None,
        }
    }

    pub fn parts(&self) -> Option<(&GroupElement, &GroupElement)> {
        match self {
            GroupElement::Pair(n, h) => Some((n, h)),
            _ => None,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            GroupElement::Free(v) => json!(v),
            GroupElement::Table(i) => json!(i),
            GroupElement::Pair(n, h) => json!([n.to_json(), h.to_json()]),
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Free(v) if v.len() == 1 => write!(f, "{}", v[0]),
            GroupElement::Free(v) => {
                write!(f, "(")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
            GroupElement::Table(i) => write!(f, "e{i}"),
            GroupElement::Pair(n, h) => write!(f, "({n};{h})"),
        }
    }
}

/// Automorphism of `N` through which `H` acts in a semidirect product.
///
/// Non-trivial actions factor through a sign character `H -> C2`, which is
/// available when `H` has order 2 or is the infinite cyclic group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Action {
    Trivial,
    /// `n -> n^{-1}` for odd `h`.
    Inversion,
    /// Reverses the coordinates of `n` for odd `h`.
    Swap,
}

impl Action {
    pub fn name(self) -> &'static str {
        match self {
            Action::Trivial => "trivial",
            Action::Inversion => "inversion",
            Action::Swap => "swap",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupSpec {
    FreeAbelian { rank: usize },
    FiniteTable(FiniteTable),
    Semidirect {
        n: Box<GroupSpec>,
        h: Box<GroupSpec>,
        action: Action,
    },
    Extension(Box<LatticeExtension>),
}

impl GroupSpec {
    pub fn free_abelian(rank: usize) -> Self {
        GroupSpec::FreeAbelian { rank }
    }

    pub fn cyclic(order: usize) -> Self {
        GroupSpec::FiniteTable(FiniteTable::cyclic(order))
    }

    pub fn trivial() -> Self {
        GroupSpec::FreeAbelian { rank: 0 }
    }

    /// `N ⋊ H`; fails unless the action is supported for these factors.
    pub fn semidirect(n: GroupSpec, h: GroupSpec, action: Action) -> Result<Self> {
        if action != Action::Trivial {
            let n_rank = match &n {
                GroupSpec::FreeAbelian { rank } => *rank,
                _ => {
                    return Err(Error::InvalidSpec(format!(
                        "action '{}' needs a free abelian normal factor",
                        action.name()
                    )))
                }
            };
            if action == Action::Swap && n_rank != 2 {
                return Err(Error::InvalidSpec("swap action needs N = Z^2".into()));
            }
            if !h.has_sign_character() {
                return Err(Error::InvalidSpec(
                    "non-trivial action needs H of order 2 or H = Z".into(),
                ));
            }
        }
        Ok(GroupSpec::Semidirect {
            n: Box::new(n),
            h: Box::new(h),
            action,
        })
    }

    pub fn extension(rank: usize, n_basis: Vec<Vec<i64>>) -> Result<Self> {
        Ok(GroupSpec::Extension(Box::new(LatticeExtension::new(rank, n_basis)?)))
    }

    fn has_sign_character(&self) -> bool {
        match self {
            GroupSpec::FreeAbelian { rank } => *rank == 1,
            GroupSpec::FiniteTable(t) => t.order() == 2,
            _ => false,
        }
    }

    /// Sign character used by non-trivial semidirect actions.
    fn is_odd(&self, h: &GroupElement) -> bool {
        match (self, h) {
            (GroupSpec::FreeAbelian { .. }, GroupElement::Free(v)) => v[0].rem_euclid(2) == 1,
            (GroupSpec::FiniteTable(t), GroupElement::Table(i)) => *i != t.identity(),
            _ => false,
        }
    }

    pub fn identity(&self) -> GroupElement {
        match self {
            GroupSpec::FreeAbelian { rank } => GroupElement::Free(vec![0; *rank]),
            GroupSpec::FiniteTable(t) => GroupElement::Table(t.identity()),
            GroupSpec::Semidirect { n, h, .. } => GroupElement::pair(n.identity(), h.identity()),
            GroupSpec::Extension(e) => GroupElement::Free(vec![0; e.rank()]),
        }
    }

    pub fn contains(&self, a: &GroupElement) -> bool {
        match (self, a) {
            (GroupSpec::FreeAbelian { rank }, GroupElement::Free(v)) => v.len() == *rank,
            (GroupSpec::Extension(e), GroupElement::Free(v)) => v.len() == e.rank(),
            (GroupSpec::FiniteTable(t), GroupElement::Table(i)) => *i < t.order(),
            (GroupSpec::Semidirect { n, h, .. }, GroupElement::Pair(x, y)) => {
                n.contains(x) && h.contains(y)
            }
            _ => false,
        }
    }

    fn check(&self, a: &GroupElement) -> Result<()> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(Error::SpecMismatch(format!("{a} is not an element of {}", self.describe())))
        }
    }

    /// Applies the action of `h` to `n` inside a semidirect product.
    pub fn act(&self, h: &GroupElement, n: &GroupElement) -> Result<GroupElement> {
        let GroupSpec::Semidirect { n: ng, h: hg, action } = self else {
            return Err(Error::SpecMismatch("act needs a semidirect product".into()));
        };
        ng.check(n)?;
        hg.check(h)?;
        if *action == Action::Trivial || !hg.is_odd(h) {
            return Ok(n.clone());
        }
        Ok(match action {
            Action::Inversion => ng.invert(n)?,
            Action::Swap => {
                let v = n.coords().expect("checked free");
                GroupElement::free(v.iter().rev().copied())
            }
            Action::Trivial => unreachable!(),
        })
    }

    /// Group multiplication; `(n,h)(n',h') = (n · hn', hh')` for semidirect
    /// products.
    pub fn compose(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(match (self, a, b) {
            (GroupSpec::FreeAbelian { .. } | GroupSpec::Extension(_), GroupElement::Free(x), GroupElement::Free(y)) => {
                GroupElement::free(x.iter().zip(y).map(|(p, q)| p + q))
            }
            (GroupSpec::FiniteTable(t), GroupElement::Table(i), GroupElement::Table(j)) => {
                GroupElement::Table(t.mul(*i, *j))
            }
            (GroupSpec::Semidirect { n, h, .. }, GroupElement::Pair(n1, h1), GroupElement::Pair(n2, h2)) => {
                let twisted = self.act(h1, n2)?;
                GroupElement::pair(n.compose(n1, &twisted)?, h.compose(h1, h2)?)
            }
            _ => unreachable!("membership checked"),
        })
    }

    /// Inverse; `(n,h)^{-1} = (h^{-1} n^{-1}, h^{-1})` for semidirect products.
    pub fn invert(&self, a: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        Ok(match (self, a) {
            (GroupSpec::FreeAbelian { .. } | GroupSpec::Extension(_), GroupElement::Free(x)) => {
                GroupElement::free(x.iter().map(|p| -p))
            }
            (GroupSpec::FiniteTable(t), GroupElement::Table(i)) => GroupElement::Table(t.inverse(*i)),
            (GroupSpec::Semidirect { n, h, .. }, GroupElement::Pair(x, y)) => {
                let h_inv = h.invert(y)?;
                let n_inv = n.invert(x)?;
                GroupElement::pair(self.act(&h_inv, &n_inv)?, h_inv)
            }
            _ => unreachable!("membership checked"),
        })
    }

    /// `a^{-1} b`, the degree governing morphisms between shifted free modules.
    pub fn left_divide(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.compose(&self.invert(a)?, b)
    }

    pub fn is_finite(&self) -> bool {
        match self {
            GroupSpec::FreeAbelian { rank } => *rank == 0,
            GroupSpec::FiniteTable(_) => true,
            GroupSpec::Semidirect { n, h, .. } => n.is_finite() && h.is_finite(),
            GroupSpec::Extension(e) => e.rank() == 0,
        }
    }

    /// All elements, when the group is finite.
    pub fn elements(&self) -> Option<Vec<GroupElement>> {
        match self {
            GroupSpec::FreeAbelian { rank: 0 } => Some(vec![self.identity()]),
            GroupSpec::FiniteTable(t) => Some((0..t.order()).map(GroupElement::Table).collect()),
            GroupSpec::Semidirect { n, h, .. } => {
                let ns = n.elements()?;
                let hs = h.elements()?;
                Some(
                    ns.iter()
                        .flat_map(|x| hs.iter().map(move |y| GroupElement::pair(x.clone(), y.clone())))
                        .collect(),
                )
            }
            _ => None,
        }
    }

    /// Random element; lattice coordinates are drawn from `[-radius, radius]`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, radius: i64) -> GroupElement {
        match self {
            GroupSpec::FreeAbelian { rank } => {
                GroupElement::free((0..*rank).map(|_| rng.gen_range(-radius..=radius)))
            }
            GroupSpec::Extension(e) => {
                GroupElement::free((0..e.rank()).map(|_| rng.gen_range(-radius..=radius)))
            }
            GroupSpec::FiniteTable(t) => GroupElement::Table(rng.gen_range(0..t.order())),
            GroupSpec::Semidirect { n, h, .. } => {
                GroupElement::pair(n.sample(rng, radius), h.sample(rng, radius))
            }
        }
    }

    /// The integer coordinates that cone conditions are evaluated on: the
    /// vector itself for lattices, the `N`-part for semidirect products, and
    /// nothing for finite tables.
    pub fn lattice_part(&self, a: &GroupElement) -> Vec<i64> {
        match (self, a) {
            (GroupSpec::FreeAbelian { .. } | GroupSpec::Extension(_), GroupElement::Free(v)) => v.clone(),
            (GroupSpec::Semidirect { n, .. }, GroupElement::Pair(x, _)) => n.lattice_part(x),
            _ => Vec::new(),
        }
    }

    /// Parses an element from its JSON encoding: integer arrays for lattices,
    /// integers for table indices, `[n, h]` for semidirect pairs.
    pub fn parse_element(&self, v: &Value) -> Result<GroupElement> {
        let bad = || Error::Config(format!("cannot parse {v} as element of {}", self.describe()));
        let el = match self {
            GroupSpec::FreeAbelian { .. } | GroupSpec::Extension(_) => {
                let coords = match v {
                    Value::Number(n) => vec![n.as_i64().ok_or_else(bad)?],
                    Value::Array(xs) => xs
                        .iter()
                        .map(|x| x.as_i64().ok_or_else(bad))
                        .collect::<Result<Vec<_>>>()?,
                    _ => return Err(bad()),
                };
                GroupElement::Free(coords)
            }
            GroupSpec::FiniteTable(_) => GroupElement::Table(v.as_u64().ok_or_else(bad)? as usize),
            GroupSpec::Semidirect { n, h, .. } => {
                let xs = v.as_array().filter(|xs| xs.len() == 2).ok_or_else(bad)?;
                GroupElement::pair(n.parse_element(&xs[0])?, h.parse_element(&xs[1])?)
            }
        };
        self.check(&el)?;
        Ok(el)
    }

    pub fn describe(&self) -> String {
        match self {
            GroupSpec::FreeAbelian { rank: 0 } => "1".into(),
            GroupSpec::FreeAbelian { rank: 1 } => "Z".into(),
            GroupSpec::FreeAbelian { rank } => format!("Z^{rank}"),
            GroupSpec::FiniteTable(t) => format!("G{}", t.order()),
            GroupSpec::Semidirect { n, h, action } => {
                format!("{} x|{} {}", n.describe(), action.name(), h.describe())
            }
            GroupSpec::Extension(e) => format!("Z^{} / N(rank {})", e.rank(), e.n_rank()),
        }
    }

    /// Group axioms on sampled (or, for small finite groups, all) triples.
    pub fn check_axioms<R: Rng + ?Sized>(&self, rng: &mut R, samples: usize) -> Result<()> {
        let triples: Vec<[GroupElement; 3]> = match self.elements() {
            Some(all) if all.len() <= finite::EXHAUSTIVE_LIMIT => {
                let mut out = Vec::new();
                for a in &all {
                    for b in &all {
                        for c in &all {
                            out.push([a.clone(), b.clone(), c.clone()]);
                        }
                    }
                }
                out
            }
            _ => (0..samples)
                .map(|_| [self.sample(rng, 5), self.sample(rng, 5), self.sample(rng, 5)])
                .collect(),
        };
        let e = self.identity();
        for [a, b, c] in triples {
            let ab_c = self.compose(&self.compose(&a, &b)?, &c)?;
            let a_bc = self.compose(&a, &self.compose(&b, &c)?)?;
            if ab_c != a_bc {
                return Err(Error::InvalidSpec(format!("associativity fails at {a}, {b}, {c}")));
            }
            if self.compose(&e, &a)? != a || self.compose(&a, &e)? != a {
                return Err(Error::InvalidSpec(format!("identity law fails at {a}")));
            }
            if self.compose(&a, &self.invert(&a)?)? != e {
                return Err(Error::InvalidSpec(format!("inverse law fails at {a}")));
            }
        }
        Ok(())
    }

    /// Checks that each sampled `θ(h)` is an automorphism and that
    /// `θ(h1 h2) = θ(h1) ∘ θ(h2)`.
    pub fn check_action<R: Rng + ?Sized>(&self, rng: &mut R, samples: usize) -> Result<()> {
        let GroupSpec::Semidirect { n, h, .. } = self else {
            return Ok(());
        };
        for _ in 0..samples {
            let (h1, h2) = (h.sample(rng, 5), h.sample(rng, 5));
            let (x, y) = (n.sample(rng, 5), n.sample(rng, 5));
            let lhs = self.act(&h1, &n.compose(&x, &y)?)?;
            let rhs = n.compose(&self.act(&h1, &x)?, &self.act(&h1, &y)?)?;
            if lhs != rhs {
                return Err(Error::InvalidSpec(format!("θ({h1}) is not a homomorphism")));
            }
            let comp = self.act(&h.compose(&h1, &h2)?, &x)?;
            let seq = self.act(&h1, &self.act(&h2, &x)?)?;
            if comp != seq {
                return Err(Error::InvalidSpec(format!("θ is not multiplicative at {h1}, {h2}")));
            }
        }
        Ok(())
    }

    /// `(π(g), σ(π(g))^{-1} g)` for an extension or a split semidirect product
    /// (with section `h -> (1, h)`).
    pub fn project_and_section(&self, g: &GroupElement) -> Result<(GroupElement, GroupElement)> {
        self.check(g)?;
        match (self, g) {
            (GroupSpec::Extension(e), GroupElement::Free(_)) => e.project_and_section(g),
            (GroupSpec::Semidirect { n, .. }, GroupElement::Pair(_, h)) => {
                let sigma = GroupElement::pair(n.identity(), (**h).clone());
                let rest = self.left_divide(&sigma, g)?;
                Ok(((**h).clone(), rest))
            }
            _ => Err(Error::SpecMismatch("project_and_section needs an extension".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn z_semi_c2() -> GroupSpec {
        GroupSpec::semidirect(GroupSpec::free_abelian(1), GroupSpec::cyclic(2), Action::Inversion).unwrap()
    }

    // C2 written multiplicatively as {1, -1}: index 0 is 1, index 1 is -1.
    fn el(n: i64, h: i64) -> GroupElement {
        GroupElement::pair(GroupElement::free([n]), GroupElement::Table(usize::from(h == -1)))
    }

    #[test]
    fn compose_examples() {
        let z2 = GroupSpec::free_abelian(2);
        let p = z2.compose(&GroupElement::free([1, 2]), &GroupElement::free([3, 4])).unwrap();
        assert_eq!(p, GroupElement::free([4, 6]));
        let g = z_semi_c2();
        assert_eq!(g.compose(&el(2, -1), &el(3, 1)).unwrap(), el(-1, -1));
        let a = el(5, -1);
        assert_eq!(g.compose(&a, &g.identity()).unwrap(), a);
    }

    #[test]
    fn invert_examples() {
        let z2 = GroupSpec::free_abelian(2);
        assert_eq!(z2.invert(&GroupElement::free([1, -3])).unwrap(), GroupElement::free([-1, 3]));
        let g = z_semi_c2();
        let inv = g.invert(&el(2, -1)).unwrap();
        assert_eq!(inv, el(2, -1));
        assert_eq!(g.compose(&el(2, -1), &inv).unwrap(), g.identity());
        assert_eq!(g.invert(&g.identity()).unwrap(), g.identity());
    }

    #[test]
    fn spec_mismatch_is_an_error() {
        let z2 = GroupSpec::free_abelian(2);
        assert!(matches!(
            z2.compose(&GroupElement::free([1]), &GroupElement::free([1, 2])),
            Err(Error::SpecMismatch(_))
        ));
        assert!(z2.compose(&GroupElement::Table(0), &GroupElement::free([1, 2])).is_err());
    }

    #[test]
    fn axioms_and_actions() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for g in [
            GroupSpec::free_abelian(3),
            GroupSpec::cyclic(6),
            z_semi_c2(),
            GroupSpec::semidirect(GroupSpec::free_abelian(2), GroupSpec::cyclic(2), Action::Swap).unwrap(),
            GroupSpec::semidirect(GroupSpec::free_abelian(1), GroupSpec::free_abelian(1), Action::Inversion)
                .unwrap(),
        ] {
            g.check_axioms(&mut rng, 200).unwrap();
            g.check_action(&mut rng, 200).unwrap();
        }
    }

    #[test]
    fn unsupported_actions_rejected() {
        assert!(GroupSpec::semidirect(GroupSpec::free_abelian(1), GroupSpec::cyclic(3), Action::Inversion).is_err());
        assert!(GroupSpec::semidirect(GroupSpec::free_abelian(3), GroupSpec::cyclic(2), Action::Swap).is_err());
    }

    #[test]
    fn semidirect_section_split_case() {
        // trivial action: (n, h) -> (h, (n, 1))
        let g = GroupSpec::semidirect(GroupSpec::free_abelian(1), GroupSpec::cyclic(2), Action::Trivial).unwrap();
        let (h, n) = g.project_and_section(&el(4, -1)).unwrap();
        assert_eq!(h, GroupElement::Table(1));
        assert_eq!(n, el(4, 1));
        // non-trivial action: σ(h) · n recovers g
        let g = z_semi_c2();
        let x = el(4, -1);
        let (h, n) = g.project_and_section(&x).unwrap();
        let sigma = GroupElement::pair(GroupElement::free([0]), h);
        assert_eq!(g.compose(&sigma, &n).unwrap(), x);
    }

    #[test]
    fn element_json_round_trip() {
        let g = z_semi_c2();
        let x = el(-3, -1);
        assert_eq!(g.parse_element(&x.to_json()).unwrap(), x);
        assert!(g.parse_element(&serde_json::json!([1, 2])).is_err());
    }
}
