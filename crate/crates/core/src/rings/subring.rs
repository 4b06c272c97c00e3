use super::{ComponentRule, Kind, LocalizationRule, RingElem, RingTag, SystematicRing};
use crate::error::{Error, Result};
use crate::groups::{GroupElement, GroupSpec, OrderSpec};
use crate::linalg;

/// A subgroup over which to restrict a systematic ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Subgroup {
    Whole,
    /// Sublattice of a lattice grading group, given by a basis.
    /// For an extension use [`Subgroup::kernel_of`].
    Sublattice(Vec<Vec<i64>>),
    /// `{(1, h)}` inside `N ⋊ H`.
    Complement,
    /// `{(n, 1)}` inside `N ⋊ H`.
    Normal,
}

impl Subgroup {
    /// The normal subgroup `N` of a lattice extension.
    pub fn kernel_of(group: &GroupSpec) -> Result<Self> {
        match group {
            GroupSpec::Extension(e) => Ok(Subgroup::Sublattice(e.n_basis().to_vec())),
            GroupSpec::Semidirect { .. } => Ok(Subgroup::Normal),
            _ => Err(Error::SpecMismatch("group has no declared normal subgroup".into())),
        }
    }
}

/// The subring `R_K = Σ_{k ∈ K} R_k` together with the degree embedding
/// `K → G`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Restriction {
    pub ring: SystematicRing,
    parent: GroupSpec,
    sub: Subgroup,
}

impl Restriction {
    pub fn embed_degree(&self, k: &GroupElement) -> Result<GroupElement> {
        match (&self.sub, &self.parent) {
            (Subgroup::Whole, _) => Ok(k.clone()),
            (Subgroup::Sublattice(basis), _) => {
                let c = k.coords().ok_or_else(|| Error::SpecMismatch(format!("{k} is not a lattice point")))?;
                let r = self.parent.lattice_part(&self.parent.identity()).len();
                Ok(GroupElement::free((0..r).map(|j| c.iter().zip(basis).map(|(x, b)| x * b[j]).sum())))
            }
            (Subgroup::Complement, GroupSpec::Semidirect { n, .. }) => Ok(GroupElement::pair(n.identity(), k.clone())),
            (Subgroup::Normal, GroupSpec::Semidirect { h, .. }) => Ok(GroupElement::pair(k.clone(), h.identity())),
            _ => unreachable!("validated on construction"),
        }
    }

    /// The subgroup degree of `g`, if `g` lies in the subgroup.
    pub fn pull_degree(&self, g: &GroupElement) -> Option<GroupElement> {
        match (&self.sub, &self.parent) {
            (Subgroup::Whole, _) => Some(g.clone()),
            (Subgroup::Sublattice(basis), _) => {
                let a: linalg::IntMatrix = basis.iter().map(|r| r.iter().map(|&x| i128::from(x)).collect()).collect();
                let x: Vec<i128> = g.coords()?.iter().map(|&c| i128::from(c)).collect();
                if a.is_empty() {
                    return x.iter().all(|&c| c == 0).then(|| GroupElement::free([]));
                }
                linalg::solve_left(&a, &x).map(|c| GroupElement::free(c.into_iter().map(|v| v as i64)))
            }
            (Subgroup::Complement, GroupSpec::Semidirect { n, .. }) => {
                let (x, h) = g.parts()?;
                (*x == n.identity()).then(|| h.clone())
            }
            (Subgroup::Normal, GroupSpec::Semidirect { h, .. }) => {
                let (x, y) = g.parts()?;
                (*y == h.identity()).then(|| x.clone())
            }
            _ => None,
        }
    }

    /// Maps an element of the subring into the parent ring.
    pub fn embed(&self, x: &RingElem) -> Result<RingElem> {
        match x {
            RingElem::Fraction(_) => Ok(x.clone()),
            RingElem::Terms(t) => {
                let terms = t.iter().map(|(k, c)| Ok((self.embed_degree(k)?, *c))).collect::<Result<Vec<_>>>()?;
                Ok(RingElem::Terms(terms).canonical_sorted())
            }
        }
    }

    /// Maps a parent element supported on the subgroup into the subring.
    pub fn restrict(&self, x: &RingElem) -> Result<RingElem> {
        match x {
            RingElem::Fraction(_) => {
                let y = x.clone();
                self.ring.validate(&y)?;
                Ok(y)
            }
            RingElem::Terms(t) => {
                let terms = t
                    .iter()
                    .map(|(g, c)| {
                        self.pull_degree(g)
                            .map(|k| (k, *c))
                            .ok_or_else(|| Error::InvalidElement(format!("degree {g} outside the subgroup")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                self.ring.from_terms(terms)
            }
        }
    }
}

impl RingElem {
    fn canonical_sorted(self) -> RingElem {
        match self {
            RingElem::Terms(mut t) => {
                t.sort_by(|a, b| a.0.cmp(&b.0));
                RingElem::Terms(t)
            }
            f => f,
        }
    }
}

fn pull_back(functionals: &[Vec<i64>], basis: &[Vec<i64>]) -> Vec<Vec<i64>> {
    functionals
        .iter()
        .map(|l| basis.iter().map(|b| l.iter().zip(b).map(|(x, y)| x * y).sum()).collect())
        .collect()
}

impl SystematicRing {
    /// The subring of components over a subgroup, graded by that subgroup.
    pub fn subring_over_subgroup(&self, sub: &Subgroup) -> Result<Restriction> {
        let group = self.group().clone();
        let ring = match (sub, &self.kind) {
            (Subgroup::Whole, _) => self.clone(),
            (Subgroup::Sublattice(basis), kind) => {
                let rank = match &group {
                    GroupSpec::FreeAbelian { rank } => *rank,
                    GroupSpec::Extension(e) => e.rank(),
                    _ => return Err(Error::SpecMismatch("sublattice of a non-lattice group".into())),
                };
                if basis.iter().any(|b| b.len() != rank) {
                    return Err(Error::InvalidSpec(format!("basis vectors must have length {rank}")));
                }
                let a: linalg::IntMatrix = basis.iter().map(|r| r.iter().map(|&x| i128::from(x)).collect()).collect();
                if !a.is_empty() && linalg::smith(&a, rank).rank != basis.len() {
                    return Err(Error::InvalidSpec("sublattice basis is not linearly independent".into()));
                }
                let k = basis.len();
                let sub_group = GroupSpec::free_abelian(k);
                match kind {
                    Kind::Monoid { base, support, rule } => {
                        let support = pull_back(support, basis);
                        let rule = match rule {
                            ComponentRule::Graded => ComponentRule::Graded,
                            ComponentRule::Filtered(o) => {
                                ComponentRule::Filtered(OrderSpec::new(k, pull_back(o.functionals(), basis))?)
                            }
                        };
                        let tag = if support.is_empty() { RingTag::LaurentGroupRing } else { self.tag() };
                        SystematicRing { tag, group: sub_group, kind: Kind::Monoid { base: *base, support, rule } }
                    }
                    Kind::Localization { s, rule } => match basis.as_slice() {
                        [] => SystematicRing::monoid_ring(super::Base::Integers, sub_group, Vec::new())?,
                        [b] => {
                            let m = b[0].unsigned_abs() as u32;
                            let s_m = s.checked_pow(m).ok_or_else(|| Error::InvalidSpec("s^m overflows".into()))?;
                            match rule {
                                LocalizationRule::Powers if b[0] > 0 => SystematicRing::power_localization(s_m)?,
                                LocalizationRule::PositiveFiltration if b[0] > 0 => SystematicRing::power_filtration(s_m)?,
                                _ => {
                                    return Err(Error::InvalidSpec("sublattice basis must be positive for Z[1/s]".into()))
                                }
                            }
                        }
                        _ => unreachable!("Z has no rank-2 sublattice"),
                    },
                }
            }
            (Subgroup::Complement | Subgroup::Normal, Kind::Monoid { base, support, rule: ComponentRule::Graded }) => {
                let GroupSpec::Semidirect { n, h, .. } = &group else {
                    return Err(Error::SpecMismatch("factor subgroups need a semidirect product".into()));
                };
                if *sub == Subgroup::Complement {
                    // (1, h) has zero lattice part, so it always lies in the cone
                    SystematicRing::monoid_ring(*base, (**h).clone(), Vec::new())?
                } else {
                    SystematicRing::monoid_ring(*base, (**n).clone(), support.clone())?
                }
            }
            _ => return Err(Error::SpecMismatch("unsupported subgroup for this ring".into())),
        };
        Ok(Restriction { ring, parent: group, sub: sub.clone() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::Action;
    use crate::rings::{int, Base, Window};

    #[test]
    fn polynomial_ring_restricts_to_one_variable() {
        let r = SystematicRing::monoid_ring(Base::Mod(2), GroupSpec::free_abelian(2), vec![vec![1, 0], vec![0, 1]]).unwrap();
        let res = r.subring_over_subgroup(&Subgroup::Sublattice(vec![vec![1, 0]])).unwrap();
        let fx = SystematicRing::monoid_ring(Base::Mod(2), GroupSpec::free_abelian(1), vec![vec![1]]).unwrap();
        assert_eq!(res.ring.group(), fx.group());
        assert_eq!(res.ring.support_functionals(), &[vec![1], vec![0]]);
        let w = Window::default();
        for k in -3..=3 {
            let g = GroupElement::free([k]);
            assert_eq!(res.ring.gens(&g, &w).unwrap().len(), fx.gens(&g, &w).unwrap().len());
        }
        let x2 = r.monomial(&GroupElement::free([2, 0]), int(1)).unwrap();
        let y = r.monomial(&GroupElement::free([0, 1]), int(1)).unwrap();
        let back = res.restrict(&x2).unwrap();
        assert_eq!(res.embed(&back).unwrap(), x2);
        assert!(res.restrict(&y).is_err());
    }

    #[test]
    fn whole_group_is_identity() {
        let r = SystematicRing::power_localization(2).unwrap();
        assert_eq!(r.subring_over_subgroup(&Subgroup::Whole).unwrap().ring, r);
        let r4 = r.subring_over_subgroup(&Subgroup::Sublattice(vec![vec![2]])).unwrap();
        assert_eq!(r4.ring, SystematicRing::power_localization(4).unwrap());
    }

    #[test]
    fn skew_ring_complement_is_group_ring() {
        let g = GroupSpec::semidirect(GroupSpec::free_abelian(2), GroupSpec::cyclic(2), Action::Swap).unwrap();
        let r = SystematicRing::skew_group_ring(Base::Mod(2), g, vec![vec![1, 0], vec![0, 1]]).unwrap();
        let res = r.subring_over_subgroup(&Subgroup::Complement).unwrap();
        assert_eq!(res.ring, SystematicRing::laurent(Base::Mod(2), GroupSpec::cyclic(2)));
        let w = Window::default();
        assert!(res.ring.is_strongly_systematic_at(&GroupElement::Table(1), &w).unwrap());
        let h = res.ring.monomial(&GroupElement::Table(1), int(1)).unwrap();
        let up = res.embed(&h).unwrap();
        assert!(r.member(&up, &GroupElement::pair(GroupElement::free([0, 0]), GroupElement::Table(1))));
        assert_eq!(res.restrict(&up).unwrap(), h);
    }
}
