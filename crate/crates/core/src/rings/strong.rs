use super::{RingElem, SystematicRing, Window};
use crate::error::{Error, Result};
use crate::groups::GroupElement;

/// A decomposition `1 = Σ α_j β_j` with `α_j ∈ R_a` and `β_j ∈ R_{a⁻¹}`,
/// exhibiting `R_a` as a finitely generated projective `R_1`-module with
/// coordinate maps `ρ_j(r) = β_j r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualBasis {
    pub degree: GroupElement,
    pub pairs: Vec<(RingElem, RingElem)>,
}

impl DualBasis {
    /// `ρ_j(r) = β_j · r`, landing in `R_1` when `r ∈ R_a`.
    pub fn rho(&self, ring: &SystematicRing, j: usize, r: &RingElem) -> RingElem {
        ring.mul(&self.pairs[j].1, r)
    }

    /// `Σ_j α_j ρ_j(r)`.
    pub fn reconstruct(&self, ring: &SystematicRing, r: &RingElem) -> RingElem {
        (0..self.pairs.len()).fold(ring.zero(), |acc, j| {
            ring.add(&acc, &ring.mul(&self.pairs[j].0, &self.rho(ring, j, r)))
        })
    }

    /// Checks `Σ α_j β_j = 1` and the component memberships.
    pub fn verify(&self, ring: &SystematicRing) -> Result<()> {
        let inv = ring.group().invert(&self.degree)?;
        let mut sum = ring.zero();
        for (a, b) in &self.pairs {
            if !ring.member(a, &self.degree) || !ring.member(b, &inv) {
                return Err(Error::InvalidElement(format!("dual pair ({a}, {b}) has wrong degrees")));
            }
            sum = ring.add(&sum, &ring.mul(a, b));
        }
        if sum != ring.one() {
            return Err(Error::InvalidElement(format!("Σ α_j β_j = {sum}, not 1")));
        }
        Ok(())
    }
}

impl SystematicRing {
    /// Base coefficients expressing `1` through products `x·y` with
    /// `x ∈ gens(a)`, `y ∈ gens(b)`.
    fn unit_from_products(
        &self,
        a: &GroupElement,
        b: &GroupElement,
        window: &Window,
    ) -> Result<Option<Vec<(RingElem, RingElem, super::Coeff)>>> {
        let ga = self.gens(a, window)?;
        let gb = self.gens(b, window)?;
        let pairs: Vec<(RingElem, RingElem)> =
            ga.iter().flat_map(|x| gb.iter().map(move |y| (x.clone(), y.clone()))).collect();
        let prods: Vec<RingElem> = pairs.iter().map(|(x, y)| self.mul(x, y)).collect();
        Ok(self
            .span_solve(&prods, &self.one())
            .map(|c| pairs.into_iter().zip(c).map(|((x, y), c)| (x, y, c)).collect()))
    }

    /// Whether `1 ∈ R_{g⁻¹} R_g`.
    pub fn is_strongly_systematic_at(&self, g: &GroupElement, window: &Window) -> Result<bool> {
        let inv = self.group().invert(g)?;
        Ok(self.unit_from_products(&inv, g, window)?.is_some())
    }

    /// A dual basis for `R_a`, which needs `1 ∈ R_a R_{a⁻¹}`.
    pub fn dual_basis(&self, a: &GroupElement, window: &Window) -> Result<DualBasis> {
        let inv = self.group().invert(a)?;
        let sol = self
            .unit_from_products(a, &inv, window)?
            .ok_or_else(|| Error::NotStronglySystematic(inv.to_string()))?;
        let pairs = sol
            .into_iter()
            .filter(|(_, _, c)| !num_traits::Zero::is_zero(c))
            .map(|(x, y, c)| (self.scale(&c, &x), y))
            .collect();
        Ok(DualBasis { degree: a.clone(), pairs })
    }

    /// Whether every generator of `R_{gh}` lies in the span of
    /// `gens(g) · gens(h)`, i.e. `R_g R_h = R_{gh}` inside the window.
    pub fn products_fill_component(&self, g: &GroupElement, h: &GroupElement, window: &Window) -> Result<bool> {
        let gh = self.group().compose(g, h)?;
        let ga = self.gens(g, window)?;
        let gb = self.gens(h, window)?;
        let prods: Vec<RingElem> = ga.iter().flat_map(|x| gb.iter().map(move |y| self.mul(x, y))).collect();
        for t in self.gens(&gh, window)? {
            if self.span_solve(&prods, &t).is_none() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::GroupSpec;
    use crate::rings::{Base, Window};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn z(k: i64) -> GroupElement {
        GroupElement::free([k])
    }

    #[test]
    fn localization_is_strongly_systematic() {
        let r = SystematicRing::power_localization(2).unwrap();
        let w = Window::default();
        for k in -4..=4 {
            assert!(r.is_strongly_systematic_at(&z(k), &w).unwrap());
        }
        let d = r.dual_basis(&z(1), &w).unwrap();
        assert_eq!(d.pairs, vec![(r.fraction(2, 1).unwrap(), r.fraction(1, 2).unwrap())]);
        d.verify(&r).unwrap();
        let x = r.fraction(6, 1).unwrap();
        assert_eq!(d.rho(&r, 0, &x), r.fraction(3, 1).unwrap());
        assert_eq!(d.reconstruct(&r, &x), x);
    }

    #[test]
    fn graded_polynomials_are_not_strong() {
        let r = SystematicRing::monoid_ring(Base::Mod(2), GroupSpec::free_abelian(1), vec![vec![1]]).unwrap();
        let w = Window::default();
        assert!(!r.is_strongly_systematic_at(&z(1), &w).unwrap());
        assert!(r.is_strongly_systematic_at(&z(0), &w).unwrap());
        assert!(matches!(r.dual_basis(&z(1), &w), Err(Error::NotStronglySystematic(_))));
    }

    #[test]
    fn laurent_dual_basis_is_a_unit_pair() {
        let r = SystematicRing::laurent(Base::Mod(2), GroupSpec::free_abelian(1));
        let w = Window::default();
        let d = r.dual_basis(&z(1), &w).unwrap();
        let t = r.monomial(&z(1), crate::rings::int(1)).unwrap();
        let t_inv = r.monomial(&z(-1), crate::rings::int(1)).unwrap();
        assert_eq!(d.pairs, vec![(t, t_inv)]);
    }

    #[test]
    fn positive_filtration_is_not_strong_below_zero() {
        let r = SystematicRing::power_filtration(2).unwrap();
        let w = Window::default();
        assert!(!r.is_strongly_systematic_at(&z(1), &w).unwrap());
        assert!(r.gens(&z(-1), &w).unwrap().is_empty());
        assert!(r.member(&r.fraction(1, 4).unwrap(), &z(2)));
        assert!(r.member(&r.fraction(1, 4).unwrap(), &z(3)));
        assert!(!r.member(&r.fraction(1, 4).unwrap(), &z(1)));
    }

    proptest! {
        // 1 ∈ R_{g⁻¹}R_g everywhere iff R_g R_h = R_{gh} everywhere
        #[test]
        fn strong_equivalence(g in -3i64..=3, h in -3i64..=3, which in 0usize..4) {
            let w = Window::default();
            let rings = [
                SystematicRing::power_localization(2).unwrap(),
                SystematicRing::laurent(Base::Mod(2), GroupSpec::free_abelian(1)),
                SystematicRing::power_filtration(3).unwrap(),
                SystematicRing::monoid_ring(Base::Integers, GroupSpec::free_abelian(1), vec![vec![1]]).unwrap(),
            ];
            let r = &rings[which];
            let strong = (-3..=3).all(|k| r.is_strongly_systematic_at(&z(k), &w).unwrap());
            let fills = (-3..=3).all(|a| (-3..=3).all(|b| r.products_fill_component(&z(a), &z(b), &w).unwrap()));
            prop_assert_eq!(strong, fills);
            // SR2 closure on generators
            for x in r.gens(&z(g), &w).unwrap() {
                for y in r.gens(&z(h), &w).unwrap() {
                    prop_assert!(r.member(&r.mul(&x, &y), &z(g + h)));
                }
            }
            prop_assert!(r.member(&r.one(), &z(0)));
        }

        #[test]
        fn dual_basis_reconstructs(seed in 0u64..200, a in -3i64..=3) {
            let w = Window::default();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for r in [SystematicRing::power_localization(2).unwrap(), SystematicRing::laurent(Base::Integers, GroupSpec::free_abelian(1))] {
                let d = r.dual_basis(&z(a), &w).unwrap();
                d.verify(&r).unwrap();
                let x = r.sample_in(&z(a), &mut rng, &w).unwrap();
                prop_assert_eq!(d.reconstruct(&r, &x), x);
            }
        }
    }
}
