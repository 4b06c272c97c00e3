use super::{FreeSysModule, IdemMorphism, IdemObject, LtStructure, SysMorphism};
use crate::error::{Error, Result};
use crate::groups::GroupElement;
use crate::rings::{Matrix, RingElem};

/// Additive functors on free systematic modules that the idempotent
/// completion can be applied to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Functor {
    Identity,
    /// `M ↦ ⟨a⟩M`; matrices are unchanged.
    Shift(GroupElement),
    /// `T_k` for a fixed block structure.
    Block { k: usize, lt: LtStructure },
}

impl Functor {
    pub fn on_module(&self, a: &FreeSysModule) -> Result<FreeSysModule> {
        match self {
            Functor::Identity => Ok(a.clone()),
            Functor::Shift(g) => super::shift_module(g, a),
            Functor::Block { k, lt } => {
                if lt.total() != a.rank() {
                    return Err(Error::ShapeMismatch("block structure does not fit the module".into()));
                }
                if *k >= lt.blocks() {
                    return Err(Error::IndexOutOfRange { index: *k, len: lt.blocks() });
                }
                let (lo, hi) = lt.range(*k);
                Ok(a.slice(lo, hi))
            }
        }
    }

    pub fn on_morphism(&self, f: &SysMorphism) -> Result<SysMorphism> {
        match self {
            Functor::Identity => Ok(f.clone()),
            Functor::Shift(_) => f.rebase(self.on_module(f.source())?, self.on_module(f.target())?),
            Functor::Block { k, lt } => {
                lt.check(lt, f)?;
                let (lo, hi) = lt.range(*k);
                Ok(f.block(lo, hi, lo, hi))
            }
        }
    }

    /// Samples `Φ(f + g) = Φ(f) + Φ(g)`.
    pub fn check_additive(&self, pairs: &[(SysMorphism, SysMorphism)]) -> Result<()> {
        for (f, g) in pairs {
            let lhs = self.on_morphism(&f.add(g)?)?;
            let rhs = self.on_morphism(f)?.add(&self.on_morphism(g)?)?;
            if lhs != rhs {
                return Err(Error::NonAdditiveFunctor(format!("{self:?} fails on a sampled sum")));
            }
        }
        Ok(())
    }
}

/// `Φ̂(A, p) = (Φ(A), Φ(p))`.
pub fn idem_functor_apply(phi: &Functor, x: &IdemObject) -> Result<IdemObject> {
    IdemObject::new(phi.on_morphism(x.idempotent())?)
}

/// `Φ̂(f)` on a morphism of the idempotent completion.
pub fn idem_functor_morphism(phi: &Functor, f: &IdemMorphism) -> Result<IdemMorphism> {
    IdemMorphism::new(
        idem_functor_apply(phi, f.source())?,
        idem_functor_apply(phi, f.target())?,
        phi.on_morphism(f.map())?,
    )
}

/// A natural transformation `Φ ⇒ Ψ` whose components are `c · I` for a
/// homogeneous central element `c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transform {
    pub source: Functor,
    pub target: Functor,
    pub scalar: RingElem,
}

impl Transform {
    /// `τ_A: Φ(A) → Ψ(A)`.
    pub fn component(&self, a: &FreeSysModule) -> Result<SysMorphism> {
        let src = self.source.on_module(a)?;
        let tgt = self.target.on_module(a)?;
        if src.rank() != tgt.rank() {
            return Err(Error::ShapeMismatch("scalar transformation between different ranks".into()));
        }
        let ring = a.ring();
        let m = Matrix::from_fn(tgt.rank(), src.rank(), |i, j| if i == j { self.scalar.clone() } else { ring.zero() });
        SysMorphism::new(src, tgt, m)
    }
}

/// `τ̂_(A,p) = Ψ(p) ∘ τ_A : Φ̂(A, p) → Ψ̂(A, p)`.
pub fn idem_nat_transform(tau: &Transform, x: &IdemObject) -> Result<IdemMorphism> {
    let psi_p = tau.target.on_morphism(x.idempotent())?;
    let f = psi_p.compose(&tau.component(x.carrier())?)?;
    IdemMorphism::new(idem_functor_apply(&tau.source, x)?, idem_functor_apply(&tau.target, x)?, f)
}

#[cfg(test)]
mod tests {
    use super::super::random::{random_lt_idempotent, random_lt_morphism};
    use super::super::tests::z;
    use super::super::{idem_split_lt, WitnessMode};
    use super::*;
    use crate::groups::GroupSpec;
    use crate::rings::{int, Base, SystematicRing, Window};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    #[test]
    fn identity_transform_gives_the_idempotent() {
        let r = super::super::tests::f2t();
        let w = Window::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (x, _) = random_lt_idempotent(&r, &[vec![z(1)], vec![z(0), z(0)]], WitnessMode::General, &mut rng, &w).unwrap();
        let id = Transform { source: Functor::Identity, target: Functor::Identity, scalar: r.one() };
        assert_eq!(idem_nat_transform(&id, &x).unwrap().map(), x.idempotent());
    }

    #[test]
    fn shift_commutes_with_splitting_and_is_invertible() {
        let r = Arc::new(SystematicRing::laurent(Base::Mod(2), GroupSpec::free_abelian(1)));
        let w = Window::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = z(3);
        let shift = Functor::Shift(a.clone());
        let fwd = Transform {
            source: Functor::Identity,
            target: shift.clone(),
            scalar: r.monomial(&z(-3), int(1)).unwrap(),
        };
        let back = Transform { source: shift.clone(), target: Functor::Identity, scalar: r.monomial(&a, int(1)).unwrap() };
        for _ in 0..20 {
            let blocks = [vec![z(2); 2], vec![z(0)]];
            let (x, lt) = random_lt_idempotent(&r, &blocks, WitnessMode::General, &mut rng, &w).unwrap();
            let (y, lty) = random_lt_idempotent(&r, &blocks, WitnessMode::General, &mut rng, &w).unwrap();
            let sx = idem_functor_apply(&shift, &x).unwrap();
            let split_then_shift = idem_split_lt(&x, &lt).unwrap();
            let shift_then_split = idem_split_lt(&sx, &lt).unwrap();
            assert_eq!(shift_then_split.rho.matrix(), split_then_shift.rho.matrix());
            assert_eq!(shift_then_split.m.matrix(), split_then_shift.m.matrix());
            // τ̂ is natural and (τ⁻¹)̂ ∘ τ̂ = id
            let t = idem_nat_transform(&fwd, &x).unwrap();
            let t_inv = idem_nat_transform(&back, &x).unwrap();
            assert_eq!(t_inv.compose(&t).unwrap().map(), x.idempotent());
            let f = random_lt_morphism(&x, &lt, &y, &lty, WitnessMode::General, &mut rng, &w).unwrap();
            let ty = idem_nat_transform(&fwd, &y).unwrap();
            let lhs = idem_functor_morphism(&shift, &f).unwrap().compose(&t).unwrap();
            let rhs = ty.compose(&f).unwrap();
            assert_eq!(lhs.map(), rhs.map());
            shift.check_additive(&[(f.map().clone(), f.map().clone())]).unwrap();
        }
    }

    #[test]
    fn block_functor_matches_lt_functors() {
        let r = super::super::tests::f2t();
        let w = Window::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (x, lt) = random_lt_idempotent(&r, &[vec![z(2)], vec![z(1); 2], vec![z(0)]], WitnessMode::General, &mut rng, &w).unwrap();
        for k in 0..3 {
            let phi = Functor::Block { k, lt: lt.clone() };
            assert_eq!(idem_functor_apply(&phi, &x).unwrap(), super::super::lt_functors(&x, &lt, k).unwrap());
        }
    }
}
