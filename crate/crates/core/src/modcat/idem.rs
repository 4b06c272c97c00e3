use super::{FreeSysModule, SysMorphism};
use crate::error::{Error, Result};

/// An object `(A, p)` of the idempotent completion: `p² = p` on `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdemObject {
    p: SysMorphism,
}

impl IdemObject {
    pub fn new(p: SysMorphism) -> Result<Self> {
        if p.source() != p.target() {
            return Err(Error::ShapeMismatch("idempotent must be an endomorphism".into()));
        }
        if p.compose(&p)? != p {
            return Err(Error::NotIdempotent);
        }
        Ok(IdemObject { p })
    }

    /// `(A, id_A)`.
    pub fn free(a: &FreeSysModule) -> Self {
        IdemObject { p: SysMorphism::identity(a) }
    }

    pub fn carrier(&self) -> &FreeSysModule {
        self.p.source()
    }

    pub fn idempotent(&self) -> &SysMorphism {
        &self.p
    }

    /// `id_(A,p) = p`.
    pub fn identity(&self) -> IdemMorphism {
        IdemMorphism { source: self.clone(), target: self.clone(), f: self.p.clone() }
    }

    pub fn direct_sum(&self, other: &IdemObject) -> IdemObject {
        IdemObject { p: self.p.direct_sum(&other.p) }
    }
}

/// A morphism `f: (A, p) → (B, q)` with `q f p = f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdemMorphism {
    source: IdemObject,
    target: IdemObject,
    f: SysMorphism,
}

impl IdemMorphism {
    pub fn new(source: IdemObject, target: IdemObject, f: SysMorphism) -> Result<Self> {
        if f.source() != source.carrier() || f.target() != target.carrier() {
            return Err(Error::ShapeMismatch("morphism ends differ from object carriers".into()));
        }
        let qfp = target.p.compose(&f)?.compose(&source.p)?;
        if qfp != f {
            return Err(Error::InvalidMorphism("q f p differs from f".into()));
        }
        Ok(IdemMorphism { source, target, f })
    }

    pub fn source(&self) -> &IdemObject {
        &self.source
    }

    pub fn target(&self) -> &IdemObject {
        &self.target
    }

    pub fn map(&self) -> &SysMorphism {
        &self.f
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &IdemMorphism) -> Result<IdemMorphism> {
        if other.target != self.source {
            return Err(Error::ShapeMismatch("composition of non-composable morphisms".into()));
        }
        Ok(IdemMorphism { source: other.source.clone(), target: self.target.clone(), f: self.f.compose(&other.f)? })
    }

    pub fn add(&self, other: &IdemMorphism) -> Result<IdemMorphism> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::ShapeMismatch("sum of morphisms with different ends".into()));
        }
        Ok(IdemMorphism { source: self.source.clone(), target: self.target.clone(), f: self.f.add(&other.f)? })
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::{f2t, z};
    use super::*;
    use crate::rings::{int, Matrix};

    #[test]
    fn identity_is_the_idempotent() {
        let r = f2t();
        let a = FreeSysModule::new(r.clone(), vec![z(1), z(0)]).unwrap();
        let one = r.one();
        let zero = r.zero();
        let p = SysMorphism::new(
            a.clone(),
            a.clone(),
            Matrix::from_rows(vec![vec![one.clone(), zero.clone()], vec![zero.clone(), zero.clone()]], 2).unwrap(),
        )
        .unwrap();
        let x = IdemObject::new(p.clone()).unwrap();
        assert_eq!(x.identity().map(), &p);
        // an idempotent with a nonzero off-diagonal entry
        let t = r.monomial(&z(1), int(1)).unwrap();
        let n = SysMorphism::new(
            a.clone(),
            a.clone(),
            Matrix::from_rows(vec![vec![zero.clone(), zero.clone()], vec![t.clone(), one.clone()]], 2).unwrap(),
        )
        .unwrap();
        assert!(IdemObject::new(n.clone()).is_ok());
        // [[1,0],[t,1]] squares to the identity mod 2
        let sq = SysMorphism::new(
            a.clone(),
            a.clone(),
            Matrix::from_rows(vec![vec![one.clone(), zero.clone()], vec![t, one]], 2).unwrap(),
        )
        .unwrap();
        assert_eq!(IdemObject::new(sq), Err(Error::NotIdempotent));
        // f violating qfp = f is rejected
        let id = IdemObject::free(&a);
        assert!(IdemMorphism::new(x.clone(), id.clone(), SysMorphism::identity(&a)).is_err());
        assert!(IdemMorphism::new(x.clone(), id, p).is_ok());
    }
}
