//! Finitely generated systematically free modules and their morphisms,
//! the idempotent completion, lower triangular splitting, functor
//! descriptors and tensor extension.
//!
//! A free module `⊕_i ⟨g_i⟩R` is recorded by its generator degrees. A
//! morphism into `⊕_i ⟨g_i⟩R` from `⊕_j ⟨g'_j⟩R` is a matrix `(f_ij)` with
//! `f_ij ∈ R_{g_i⁻¹ g'_j}`, acting on columns of coordinates from the left.

mod functor;
mod idem;
mod lt;
pub mod random;
mod tensor;

pub use functor::{idem_functor_apply, idem_functor_morphism, idem_nat_transform, Functor, Transform};
pub use idem::{IdemMorphism, IdemObject};
pub use lt::{
    epsilon, idem_split_lt, lt_functor_morphism, lt_functors, naturality_check_ses, rho_is_natural, rho_not_natural_witness,
    split_lt_recursive, LtStructure, RhoWitness, SplitData, WitnessMode,
};
pub use tensor::{nu_tau, tensor_extend, CokernelShape, NuTau, PresentedModule, Scope, Tensor};

use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::groups::GroupElement;
use crate::rings::{Coeff, Matrix, RingElem, SystematicRing, Window};

/// `⊕_i ⟨g_i⟩R`: the generator of `⟨g⟩R` sits in degree `g`.
#[derive(Clone, Debug)]
pub struct FreeSysModule {
    ring: Arc<SystematicRing>,
    degrees: Vec<GroupElement>,
}

impl PartialEq for FreeSysModule {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring) && self.degrees == other.degrees
    }
}

impl Eq for FreeSysModule {}

impl FreeSysModule {
    pub fn new(ring: Arc<SystematicRing>, degrees: Vec<GroupElement>) -> Result<Self> {
        if let Some(g) = degrees.iter().find(|g| !ring.group().contains(g)) {
            return Err(Error::SpecMismatch(format!("degree {g} is not in {}", ring.group().describe())));
        }
        Ok(FreeSysModule { ring, degrees })
    }

    pub fn zero(ring: Arc<SystematicRing>) -> Self {
        FreeSysModule { ring, degrees: Vec::new() }
    }

    pub fn ring(&self) -> &SystematicRing {
        &self.ring
    }

    pub fn ring_arc(&self) -> &Arc<SystematicRing> {
        &self.ring
    }

    pub fn degrees(&self) -> &[GroupElement] {
        &self.degrees
    }

    pub fn rank(&self) -> usize {
        self.degrees.len()
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut degrees = self.degrees.clone();
        degrees.extend(other.degrees.iter().cloned());
        FreeSysModule { ring: self.ring.clone(), degrees }
    }

    /// Generators `lo..hi`.
    pub fn slice(&self, lo: usize, hi: usize) -> Self {
        FreeSysModule { ring: self.ring.clone(), degrees: self.degrees[lo..hi].to_vec() }
    }
}

/// `⟨a⟩M`: generator degrees `a · g_i`.
pub fn shift_module(a: &GroupElement, m: &FreeSysModule) -> Result<FreeSysModule> {
    let g = m.ring.group();
    let degrees = m.degrees.iter().map(|d| g.compose(a, d)).collect::<Result<Vec<_>>>()?;
    Ok(FreeSysModule { ring: m.ring.clone(), degrees })
}

/// A degree-constraint failure: entry `(row, col)` must lie in `R_required`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub row: usize,
    pub col: usize,
    pub required: GroupElement,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SysMorphism {
    source: FreeSysModule,
    target: FreeSysModule,
    matrix: Matrix<RingElem>,
}

impl SysMorphism {
    pub fn new(source: FreeSysModule, target: FreeSysModule, matrix: Matrix<RingElem>) -> Result<Self> {
        let f = SysMorphism::unchecked(source, target, matrix)?;
        let bad = morphism_validate(&f);
        if let Some(v) = bad.first() {
            return Err(Error::InvalidMorphism(format!(
                "{} entries violate degrees, first at ({}, {}) needing R_{}",
                bad.len(),
                v.row,
                v.col,
                v.required
            )));
        }
        Ok(f)
    }

    /// Checks shapes and ring membership of entries but not degrees.
    pub fn unchecked(source: FreeSysModule, target: FreeSysModule, matrix: Matrix<RingElem>) -> Result<Self> {
        if matrix.rows() != target.rank() || matrix.cols() != source.rank() {
            return Err(Error::ShapeMismatch(format!(
                "matrix {}x{} for a map of rank {} -> {}",
                matrix.rows(),
                matrix.cols(),
                source.rank(),
                target.rank()
            )));
        }
        if source.ring != target.ring && *source.ring != *target.ring {
            return Err(Error::SpecMismatch("source and target over different rings".into()));
        }
        for (_, _, x) in matrix.entries() {
            source.ring.validate(x)?;
        }
        Ok(SysMorphism { source, target, matrix })
    }

    pub fn zero(source: FreeSysModule, target: FreeSysModule) -> Self {
        let matrix = Matrix::zeros(&*source.ring, target.rank(), source.rank());
        SysMorphism { source, target, matrix }
    }

    pub fn identity(m: &FreeSysModule) -> Self {
        SysMorphism { source: m.clone(), target: m.clone(), matrix: Matrix::identity(&*m.ring, m.rank()) }
    }

    pub fn source(&self) -> &FreeSysModule {
        &self.source
    }

    pub fn target(&self) -> &FreeSysModule {
        &self.target
    }

    pub fn matrix(&self) -> &Matrix<RingElem> {
        &self.matrix
    }

    pub fn ring(&self) -> &SystematicRing {
        &self.source.ring
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &SysMorphism) -> Result<SysMorphism> {
        if other.target != self.source {
            return Err(Error::ShapeMismatch("composition of non-composable morphisms".into()));
        }
        Ok(SysMorphism {
            source: other.source.clone(),
            target: self.target.clone(),
            matrix: self.matrix.mul(self.ring(), &other.matrix)?,
        })
    }

    pub fn add(&self, other: &SysMorphism) -> Result<SysMorphism> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::ShapeMismatch("sum of morphisms with different ends".into()));
        }
        Ok(SysMorphism {
            source: self.source.clone(),
            target: self.target.clone(),
            matrix: self.matrix.add(self.ring(), &other.matrix)?,
        })
    }

    pub fn neg(&self) -> SysMorphism {
        SysMorphism { source: self.source.clone(), target: self.target.clone(), matrix: self.matrix.neg(self.ring()) }
    }

    pub fn sub(&self, other: &SysMorphism) -> Result<SysMorphism> {
        self.add(&other.neg())
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero(self.ring())
    }

    pub fn direct_sum(&self, other: &SysMorphism) -> SysMorphism {
        SysMorphism {
            source: self.source.direct_sum(&other.source),
            target: self.target.direct_sum(&other.target),
            matrix: self.matrix.direct_sum(self.ring(), &other.matrix),
        }
    }

    /// Target generators `r0..r1` against source generators `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> SysMorphism {
        SysMorphism {
            source: self.source.slice(c0, c1),
            target: self.target.slice(r0, r1),
            matrix: self.matrix.block(r0, r1, c0, c1),
        }
    }

    /// The same matrix between re-based source and target.
    pub fn rebase(&self, source: FreeSysModule, target: FreeSysModule) -> Result<SysMorphism> {
        SysMorphism::new(source, target, self.matrix.clone())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "source": self.source.degrees.iter().map(|g| g.to_json()).collect::<Vec<_>>(),
            "target": self.target.degrees.iter().map(|g| g.to_json()).collect::<Vec<_>>(),
            "matrix": self.matrix.to_rows().iter().map(|r| r.iter().map(|x| x.to_json()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

/// All entries violating `f_ij ∈ R_{g_i⁻¹ g'_j}`.
pub fn morphism_validate(f: &SysMorphism) -> Vec<Violation> {
    let g = f.ring().group();
    let mut out = Vec::new();
    for (i, j, x) in f.matrix.entries() {
        if x.is_zero() {
            continue;
        }
        let required = g.left_divide(&f.target.degrees[i], &f.source.degrees[j]).expect("degrees checked");
        if !f.ring().member(x, &required) {
            out.push(Violation { row: i, col: j, required });
        }
    }
    out
}

/// Additive generators of `Hom(⟨g_src⟩R, ⟨g_tgt⟩R) ≅ R_{g_tgt⁻¹ g_src}`.
pub fn hom_component_basis(
    ring: &SystematicRing,
    g_src: &GroupElement,
    g_tgt: &GroupElement,
    window: &Window,
) -> Result<Vec<RingElem>> {
    ring.gens(&ring.group().left_divide(g_tgt, g_src)?, window)
}

/// The map induced by `f` on degree-`c` components, as a matrix over the base
/// ring in the bases `gens(g_j⁻¹ c)` (source) and `gens(g_i⁻¹ c)` (target).
/// Rows index target basis vectors, columns source basis vectors.
pub fn component_matrix(f: &SysMorphism, c: &GroupElement, window: &Window) -> Result<Vec<Vec<Coeff>>> {
    let ring = f.ring();
    let g = ring.group();
    let src: Vec<Vec<RingElem>> = f
        .source
        .degrees
        .iter()
        .map(|d| ring.gens(&g.left_divide(d, c)?, window))
        .collect::<Result<_>>()?;
    let tgt: Vec<Vec<RingElem>> = f
        .target
        .degrees
        .iter()
        .map(|d| ring.gens(&g.left_divide(d, c)?, window))
        .collect::<Result<_>>()?;
    let n_tgt: usize = tgt.iter().map(Vec::len).sum();
    let n_src: usize = src.iter().map(Vec::len).sum();
    let mut m = vec![vec![Coeff::from_integer(0); n_src]; n_tgt];
    let mut col = 0;
    for (j, basis) in src.iter().enumerate() {
        for b in basis {
            let mut row = 0;
            for (i, tb) in tgt.iter().enumerate() {
                let image = ring.mul(f.matrix.get(i, j), b);
                let coords = ring.span_solve(tb, &image).ok_or_else(|| {
                    Error::InvalidMorphism(format!("image {image} escapes the component at {c}"))
                })?;
                for (k, x) in coords.into_iter().enumerate() {
                    let cur = m[row + k][col];
                    m[row + k][col] = ring.base().add(&cur, &x);
                }
                row += tb.len();
            }
            col += 1;
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::GroupSpec;
    use crate::rings::{int, Base};

    pub(crate) fn f2t() -> Arc<SystematicRing> {
        Arc::new(SystematicRing::monoid_ring(Base::Mod(2), GroupSpec::free_abelian(1), vec![vec![1]]).unwrap())
    }

    pub(crate) fn z(k: i64) -> GroupElement {
        GroupElement::free([k])
    }

    #[test]
    fn shifting_degrees() {
        let r = f2t();
        let m = FreeSysModule::new(r.clone(), vec![z(0), z(1)]).unwrap();
        assert_eq!(shift_module(&z(2), &m).unwrap().degrees(), &[z(2), z(3)]);
        assert_eq!(shift_module(&z(0), &m).unwrap(), m);
        let twice = shift_module(&z(-1), &shift_module(&z(3), &m).unwrap()).unwrap();
        assert_eq!(twice, shift_module(&z(2), &m).unwrap());
    }

    #[test]
    fn degree_constraints() {
        let r = f2t();
        let t2 = r.monomial(&z(2), int(1)).unwrap();
        let t = r.monomial(&z(1), int(1)).unwrap();
        let m2 = FreeSysModule::new(r.clone(), vec![z(2)]).unwrap();
        let m0 = FreeSysModule::new(r.clone(), vec![z(0)]).unwrap();
        let ok = SysMorphism::unchecked(m2.clone(), m0.clone(), Matrix::from_rows(vec![vec![t2]], 1).unwrap()).unwrap();
        assert!(morphism_validate(&ok).is_empty());
        let bad = SysMorphism::unchecked(m0.clone(), m2.clone(), Matrix::from_rows(vec![vec![t]], 1).unwrap()).unwrap();
        assert_eq!(morphism_validate(&bad), vec![Violation { row: 0, col: 0, required: z(-2) }]);
        assert!(morphism_validate(&SysMorphism::zero(m0, m2)).is_empty());
    }

    #[test]
    fn hom_components() {
        let r = f2t();
        let w = Window::default();
        assert_eq!(hom_component_basis(&r, &z(2), &z(0), &w).unwrap(), vec![r.monomial(&z(2), int(1)).unwrap()]);
        assert!(hom_component_basis(&r, &z(0), &z(2), &w).unwrap().is_empty());
        let lr = SystematicRing::laurent(Base::Mod(2), GroupSpec::free_abelian(1));
        for (a, b) in [(0, 2), (3, -1), (-2, -2)] {
            assert_eq!(hom_component_basis(&lr, &z(a), &z(b), &w).unwrap().len(), 1);
        }
    }

    #[test]
    fn doubling_on_the_degree_zero_component() {
        let k = Arc::new(SystematicRing::power_localization(2).unwrap());
        let m = FreeSysModule::new(k.clone(), vec![z(0)]).unwrap();
        let two = Matrix::from_rows(vec![vec![k.fraction(2, 1).unwrap()]], 1).unwrap();
        let f = SysMorphism::new(m.clone(), m, two).unwrap();
        let c = component_matrix(&f, &z(0), &Window::default()).unwrap();
        assert_eq!(c, vec![vec![int(2)]]);
    }
}
