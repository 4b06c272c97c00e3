use std::sync::Arc;

use num_integer::Integer;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::groups::GroupElement;
use crate::linalg::{prime_factors, smith};
use crate::rings::{Base, Coeff, DualBasis, LocalizationRule, Matrix, RingElem, SystematicRing, Window};

/// Where the entries of a presentation are read.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scope {
    /// Over `K₁`, the identity-degree component.
    DegreeOne,
    /// Over the whole ring `K`.
    Whole,
}

/// The cokernel of an `m × n` matrix, `coker(P: Xⁿ → Xᵐ)`, with `X` either
/// `K₁` or `K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresentedModule {
    ring: Arc<SystematicRing>,
    matrix: Matrix<RingElem>,
    scope: Scope,
}

/// Shape of a cokernel: `⊕ X/(d) ⊕ X^free`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CokernelShape {
    pub torsion: Vec<i128>,
    pub free: usize,
}

impl CokernelShape {
    pub fn is_zero(&self) -> bool {
        self.torsion.is_empty() && self.free == 0
    }
}

impl PresentedModule {
    /// A module over `K₁`; every entry must lie in `K₁`.
    pub fn new(ring: Arc<SystematicRing>, matrix: Matrix<RingElem>) -> Result<Self> {
        let e = ring.group().identity();
        for (_, _, x) in matrix.entries() {
            ring.validate(x)?;
            if !ring.member(x, &e) {
                return Err(Error::InvalidElement(format!("{x} is not in the identity component")));
            }
        }
        Ok(PresentedModule { ring, matrix, scope: Scope::DegreeOne })
    }

    /// `K₁^m` itself.
    pub fn free(ring: Arc<SystematicRing>, m: usize) -> Self {
        let matrix = Matrix::zeros(&*ring, m, 0);
        PresentedModule { ring, matrix, scope: Scope::DegreeOne }
    }

    pub fn scope(&self) -> Scope {
        self.scope
    }

    pub fn matrix(&self) -> &Matrix<RingElem> {
        &self.matrix
    }

    /// The presentation as an integer matrix (for `ℤ/n` bases, with `n·I`
    /// appended) together with the test for unit invariant factors.
    fn integer_presentation(&self) -> Result<(Vec<Vec<i128>>, usize, Box<dyn Fn(i128) -> bool>)> {
        let m = self.matrix.rows();
        let n = self.matrix.cols();
        let e = self.ring.group().identity();
        let mut cols: Vec<Vec<Coeff>> = Vec::with_capacity(n);
        for j in 0..n {
            let col: Vec<Coeff> = (0..m)
                .map(|i| {
                    let x = self.matrix.get(i, j);
                    match x {
                        RingElem::Fraction(c) => Ok(*c),
                        RingElem::Terms(_) if x.support().iter().all(|g| **g == e) => Ok(x.coefficient(&e)),
                        _ => Err(Error::InvalidSpec(format!("cokernel test needs constant entries, got {x}"))),
                    }
                })
                .collect::<Result<_>>()?;
            cols.push(col);
        }
        let localization = self.ring.localization();
        // Column scaling by a denominator is invertible wherever the entry lives.
        if let (Scope::DegreeOne, Some(_)) = (self.scope, localization) {
            if cols.iter().flatten().any(|c| !c.is_integer()) {
                return Err(Error::InvalidElement("entry outside the identity component".into()));
            }
        }
        let mut int_cols: Vec<Vec<i128>> = cols
            .iter()
            .map(|col| {
                let den = col.iter().fold(1i128, |acc, c| acc.lcm(c.denom()));
                col.iter().map(|c| (c * Coeff::from_integer(den)).to_integer()).collect()
            })
            .collect();
        let base = self.ring.base();
        let unit: Box<dyn Fn(i128) -> bool> = match (self.scope, localization, base) {
            (Scope::Whole, Some((s, LocalizationRule::Powers)), _) => {
                let primes = prime_factors(s.unsigned_abs());
                Box::new(move |d: i128| {
                    let mut d = d.abs();
                    for &p in &primes {
                        while d % p as i128 == 0 {
                            d /= p as i128;
                        }
                    }
                    d == 1
                })
            }
            (_, _, Base::Rationals) => Box::new(|d: i128| d != 0),
            (_, _, Base::Mod(q)) => {
                for i in 0..m {
                    int_cols.push((0..m).map(|k| if k == i { q as i128 } else { 0 }).collect());
                }
                Box::new(|d: i128| d.abs() == 1)
            }
            _ => Box::new(|d: i128| d.abs() == 1),
        };
        let rows: Vec<Vec<i128>> = (0..m).map(|i| int_cols.iter().map(|c| c[i]).collect()).collect();
        Ok((rows, int_cols.len(), unit))
    }

    /// Invariant factors of the cokernel; those that are units are dropped.
    /// Supported for constant entries, and for any entries over `ℤ[1/s]`.
    pub fn cokernel(&self) -> Result<CokernelShape> {
        let m = self.matrix.rows();
        let (rows, n, unit) = self.integer_presentation()?;
        let snf = smith(&rows, n);
        let modulus = self.ring.base().modulus();
        let mut torsion = Vec::new();
        let mut free = m - snf.rank;
        for &d in &snf.diag {
            if unit(d) {
                continue;
            }
            match modulus {
                Some(q) if d % q == 0 => free += 1,
                _ => torsion.push(d),
            }
        }
        Ok(CokernelShape { torsion, free })
    }

    pub fn cokernel_is_zero(&self) -> Result<bool> {
        Ok(self.cokernel()?.is_zero())
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = (0..self.matrix.rows())
            .map(|i| Value::Array(self.matrix.row(i).iter().map(RingElem::to_json).collect()))
            .collect();
        json!({ "scope": format!("{:?}", self.scope), "matrix": rows })
    }
}

/// `L ⊗_{K₁} K`: the same matrix read over `K`.
pub fn tensor_extend(l: &PresentedModule, k: &Arc<SystematicRing>) -> Result<PresentedModule> {
    if l.scope != Scope::DegreeOne {
        return Err(Error::InvalidSpec("tensor_extend expects a module over the identity component".into()));
    }
    if l.ring != *k {
        return Err(Error::SpecMismatch("presentation belongs to a different ring".into()));
    }
    Ok(PresentedModule { ring: k.clone(), matrix: l.matrix.clone(), scope: Scope::Whole })
}

/// An element `Σ u_k ⊗ c_k` of `K_{a⁻¹} ⊗_{K₁} K`, stored by the coefficients
/// `c_k` against a fixed basis `u` of `K_{a⁻¹}` over `K₁`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tensor {
    pub parts: Vec<RingElem>,
}

/// The isomorphism `ν: K_{a⁻¹} ⊗_{K₁} K → ⟨a⟩K` and its inverse `τ`.
#[derive(Clone, Debug)]
pub struct NuTau {
    ring: Arc<SystematicRing>,
    shift: GroupElement,
    basis: Vec<RingElem>,
    dual: DualBasis,
    window: Window,
}

/// Builds `ν` and `τ` for the shift `⟨a⟩K`. Needs `K₁ = B·1` and
/// `1 ∈ K_{a⁻¹} K_a`.
pub fn nu_tau(ring: &Arc<SystematicRing>, a: &GroupElement, window: &Window) -> Result<NuTau> {
    let g = ring.group();
    if ring.gens(&g.identity(), window)? != vec![ring.one()] {
        return Err(Error::InvalidSpec("tensor normal form needs the identity component to be the base".into()));
    }
    let a_inv = g.invert(a)?;
    let dual = ring.dual_basis(&a_inv, window)?;
    let basis = ring.gens(&a_inv, window)?;
    Ok(NuTau { ring: ring.clone(), shift: a.clone(), basis, dual, window: *window })
}

impl NuTau {
    pub fn shift(&self) -> &GroupElement {
        &self.shift
    }

    pub fn dual_basis(&self) -> &DualBasis {
        &self.dual
    }

    pub fn zero(&self) -> Tensor {
        Tensor { parts: vec![self.ring.zero(); self.basis.len()] }
    }

    pub fn add(&self, x: &Tensor, y: &Tensor) -> Tensor {
        Tensor { parts: x.parts.iter().zip(&y.parts).map(|(p, q)| self.ring.add(p, q)).collect() }
    }

    /// `s ⊗ r` for `s ∈ K_{a⁻¹}`.
    pub fn pure(&self, s: &RingElem, r: &RingElem) -> Result<Tensor> {
        let outside = || Error::InvalidElement(format!("{s} is not in the left tensor factor"));
        if !s.is_zero() && !self.ring.member(s, &self.ring.group().invert(&self.shift)?) {
            return Err(outside());
        }
        let coords = self.ring.span_solve(&self.basis, s).ok_or_else(outside)?;
        Ok(Tensor { parts: coords.iter().map(|b| self.ring.scale(b, r)).collect() })
    }

    /// `ν(Σ u_k ⊗ c_k) = Σ u_k c_k`.
    pub fn nu(&self, t: &Tensor) -> RingElem {
        self.basis.iter().zip(&t.parts).fold(self.ring.zero(), |acc, (u, c)| self.ring.add(&acc, &self.ring.mul(u, c)))
    }

    /// `τ(x) = Σ α_j ⊗ β_j x`.
    pub fn tau(&self, x: &RingElem) -> Result<Tensor> {
        let mut out = self.zero();
        for (alpha, beta) in &self.dual.pairs {
            out = self.add(&out, &self.pure(alpha, &self.ring.mul(beta, x))?);
        }
        Ok(out)
    }

    /// Whether `t` lies in the degree `g` component, i.e. every `c_k ∈ K_g`.
    pub fn tensor_in_degree(&self, t: &Tensor, g: &GroupElement) -> bool {
        t.parts.iter().all(|c| c.is_zero() || self.ring.member(c, g))
    }

    /// Checks `ν∘τ = id` on `xs` and `τ∘ν = id` on `ts`, plus that `τ`
    /// preserves degrees on homogeneous samples.
    pub fn verify(&self, xs: &[(GroupElement, RingElem)], ts: &[Tensor]) -> Result<bool> {
        let g = self.ring.group();
        for (deg, x) in xs {
            let t = self.tau(x)?;
            if self.nu(&t) != *x {
                return Ok(false);
            }
            // x ∈ (⟨a⟩K)_deg = K_{a⁻¹ deg}
            let inner = g.left_divide(&self.shift, deg)?;
            if self.ring.member(x, &inner) && !self.tensor_in_degree(&t, deg) {
                return Ok(false);
            }
        }
        for t in ts {
            if self.tau(&self.nu(t))? != *t {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn window(&self) -> &Window {
        &self.window
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::z;
    use super::*;
    use crate::groups::GroupSpec;
    use crate::rings::int;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_becomes_invertible_over_z_half() {
        let k = Arc::new(SystematicRing::power_localization(2).unwrap());
        let two = k.fraction(2, 1).unwrap();
        let l = PresentedModule::new(k.clone(), Matrix::from_rows(vec![vec![two]], 1).unwrap()).unwrap();
        assert_eq!(l.cokernel().unwrap(), CokernelShape { torsion: vec![2], free: 0 });
        let ext = tensor_extend(&l, &k).unwrap();
        assert!(ext.cokernel_is_zero().unwrap());
        // 3 stays a non-unit
        let three = k.fraction(3, 1).unwrap();
        let l3 = PresentedModule::new(k.clone(), Matrix::from_rows(vec![vec![three]], 1).unwrap()).unwrap();
        assert!(!tensor_extend(&l3, &k).unwrap().cokernel_is_zero().unwrap());
        // entries must lie in K₁ = ℤ
        let half = k.fraction(1, 2).unwrap();
        assert!(PresentedModule::new(k.clone(), Matrix::from_rows(vec![vec![half]], 1).unwrap()).is_err());
    }

    #[test]
    fn free_module_extends_to_free() {
        for k in [
            Arc::new(SystematicRing::power_localization(3).unwrap()),
            Arc::new(SystematicRing::laurent(Base::Mod(2), GroupSpec::free_abelian(1))),
            Arc::new(SystematicRing::laurent(Base::Rationals, GroupSpec::free_abelian(2))),
        ] {
            let l = PresentedModule::free(k.clone(), 1);
            let shape = tensor_extend(&l, &k).unwrap().cokernel().unwrap();
            assert_eq!(shape, CokernelShape { torsion: vec![], free: 1 });
        }
        let k = Arc::new(SystematicRing::laurent(Base::Mod(4), GroupSpec::free_abelian(1)));
        let two = k.scalar(int(2));
        let l = PresentedModule::new(k.clone(), Matrix::from_rows(vec![vec![two], vec![k.zero()]], 1).unwrap()).unwrap();
        assert_eq!(l.cokernel().unwrap(), CokernelShape { torsion: vec![2], free: 1 });
    }

    #[test]
    fn nu_tau_on_a_laurent_shift() {
        let k = Arc::new(SystematicRing::laurent(Base::Mod(2), GroupSpec::free_abelian(1)));
        let w = Window::default();
        let nt = nu_tau(&k, &z(3), &w).unwrap();
        assert_eq!(nt.dual_basis().pairs.len(), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut xs = Vec::new();
        let mut ts = Vec::new();
        for i in 0..50 {
            let deg = z(i % 7 - 3);
            let inner = k.group().left_divide(&z(3), &deg).unwrap();
            let x = k.sample_in(&inner, &mut rng, &w).unwrap();
            xs.push((deg.clone(), x.clone()));
            let s = k.sample_in(&z(-3), &mut rng, &w).unwrap();
            ts.push(nt.pure(&s, &x).unwrap());
        }
        assert!(nt.verify(&xs, &ts).unwrap());
    }

    #[test]
    fn nu_tau_needs_strong_systematicity() {
        let w = Window::default();
        let k = Arc::new(SystematicRing::power_filtration(2).unwrap());
        assert!(matches!(nu_tau(&k, &z(1), &w), Err(Error::NotStronglySystematic(_))));
        let k = Arc::new(SystematicRing::power_localization(2).unwrap());
        let nt = nu_tau(&k, &z(2), &w).unwrap();
        let x = k.fraction(5, 8).unwrap();
        assert_eq!(nt.nu(&nt.tau(&x).unwrap()), x);
    }
}
