use rand::Rng;

use super::random::{random_lt_idempotent, random_lt_morphism};
use super::{FreeSysModule, IdemMorphism, IdemObject, SysMorphism};
use crate::error::{Error, Result};
use crate::groups::GroupElement;
use crate::rings::{SystematicRing, Window};

/// Contiguous block partition of generator indices; block `(i, j)` of an
/// endomorphism must vanish for `i < j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LtStructure {
    sizes: Vec<usize>,
}

impl LtStructure {
    pub fn new(sizes: Vec<usize>) -> Self {
        LtStructure { sizes }
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn blocks(&self) -> usize {
        self.sizes.len()
    }

    pub fn total(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// Index range of block `k` (0-based).
    pub fn range(&self, k: usize) -> (usize, usize) {
        let lo: usize = self.sizes[..k].iter().sum();
        (lo, lo + self.sizes[k])
    }

    /// Checks that `f` (target structured by `self`, source by `src`) is
    /// block lower triangular.
    pub fn check(&self, src: &LtStructure, f: &SysMorphism) -> Result<()> {
        if self.blocks() != src.blocks() || self.total() != f.target().rank() || src.total() != f.source().rank() {
            return Err(Error::ShapeMismatch("block structure does not fit the morphism".into()));
        }
        for i in 0..self.blocks() {
            let (r0, r1) = self.range(i);
            for j in i + 1..src.blocks() {
                let (c0, c1) = src.range(j);
                for r in r0..r1 {
                    for c in c0..c1 {
                        if !f.matrix().get(r, c).is_zero() {
                            return Err(Error::NotLowerTriangular { row_block: i + 1, col_block: j + 1 });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// The 2-block structure `(first r-1 blocks, last block)`.
    fn merge_leading(&self) -> LtStructure {
        let r = self.blocks();
        LtStructure { sizes: vec![self.sizes[..r - 1].iter().sum(), self.sizes[r - 1]] }
    }
}

/// Splitting data of a 2-block lower triangular idempotent
/// `p = [[p11, 0], [p21, p22]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitData {
    pub p11: SysMorphism,
    pub p21: SysMorphism,
    pub p22: SysMorphism,
    /// `S(A) → A`, `[0; p22]`.
    pub sigma: SysMorphism,
    /// `A → Q(A)`, `[p11 0]`.
    pub pi: SysMorphism,
    /// `A → S(A)`, `[p22 p21, p22]`.
    pub rho: SysMorphism,
    /// `Q(A) ⊕ S(A) → A`, `[[p11, 0], [p21 p11, p22]]`.
    pub m: SysMorphism,
    /// `⟨π; ρ⟩ = [[p11, 0], [p22 p21, p22]]`.
    pub pi_rho: SysMorphism,
}

fn glue(
    source: &FreeSysModule,
    target: &FreeSysModule,
    grid: [[&SysMorphism; 2]; 2],
) -> Result<SysMorphism> {
    let m = crate::rings::Matrix::from_blocks(&[
        vec![grid[0][0].matrix(), grid[0][1].matrix()],
        vec![grid[1][0].matrix(), grid[1][1].matrix()],
    ])?;
    SysMorphism::new(source.clone(), target.clone(), m)
}

fn stack(source: &FreeSysModule, target: &FreeSysModule, parts: &[&SysMorphism], vertical: bool) -> Result<SysMorphism> {
    let grid: Vec<Vec<&crate::rings::Matrix<_>>> = if vertical {
        parts.iter().map(|p| vec![p.matrix()]).collect()
    } else {
        vec![parts.iter().map(|p| p.matrix()).collect()]
    };
    SysMorphism::new(source.clone(), target.clone(), crate::rings::Matrix::from_blocks(&grid)?)
}

impl SplitData {
    pub fn q_object(&self) -> Result<IdemObject> {
        IdemObject::new(self.p11.clone())
    }

    pub fn s_object(&self) -> Result<IdemObject> {
        IdemObject::new(self.p22.clone())
    }

    /// Every identity of the splitting, by name.
    pub fn checks(&self, p: &SysMorphism) -> Result<Vec<(&'static str, bool)>> {
        let p11p11 = self.p11.compose(&self.p11)?;
        let p22p22 = self.p22.compose(&self.p22)?;
        let p21_sum = self.p21.compose(&self.p11)?.add(&self.p22.compose(&self.p21)?)?;
        let p22p21p11 = self.p22.compose(&self.p21)?.compose(&self.p11)?;
        let diag = self.p11.direct_sum(&self.p22);
        Ok(vec![
            ("p11^2 = p11", p11p11 == self.p11),
            ("p22^2 = p22", p22p22 == self.p22),
            ("p21 p11 + p22 p21 = p21", p21_sum == self.p21),
            ("p22 p21 p11 = 0", p22p21p11.is_zero()),
            ("M <pi;rho> = p", self.m.compose(&self.pi_rho)? == *p),
            ("<pi;rho> M = diag(p11, p22)", self.pi_rho.compose(&self.m)? == diag),
            ("pi sigma = 0", self.pi.compose(&self.sigma)?.is_zero()),
            ("rho sigma = p22", self.rho.compose(&self.sigma)? == self.p22),
        ])
    }
}

/// Splits a 2-block lower triangular idempotent; every identity of the
/// splitting is verified and the structure maps are checked to be morphisms
/// of the idempotent completion.
pub fn idem_split_lt(obj: &IdemObject, lt: &LtStructure) -> Result<SplitData> {
    if lt.blocks() != 2 {
        return Err(Error::ShapeMismatch(format!("expected 2 blocks, got {}", lt.blocks())));
    }
    let p = obj.idempotent();
    lt.check(lt, p)?;
    let (n1, n) = (lt.sizes[0], lt.total());
    let a = obj.carrier();
    let (a1, a2) = (a.slice(0, n1), a.slice(n1, n));
    let p11 = p.block(0, n1, 0, n1);
    let p21 = p.block(n1, n, 0, n1);
    let p22 = p.block(n1, n, n1, n);
    let z12 = SysMorphism::zero(a2.clone(), a1.clone());
    let p22p21 = p22.compose(&p21)?;
    let p21p11 = p21.compose(&p11)?;
    let sigma = stack(&a2, a, &[&z12, &p22], true)?;
    let pi = stack(a, &a1, &[&p11, &z12], false)?;
    let rho = stack(a, &a2, &[&p22p21, &p22], false)?;
    let m = glue(a, a, [[&p11, &z12], [&p21p11, &p22]])?;
    let pi_rho = glue(a, a, [[&p11, &z12], [&p22p21, &p22]])?;
    let data = SplitData { p11, p21, p22, sigma, pi, rho, m, pi_rho };
    for (name, ok) in data.checks(p)? {
        if !ok {
            return Err(Error::InvalidMorphism(format!("splitting identity failed: {name}")));
        }
    }
    let q_obj = data.q_object()?;
    let s_obj = data.s_object()?;
    let diag = q_obj.direct_sum(&s_obj);
    IdemMorphism::new(s_obj.clone(), obj.clone(), data.sigma.clone())?;
    IdemMorphism::new(obj.clone(), q_obj, data.pi.clone())?;
    IdemMorphism::new(obj.clone(), s_obj, data.rho.clone())?;
    IdemMorphism::new(diag.clone(), obj.clone(), data.m.clone())?;
    IdemMorphism::new(obj.clone(), diag, data.pi_rho.clone())?;
    Ok(data)
}

/// `T_k(A, p) = (A_k, p_kk)` (blocks numbered from 0).
pub fn lt_functors(obj: &IdemObject, lt: &LtStructure, k: usize) -> Result<IdemObject> {
    if k >= lt.blocks() {
        return Err(Error::IndexOutOfRange { index: k, len: lt.blocks() });
    }
    lt.check(lt, obj.idempotent())?;
    let (lo, hi) = lt.range(k);
    IdemObject::new(obj.idempotent().block(lo, hi, lo, hi))
}

/// `T_k(f) = f_kk`.
pub fn lt_functor_morphism(
    f: &IdemMorphism,
    lt_src: &LtStructure,
    lt_tgt: &LtStructure,
    k: usize,
) -> Result<IdemMorphism> {
    if k >= lt_src.blocks() {
        return Err(Error::IndexOutOfRange { index: k, len: lt_src.blocks() });
    }
    lt_tgt.check(lt_src, f.map())?;
    let (r0, r1) = lt_tgt.range(k);
    let (c0, c1) = lt_src.range(k);
    IdemMorphism::new(
        lt_functors(f.source(), lt_src, k)?,
        lt_functors(f.target(), lt_tgt, k)?,
        f.map().block(r0, r1, c0, c1),
    )
}

/// `ε_k(X)`: the object with `X` in block `k` of `blocks` and zero elsewhere.
pub fn epsilon(x: &IdemObject, k: usize, blocks: usize) -> Result<(IdemObject, LtStructure)> {
    if k >= blocks {
        return Err(Error::IndexOutOfRange { index: k, len: blocks });
    }
    let sizes = (0..blocks).map(|i| if i == k { x.carrier().rank() } else { 0 }).collect();
    Ok((x.clone(), LtStructure::new(sizes)))
}

/// Splits an `r`-block idempotent through `LT(A_1..A_r) = LT(LT(A_1..A_{r-1}), A_r)`,
/// verifying each 2-block splitting on the way, and returns `T_1(X), ..., T_r(X)`.
pub fn split_lt_recursive(obj: &IdemObject, lt: &LtStructure) -> Result<Vec<IdemObject>> {
    let r = lt.blocks();
    if r == 0 {
        return Ok(Vec::new());
    }
    if r == 1 {
        return Ok(vec![obj.clone()]);
    }
    let two = lt.merge_leading();
    let data = idem_split_lt(obj, &two)?;
    let mut out = split_lt_recursive(&data.q_object()?, &LtStructure::new(lt.sizes[..r - 1].to_vec()))?;
    out.push(data.s_object()?);
    Ok(out)
}

/// Checks both squares of the ladder between the split sequences of source
/// and target of a 2-block morphism: `σ_B f22 = f σ_A` and `π_B f = f11 π_A`.
pub fn naturality_check_ses(f: &IdemMorphism, lt_src: &LtStructure, lt_tgt: &LtStructure) -> Result<bool> {
    lt_tgt.check(lt_src, f.map())?;
    let sa = idem_split_lt(f.source(), lt_src)?;
    let sb = idem_split_lt(f.target(), lt_tgt)?;
    let f11 = lt_functor_morphism(f, lt_src, lt_tgt, 0)?;
    let f22 = lt_functor_morphism(f, lt_src, lt_tgt, 1)?;
    let sigma_sq = sb.sigma.compose(f22.map())? == f.map().compose(&sa.sigma)?;
    let pi_sq = sb.pi.compose(f.map())? == f11.map().compose(&sa.pi)?;
    Ok(sigma_sq && pi_sq)
}

/// Whether `ρ_B f = f22 ρ_A`.
pub fn rho_is_natural(f: &IdemMorphism, lt_src: &LtStructure, lt_tgt: &LtStructure) -> Result<bool> {
    let sa = idem_split_lt(f.source(), lt_src)?;
    let sb = idem_split_lt(f.target(), lt_tgt)?;
    let f22 = lt_functor_morphism(f, lt_src, lt_tgt, 1)?;
    Ok(sb.rho.compose(f.map())? == f22.map().compose(&sa.rho)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessMode {
    General,
    /// Objects and morphisms with vanishing off-diagonal block.
    BlockDiagonal,
}

/// Objects `A`, `B` and `f: A → B` with `ρ_B f ≠ f22 ρ_A`.
#[derive(Clone, Debug)]
pub struct RhoWitness {
    pub source: IdemObject,
    pub target: IdemObject,
    pub f: SysMorphism,
    pub rho_after_f: SysMorphism,
    pub f22_after_rho: SysMorphism,
    pub attempts: usize,
}

/// Random search for a morphism on which `ρ` fails to be natural. Blocks sit
/// in degrees `slots.0` (first) and `slots.1` (second), with one to two
/// generators each.
pub fn rho_not_natural_witness<R: Rng + ?Sized>(
    ring: &std::sync::Arc<SystematicRing>,
    slots: (&GroupElement, &GroupElement),
    mode: WitnessMode,
    budget: usize,
    rng: &mut R,
    window: &Window,
) -> Result<RhoWitness> {
    for attempt in 1..=budget {
        let mut blocks = || -> Vec<Vec<GroupElement>> {
            vec![vec![slots.0.clone(); rng.gen_range(1..=2)], vec![slots.1.clone(); rng.gen_range(1..=2)]]
        };
        let (ba, bb) = (blocks(), blocks());
        let (a, lta) = random_lt_idempotent(ring, &ba, mode, rng, window)?;
        let (b, ltb) = random_lt_idempotent(ring, &bb, mode, rng, window)?;
        let f = random_lt_morphism(&a, &lta, &b, &ltb, mode, rng, window)?;
        let sa = idem_split_lt(&a, &lta)?;
        let sb = idem_split_lt(&b, &ltb)?;
        let f22 = lt_functor_morphism(&f, &lta, &ltb, 1)?;
        let lhs = sb.rho.compose(f.map())?;
        let rhs = f22.map().compose(&sa.rho)?;
        if lhs != rhs {
            return Ok(RhoWitness {
                source: a,
                target: b,
                f: f.map().clone(),
                rho_after_f: lhs,
                f22_after_rho: rhs,
                attempts: attempt,
            });
        }
    }
    Err(Error::SearchExhausted(budget))
}

#[cfg(test)]
mod tests {
    use super::super::tests::{f2t, z};
    use super::*;
    use crate::groups::GroupSpec;
    use crate::rings::{int, Base, Matrix};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn obj(r: &Arc<SystematicRing>, degs: Vec<GroupElement>, rows: Vec<Vec<i64>>) -> IdemObject {
        let a = FreeSysModule::new(r.clone(), degs.clone()).unwrap();
        let m = Matrix::from_rows(
            rows.iter()
                .enumerate()
                .map(|(i, row)| {
                    row.iter()
                        .enumerate()
                        .map(|(j, &e)| {
                            let d = r.group().left_divide(&degs[i], &degs[j]).unwrap();
                            if e == 0 { r.zero() } else { r.monomial(&d, int(i128::from(e))).unwrap() }
                        })
                        .collect()
                })
                .collect(),
            degs.len(),
        )
        .unwrap();
        IdemObject::new(SysMorphism::new(a.clone(), a, m).unwrap()).unwrap()
    }

    #[test]
    fn block_diagonal_split_collapses() {
        let r = f2t();
        let x = obj(&r, vec![z(1), z(0)], vec![vec![1, 0], vec![0, 1]]);
        let lt = LtStructure::new(vec![1, 1]);
        let s = idem_split_lt(&x, &lt).unwrap();
        assert!(s.rho.block(0, 1, 0, 1).is_zero());
        assert_eq!(s.m, x.idempotent().clone());
        // identity: sigma and pi are the canonical inclusion and projection
        assert_eq!(s.sigma.matrix().to_rows(), vec![vec![r.zero()], vec![r.one()]]);
        assert_eq!(s.pi.matrix().to_rows(), vec![vec![r.one(), r.zero()]]);
    }

    #[test]
    fn off_diagonal_split() {
        let r = f2t();
        // p = [[0,0],[t,1]] on degrees (1, 0)
        let x = obj(&r, vec![z(1), z(0)], vec![vec![0, 0], vec![1, 1]]);
        let lt = LtStructure::new(vec![1, 1]);
        let s = idem_split_lt(&x, &lt).unwrap();
        assert!(s.checks(x.idempotent()).unwrap().iter().all(|(_, ok)| *ok));
        // an upper entry is rejected
        let a = FreeSysModule::new(r.clone(), vec![z(0), z(0)]).unwrap();
        let u = Matrix::from_rows(vec![vec![r.one(), r.one()], vec![r.zero(), r.zero()]], 2).unwrap();
        let y = IdemObject::new(SysMorphism::new(a.clone(), a, u).unwrap()).unwrap();
        assert_eq!(idem_split_lt(&y, &lt), Err(Error::NotLowerTriangular { row_block: 1, col_block: 2 }));
    }

    #[test]
    fn functors_and_embeddings() {
        let r = f2t();
        let x = obj(&r, vec![z(2), z(1), z(0)], vec![vec![1, 0, 0], vec![0, 0, 0], vec![1, 0, 0]]);
        let lt = LtStructure::new(vec![1, 1, 1]);
        let parts = split_lt_recursive(&x, &lt).unwrap();
        for (k, part) in parts.iter().enumerate() {
            assert_eq!(part, &lt_functors(&x, &lt, k).unwrap());
        }
        let (e, elt) = epsilon(&parts[0], 1, 3).unwrap();
        assert_eq!(lt_functors(&e, &elt, 1).unwrap(), parts[0]);
        assert!(lt_functors(&e, &elt, 0).unwrap().carrier().rank() == 0);
        assert!(matches!(lt_functors(&x, &lt, 3), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn identity_morphism_is_natural() {
        let r = f2t();
        let x = obj(&r, vec![z(1), z(0)], vec![vec![0, 0], vec![1, 1]]);
        let lt = LtStructure::new(vec![1, 1]);
        assert!(naturality_check_ses(&x.identity(), &lt, &lt).unwrap());
    }

    #[test]
    fn rho_witnesses() {
        let w = Window::default();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let r = f2t();
        let wit = rho_not_natural_witness(&r, (&z(1), &z(0)), WitnessMode::General, 1000, &mut rng, &w).unwrap();
        assert_ne!(wit.rho_after_f, wit.f22_after_rho);
        let lr = Arc::new(SystematicRing::laurent(Base::Mod(2), GroupSpec::free_abelian(1)));
        assert!(rho_not_natural_witness(&lr, (&z(1), &z(0)), WitnessMode::General, 1000, &mut rng, &w).is_ok());
        assert_eq!(
            rho_not_natural_witness(&r, (&z(1), &z(0)), WitnessMode::BlockDiagonal, 200, &mut rng, &w).unwrap_err(),
            Error::SearchExhausted(200)
        );
    }
}
