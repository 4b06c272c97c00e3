//! Seeded random idempotents and morphisms with degree-valid entries.
//!
//! Idempotents are built by conjugation rather than rejection sampling: a
//! 0/1 diagonal conjugated by elementary matrices gives each diagonal block,
//! and conjugating the block diagonal by a unitriangular `U = I + N` (with
//! `U⁻¹ = Σ (-N)^k`) adds a lower triangular off-diagonal part.

use std::sync::Arc;

use rand::Rng;

use super::{FreeSysModule, IdemMorphism, IdemObject, LtStructure, SysMorphism, WitnessMode};
use crate::error::Result;
use crate::groups::GroupElement;
use crate::rings::{Matrix, RingElem, SystematicRing, Window};

/// A random element of `Hom(⟨src⟩R, ⟨tgt⟩R) = R_{tgt⁻¹ src}`.
pub fn random_entry<R: Rng + ?Sized>(
    ring: &SystematicRing,
    src: &GroupElement,
    tgt: &GroupElement,
    rng: &mut R,
    window: &Window,
) -> Result<RingElem> {
    ring.sample_in(&ring.group().left_divide(tgt, src)?, rng, window)
}

/// A random idempotent on `A`: a 0/1 diagonal conjugated by a product of
/// elementary matrices `I + c e_ij`.
pub fn random_idempotent<R: Rng + ?Sized>(
    a: &FreeSysModule,
    rng: &mut R,
    window: &Window,
) -> Result<SysMorphism> {
    let ring = a.ring();
    let n = a.rank();
    let diag = Matrix::from_fn(n, n, |i, j| if i == j && rng.gen_bool(0.5) { ring.one() } else { ring.zero() });
    let mut e = Matrix::identity(ring, n);
    let mut e_inv = Matrix::identity(ring, n);
    if n > 1 {
        for _ in 0..2 * n {
            let i = rng.gen_range(0..n);
            let mut j = rng.gen_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            let c = random_entry(ring, &a.degrees()[j], &a.degrees()[i], rng, window)?;
            let mut el = Matrix::identity(ring, n);
            el.set(i, j, c.clone());
            let mut el_inv = Matrix::identity(ring, n);
            el_inv.set(i, j, ring.neg(&c));
            e = e.mul(ring, &el)?;
            e_inv = el_inv.mul(ring, &e_inv)?;
        }
    }
    let p = Matrix::chain(ring, &[&e, &diag, &e_inv])?;
    SysMorphism::new(a.clone(), a.clone(), p)
}

/// A random lower triangular idempotent whose blocks carry the given
/// generator degrees.
pub fn random_lt_idempotent<R: Rng + ?Sized>(
    ring: &Arc<SystematicRing>,
    blocks: &[Vec<GroupElement>],
    mode: WitnessMode,
    rng: &mut R,
    window: &Window,
) -> Result<(IdemObject, LtStructure)> {
    let lt = LtStructure::new(blocks.iter().map(Vec::len).collect());
    let a = FreeSysModule::new(ring.clone(), blocks.concat())?;
    let n = a.rank();
    let r: &SystematicRing = ring;
    let mut d = Matrix::zeros(r, n, n);
    for k in 0..lt.blocks() {
        let (lo, hi) = lt.range(k);
        let e = random_idempotent(&a.slice(lo, hi), rng, window)?;
        for i in lo..hi {
            for j in lo..hi {
                d.set(i, j, e.matrix().get(i - lo, j - lo).clone());
            }
        }
    }
    let mut nil = Matrix::zeros(r, n, n);
    if mode == WitnessMode::General {
        for bi in 0..lt.blocks() {
            for bj in 0..bi {
                let (r0, r1) = lt.range(bi);
                let (c0, c1) = lt.range(bj);
                for i in r0..r1 {
                    for j in c0..c1 {
                        nil.set(i, j, random_entry(r, &a.degrees()[j], &a.degrees()[i], rng, window)?);
                    }
                }
            }
        }
    }
    let u = Matrix::identity(r, n).add(r, &nil)?;
    // U⁻¹ = Σ_{k < blocks} (-N)^k
    let neg = nil.neg(r);
    let mut u_inv = Matrix::identity(r, n);
    let mut power = Matrix::identity(r, n);
    for _ in 1..lt.blocks().max(1) {
        power = power.mul(r, &neg)?;
        u_inv = u_inv.add(r, &power)?;
    }
    let p = Matrix::chain(r, &[&u, &d, &u_inv])?;
    let obj = IdemObject::new(SysMorphism::new(a.clone(), a, p)?)?;
    lt.check(&lt, obj.idempotent())?;
    Ok((obj, lt))
}

/// A random morphism `q g p` for a random lower triangular `g`.
pub fn random_lt_morphism<R: Rng + ?Sized>(
    src: &IdemObject,
    lt_src: &LtStructure,
    tgt: &IdemObject,
    lt_tgt: &LtStructure,
    mode: WitnessMode,
    rng: &mut R,
    window: &Window,
) -> Result<IdemMorphism> {
    let a = src.carrier();
    let b = tgt.carrier();
    let ring = a.ring();
    let mut g = Matrix::zeros(ring, b.rank(), a.rank());
    for bi in 0..lt_tgt.blocks() {
        for bj in 0..=bi.min(lt_src.blocks().saturating_sub(1)) {
            if mode == WitnessMode::BlockDiagonal && bi != bj {
                continue;
            }
            let (r0, r1) = lt_tgt.range(bi);
            let (c0, c1) = lt_src.range(bj);
            for i in r0..r1 {
                for j in c0..c1 {
                    g.set(i, j, random_entry(ring, &a.degrees()[j], &b.degrees()[i], rng, window)?);
                }
            }
        }
    }
    let g = SysMorphism::new(a.clone(), b.clone(), g)?;
    let f = tgt.idempotent().compose(&g)?.compose(src.idempotent())?;
    IdemMorphism::new(src.clone(), tgt.clone(), f)
}

/// One to `max` generators per block, all in the block's slot degree.
pub fn random_blocks<R: Rng + ?Sized>(slots: &[GroupElement], max: usize, rng: &mut R) -> Vec<Vec<GroupElement>> {
    slots.iter().map(|s| vec![s.clone(); rng.gen_range(1..=max)]).collect()
}
