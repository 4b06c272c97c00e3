//! The decomposition isomorphisms at the level of `K0` of windows.
//!
//! Each theorem is realised on window bases: the decomposed side has one
//! basis vector per slot (the class of the rank-one free slot-ring module
//! placed at the slot's reference degree) and the map sends it to the class
//! of the corresponding free module over the big ring. The inverse direction
//! moves every diagonal block to the slot ring and classifies it there.

use std::sync::Arc;

use rand::Rng;
use serde_json::{json, Value};

use super::oracle::k0_bruteforce;
use super::window::{k0_class, k0_of_window, random_window_object, KWindow, SlotRule};
use super::{K0Element, K0Group, Label};
use crate::error::{Error, Result};
use crate::groups::{GroupElement, GroupSpec, OrderSpec};
use crate::linalg::integer_kernel;
use crate::modcat::{idem_functor_apply, FreeSysModule, Functor, IdemObject, SysMorphism, WitnessMode};
use crate::rings::{Base, Matrix, RingElem, SystematicRing, Window, ZMod};

/// A named pass/fail verification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.to_string(), passed, detail: detail.into() }
    }

    pub fn to_json(&self) -> Value {
        json!({ "name": self.name, "passed": self.passed, "detail": self.detail })
    }
}

/// A window isomorphism `source → target` given on the source basis.
#[derive(Clone, Debug)]
pub struct WindowIso {
    pub source: K0Group,
    pub target: K0Group,
    pub images: Vec<K0Element>,
    pub bijective: bool,
    pub checks: Vec<Check>,
}

impl WindowIso {
    pub fn passed(&self) -> bool {
        self.bijective && self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "images": self.images.iter().map(K0Element::to_json).collect::<Vec<_>>(),
            "bijective": self.bijective,
            "checks": self.checks.iter().map(Check::to_json).collect::<Vec<_>>(),
        })
    }
}

/// Whether the images form a basis of the free target group.
fn is_basis(target: &K0Group, images: &[K0Element]) -> Result<bool> {
    if images.len() != target.labels().len() || !target.torsion().is_empty() || target.rank() != images.len() {
        return Ok(false);
    }
    let rows: Vec<Vec<i64>> = images
        .iter()
        .map(|x| target.coordinates(x).map(|c| c.into_iter().map(|v| v as i64).collect()))
        .collect::<Result<_>>()?;
    let quotient = K0Group::new(target.labels().to_vec(), rows)?;
    Ok(quotient.rank() == 0 && quotient.torsion().is_empty())
}

/// The free module `⟨g_1⟩R ⊕ ... ⊕ ⟨g_k⟩R` as an object.
fn free_object(ring: &Arc<SystematicRing>, degrees: Vec<GroupElement>) -> Result<IdemObject> {
    Ok(IdemObject::free(&FreeSysModule::new(ring.clone(), degrees)?))
}

/// `α`: classes of the diagonal blocks, computed over the slot ring.
fn alpha(ctx: &KWindow, x: &IdemObject, source_label: &dyn Fn(&GroupElement) -> Label) -> Result<K0Element> {
    let mut out = K0Element::zero();
    for (slot, block) in ctx.slot_blocks(x)? {
        let y = ctx.to_slot_ring(&slot, &block)?;
        out.add_term(source_label(&slot), ctx.slot_ring_class(&y)?);
    }
    Ok(out)
}

fn beta(y: &K0Element, images: &[K0Element], source: &[Label]) -> Result<K0Element> {
    let mut out = K0Element::zero();
    for (l, c) in y.terms() {
        let i = source
            .iter()
            .position(|m| m == l)
            .ok_or_else(|| Error::LabelKind(format!("{l} is not a source label")))?;
        out = out.add(&images[i].scale(c));
    }
    Ok(out)
}

/// Builds the slot isomorphism and runs the sampled round trips.
fn slot_iso<R: Rng + ?Sized>(
    ctx: &KWindow,
    source_label: &dyn Fn(&GroupElement) -> Label,
    samples: usize,
    rng: &mut R,
) -> Result<WindowIso> {
    let ring = ctx.ring();
    let group = ring.group();
    let source_labels: Vec<Label> = ctx.slots().iter().map(source_label).collect();
    let source = K0Group::free(source_labels.clone());
    let target = k0_of_window(ctx);
    let images: Vec<K0Element> = ctx
        .slots()
        .iter()
        .map(|s| k0_class(&free_object(ring, vec![ctx.reference(s)?])?, ctx))
        .collect::<Result<_>>()?;
    let bijective = is_basis(&target, &images)?;
    let mut checks = Vec::new();
    if ctx.slots().is_empty() {
        checks.push(Check::new("empty_window", source.rank() == 0 && target.rank() == 0, "both sides vanish"));
        return Ok(WindowIso { source, target, images, bijective: true, checks });
    }
    let mut ba_fail = None;
    let mut ab_fail = None;
    let offsets = ctx.probe_offsets();
    for i in 0..samples {
        let (x, _) = random_window_object(ctx, 2, WitnessMode::General, rng)?;
        let a = alpha(ctx, &x, source_label)?;
        let direct = k0_class(&x, ctx)?;
        let b = beta(&a, &images, &source_labels)?;
        if b != direct && ba_fail.is_none() {
            ba_fail = Some(format!("sample {i}: β(α(X)) = {b} but [X] = {direct}"));
        }
        // a source element realised by free slot modules ⟨k⟩ at random slots
        let mut degrees = Vec::new();
        let mut expected = K0Element::zero();
        for s in ctx.slots() {
            for _ in 0..rng.gen_range(0..3) {
                let k = &offsets[rng.gen_range(0..offsets.len())];
                let g = group.compose(&ctx.reference(s)?, k)?;
                let slot_obj = ctx.to_slot_ring(s, &free_object(ring, vec![g.clone()])?)?;
                expected.add_term(source_label(s), ctx.slot_ring_class(&slot_obj)?);
                degrees.push(g);
            }
        }
        let back = alpha(ctx, &free_object(ring, degrees)?, source_label)?;
        if back != expected && ab_fail.is_none() {
            ab_fail = Some(format!("sample {i}: α(β(y)) = {back} but y = {expected}"));
        }
    }
    checks.push(Check::new("beta_after_alpha", ba_fail.is_none(), ba_fail.unwrap_or_else(|| format!("{samples} samples"))));
    checks.push(Check::new("alpha_after_beta", ab_fail.is_none(), ab_fail.unwrap_or_else(|| format!("{samples} samples"))));
    Ok(WindowIso { source, target, images, bijective, checks })
}

/// `K0` of the slot ring's identity component, cross-checked against the
/// brute-force oracle when the base is a small finite ring.
fn slot_k0_check(ctx: &KWindow) -> Check {
    match ctx.ring().base() {
        Base::Mod(n) if n <= 16 => match k0_bruteforce(ZMod(n), 2) {
            Ok((_, g)) => Check::new("slot_k0_is_z", g.is_free_of_rank(1), format!("oracle over Z/{n}: rank {}", g.rank())),
            Err(e) => Check::new("slot_k0_is_z", false, e.to_string()),
        },
        b => Check::new("slot_k0_is_z", true, format!("rank rule over {b}")),
    }
}

/// `ω∘β : ℤ[N⋊H] ⊗_{ℤ[H]} K0(R^H) → K0(R)` on a window of `N`-slots,
/// `(s, h) ⊗ ⟨g⟩R^H ↦ ⟨(s, hg)⟩R`.
pub fn theorem_semidirect_iso<R: Rng + ?Sized>(ctx: &KWindow, samples: usize, rng: &mut R) -> Result<WindowIso> {
    if ctx.rule() != SlotRule::NormalPart {
        return Err(Error::SpecMismatch("the semidirect theorem needs N-part slots".into()));
    }
    let GroupSpec::Semidirect { h, .. } = ctx.ring().group() else { unreachable!("checked by the rule") };
    let h_id = h.identity();
    let label = move |s: &GroupElement| Label::Pair(s.clone(), h_id.clone());
    let mut iso = slot_iso(ctx, &label, samples, rng)?;
    iso.checks.push(slot_k0_check(ctx));
    if !ctx.slots().is_empty() {
        iso.checks.push(semilinearity(ctx, samples, rng)?);
    }
    Ok(iso)
}

/// `[⟨g⟩X] = g · [X]` where `(s', h')` moves the slot `s` to `s' θ(h')(s)`.
fn semilinearity<R: Rng + ?Sized>(ctx: &KWindow, samples: usize, rng: &mut R) -> Result<Check> {
    let group = ctx.ring().group();
    let GroupSpec::Semidirect { n, h, .. } = group else { unreachable!("semidirect context") };
    let hs = h.elements().unwrap_or_else(|| vec![h.identity()]);
    for i in 0..samples.min(20) {
        let (x, _) = random_window_object(ctx, 2, WitnessMode::General, rng)?;
        let g = GroupElement::pair(n.sample(rng, 2), hs[rng.gen_range(0..hs.len())].clone());
        let transport = |s: &GroupElement| -> Result<GroupElement> {
            let moved = group.compose(&g, &GroupElement::pair(s.clone(), h.identity()))?;
            Ok(moved.parts().expect("pair").0.clone())
        };
        let moved_slots: Vec<GroupElement> = ctx.slots().iter().map(transport).collect::<Result<_>>()?;
        let moved_ctx = ctx.with_slots(&moved_slots)?;
        let shifted = idem_functor_apply(&Functor::Shift(g.clone()), &x)?;
        let lhs = k0_class(&shifted, &moved_ctx)?;
        let rhs = k0_class(&x, ctx)?.map_labels(|l| match l {
            Label::Degree(s) => Ok(Label::Degree(transport(s)?)),
            other => Ok(other.clone()),
        })?;
        if lhs != rhs {
            return Ok(Check::new("semilinearity", false, format!("sample {i}, g = {g}: {lhs} vs {rhs}")));
        }
    }
    Ok(Check::new("semilinearity", true, format!("{} shifted samples", samples.min(20))))
}

/// `Ψ : ⊕_{h} K0(R_N) → K0(R)`, `⟨n⟩R_N ↦ ⟨σ(h) n⟩R`. A second section
/// `σ'(h) = σ(h) n_h` with random `n_h ∈ N` is run alongside; it must give
/// another basis of the same group.
pub fn theorem_quotient_iso<R: Rng + ?Sized>(ctx: &KWindow, samples: usize, rng: &mut R) -> Result<WindowIso> {
    let n_id = match ctx.rule() {
        SlotRule::Quotient | SlotRule::Degree => ctx.slot_ring().ring.group().identity(),
        SlotRule::NormalPart => return Err(Error::SpecMismatch("the quotient theorem needs coset slots".into())),
    };
    let label = move |h: &GroupElement| Label::Pair(h.clone(), n_id.clone());
    let mut iso = slot_iso(ctx, &label, samples, rng)?;
    let ring = ctx.ring();
    let group = ring.group();
    let offsets = ctx.probe_offsets();
    let mut moved = false;
    let other: Vec<K0Element> = ctx
        .slots()
        .iter()
        .map(|s| {
            let k = &offsets[rng.gen_range(0..offsets.len())];
            moved |= *k != group.identity();
            k0_class(&free_object(ring, vec![group.compose(&ctx.reference(s)?, k)?])?, ctx)
        })
        .collect::<Result<_>>()?;
    let other_basis = is_basis(&iso.target, &other)?;
    iso.checks.push(Check::new(
        "section_independence",
        other_basis && iso.source.rank() == iso.target.rank(),
        format!("alternative section {} the basis objects", if moved { "moves" } else { "keeps" }),
    ));
    Ok(iso)
}

/// `K0(R) ≅ ⊕_{h} K0(R₁)` for coset slots over a strongly systematic `R_N`.
pub fn corollary_strong_reduction<R: Rng + ?Sized>(
    ctx: &KWindow,
    samples: usize,
    rng: &mut R,
) -> Result<(K0Group, Vec<Check>)> {
    let sub = &ctx.slot_ring().ring;
    let g = sub.group();
    let mut checks = Vec::new();
    // the dual bases behind ρ/τ, at ± generators of N
    let gens: Vec<GroupElement> = match g.elements() {
        Some(all) => all,
        None => {
            let k = g.lattice_part(&g.identity()).len();
            (0..k)
                .flat_map(|i| [1i64, -1].map(|e| GroupElement::free((0..k).map(|j| if i == j { e } else { 0 }))))
                .collect()
        }
    };
    for x in &gens {
        let db = sub.dual_basis(x, ctx.window())?;
        db.verify(sub)?;
    }
    checks.push(Check::new("slot_ring_strong", true, format!("dual bases at {} degrees", gens.len())));
    let iso = theorem_quotient_iso(ctx, samples, rng)?;
    checks.push(Check::new("quotient_iso", iso.passed(), format!("window rank {}", iso.target.rank())));
    checks.extend(iso.checks.iter().cloned());
    // ρ∘τ on base idempotents: e over R₁ placed in degree 1 comes back as e
    let base = sub.base();
    let mut rt_ok = true;
    for _ in 0..samples.min(20) {
        let m = FreeSysModule::new(Arc::new(sub.clone()), vec![g.identity(); 2])?;
        let e = crate::modcat::random::random_idempotent(&m, rng, ctx.window())?;
        let comp = crate::modcat::component_matrix(&e, &g.identity(), ctx.window())?;
        let direct: Vec<Vec<_>> = (0..2).map(|i| (0..2).map(|j| e.matrix().get(i, j).coefficient(&g.identity())).collect()).collect();
        rt_ok &= comp == direct && base.idempotent_rank(&comp).is_some();
    }
    checks.push(Check::new("rho_after_tau", rt_ok, "degree-one component of τ(e) equals e"));
    checks.push(slot_k0_check(ctx));
    let labels: Vec<Label> = ctx.slots().iter().map(|h| Label::Coset(h.clone())).collect();
    Ok((K0Group::free(labels), checks))
}

/// Output of the toric pipeline.
#[derive(Clone, Debug)]
pub struct ToricReport {
    /// Basis of `N = A ∩ (−A)`.
    pub n_basis: Vec<Vec<i64>>,
    pub cosets: Vec<GroupElement>,
    pub group: K0Group,
    pub iso: WindowIso,
    pub checks: Vec<Check>,
}

impl ToricReport {
    pub fn passed(&self) -> bool {
        self.iso.passed() && self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n_basis": self.n_basis,
            "cosets": self.cosets.iter().map(GroupElement::to_json).collect::<Vec<_>>(),
            "group": self.group.to_json(),
            "iso": self.iso.to_json(),
            "checks": self.checks.iter().map(Check::to_json).collect::<Vec<_>>(),
        })
    }
}

/// `K0` of `B[A]` for the cone `A = {x : L(x) ≥ 0}` on a window of lattice
/// points, through `N = A ∩ (−A)` and the coset slots of `H = ℤ^r / N`.
pub fn toric<R: Rng + ?Sized>(
    base: Base,
    rank: usize,
    cone: Vec<Vec<i64>>,
    points: &[Vec<i64>],
    samples: usize,
    rng: &mut R,
) -> Result<ToricReport> {
    let f: Vec<Vec<i128>> = cone.iter().map(|l| l.iter().map(|&x| i128::from(x)).collect()).collect();
    let n_basis: Vec<Vec<i64>> =
        integer_kernel(&f, rank).into_iter().map(|v| v.into_iter().map(|x| x as i64).collect()).collect();
    let group = GroupSpec::extension(rank, n_basis.clone())?;
    let GroupSpec::Extension(ext) = &group else { unreachable!("extension constructor") };
    let order = OrderSpec::new(ext.h_rank(), ext.functionals_on_h(&cone))?;
    let mut cosets = Vec::new();
    for p in points {
        let h = ext.project(&GroupElement::free(p.iter().copied()))?;
        if !cosets.contains(&h) {
            cosets.push(h);
        }
    }
    let ring = Arc::new(SystematicRing::monoid_ring(base, group.clone(), cone)?);
    let ctx = KWindow::quotient(ring, order, &cosets, Window::default())?;
    let (k0, mut checks) = corollary_strong_reduction(&ctx, samples, rng)?;
    let iso = theorem_quotient_iso(&ctx, samples, rng)?;
    checks.push(Check::new(
        "corollary_matches_quotient_iso",
        k0.rank() == iso.target.rank() && k0.is_free_of_rank(cosets.len()),
        format!("rank {} over {} cosets", k0.rank(), cosets.len()),
    ));
    Ok(ToricReport { n_basis, cosets: ctx.slots().to_vec(), group: k0, iso, checks })
}

/// The leading symbol of a filtered idempotent: each entry keeps only its
/// terms of top degree `g_i⁻¹ g_j`, read in the graded ring.
pub fn associated_graded(x: &IdemObject, graded: &Arc<SystematicRing>) -> Result<IdemObject> {
    let a = x.carrier();
    let group = graded.group();
    let module = FreeSysModule::new(graded.clone(), a.degrees().to_vec())?;
    let p = x.idempotent().matrix();
    let n = a.rank();
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let d = group.left_divide(&a.degrees()[i], &a.degrees()[j])?;
            let e = match p.get(i, j) {
                RingElem::Terms(_) if p.get(i, j).is_zero() => graded.zero(),
                RingElem::Terms(_) => graded.monomial(&d, p.get(i, j).coefficient(&d))?,
                RingElem::Fraction(_) => {
                    return Err(Error::InvalidSpec("leading symbols need monomial entries".into()));
                }
            };
            entries.push(e);
        }
    }
    let m = Matrix::from_fn(n, n, |i, j| entries[i * n + j].clone());
    IdemObject::new(SysMorphism::new(module.clone(), module, m)?)
}

/// The filtered window and its associated graded window give the same `K0`
/// presentation, and every sampled filtered idempotent has the class of its
/// leading symbol.
pub fn filtered_graded_agreement<R: Rng + ?Sized>(
    filtered: &KWindow,
    graded: &KWindow,
    samples: usize,
    rng: &mut R,
) -> Result<Vec<Check>> {
    let fk = k0_of_window(filtered);
    let gk = k0_of_window(graded);
    let mut checks = vec![Check::new("identical_presentations", fk == gk, format!("ranks {} and {}", fk.rank(), gk.rank()))];
    let mut fail = None;
    for i in 0..samples {
        let (x, _) = random_window_object(filtered, 2, WitnessMode::General, rng)?;
        let gr = associated_graded(&x, graded.ring())?;
        let a = k0_class(&x, filtered)?;
        let b = k0_class(&gr, graded)?;
        if a != b && fail.is_none() {
            fail = Some(format!("sample {i}: {a} vs {b}"));
        }
    }
    checks.push(Check::new("symbol_classes", fail.is_none(), fail.unwrap_or_else(|| format!("{samples} samples"))));
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::Action;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn z(k: i64) -> GroupElement {
        GroupElement::free([k])
    }

    fn zs(r: std::ops::RangeInclusive<i64>) -> Vec<GroupElement> {
        r.map(z).collect()
    }

    #[test]
    fn trivial_h_is_the_polynomial_case() {
        let g = GroupSpec::semidirect(GroupSpec::free_abelian(1), GroupSpec::trivial(), Action::Trivial).unwrap();
        let r = Arc::new(SystematicRing::skew_group_ring(Base::Mod(2), g, vec![vec![1]]).unwrap());
        let ctx = KWindow::semidirect(r, OrderSpec::orthant(1), &zs(0..=3), Window::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let iso = theorem_semidirect_iso(&ctx, 10, &mut rng).unwrap();
        assert!(iso.passed(), "{:?}", iso.checks);
        assert_eq!(iso.target.rank(), 4);
    }

    #[test]
    fn group_ring_coefficients() {
        let g = GroupSpec::semidirect(GroupSpec::free_abelian(1), GroupSpec::cyclic(2), Action::Trivial).unwrap();
        let r = Arc::new(SystematicRing::skew_group_ring(Base::Mod(2), g, vec![vec![1]]).unwrap());
        let ctx = KWindow::semidirect(r, OrderSpec::orthant(1), &zs(0..=2), Window::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let iso = theorem_semidirect_iso(&ctx, 10, &mut rng).unwrap();
        assert!(iso.passed(), "{:?}", iso.checks);
        assert_eq!(iso.source.rank(), 3);
        let empty = ctx.with_slots(&[]).unwrap();
        let iso = theorem_semidirect_iso(&empty, 3, &mut rng).unwrap();
        assert!(iso.passed() && iso.target.rank() == 0);
    }

    #[test]
    fn toric_cones() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let pts: Vec<Vec<i64>> = (0..3).flat_map(|a| (0..3).map(move |b| vec![a, b])).collect();
        let quad = toric(Base::Mod(2), 2, vec![vec![1, 0], vec![0, 1]], &pts, 5, &mut rng).unwrap();
        assert!(quad.passed(), "{:?}", quad.checks);
        assert!(quad.n_basis.is_empty());
        assert!(quad.group.is_free_of_rank(9));
        let half = toric(Base::Mod(2), 2, vec![vec![1, 0]], &pts, 5, &mut rng).unwrap();
        assert!(half.passed(), "{:?}", half.checks);
        assert_eq!(half.n_basis.len(), 1);
        assert!(half.group.is_free_of_rank(3));
    }

    #[test]
    fn filtered_polynomials_match_graded() {
        let f = Arc::new(
            SystematicRing::filtered_monoid_ring(Base::Mod(2), GroupSpec::free_abelian(1), vec![vec![1]], OrderSpec::orthant(1))
                .unwrap(),
        );
        let g = Arc::new(SystematicRing::monoid_ring(Base::Mod(2), GroupSpec::free_abelian(1), vec![vec![1]]).unwrap());
        let fw = KWindow::template(f, OrderSpec::orthant(1), &zs(0..=3), Window::default()).unwrap();
        let gw = KWindow::template(g, OrderSpec::orthant(1), &zs(0..=3), Window::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let checks = filtered_graded_agreement(&fw, &gw, 20, &mut rng).unwrap();
        assert!(checks.iter().all(|c| c.passed), "{checks:?}");
    }

    #[test]
    fn filtered_localization_window() {
        let r = Arc::new(SystematicRing::power_filtration(2).unwrap());
        let ctx = KWindow::template(r, OrderSpec::orthant(1), &zs(0..=3), Window::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let (k0, checks) = corollary_strong_reduction(&ctx, 10, &mut rng).unwrap();
        assert!(checks.iter().all(|c| c.passed), "{checks:?}");
        assert!(k0.is_free_of_rank(4));
    }
}
