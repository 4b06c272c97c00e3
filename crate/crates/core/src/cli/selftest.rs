//! The acceptance suite: nine seeded, exact criteria with wall-clock limits.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::groups::{Action, GroupElement, GroupSpec, OrderSpec};
use crate::kzero::oracle::oracle_class;
use crate::kzero::{
    filtered_graded_agreement, k0_bruteforce, k0_class, k0_of_window, random_window_object,
    theorem_semidirect_iso, toric, IdemClassTable, K0Element, K0Group, KWindow, Label,
};
use crate::linalg::{rank_mod_p, smith};
use crate::modcat::random::{random_lt_idempotent, random_lt_morphism};
use crate::modcat::{
    component_matrix, hom_component_basis, idem_split_lt, naturality_check_ses, nu_tau, tensor_extend,
    FreeSysModule, IdemObject, PresentedModule, SysMorphism, WitnessMode,
};
use crate::rings::{Base, Matrix, SystematicRing, Window, ZMod};

/// Outcome of one criterion.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Duration,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {}: {} ({:.2}s / {}s) {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.limit.as_secs(),
            self.detail
        )
    }

    pub fn to_json(&self) -> Value {
        json!({ "id": self.id, "name": self.name, "passed": self.passed, "detail": self.detail })
    }
}

type Body = fn() -> Result<(bool, String)>;

const CRITERIA: [(usize, &str, u64, Body); 9] = [
    (1, "lower triangular identities", 30, lt_identities),
    (2, "window K0 of F2[t] against the oracle", 60, polynomial_windows),
    (3, "strongly systematic suite", 30, strong_suite),
    (4, "counterexample regression", 5, counterexamples),
    (5, "hom vanishing off the positive cone", 10, hom_vanishing),
    (6, "semidirect decomposition", 60, semidirect),
    (7, "toric cones", 60, toric_cones),
    (8, "filtered and graded agreement", 30, filtered_graded),
    (9, "oracle self-consistency", 60, oracle_consistency),
];

/// Runs criterion `id` (1 to 9); a criterion over its time limit fails.
pub fn run_criterion(id: usize) -> Outcome {
    let (id, name, limit, body) = CRITERIA[id - 1];
    let start = Instant::now();
    let (ok, detail) = match body() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    let elapsed = start.elapsed();
    let limit = Duration::from_secs(limit);
    let in_time = elapsed < limit;
    let detail = if in_time { detail } else { format!("{detail}; over the time limit") };
    Outcome { id, name, passed: ok && in_time, detail, elapsed, limit }
}

pub fn run_all() -> Vec<Outcome> {
    (1..=CRITERIA.len()).map(run_criterion).collect()
}

fn z(k: i64) -> GroupElement {
    GroupElement::free([k])
}

fn polynomials(base: Base) -> Arc<SystematicRing> {
    Arc::new(SystematicRing::monoid_ring(base, GroupSpec::free_abelian(1), vec![vec![1]]).expect("valid ring"))
}

/// Two blocks: the first one to two generators at `hi` or `hi + 1`, the
/// second at `lo` or `lo + 1`, with `lo + 1 < hi`.
fn two_blocks<R: Rng>(rng: &mut R) -> Vec<Vec<GroupElement>> {
    let lo = rng.gen_range(0..3);
    let hi = lo + 2 + rng.gen_range(0..2);
    let mut block = |base: i64| (0..rng.gen_range(1..=2)).map(|_| z(base + rng.gen_range(0..2))).collect::<Vec<_>>();
    let first = block(hi);
    let second = block(lo);
    vec![first, second]
}

fn lt_identities() -> Result<(bool, String)> {
    let w = Window::default();
    let mut notes = Vec::new();
    for (name, base) in [("F2[t]", Base::Mod(2)), ("(Z/4)[t]", Base::Mod(4))] {
        let ring = polynomials(base);
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for i in 0..500 {
            let (p, lt) = random_lt_idempotent(&ring, &two_blocks(&mut rng), WitnessMode::General, &mut rng, &w)?;
            let split = idem_split_lt(&p, &lt)?;
            if let Some((id, _)) = split.checks(p.idempotent())?.into_iter().find(|(_, ok)| !ok) {
                return Ok((false, format!("{name}, idempotent {i} (seed 101): {id} fails")));
            }
        }
        for i in 0..200 {
            let blocks = two_blocks(&mut rng);
            let (a, lta) = random_lt_idempotent(&ring, &blocks, WitnessMode::General, &mut rng, &w)?;
            let (b, ltb) = random_lt_idempotent(&ring, &blocks, WitnessMode::General, &mut rng, &w)?;
            let f = random_lt_morphism(&a, &lta, &b, &ltb, WitnessMode::General, &mut rng, &w)?;
            if !naturality_check_ses(&f, &lta, &ltb)? {
                return Ok((false, format!("{name}, morphism {i} (seed 101): a square does not commute")));
            }
        }
        notes.push(format!("{name}: 500 idempotents, 200 morphisms"));
    }
    Ok((true, notes.join("; ")))
}

/// The oracle class of a constant matrix over `Z/n`, as a multiple of the
/// class of `[1]`.
fn oracle_rank(table: &IdemClassTable, group: &K0Group, rows: &[Vec<u64>]) -> Result<i128> {
    let class = |r: &[Vec<u64>]| -> Result<i128> {
        let x = oracle_class(table, r).ok_or_else(|| Error::BudgetExceeded("matrix outside the oracle table".into()))?;
        Ok(group.coordinates(&x)?[0])
    };
    let unit = class(&[vec![1]])?;
    Ok(class(rows)? / unit)
}

fn polynomial_windows() -> Result<(bool, String)> {
    let ring = polynomials(Base::Mod(2));
    let (table, oracle) = k0_bruteforce(ZMod(2), 2)?;
    if !oracle.is_free_of_rank(1) {
        return Ok((false, "oracle group over F2 is not Z".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut compared = 0;
    for k in 1..=4i64 {
        let slots: Vec<GroupElement> = (0..=k).map(z).collect();
        let ctx = KWindow::template(ring.clone(), OrderSpec::orthant(1), &slots, Window::default())?;
        let group = k0_of_window(&ctx);
        let mut labels = group.labels().to_vec();
        labels.sort();
        let expected: Vec<Label> = slots.iter().map(|s| Label::Degree(s.clone())).collect();
        if !group.is_free_of_rank(slots.len()) || labels != expected {
            return Ok((false, format!("window 0..{k}: K0 is not free on the shifts")));
        }
        for s in &slots {
            let free = IdemObject::free(&FreeSysModule::new(ring.clone(), vec![s.clone()])?);
            if k0_class(&free, &ctx)? != K0Element::basis(Label::Degree(s.clone())) {
                return Ok((false, format!("window 0..{k}: class of <{s}>B is not a basis vector")));
            }
        }
        for i in 0..25 {
            let (x, _) = random_window_object(&ctx, 2, WitnessMode::General, &mut rng)?;
            let class = k0_class(&x, &ctx)?;
            let mut by_oracle = K0Element::zero();
            for (slot, block) in ctx.slot_blocks(&x)? {
                let y = ctx.to_slot_ring(&slot, &block)?;
                let one = ctx.slot_ring().ring.group().identity();
                let m = y.idempotent().matrix();
                let rows: Vec<Vec<u64>> = (0..m.rows())
                    .map(|r| (0..m.cols()).map(|c| m.get(r, c).coefficient(&one).to_integer() as u64).collect())
                    .collect();
                by_oracle.add_term(Label::Degree(slot), oracle_rank(&table, &oracle, &rows)? as i64);
            }
            if class != by_oracle {
                return Ok((false, format!("window 0..{k}, sample {i} (seed 202): {class} vs oracle {by_oracle}")));
            }
            compared += 1;
        }
    }
    Ok((true, format!("windows 0..k for k = 1..4 free on shifts; {compared} idempotents agree with the oracle")))
}

fn strong_suite() -> Result<(bool, String)> {
    let w = Window::default();
    let half = Arc::new(SystematicRing::power_localization(2)?);
    for k in -4..=4 {
        if !half.is_strongly_systematic_at(&z(k), &w)? {
            return Ok((false, format!("Z[1/2] not strongly systematic at {k}")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    for i in 0..100 {
        let a = z(rng.gen_range(-4..=4));
        let db = half.dual_basis(&a, &w)?;
        db.verify(&half)?;
        let r = half.sample_in(&a, &mut rng, &w)?;
        let coords_ok = (0..db.pairs.len()).all(|j| half.member(&db.rho(&half, j, &r), &z(0)));
        if db.reconstruct(&half, &r) != r || !coords_ok {
            return Ok((false, format!("dual basis at {a}, sample {i} (seed 303): {r} not reconstructed")));
        }
    }
    let laurent = Arc::new(SystematicRing::laurent(Base::Mod(2), GroupSpec::free_abelian(1)));
    for (name, ring) in [("Z[1/2]", &half), ("F2[Z]", &laurent)] {
        for a in [-2, 1, 3] {
            let nt = nu_tau(ring, &z(a), &w)?;
            let mut xs = Vec::new();
            let mut ts = Vec::new();
            for _ in 0..200 {
                let deg = z(rng.gen_range(-3..=3));
                let inner = ring.group().left_divide(&z(a), &deg)?;
                let x = ring.sample_in(&inner, &mut rng, &w)?;
                let s = ring.sample_in(&z(-a), &mut rng, &w)?;
                ts.push(nt.pure(&s, &x)?);
                xs.push((deg, x));
            }
            if !nt.verify(&xs, &ts)? {
                return Ok((false, format!("{name}, shift {a} (seed 303): ν and τ are not inverse")));
            }
        }
    }
    Ok((true, "|k| ≤ 4 strong; 100 dual-basis samples; ν/τ on 200 elements per shift over Z[1/2] and F2[Z]".into()))
}

fn counterexamples() -> Result<(bool, String)> {
    let w = Window::default();
    let k = Arc::new(SystematicRing::power_localization(2)?);
    let two = k.fraction(2, 1)?;
    let l = PresentedModule::new(k.clone(), Matrix::from_rows(vec![vec![two.clone()]], 1)?)?;
    let before = l.cokernel()?;
    let killed = tensor_extend(&l, &k)?.cokernel_is_zero()?;
    let m = FreeSysModule::new(k.clone(), vec![z(0)])?;
    let times_two = SysMorphism::new(m.clone(), m, Matrix::from_rows(vec![vec![two]], 1)?)?;
    let comp = component_matrix(&times_two, &z(0), &w)?;
    let int: Vec<Vec<i128>> = comp.iter().map(|r| r.iter().map(|c| c.to_integer()).collect()).collect();
    let shown = format!("{int:?}");
    let s = smith(&int, int.first().map_or(0, Vec::len));
    let onto = s.rank == int.len() && s.diag.iter().all(|&d| d == 1);
    let ok = before.torsion == vec![2] && killed && !onto;
    Ok((ok, format!("Z/2 = coker(2) becomes {}; degree-0 component of ·2 is {shown}, onto = {onto}", if killed { "0" } else { "nonzero" })))
}

fn hom_vanishing() -> Result<(bool, String)> {
    let w = Window::default();
    let ring = SystematicRing::monoid_ring(Base::Mod(2), GroupSpec::free_abelian(2), vec![vec![1, 0], vec![0, 1]])?;
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let (mut outside, mut inside) = (0, 0);
    while outside < 100 || inside < 100 {
        let src = GroupElement::free([rng.gen_range(-5..=5), rng.gen_range(-5..=5)]);
        let tgt = GroupElement::free([rng.gen_range(-5..=5), rng.gen_range(-5..=5)]);
        let d = ring.group().left_divide(&tgt, &src)?;
        let positive = ring.in_support(&d);
        let basis = hom_component_basis(&ring, &src, &tgt, &w)?;
        if positive && inside < 100 {
            inside += 1;
            if basis.is_empty() {
                return Ok((false, format!("empty hom from {src} to {tgt} inside the cone (seed 505)")));
            }
        } else if !positive && outside < 100 {
            outside += 1;
            if !basis.is_empty() {
                return Ok((false, format!("nonzero hom from {src} to {tgt} outside the cone (seed 505)")));
            }
        }
    }
    Ok((true, "100 pairs outside the cone give no maps; 100 inside give a basis".into()))
}

fn semidirect() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let product = GroupSpec::semidirect(GroupSpec::free_abelian(1), GroupSpec::cyclic(2), Action::Trivial)?;
    let r = Arc::new(SystematicRing::skew_group_ring(Base::Mod(2), product, vec![vec![1]])?);
    let slots: Vec<GroupElement> = (0..=3).map(z).collect();
    let ctx = KWindow::semidirect(r, OrderSpec::orthant(1), &slots, Window::default())?;
    let iso = theorem_semidirect_iso(&ctx, 30, &mut rng)?;
    if !iso.passed() {
        return Ok((false, format!("Z x C2: {:?}", iso.checks.iter().filter(|c| !c.passed).collect::<Vec<_>>())));
    }
    let swap = GroupSpec::semidirect(GroupSpec::free_abelian(2), GroupSpec::cyclic(2), Action::Swap)?;
    let order = OrderSpec::orthant(2);
    order.check_h_invariance(&swap, &mut rng, 64)?;
    let r = Arc::new(SystematicRing::skew_group_ring(Base::Mod(2), swap, vec![vec![1, 0], vec![0, 1]])?);
    let slots: Vec<GroupElement> = (0..2).flat_map(|a| (0..2).map(move |b| GroupElement::free([a, b]))).collect();
    let ctx = KWindow::semidirect(r, order, &slots, Window::default())?;
    let skew = theorem_semidirect_iso(&ctx, 30, &mut rng)?;
    let ok = skew.passed() && skew.source.rank() == skew.target.rank();
    let failed: Vec<_> = skew.checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
    Ok((
        ok,
        format!(
            "Z x C2 window rank {}; Z^2 x| C2 window ranks {} = {}{}",
            iso.target.rank(),
            skew.source.rank(),
            skew.target.rank(),
            if failed.is_empty() { String::new() } else { format!(", failing {failed:?}") }
        ),
    ))
}

fn toric_cones() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let pts: Vec<Vec<i64>> = (0..3).flat_map(|a| (0..3).map(move |b| vec![a, b])).collect();
    let quad = toric(Base::Mod(2), 2, vec![vec![1, 0], vec![0, 1]], &pts, 20, &mut rng)?;
    let quad_ok = quad.passed() && quad.n_basis.is_empty() && quad.group.is_free_of_rank(pts.len());
    let half = toric(Base::Mod(2), 2, vec![vec![1, 0]], &pts, 20, &mut rng)?;
    let n_ok = half.n_basis.len() == 1 && half.n_basis[0][0] == 0 && half.n_basis[0][1].abs() == 1;
    let half_ok = half.passed() && n_ok && half.group.is_free_of_rank(3);
    let slot = half.checks.iter().find(|c| c.name == "slot_k0_is_z").is_some_and(|c| c.passed);
    Ok((
        quad_ok && half_ok && slot,
        format!(
            "N^2: rank {} on {} points; N x Z: N = {:?}, rank {} on {} cosets, slot K0 = Z: {slot}",
            quad.group.rank(),
            pts.len(),
            half.n_basis,
            half.group.rank(),
            half.cosets.len()
        ),
    ))
}

fn filtered_graded() -> Result<(bool, String)> {
    let f = Arc::new(SystematicRing::filtered_monoid_ring(
        Base::Mod(2),
        GroupSpec::free_abelian(1),
        vec![vec![1]],
        OrderSpec::orthant(1),
    )?);
    let g = polynomials(Base::Mod(2));
    let slots: Vec<GroupElement> = (0..=3).map(z).collect();
    let fw = KWindow::template(f, OrderSpec::orthant(1), &slots, Window::default())?;
    let gw = KWindow::template(g, OrderSpec::orthant(1), &slots, Window::default())?;
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let checks = filtered_graded_agreement(&fw, &gw, 100, &mut rng)?;
    let ok = checks.iter().all(|c| c.passed);
    let detail: Vec<String> = checks.iter().map(|c| format!("{}: {}", c.name, c.detail)).collect();
    Ok((ok, detail.join("; ")))
}

fn oracle_consistency() -> Result<(bool, String)> {
    let mut notes = Vec::new();
    for (n, p) in [(2u64, 2u64), (4, 2)] {
        let (table, group) = k0_bruteforce(ZMod(n), 2)?;
        if !group.is_free_of_rank(1) {
            return Ok((false, format!("Z/{n}: group has rank {} and torsion {:?}", group.rank(), group.torsion())));
        }
        for m in table.idempotents() {
            let rows: Vec<Vec<u64>> = m.entries.chunks(m.size.max(1)).map(<[u64]>::to_vec).collect();
            let rows = if m.size == 0 { Vec::new() } else { rows };
            let ints: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| i128::from(x)).collect()).collect();
            let rank = if m.size == 0 { 0 } else { rank_mod_p(&ints, i128::from(p)) };
            if oracle_rank(&table, &group, &rows)? != rank as i128 {
                return Ok((false, format!("Z/{n}: class of {rows:?} is not its rank {rank}")));
            }
        }
        notes.push(format!("Z/{n}: {} idempotents, {} classes", table.idempotents().len(), table.class_count()));
    }
    Ok((true, notes.join("; ")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_criteria_pass() {
        for id in [4, 5, 9] {
            let o = run_criterion(id);
            assert!(o.passed, "{}", o.line());
        }
    }
}
