//! Command execution and reports.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::config::{Command, ExperimentConfig};
use crate::error::{Error, Result};
use crate::groups::{linear_extension, GroupElement, GroupSpec, OrderSpec};
use crate::kzero::{
    corollary_strong_reduction, k0_class, k0_of_window, random_window_object, theorem_quotient_iso,
    theorem_semidirect_iso, toric, Check, K0Element, KWindow, Label,
};
use crate::linalg::smith;
use crate::modcat::random::{random_blocks, random_lt_idempotent, random_lt_morphism};
use crate::modcat::{
    component_matrix, idem_split_lt, naturality_check_ses, nu_tau, rho_not_natural_witness, tensor_extend,
    FreeSysModule, IdemObject, PresentedModule, SysMorphism, WitnessMode,
};
use crate::rings::Matrix;

/// A finished run: the JSON document and the overall verdict.
#[derive(Clone, Debug)]
pub struct Report {
    pub json: Value,
    pub passed: bool,
}

impl Report {
    /// One line per check, for the terminal.
    pub fn summary(&self) -> String {
        let mut out = format!(
            "{} (seed {}): {}\n",
            self.json["command"].as_str().unwrap_or("?"),
            self.json["seed"],
            if self.passed { "PASS" } else { "FAIL" }
        );
        for c in self.json["checks"].as_array().into_iter().flatten() {
            out.push_str(&format!(
                "  [{}] {}: {}\n",
                if c["passed"].as_bool() == Some(true) { "ok" } else { "FAIL" },
                c["name"].as_str().unwrap_or("?"),
                c["detail"].as_str().unwrap_or("")
            ));
        }
        out
    }
}

struct Outcome {
    checks: Vec<Check>,
    results: Value,
}

/// Runs one experiment. Errors raised while running are reported as a failed
/// check, never as a panic.
pub fn run(cfg: &ExperimentConfig) -> Report {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let outcome = dispatch(cfg, &mut rng).unwrap_or_else(|e| Outcome {
        checks: vec![Check::new("run", false, format!("error: {e}"))],
        results: Value::Null,
    });
    let failed = outcome.checks.iter().filter(|c| !c.passed).count();
    let passed = failed == 0;
    let json = json!({
        "command": cfg.command.to_string(),
        "seed": cfg.seed,
        "config": cfg.raw,
        "ring": cfg.ring.to_json(),
        "passed": passed,
        "counts": { "checks": outcome.checks.len(), "failed": failed },
        "checks": outcome.checks.iter().map(Check::to_json).collect::<Vec<_>>(),
        "results": outcome.results,
        "replay": { "seed": cfg.seed, "command": cfg.command.to_string() },
        "timings_ms": { "total": start.elapsed().as_millis() as u64 },
    });
    Report { json, passed }
}

fn dispatch(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    match cfg.command {
        Command::VerifyIdentities => verify_identities(cfg, rng),
        Command::CheckStrong => check_strong(cfg, rng),
        Command::SplitDemo => split_demo(cfg, rng),
        Command::KzeroWindow => kzero_window(cfg, rng),
        Command::ThmSemidirect => {
            let iso = theorem_semidirect_iso(&window_ctx(cfg)?, cfg.budget.samples, rng)?;
            Ok(iso_outcome(iso))
        }
        Command::ThmQuotient => {
            let iso = theorem_quotient_iso(&window_ctx(cfg)?, cfg.budget.samples, rng)?;
            Ok(iso_outcome(iso))
        }
        Command::CorollaryStrong => {
            let (group, checks) = corollary_strong_reduction(&window_ctx(cfg)?, cfg.budget.samples, rng)?;
            Ok(Outcome { checks, results: json!({ "k0": group.to_json() }) })
        }
        Command::Toric => {
            let cone = cfg.cone.as_ref().ok_or_else(|| {
                Error::Config("toric runs need a monoid ring over a free abelian group".into())
            })?;
            let report = toric(cone.base, cone.rank, cone.functionals.clone(), &cfg.points, cfg.budget.samples, rng)?;
            let mut checks = report.iso.checks.clone();
            checks.push(Check::new("bijective", report.iso.bijective, "window basis map"));
            checks.extend(report.checks.iter().cloned());
            Ok(Outcome { checks, results: report.to_json() })
        }
        Command::Counterexamples => counterexamples(cfg, rng),
    }
}

fn iso_outcome(iso: crate::kzero::WindowIso) -> Outcome {
    let mut checks = vec![Check::new("bijective", iso.bijective, format!("{} basis images", iso.images.len()))];
    checks.extend(iso.checks.iter().cloned());
    Outcome { checks, results: iso.to_json() }
}

fn lattice_rank(g: &GroupSpec) -> usize {
    g.lattice_part(&g.identity()).len()
}

/// The window context implied by the group: `N`-part slots for `N ⋊ H`,
/// coset slots for an extension, degree slots otherwise.
fn window_ctx(cfg: &ExperimentConfig) -> Result<KWindow> {
    let ring = cfg.ring.clone();
    let w = cfg.budget.window;
    match &cfg.group {
        GroupSpec::Semidirect { n, .. } => {
            let order = cfg.order.clone().unwrap_or_else(|| OrderSpec::orthant(lattice_rank(n)));
            KWindow::semidirect(ring, order, &cfg.slots, w)
        }
        GroupSpec::Extension(e) => {
            let order = match &cfg.order {
                Some(o) => o.clone(),
                None => OrderSpec::new(e.h_rank(), e.functionals_on_h(ring.support_functionals()))?,
            };
            KWindow::quotient(ring, order, &cfg.slots, w)
        }
        g => {
            let order = cfg.order.clone().unwrap_or_else(|| OrderSpec::orthant(lattice_rank(g)));
            KWindow::template(ring, order, &cfg.slots, w)
        }
    }
}

/// Window slots sorted larger first under the configured order.
fn sorted_slots(cfg: &ExperimentConfig) -> Result<Vec<GroupElement>> {
    let order = cfg.order.clone().unwrap_or_else(|| OrderSpec::orthant(lattice_rank(&cfg.group)));
    linear_extension(&order, &cfg.slots)
}

fn two_slots<R: Rng>(slots: &[GroupElement], rng: &mut R) -> Result<[GroupElement; 2]> {
    if slots.len() < 2 {
        return Err(Error::Config("this command needs at least two window slots".into()));
    }
    let i = rng.gen_range(0..slots.len() - 1);
    let j = rng.gen_range(i + 1..slots.len());
    Ok([slots[i].clone(), slots[j].clone()])
}

fn verify_identities(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let slots = sorted_slots(cfg)?;
    let w = &cfg.budget.window;
    let mut split_fail = None;
    let mut nat_fail = None;
    for i in 0..cfg.budget.samples {
        let pair = two_slots(&slots, rng)?;
        let blocks = random_blocks(&pair, cfg.budget.max_per_slot, rng);
        let (p, lt) = random_lt_idempotent(&cfg.ring, &blocks, WitnessMode::General, rng, w)?;
        let split = idem_split_lt(&p, &lt)?;
        if let Some((name, _)) = split.checks(p.idempotent())?.into_iter().find(|(_, ok)| !ok) {
            split_fail.get_or_insert(format!("sample {i}: {name} fails on {}", p.idempotent().to_json()));
        }
        let (q, ltq) = random_lt_idempotent(&cfg.ring, &blocks, WitnessMode::General, rng, w)?;
        let f = random_lt_morphism(&p, &lt, &q, &ltq, WitnessMode::General, rng, w)?;
        if !naturality_check_ses(&f, &lt, &ltq)? {
            nat_fail.get_or_insert(format!("sample {i}: square fails for {}", f.map().to_json()));
        }
    }
    let n = cfg.budget.samples;
    Ok(Outcome {
        checks: vec![
            Check::new("splitting_identities", split_fail.is_none(), split_fail.unwrap_or_else(|| format!("{n} idempotents"))),
            Check::new("ses_naturality", nat_fail.is_none(), nat_fail.unwrap_or_else(|| format!("{n} morphisms"))),
        ],
        results: json!({ "idempotents": n, "morphisms": n }),
    })
}

fn check_strong(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let ring = &cfg.ring;
    let w = &cfg.budget.window;
    let mut checks = Vec::new();
    let mut degrees = Vec::new();
    for g in &cfg.slots {
        let strong = ring.is_strongly_systematic_at(g, w)?;
        let mut entry = json!({ "degree": g.to_json(), "strong": strong });
        if strong {
            let db = ring.dual_basis(g, w)?;
            let verified = db.verify(ring).is_ok();
            let mut rebuilt = true;
            for _ in 0..cfg.budget.samples {
                let r = ring.sample_in(g, rng, w)?;
                rebuilt &= db.reconstruct(ring, &r) == r;
            }
            checks.push(Check::new(
                &format!("dual_basis_at_{g}"),
                verified && rebuilt,
                format!("{} pairs, {} reconstructions", db.pairs.len(), cfg.budget.samples),
            ));
            entry["dual_basis_pairs"] = json!(db.pairs.len());
            match nu_tau(ring, g, w) {
                Ok(nt) => {
                    let mut xs = Vec::new();
                    let mut ts = Vec::new();
                    for _ in 0..cfg.budget.samples {
                        let deg = cfg.slots[rng.gen_range(0..cfg.slots.len())].clone();
                        let x = ring.sample_in(&ring.group().left_divide(g, &deg)?, rng, w)?;
                        let inv = ring.group().invert(g)?;
                        ts.push(nt.pure(&ring.sample_in(&inv, rng, w)?, &x)?);
                        xs.push((deg, x));
                    }
                    checks.push(Check::new(&format!("nu_tau_at_{g}"), nt.verify(&xs, &ts)?, "ν∘τ and τ∘ν are identities"));
                }
                Err(Error::InvalidSpec(m)) => entry["nu_tau"] = json!(format!("skipped: {m}")),
                Err(e) => return Err(e),
            }
        }
        degrees.push(entry);
    }
    let all = degrees.iter().all(|d| d["strong"] == json!(true));
    Ok(Outcome { checks, results: json!({ "degrees": degrees, "strong_on_window": all }) })
}

fn split_demo(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let slots = sorted_slots(cfg)?;
    let w = &cfg.budget.window;
    let pair = two_slots(&slots, rng)?;
    let blocks = random_blocks(&pair, cfg.budget.max_per_slot, rng);
    let (p, lt) = random_lt_idempotent(&cfg.ring, &blocks, WitnessMode::General, rng, w)?;
    let split = idem_split_lt(&p, &lt)?;
    let checks: Vec<Check> =
        split.checks(p.idempotent())?.into_iter().map(|(name, ok)| Check::new(name, ok, "exact")).collect();
    let witness = match rho_not_natural_witness(&cfg.ring, (&pair[0], &pair[1]), WitnessMode::General, cfg.budget.search, rng, w) {
        Ok(wt) => json!({
            "attempts": wt.attempts,
            "source": wt.source.idempotent().to_json(),
            "target": wt.target.idempotent().to_json(),
            "f": wt.f.to_json(),
            "rho_after_f": wt.rho_after_f.to_json(),
            "f22_after_rho": wt.f22_after_rho.to_json(),
        }),
        Err(Error::SearchExhausted(n)) => json!(format!("search exhausted after {n} candidates")),
        Err(e) => return Err(e),
    };
    Ok(Outcome {
        checks,
        results: json!({
            "blocks": lt.sizes(),
            "p": p.idempotent().to_json(),
            "p11": split.p11.to_json(),
            "p21": split.p21.to_json(),
            "p22": split.p22.to_json(),
            "pi_rho": split.pi_rho.to_json(),
            "m": split.m.to_json(),
            "rho_not_natural": witness,
        }),
    })
}

fn kzero_window(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let ctx = window_ctx(cfg)?;
    let group = k0_of_window(&ctx);
    let mut checks = Vec::new();
    let mut basis_ok = true;
    for s in ctx.slots() {
        let free = IdemObject::free(&FreeSysModule::new(ctx.ring().clone(), vec![ctx.reference(s)?])?);
        basis_ok &= k0_class(&free, &ctx)? == K0Element::basis(ctx.label(s));
    }
    checks.push(Check::new("free_generators_are_basis", basis_ok, format!("{} slots", ctx.slots().len())));
    let mut add_fail = None;
    let mut classes = Vec::new();
    if !ctx.slots().is_empty() {
        for i in 0..cfg.budget.samples {
            let (x, _) = random_window_object(&ctx, cfg.budget.max_per_slot, WitnessMode::General, rng)?;
            let (y, _) = random_window_object(&ctx, cfg.budget.max_per_slot, WitnessMode::General, rng)?;
            let cx = k0_class(&x, &ctx)?;
            let sum = k0_class(&x.direct_sum(&y), &ctx)?;
            if sum != cx.add(&k0_class(&y, &ctx)?) {
                add_fail.get_or_insert(format!("sample {i}: [X⊕Y] = {sum}"));
            }
            if i < 5 {
                classes.push(json!({ "object": x.idempotent().to_json(), "class": cx.to_json() }));
            }
        }
    }
    checks.push(Check::new("additivity", add_fail.is_none(), add_fail.unwrap_or_else(|| format!("{} pairs", if ctx.slots().is_empty() { 0 } else { cfg.budget.samples }))));
    let labels: Vec<Label> = ctx.labels();
    Ok(Outcome {
        checks,
        results: json!({
            "k0": group.to_json(),
            "rank": group.rank(),
            "slots": labels.iter().map(Label::to_json).collect::<Vec<_>>(),
            "sample_classes": classes,
        }),
    })
}

fn counterexamples(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let ring = &cfg.ring;
    let w = &cfg.budget.window;
    if let Some((s, _)) = ring.localization() {
        let s_elem = ring.fraction(i128::from(s), 1)?;
        let l = PresentedModule::new(ring.clone(), Matrix::from_rows(vec![vec![s_elem.clone()]], 1)?)?;
        let shape = l.cokernel()?;
        let ext = tensor_extend(&l, ring)?;
        let killed = ext.cokernel_is_zero()?;
        let g = ring.group();
        let m = FreeSysModule::new(ring.clone(), vec![g.identity()])?;
        let times_s = SysMorphism::new(m.clone(), m, Matrix::from_rows(vec![vec![s_elem]], 1)?)?;
        let comp = component_matrix(&times_s, &g.identity(), w)?;
        let ints: Vec<Vec<i128>> = comp.iter().map(|r| r.iter().map(|c| c.to_integer()).collect()).collect();
        let snf = smith(&ints, ints.first().map_or(0, Vec::len));
        let onto = snf.rank == ints.len() && snf.diag.iter().all(|&d| d == 1);
        let comp_json: Vec<Vec<String>> = comp.iter().map(|r| r.iter().map(|c| c.to_string()).collect()).collect();
        return Ok(Outcome {
            checks: vec![
                Check::new("tau_kills_torsion", shape.torsion == vec![i128::from(s)] && killed, format!("Z/{s} becomes 0")),
                Check::new("rho_not_onto", !onto, format!("degree-0 component of ·{s} is {comp_json:?}")),
            ],
            results: json!({
                "presentation": l.to_json(),
                "before": { "torsion": shape.torsion.iter().map(|t| t.to_string()).collect::<Vec<_>>(), "free": shape.free },
                "after_zero": killed,
                "rho_component": comp_json,
                "rho_onto": onto,
            }),
        });
    }
    let slots = sorted_slots(cfg)?;
    let pair = two_slots(&slots, rng)?;
    let found = rho_not_natural_witness(ring, (&pair[0], &pair[1]), WitnessMode::General, cfg.budget.search, rng, w);
    let results = match &found {
        Ok(wt) => json!({ "rho_not_natural": { "attempts": wt.attempts, "f": wt.f.to_json(),
            "rho_after_f": wt.rho_after_f.to_json(), "f22_after_rho": wt.f22_after_rho.to_json() } }),
        Err(Error::SearchExhausted(n)) => json!({ "rho_not_natural": format!("search exhausted after {n} candidates") }),
        Err(e) => return Err(e.clone()),
    };
    Ok(Outcome { checks: vec![Check::new("rho_search", true, "witness search completed")], results })
}
