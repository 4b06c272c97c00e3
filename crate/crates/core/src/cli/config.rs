//! JSON experiment configurations.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::groups::{Action, FiniteTable, GroupElement, GroupSpec, OrderSpec};
use crate::rings::{Base, SystematicRing, Window};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    VerifyIdentities,
    CheckStrong,
    SplitDemo,
    KzeroWindow,
    ThmSemidirect,
    ThmQuotient,
    CorollaryStrong,
    Toric,
    Counterexamples,
}

const COMMANDS: [(&str, Command); 9] = [
    ("verify-identities", Command::VerifyIdentities),
    ("check-strong", Command::CheckStrong),
    ("split-demo", Command::SplitDemo),
    ("kzero-window", Command::KzeroWindow),
    ("thm-semidirect", Command::ThmSemidirect),
    ("thm-quotient", Command::ThmQuotient),
    ("corollary-strong", Command::CorollaryStrong),
    ("toric", Command::Toric),
    ("counterexamples", Command::Counterexamples),
];

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        COMMANDS
            .iter()
            .find(|(name, _)| *name == s)
            .map(|(_, c)| *c)
            .ok_or_else(|| Error::Config(format!("unknown command '{s}'")))
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = COMMANDS.iter().find(|(_, c)| c == self).map(|(n, _)| *n).unwrap_or("?");
        write!(f, "{name}")
    }
}

/// Sampling and search limits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub samples: usize,
    pub max_per_slot: usize,
    pub search: usize,
    pub window: Window,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { samples: 50, max_per_slot: 2, search: 200, window: Window::default() }
    }
}

/// The cone data of a monoid ring over a lattice, as needed by the toric run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeData {
    pub base: Base,
    pub rank: usize,
    pub functionals: Vec<Vec<i64>>,
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub command: Command,
    pub seed: u64,
    pub group: GroupSpec,
    pub ring: Arc<SystematicRing>,
    /// Order on the slot lattice; `None` picks the default for the command.
    pub order: Option<OrderSpec>,
    /// Slot elements (degrees, `N`-parts or cosets, depending on the group).
    pub slots: Vec<GroupElement>,
    /// Lattice points for the toric run.
    pub points: Vec<Vec<i64>>,
    pub cone: Option<ConeData>,
    pub budget: Budget,
    pub raw: Value,
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::Config(format!("missing field '{key}' in {v}")))
}

fn as_usize(v: &Value, key: &str) -> Result<usize> {
    field(v, key)?.as_u64().map(|x| x as usize).ok_or_else(|| Error::Config(format!("'{key}' must be a non-negative integer")))
}

fn int_rows(v: &Value) -> Result<Vec<Vec<i64>>> {
    serde_json::from_value(v.clone()).map_err(|e| Error::Config(format!("expected integer rows: {e}")))
}

fn kind(v: &Value) -> Result<&str> {
    field(v, "kind")?.as_str().ok_or_else(|| Error::Config("'kind' must be a string".into()))
}

pub fn parse_group(v: &Value) -> Result<GroupSpec> {
    match kind(v)? {
        "free_abelian" => Ok(GroupSpec::free_abelian(as_usize(v, "rank")?)),
        "cyclic" => {
            let n = as_usize(v, "order")?;
            if n == 0 {
                return Err(Error::Config("cyclic group of order 0".into()));
            }
            Ok(GroupSpec::cyclic(n))
        }
        "trivial" => Ok(GroupSpec::trivial()),
        "finite" => {
            let table: Vec<Vec<usize>> = serde_json::from_value(field(v, "table")?.clone())
                .map_err(|e| Error::Config(format!("bad multiplication table: {e}")))?;
            Ok(GroupSpec::FiniteTable(FiniteTable::new(table)?))
        }
        "semidirect" => {
            let action = match field(v, "action")?.as_str() {
                Some("trivial") => Action::Trivial,
                Some("inversion") => Action::Inversion,
                Some("swap") => Action::Swap,
                _ => return Err(Error::Config("action must be trivial, inversion or swap".into())),
            };
            GroupSpec::semidirect(parse_group(field(v, "n")?)?, parse_group(field(v, "h")?)?, action)
        }
        "extension" => {
            let rank = match parse_group(field(v, "g")?)? {
                GroupSpec::FreeAbelian { rank } => rank,
                _ => return Err(Error::Config("extension needs a free abelian ambient group".into())),
            };
            GroupSpec::extension(rank, int_rows(field(v, "n_basis")?)?)
        }
        other => Err(Error::Config(format!("unknown group kind '{other}'"))),
    }
}

pub fn parse_order(v: &Value, rank: usize) -> Result<OrderSpec> {
    OrderSpec::new(rank, int_rows(field(v, "functionals")?)?)
}

pub fn parse_base(v: &Value) -> Result<Base> {
    let s = v.as_str().ok_or_else(|| Error::Config("base must be a string".into()))?;
    let modulus = |t: &str| t.parse::<u64>().ok().filter(|&n| n >= 2);
    match s {
        "Z" => Ok(Base::Integers),
        "Q" => Ok(Base::Rationals),
        _ => s
            .strip_prefix("Z/")
            .or_else(|| s.strip_prefix('F'))
            .and_then(modulus)
            .map(Base::Mod)
            .ok_or_else(|| Error::Config(format!("unknown base '{s}'"))),
    }
}

fn lattice_rank(g: &GroupSpec) -> usize {
    g.lattice_part(&g.identity()).len()
}

/// Parses a ring; its group is the ring's own `group` field or the declared
/// one, and the two must agree when both are given.
pub fn parse_ring(v: &Value, declared: Option<&GroupSpec>) -> Result<(SystematicRing, Option<ConeData>)> {
    let own = v.get("group").map(parse_group).transpose()?;
    if let (Some(a), Some(b)) = (&own, declared) {
        if a != b {
            return Err(Error::Config(format!("ring group {} differs from declared group {}", a.describe(), b.describe())));
        }
    }
    let group = own.or_else(|| declared.cloned());
    let need_group = || group.clone().ok_or_else(|| Error::Config("ring needs a group".into()));
    let cone = || v.get("support_cone").map(int_rows).transpose().map(Option::unwrap_or_default);
    let k = kind(v)?;
    let ring = match k {
        "monoid_ring" => SystematicRing::monoid_ring(parse_base(field(v, "base")?)?, need_group()?, cone()?)?,
        "laurent_group_ring" => SystematicRing::laurent(parse_base(field(v, "base")?)?, need_group()?),
        "skew_group_ring" => SystematicRing::skew_group_ring(parse_base(field(v, "base")?)?, need_group()?, cone()?)?,
        "filtered_monoid_ring" => {
            let g = need_group()?;
            let order = parse_order(field(v, "order")?, lattice_rank(&g))?;
            SystematicRing::filtered_monoid_ring(parse_base(field(v, "base")?)?, g, cone()?, order)?
        }
        "power_localization" | "power_filtration" => {
            if let Some(g) = &group {
                if *g != GroupSpec::free_abelian(1) {
                    return Err(Error::Config("localizations are graded by Z".into()));
                }
            }
            let s = field(v, "s")?.as_i64().ok_or_else(|| Error::Config("'s' must be an integer".into()))?;
            if k == "power_localization" {
                SystematicRing::power_localization(s)?
            } else {
                SystematicRing::power_filtration(s)?
            }
        }
        other => return Err(Error::Config(format!("unknown ring kind '{other}'"))),
    };
    let cone = match (k, ring.group()) {
        ("monoid_ring", GroupSpec::FreeAbelian { rank }) => {
            Some(ConeData { base: ring.base(), rank: *rank, functionals: ring.support_functionals().to_vec() })
        }
        _ => None,
    };
    Ok((ring, cone))
}

/// The group in which window slots live: `N` for `N ⋊ H`, `H` for a
/// lattice extension, `G` otherwise.
pub fn slot_group(g: &GroupSpec, command: Command) -> GroupSpec {
    let kzero = matches!(
        command,
        Command::KzeroWindow | Command::ThmSemidirect | Command::ThmQuotient | Command::CorollaryStrong
    );
    match g {
        GroupSpec::Semidirect { n, .. } if kzero => (**n).clone(),
        GroupSpec::Extension(e) if kzero => GroupSpec::free_abelian(e.h_rank()),
        _ => g.clone(),
    }
}

impl ExperimentConfig {
    pub fn from_json(v: &Value) -> Result<Self> {
        let command: Command = field(v, "command")?
            .as_str()
            .ok_or_else(|| Error::Config("'command' must be a string".into()))?
            .parse()?;
        let seed = match v.get("seed") {
            None => 0,
            Some(s) => s.as_u64().ok_or_else(|| Error::Config("'seed' must be a non-negative integer".into()))?,
        };
        let declared = v.get("group").map(parse_group).transpose()?;
        let (ring, cone) = parse_ring(field(v, "ring")?, declared.as_ref())?;
        let group = ring.group().clone();
        let slot_g = slot_group(&group, command);
        let window = v.get("window").cloned().unwrap_or(Value::Null);
        let slots = match window.get("slots") {
            Some(Value::Array(xs)) => xs.iter().map(|x| slot_g.parse_element(x)).collect::<Result<Vec<_>>>()?,
            Some(_) => return Err(Error::Config("'window.slots' must be an array".into())),
            None => Vec::new(),
        };
        let points = window.get("points").map(int_rows).transpose()?.unwrap_or_default();
        if slots.is_empty() && points.is_empty() && !window.is_object() {
            return Err(Error::Config("missing 'window' with 'slots' or 'points'".into()));
        }
        let order = v.get("order").map(|o| parse_order(o, lattice_rank(&slot_g))).transpose()?;
        let mut budget = Budget::default();
        if let Some(b) = v.get("budget") {
            let get = |k: &str, d: usize| -> Result<usize> { b.get(k).map_or(Ok(d), |_| as_usize(b, k)) };
            budget.samples = get("samples", budget.samples)?;
            budget.max_per_slot = get("max_per_slot", budget.max_per_slot)?.max(1);
            budget.search = get("search", budget.search)?;
            budget.window.radius = get("radius", budget.window.radius as usize)? as i64;
        }
        Ok(ExperimentConfig { command, seed, group, ring: Arc::new(ring), order, slots, points, cone, budget, raw: v.clone() })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid JSON: {e}")))?;
        Self::from_json(&v)
    }
}
