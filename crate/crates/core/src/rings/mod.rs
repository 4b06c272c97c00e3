//! Concrete G-systematic rings.
//!
//! A ring here is a group `G` together with a rule deciding, for each degree
//! `g`, the additive subgroup `R_g`. Two families are exact and decidable:
//!
//! - monoid rings `B[A]` over `B ∈ {Z, Q, Z/n}` with `A ⊆ G` cut out by cone
//!   functionals, either graded (`R_g = B⟦g⟧`) or filtered by an order on `G`
//!   (`R_g = span{⟦a⟧ : a ≤ g}`); Laurent rings and skew group rings are the
//!   special cases `A = G` and `G = N ⋊ H`;
//! - power localizations `Z[1/s]`, either with `R_k = s^k Z` or with the
//!   positive filtration `F^k = s^{-k} Z` for `k ≥ 0`.
//!
//! Components that are not finitely generated are only ever enumerated inside
//! a caller-declared [`Window`].

mod base;
mod elem;
mod matrix;
mod strong;
mod subring;

pub use base::{int, Base, Coeff, RankRule};
pub use elem::RingElem;
#[allow(unused_imports)]
pub(crate) use elem::coeff_json;
pub use matrix::{Matrix, RingOps, ZMod};
pub use strong::DualBasis;
pub use subring::{Restriction, Subgroup};

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::groups::{GroupElement, GroupSpec, OrderSpec};

/// Bounds for enumerating generators of infinite components: lattice
/// coordinates are searched in `[-radius, radius]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub radius: i64,
}

impl Default for Window {
    fn default() -> Self {
        Window { radius: 12 }
    }
}

/// How a monoid ring assigns components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ComponentRule {
    Graded,
    /// `R_g` spanned by monomials `a ≤ g`.
    Filtered(OrderSpec),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalizationRule {
    /// `R_k = s^k Z`; strongly systematic.
    Powers,
    /// `F^k = s^{-k} Z` for `k ≥ 0` and `F^{-1} = 0`.
    PositiveFiltration,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RingTag {
    MonoidRing,
    LaurentGroupRing,
    SkewGroupRing,
    PowerLocalization,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Kind {
    Monoid {
        base: Base,
        /// Cone functionals on the lattice part; empty means all of `G`.
        support: Vec<Vec<i64>>,
        rule: ComponentRule,
    },
    Localization {
        s: i64,
        rule: LocalizationRule,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystematicRing {
    tag: RingTag,
    group: GroupSpec,
    kind: Kind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Mul,
    Neg,
}

impl SystematicRing {
    /// `B[A]` graded by `G`, with `A = {g : L(lattice_part(g)) ≥ 0 ∀ L}`.
    pub fn monoid_ring(base: Base, group: GroupSpec, support: Vec<Vec<i64>>) -> Result<Self> {
        Self::check_support(&group, &support)?;
        let tag = if support.is_empty() { RingTag::LaurentGroupRing } else { RingTag::MonoidRing };
        Ok(SystematicRing { tag, group, kind: Kind::Monoid { base, support, rule: ComponentRule::Graded } })
    }

    pub fn laurent(base: Base, group: GroupSpec) -> Self {
        SystematicRing {
            tag: RingTag::LaurentGroupRing,
            group,
            kind: Kind::Monoid { base, support: Vec::new(), rule: ComponentRule::Graded },
        }
    }

    /// `B[A] ⋊ H` over `G = N ⋊ H`, with `A = N⁺ ⋊ H`. The twist
    /// `⟦h⟧⟦n⟧ = ⟦θ(h)(n)⟧⟦h⟧` is the group law of `N ⋊ H`. The cone on `N`
    /// must be `H`-invariant.
    pub fn skew_group_ring(base: Base, group: GroupSpec, support: Vec<Vec<i64>>) -> Result<Self> {
        let GroupSpec::Semidirect { n, .. } = &group else {
            return Err(Error::InvalidSpec("skew group ring needs a semidirect product".into()));
        };
        Self::check_support(&group, &support)?;
        if !support.is_empty() {
            let order = OrderSpec::new(n.lattice_part(&n.identity()).len(), support.clone())?;
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            order.check_h_invariance(&group, &mut rng, 64)?;
        }
        Ok(SystematicRing {
            tag: RingTag::SkewGroupRing,
            group,
            kind: Kind::Monoid { base, support, rule: ComponentRule::Graded },
        })
    }

    /// `B[A]` over a lattice with components `R_g = span{⟦a⟧ : a ∈ A, a ≤ g}`.
    pub fn filtered_monoid_ring(
        base: Base,
        group: GroupSpec,
        support: Vec<Vec<i64>>,
        order: OrderSpec,
    ) -> Result<Self> {
        let GroupSpec::FreeAbelian { rank } = group else {
            return Err(Error::InvalidSpec("filtered monoid rings need a free abelian group".into()));
        };
        if order.rank() != rank {
            return Err(Error::InvalidSpec("order rank differs from group rank".into()));
        }
        Self::check_support(&group, &support)?;
        Ok(SystematicRing {
            tag: RingTag::MonoidRing,
            group,
            kind: Kind::Monoid { base, support, rule: ComponentRule::Filtered(order) },
        })
    }

    /// `Z[1/s]` graded by `Z` with `R_k = s^k Z`.
    pub fn power_localization(s: i64) -> Result<Self> {
        Self::new_localization(s, LocalizationRule::Powers)
    }

    /// `Z[1/s]` positively filtered by `F^k = s^{-k} Z`.
    pub fn power_filtration(s: i64) -> Result<Self> {
        Self::new_localization(s, LocalizationRule::PositiveFiltration)
    }

    fn new_localization(s: i64, rule: LocalizationRule) -> Result<Self> {
        if s < 2 {
            return Err(Error::InvalidSpec(format!("inverted integer must be at least 2, got {s}")));
        }
        Ok(SystematicRing {
            tag: RingTag::PowerLocalization,
            group: GroupSpec::free_abelian(1),
            kind: Kind::Localization { s, rule },
        })
    }

    fn check_support(group: &GroupSpec, support: &[Vec<i64>]) -> Result<()> {
        let r = group.lattice_part(&group.identity()).len();
        if support.iter().any(|l| l.len() != r) {
            return Err(Error::InvalidSpec(format!("support functionals must have length {r}")));
        }
        Ok(())
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn tag(&self) -> RingTag {
        self.tag
    }

    /// The coefficient ring (`Z` for power localizations).
    pub fn base(&self) -> Base {
        match &self.kind {
            Kind::Monoid { base, .. } => *base,
            Kind::Localization { .. } => Base::Integers,
        }
    }

    pub fn support_functionals(&self) -> &[Vec<i64>] {
        match &self.kind {
            Kind::Monoid { support, .. } => support,
            Kind::Localization { .. } => &[],
        }
    }

    pub fn component_rule(&self) -> Option<&ComponentRule> {
        match &self.kind {
            Kind::Monoid { rule, .. } => Some(rule),
            Kind::Localization { .. } => None,
        }
    }

    pub fn localization(&self) -> Option<(i64, LocalizationRule)> {
        match &self.kind {
            Kind::Localization { s, rule } => Some((*s, *rule)),
            Kind::Monoid { .. } => None,
        }
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            Kind::Monoid { base, support, rule } => {
                let kind = match (self.tag, rule) {
                    (RingTag::SkewGroupRing, _) => "skew monoid ring",
                    (_, ComponentRule::Filtered(_)) => "filtered monoid ring",
                    (RingTag::LaurentGroupRing, _) => "group ring",
                    _ => "monoid ring",
                };
                format!("{kind} {base}[{}] (cone {support:?})", self.group.describe())
            }
            Kind::Localization { s, rule: LocalizationRule::Powers } => format!("Z[1/{s}], R_k = {s}^k Z"),
            Kind::Localization { s, rule: LocalizationRule::PositiveFiltration } => {
                format!("Z[1/{s}], F^k = {s}^-k Z (k >= 0)")
            }
        }
    }

    /// Whether `⟦g⟧` lies in the support monoid.
    pub fn in_support(&self, g: &GroupElement) -> bool {
        if !self.group.contains(g) {
            return false;
        }
        let x = self.group.lattice_part(g);
        self.support_functionals()
            .iter()
            .all(|l| l.iter().zip(&x).map(|(a, b)| a * b).sum::<i64>() >= 0)
    }

    // ---- element construction ----

    pub fn zero(&self) -> RingElem {
        match self.kind {
            Kind::Monoid { .. } => RingElem::Terms(Vec::new()),
            Kind::Localization { .. } => RingElem::Fraction(Coeff::zero()),
        }
    }

    pub fn one(&self) -> RingElem {
        self.scalar(Coeff::one())
    }

    /// `c · 1`; `c` is reduced into the base.
    pub fn scalar(&self, c: Coeff) -> RingElem {
        match self.kind {
            Kind::Monoid { base, .. } => self.canonical(vec![(self.group.identity(), c)], base),
            Kind::Localization { .. } => RingElem::Fraction(c),
        }
    }

    pub fn monomial(&self, g: &GroupElement, c: Coeff) -> Result<RingElem> {
        self.from_terms(vec![(g.clone(), c)])
    }

    pub fn from_terms(&self, terms: Vec<(GroupElement, Coeff)>) -> Result<RingElem> {
        let Kind::Monoid { base, .. } = self.kind else {
            return Err(Error::SpecMismatch("terms given for a power localization".into()));
        };
        for (g, c) in &terms {
            if !self.in_support(g) {
                return Err(Error::InvalidElement(format!("degree {g} outside the support")));
            }
            base.normalize(*c)?;
        }
        Ok(self.canonical(terms, base))
    }

    pub fn fraction(&self, num: i128, den: i128) -> Result<RingElem> {
        let x = RingElem::Fraction(Coeff::new(num, den));
        self.validate(&x)?;
        Ok(x)
    }

    fn canonical(&self, terms: Vec<(GroupElement, Coeff)>, base: Base) -> RingElem {
        let mut acc: BTreeMap<GroupElement, Coeff> = BTreeMap::new();
        for (g, c) in terms {
            let e = acc.entry(g).or_insert_with(Coeff::zero);
            *e = base.add(e, &c);
        }
        RingElem::Terms(acc.into_iter().filter(|(_, c)| !c.is_zero()).collect())
    }

    /// Checks that `x` is a canonical element of this ring.
    pub fn validate(&self, x: &RingElem) -> Result<()> {
        match (&self.kind, x) {
            (Kind::Monoid { base, .. }, RingElem::Terms(t)) => {
                for w in t.windows(2) {
                    if w[0].0 >= w[1].0 {
                        return Err(Error::InvalidElement("support not strictly sorted".into()));
                    }
                }
                for (g, c) in t {
                    if !self.in_support(g) {
                        return Err(Error::InvalidElement(format!("degree {g} outside the support")));
                    }
                    if c.is_zero() || base.normalize(*c)? != *c {
                        return Err(Error::InvalidElement(format!("coefficient {c} not canonical")));
                    }
                }
                Ok(())
            }
            (Kind::Localization { s, .. }, RingElem::Fraction(c)) => {
                let mut d = *c.denom();
                let s = i128::from(*s);
                loop {
                    let g = num_integer::gcd(d, s);
                    if g == 1 {
                        break;
                    }
                    while d % g == 0 {
                        d /= g;
                    }
                }
                if d == 1 {
                    Ok(())
                } else {
                    Err(Error::InvalidElement(format!("{c} has a denominator not dividing a power of {s}")))
                }
            }
            _ => Err(Error::SpecMismatch(format!("{x} does not belong to {}", self.describe()))),
        }
    }

    // ---- arithmetic (operands assumed valid) ----

    pub fn add(&self, x: &RingElem, y: &RingElem) -> RingElem {
        match (&self.kind, x, y) {
            (Kind::Monoid { base, .. }, RingElem::Terms(a), RingElem::Terms(b)) => {
                let mut out = Vec::with_capacity(a.len() + b.len());
                let (mut i, mut j) = (0, 0);
                while i < a.len() || j < b.len() {
                    if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                        out.push(a[i].clone());
                        i += 1;
                    } else if i == a.len() || b[j].0 < a[i].0 {
                        out.push(b[j].clone());
                        j += 1;
                    } else {
                        let c = base.add(&a[i].1, &b[j].1);
                        if !c.is_zero() {
                            out.push((a[i].0.clone(), c));
                        }
                        i += 1;
                        j += 1;
                    }
                }
                RingElem::Terms(out)
            }
            (Kind::Localization { .. }, RingElem::Fraction(a), RingElem::Fraction(b)) => RingElem::Fraction(a + b),
            _ => panic!("operands do not belong to {}", self.describe()),
        }
    }

    pub fn neg(&self, x: &RingElem) -> RingElem {
        match (&self.kind, x) {
            (Kind::Monoid { base, .. }, RingElem::Terms(a)) => {
                RingElem::Terms(a.iter().map(|(g, c)| (g.clone(), base.neg(c))).collect())
            }
            (Kind::Localization { .. }, RingElem::Fraction(a)) => RingElem::Fraction(-a),
            _ => panic!("operand does not belong to {}", self.describe()),
        }
    }

    pub fn sub(&self, x: &RingElem, y: &RingElem) -> RingElem {
        self.add(x, &self.neg(y))
    }

    pub fn mul(&self, x: &RingElem, y: &RingElem) -> RingElem {
        match (&self.kind, x, y) {
            (Kind::Monoid { base, .. }, RingElem::Terms(a), RingElem::Terms(b)) => {
                if a.is_empty() || b.is_empty() {
                    return RingElem::Terms(Vec::new());
                }
                let mut acc: BTreeMap<GroupElement, Coeff> = BTreeMap::new();
                for (g, c) in a {
                    for (h, d) in b {
                        let gh = self.group.compose(g, h).expect("degrees are group elements");
                        let e = acc.entry(gh).or_insert_with(Coeff::zero);
                        *e = base.add(e, &base.mul(c, d));
                    }
                }
                RingElem::Terms(acc.into_iter().filter(|(_, c)| !c.is_zero()).collect())
            }
            (Kind::Localization { .. }, RingElem::Fraction(a), RingElem::Fraction(b)) => RingElem::Fraction(a * b),
            _ => panic!("operands do not belong to {}", self.describe()),
        }
    }

    /// `c · x` for a base coefficient `c`.
    pub fn scale(&self, c: &Coeff, x: &RingElem) -> RingElem {
        match (&self.kind, x) {
            (Kind::Monoid { base, .. }, RingElem::Terms(a)) => RingElem::Terms(
                a.iter()
                    .map(|(g, d)| (g.clone(), base.mul(c, d)))
                    .filter(|(_, d)| !d.is_zero())
                    .collect(),
            ),
            (Kind::Localization { .. }, RingElem::Fraction(a)) => RingElem::Fraction(a * c),
            _ => panic!("operand does not belong to {}", self.describe()),
        }
    }

    /// Validated arithmetic; `y` is ignored for negation.
    pub fn arith(&self, op: ArithOp, x: &RingElem, y: &RingElem) -> Result<RingElem> {
        self.validate(x)?;
        if op != ArithOp::Neg {
            self.validate(y)?;
        }
        Ok(match op {
            ArithOp::Add => self.add(x, y),
            ArithOp::Mul => self.mul(x, y),
            ArithOp::Neg => self.neg(x),
        })
    }

    // ---- components ----

    fn power(&self, s: i64, k: i64) -> Option<Coeff> {
        let p = i128::from(s).checked_pow(u32::try_from(k.unsigned_abs()).ok()?)?;
        Some(if k >= 0 { Coeff::from_integer(p) } else { Coeff::new(1, p) })
    }

    fn degree_scalar(&self, g: &GroupElement) -> Option<i64> {
        g.coords().filter(|c| c.len() == 1).map(|c| c[0])
    }

    /// Decides `x ∈ R_g`.
    pub fn member(&self, x: &RingElem, g: &GroupElement) -> bool {
        if x.is_zero() {
            return true;
        }
        if !self.group.contains(g) {
            return false;
        }
        match (&self.kind, x) {
            (Kind::Monoid { rule: ComponentRule::Graded, .. }, RingElem::Terms(t)) => t.len() == 1 && t[0].0 == *g,
            (Kind::Monoid { rule: ComponentRule::Filtered(order), .. }, RingElem::Terms(t)) => {
                t.iter().all(|(a, _)| order.leq(a, g).unwrap_or(false))
            }
            (Kind::Localization { s, rule }, RingElem::Fraction(c)) => {
                let k = self.degree_scalar(g).expect("Z degree");
                match rule {
                    LocalizationRule::Powers => self.power(*s, -k).is_some_and(|p| (c * p).is_integer()),
                    LocalizationRule::PositiveFiltration => {
                        k >= 0 && self.power(*s, k).is_some_and(|p| (c * p).is_integer())
                    }
                }
            }
            _ => false,
        }
    }

    /// A finite additive generating set of `R_g`; for the rings here it is a
    /// basis over the base.
    pub fn gens(&self, g: &GroupElement, window: &Window) -> Result<Vec<RingElem>> {
        if !self.group.contains(g) {
            return Err(Error::SpecMismatch(format!("{g} is not in {}", self.group.describe())));
        }
        match &self.kind {
            Kind::Monoid { base, rule: ComponentRule::Graded, .. } => Ok(if self.in_support(g) {
                vec![self.canonical(vec![(g.clone(), Coeff::one())], *base)]
            } else {
                Vec::new()
            }),
            Kind::Monoid { rule: ComponentRule::Filtered(order), .. } => {
                let r = order.rank();
                let x = g.coords().expect("free abelian degree");
                if x.iter().any(|c| c.abs() > window.radius) {
                    return Err(Error::WindowTooSmall(format!("degree {g} lies outside radius {}", window.radius)));
                }
                let mut out = Vec::new();
                let side = 2 * window.radius + 1;
                let total = (side as u64).checked_pow(r as u32).filter(|&t| t <= 4_000_000).ok_or_else(|| {
                    Error::WindowTooSmall(format!("radius {} too large to enumerate in rank {r}", window.radius))
                })?;
                for idx in 0..total {
                    let mut rem = idx;
                    let a: Vec<i64> = (0..r)
                        .map(|_| {
                            let v = (rem % side as u64) as i64 - window.radius;
                            rem /= side as u64;
                            v
                        })
                        .collect();
                    let ae = GroupElement::Free(a);
                    if self.in_support(&ae) && order.leq(&ae, g)? {
                        if ae.coords().unwrap().iter().any(|c| c.abs() == window.radius) {
                            return Err(Error::WindowTooSmall(format!(
                                "component {g} reaches the window boundary at {ae}"
                            )));
                        }
                        out.push(RingElem::Terms(vec![(ae, Coeff::one())]));
                    }
                }
                out.sort();
                Ok(out)
            }
            Kind::Localization { s, rule } => {
                let k = self.degree_scalar(g).expect("Z degree");
                let too_big = || Error::WindowTooSmall(format!("{s}^{k} overflows exact integers"));
                Ok(match rule {
                    LocalizationRule::Powers => vec![RingElem::Fraction(self.power(*s, k).ok_or_else(too_big)?)],
                    LocalizationRule::PositiveFiltration if k >= 0 => {
                        vec![RingElem::Fraction(self.power(*s, -k).ok_or_else(too_big)?)]
                    }
                    LocalizationRule::PositiveFiltration => Vec::new(),
                })
            }
        }
    }

    /// Common coordinates of `elems` over the base: monomial coefficients, or
    /// numerators over a common denominator for fractions.
    pub fn ambient_coordinates(&self, elems: &[&RingElem]) -> Vec<Vec<Coeff>> {
        match self.kind {
            Kind::Monoid { .. } => {
                let mut degs: Vec<&GroupElement> = elems.iter().flat_map(|x| x.support()).collect();
                degs.sort();
                degs.dedup();
                elems.iter().map(|x| degs.iter().map(|g| x.coefficient(g)).collect()).collect()
            }
            Kind::Localization { .. } => {
                let den = elems.iter().fold(1i128, |acc, x| match x {
                    RingElem::Fraction(c) => num_integer::lcm(acc, *c.denom()),
                    _ => acc,
                });
                elems
                    .iter()
                    .map(|x| match x {
                        RingElem::Fraction(c) => vec![c * Coeff::from_integer(den)],
                        _ => vec![Coeff::zero()],
                    })
                    .collect()
            }
        }
    }

    /// Coefficients `c` over the base with `Σ c_i gens[i] = target`.
    pub fn span_solve(&self, gens: &[RingElem], target: &RingElem) -> Option<Vec<Coeff>> {
        if gens.is_empty() {
            return target.is_zero().then(Vec::new);
        }
        let mut all: Vec<&RingElem> = gens.iter().collect();
        all.push(target);
        let mut coords = self.ambient_coordinates(&all);
        let t = coords.pop().expect("target row");
        self.base().solve_in_span(&coords, &t)
    }

    /// Coordinates of `x ∈ R_g` with respect to `gens(g)`.
    pub fn coordinates(&self, x: &RingElem, g: &GroupElement, window: &Window) -> Result<Option<Vec<Coeff>>> {
        Ok(self.span_solve(&self.gens(g, window)?, x))
    }

    /// A random element of `R_g` (a random base combination of `gens(g)`).
    pub fn sample_in<R: Rng + ?Sized>(&self, g: &GroupElement, rng: &mut R, window: &Window) -> Result<RingElem> {
        let gens = self.gens(g, window)?;
        let base = self.base();
        Ok(gens.iter().fold(self.zero(), |acc, x| self.add(&acc, &self.scale(&base.sample(rng, 3), x))))
    }

    /// Splits `x` into homogeneous pieces `(g, x_g)` with `x_g ∈ R_g`. This
    /// is the windowed form of the covering axiom.
    pub fn decompose(&self, x: &RingElem) -> Vec<(GroupElement, RingElem)> {
        match (&self.kind, x) {
            (Kind::Monoid { .. }, RingElem::Terms(t)) => {
                t.iter().map(|(g, c)| (g.clone(), RingElem::Terms(vec![(g.clone(), *c)]))).collect()
            }
            (Kind::Localization { s, .. }, RingElem::Fraction(c)) => {
                if c.is_zero() {
                    return Vec::new();
                }
                // the denominator divides s^m for the least such m
                let mut m = 0i64;
                while !self.power(*s, m).is_some_and(|p| (c * p).is_integer()) {
                    m += 1;
                }
                vec![(GroupElement::free([-m]), x.clone())]
            }
            _ => Vec::new(),
        }
    }

    /// Parses a ring element: `[[exponent, coeff], ...]` for sums, `[num, den]`
    /// or an integer for fractions.
    pub fn parse_element(&self, v: &Value) -> Result<RingElem> {
        let bad = || Error::Config(format!("cannot parse ring element {v}"));
        let coeff = |c: &Value| -> Result<Coeff> {
            let num = |x: &Value| -> Result<i128> {
                match x {
                    Value::Number(n) => n.as_i64().map(i128::from).ok_or_else(bad),
                    Value::String(s) => s.parse().map_err(|_| bad()),
                    _ => Err(bad()),
                }
            };
            match c {
                Value::Array(p) if p.len() == 2 => {
                    let d = num(&p[1])?;
                    if d == 0 {
                        return Err(bad());
                    }
                    Ok(Coeff::new(num(&p[0])?, d))
                }
                other => Ok(Coeff::from_integer(num(other)?)),
            }
        };
        match self.kind {
            Kind::Monoid { base, .. } => {
                let items = v.as_array().ok_or_else(bad)?;
                let mut terms = Vec::new();
                for it in items {
                    let pair = it.as_array().filter(|p| p.len() == 2).ok_or_else(bad)?;
                    terms.push((self.group.parse_element(&pair[0])?, base.normalize(coeff(&pair[1])?)?));
                }
                self.from_terms(terms)
            }
            Kind::Localization { .. } => {
                let x = RingElem::Fraction(coeff(v)?);
                self.validate(&x)?;
                Ok(x)
            }
        }
    }

    pub fn to_json(&self) -> Value {
        match &self.kind {
            Kind::Monoid { base, support, rule } => json!({
                "kind": match self.tag {
                    RingTag::SkewGroupRing => "skew_group_ring",
                    RingTag::LaurentGroupRing => "laurent_group_ring",
                    _ => "monoid_ring",
                },
                "base": base.to_string(),
                "group": self.group.describe(),
                "support_cone": support,
                "filtered": matches!(rule, ComponentRule::Filtered(_)),
            }),
            Kind::Localization { s, rule } => json!({
                "kind": "power_localization",
                "s": s,
                "rule": match rule {
                    LocalizationRule::Powers => "powers",
                    LocalizationRule::PositiveFiltration => "positive_filtration",
                },
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::Action;

    pub(crate) fn f2t() -> SystematicRing {
        SystematicRing::monoid_ring(Base::Mod(2), GroupSpec::free_abelian(1), vec![vec![1]]).unwrap()
    }

    fn z(k: i64) -> GroupElement {
        GroupElement::free([k])
    }

    fn poly(r: &SystematicRing, coeffs: &[(i64, i128)]) -> RingElem {
        r.from_terms(coeffs.iter().map(|&(k, c)| (z(k), int(c))).collect()).unwrap()
    }

    #[test]
    fn schoolbook_square_mod_two() {
        let r = f2t();
        let x = poly(&r, &[(0, 1), (1, 1)]);
        assert_eq!(r.mul(&x, &x), poly(&r, &[(0, 1), (2, 1)]));
        assert_eq!(r.add(&x, &r.zero()), x);
        assert!(r.add(&x, &x).is_zero());
    }

    #[test]
    fn fraction_arithmetic() {
        let r = SystematicRing::power_localization(2).unwrap();
        let x = r.fraction(3, 4).unwrap();
        let two = r.fraction(2, 1).unwrap();
        assert_eq!(r.mul(&x, &two), r.fraction(3, 2).unwrap());
        assert!(r.fraction(1, 3).is_err());
        assert!(r.arith(ArithOp::Add, &x, &RingElem::Terms(Vec::new())).is_err());
    }

    #[test]
    fn membership_rules() {
        let r = f2t();
        assert!(r.member(&poly(&r, &[(2, 1)]), &z(2)));
        assert!(!r.member(&poly(&r, &[(2, 1)]), &z(1)));
        assert!(r.member(&r.zero(), &z(-5)));
        let k = SystematicRing::power_localization(2).unwrap();
        let x = k.fraction(3, 4).unwrap();
        assert!(k.member(&x, &z(-2)));
        assert!(!k.member(&x, &z(-1)));
        assert!(k.member(&k.zero(), &z(7)));
        assert_eq!(k.decompose(&x), vec![(z(-2), x)]);
    }

    #[test]
    fn filtered_components() {
        let base = f2t();
        let filt = SystematicRing::filtered_monoid_ring(
            Base::Mod(2),
            GroupSpec::free_abelian(1),
            vec![vec![1]],
            OrderSpec::orthant(1),
        )
        .unwrap();
        let w = Window::default();
        assert_eq!(filt.gens(&z(2), &w).unwrap().len(), 3);
        assert!(filt.gens(&z(-1), &w).unwrap().is_empty());
        let x = poly(&base, &[(0, 1), (2, 1)]);
        assert!(filt.member(&x, &z(2)) && filt.member(&x, &z(3)) && !filt.member(&x, &z(1)));
        assert!(matches!(filt.gens(&z(40), &w), Err(Error::WindowTooSmall(_))));
    }

    #[test]
    fn skew_multiplication_twists() {
        let g = GroupSpec::semidirect(GroupSpec::free_abelian(2), GroupSpec::cyclic(2), Action::Swap).unwrap();
        let r = SystematicRing::skew_group_ring(Base::Mod(2), g.clone(), vec![vec![1, 0], vec![0, 1]]).unwrap();
        let h = r
            .monomial(&GroupElement::pair(GroupElement::free([0, 0]), GroupElement::Table(1)), int(1))
            .unwrap();
        let x = r.monomial(&GroupElement::pair(GroupElement::free([1, 0]), GroupElement::Table(0)), int(1)).unwrap();
        // ⟦h⟧⟦x⟧ = ⟦θ(h)(x)⟧⟦h⟧
        let twisted = r
            .monomial(&GroupElement::pair(GroupElement::free([0, 1]), GroupElement::Table(0)), int(1))
            .unwrap();
        assert_eq!(r.mul(&h, &x), r.mul(&twisted, &h));
        assert_ne!(r.mul(&h, &x), r.mul(&x, &h));
        // an inverting action does not preserve the first quadrant
        let inv = GroupSpec::semidirect(GroupSpec::free_abelian(2), GroupSpec::cyclic(2), Action::Inversion).unwrap();
        assert!(matches!(
            SystematicRing::skew_group_ring(Base::Mod(2), inv, vec![vec![1, 0], vec![0, 1]]),
            Err(Error::OrderNotHInvariant(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let r = f2t();
        let x = poly(&r, &[(0, 1), (3, 1)]);
        assert_eq!(r.parse_element(&x.to_json()).unwrap(), x);
        let k = SystematicRing::power_localization(2).unwrap();
        let y = k.fraction(-3, 8).unwrap();
        assert_eq!(k.parse_element(&y.to_json()).unwrap(), y);
    }
}
