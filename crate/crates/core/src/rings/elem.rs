use std::fmt;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use super::base::Coeff;
use crate::groups::GroupElement;

/// A ring element in canonical form.
///
/// Monoid, Laurent and skew rings store `Σ c_g ⟦g⟧` with the support sorted
/// and every coefficient nonzero and reduced; power localizations store a
/// reduced fraction.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RingElem {
    Terms(Vec<(GroupElement, Coeff)>),
    Fraction(Coeff),
}

impl RingElem {
    pub fn is_zero(&self) -> bool {
        match self {
            RingElem::Terms(t) => t.is_empty(),
            RingElem::Fraction(c) => c.is_zero(),
        }
    }

    /// Degrees carrying a nonzero coefficient; empty for fractions.
    pub fn support(&self) -> Vec<&GroupElement> {
        match self {
            RingElem::Terms(t) => t.iter().map(|(g, _)| g).collect(),
            RingElem::Fraction(_) => Vec::new(),
        }
    }

    pub fn terms(&self) -> &[(GroupElement, Coeff)] {
        match self {
            RingElem::Terms(t) => t,
            RingElem::Fraction(_) => &[],
        }
    }

    pub fn coefficient(&self, g: &GroupElement) -> Coeff {
        match self {
            RingElem::Terms(t) => t
                .binary_search_by(|(d, _)| d.cmp(g))
                .map(|i| t[i].1)
                .unwrap_or_else(|_| Coeff::zero()),
            RingElem::Fraction(_) => Coeff::zero(),
        }
    }

    /// JSON encoding: `[[exponent, coeff], ...]` for sums, `[num, den]` for
    /// fractions; integral coefficients are plain integers.
    pub fn to_json(&self) -> Value {
        match self {
            RingElem::Terms(t) => Value::Array(t.iter().map(|(g, c)| json!([g.to_json(), coeff_json(c)])).collect()),
            RingElem::Fraction(c) => json!([c.numer().to_string(), c.denom().to_string()]),
        }
    }
}

pub(crate) fn coeff_json(c: &Coeff) -> Value {
    // i128 does not fit every JSON number; small values stay numeric
    if c.is_integer() {
        match i64::try_from(*c.numer()) {
            Ok(v) => json!(v),
            Err(_) => json!(c.numer().to_string()),
        }
    } else {
        json!([c.numer().to_string(), c.denom().to_string()])
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingElem::Fraction(c) => write!(f, "{c}"),
            RingElem::Terms(t) if t.is_empty() => write!(f, "0"),
            RingElem::Terms(t) => {
                for (i, (g, c)) in t.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    if c.is_one() {
                        write!(f, "⟦{g}⟧")?;
                    } else {
                        write!(f, "{c}⟦{g}⟧")?;
                    }
                }
                Ok(())
            }
        }
    }
}
