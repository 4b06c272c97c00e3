use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::Zero;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg;

/// Exact coefficients; integral bases keep denominators at 1.
pub type Coeff = Ratio<i128>;

pub fn int(n: i128) -> Coeff {
    Coeff::from_integer(n)
}

/// Coefficient ring of a monoid ring: `Z`, `Q` or `Z/n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Base {
    Integers,
    Rationals,
    Mod(u64),
}

/// How projective modules over a base ring are classified in K0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RankRule {
    /// Field: rank is the dimension.
    Field,
    /// `Z`: rank over `Q`.
    Integers,
    /// Local `Z/p^k`: rank of the reduction modulo `p`.
    Local { prime: u64 },
    /// No rank rule; projectives need not be free.
    None,
}

impl Base {
    pub fn modulus(self) -> Option<i128> {
        match self {
            Base::Mod(n) => Some(i128::from(n)),
            _ => None,
        }
    }

    pub fn normalize(self, c: Coeff) -> Result<Coeff> {
        match self {
            Base::Rationals => Ok(c),
            Base::Integers if c.is_integer() => Ok(c),
            Base::Mod(n) if c.is_integer() => Ok(int(c.to_integer().mod_floor(&i128::from(n)))),
            _ => Err(Error::InvalidElement(format!("{c} is not a coefficient in {self}"))),
        }
    }

    pub fn add(self, a: &Coeff, b: &Coeff) -> Coeff {
        self.reduce(a + b)
    }

    pub fn mul(self, a: &Coeff, b: &Coeff) -> Coeff {
        self.reduce(a * b)
    }

    pub fn neg(self, a: &Coeff) -> Coeff {
        self.reduce(-a)
    }

    fn reduce(self, c: Coeff) -> Coeff {
        match self {
            Base::Mod(n) => int(c.to_integer().mod_floor(&i128::from(n))),
            _ => c,
        }
    }

    pub fn rank_rule(self) -> RankRule {
        match self {
            Base::Rationals => RankRule::Field,
            Base::Integers => RankRule::Integers,
            Base::Mod(n) => {
                let ps = linalg::prime_factors(n);
                match ps.as_slice() {
                    [p] if *p == n => RankRule::Field,
                    [p] => RankRule::Local { prime: *p },
                    _ => RankRule::None,
                }
            }
        }
    }

    pub fn is_field(self) -> bool {
        self.rank_rule() == RankRule::Field
    }

    /// A random coefficient; unbounded bases draw from `[-bound, bound]`.
    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R, bound: i128) -> Coeff {
        match self {
            Base::Mod(n) => int(rng.gen_range(0..i128::from(n))),
            _ => int(rng.gen_range(-bound..=bound)),
        }
    }

    /// All elements of a finite base.
    pub fn elements(self) -> Option<Vec<Coeff>> {
        match self {
            Base::Mod(n) => Some((0..i128::from(n)).map(int).collect()),
            _ => None,
        }
    }

    /// Multiplicative inverse, when it exists in the base.
    pub fn inverse(self, a: &Coeff) -> Option<Coeff> {
        if a.is_zero() {
            return None;
        }
        match self {
            Base::Rationals => Some(a.recip()),
            Base::Integers => (a.numer().abs() == 1 && a.is_integer()).then(|| *a),
            Base::Mod(n) => linalg::mod_inverse(a.to_integer(), i128::from(n)).map(int),
        }
    }

    /// Solves `sum_i x_i * gens[i] = target` with `x_i` in the base.
    pub fn solve_in_span(self, gens: &[Vec<Coeff>], target: &[Coeff]) -> Option<Vec<Coeff>> {
        match self {
            Base::Rationals => linalg::rational_solve_left(gens, target),
            Base::Integers | Base::Mod(_) => {
                let to_int = |v: &Vec<Coeff>| -> Option<Vec<i128>> {
                    v.iter().map(|c| c.is_integer().then(|| c.to_integer())).collect()
                };
                let mut rows: Vec<Vec<i128>> = gens.iter().map(to_int).collect::<Option<_>>()?;
                let t: Vec<i128> = target.iter().map(|c| c.is_integer().then(|| c.to_integer())).collect::<Option<_>>()?;
                let k = rows.len();
                if let Some(n) = self.modulus() {
                    for j in 0..t.len() {
                        rows.push((0..t.len()).map(|i| if i == j { n } else { 0 }).collect());
                    }
                }
                let x = linalg::solve_left(&rows, &t)?;
                Some(x[..k].iter().map(|&c| self.reduce(int(c))).collect())
            }
        }
    }

    /// Rank of the image of an idempotent matrix over the base, when the rank
    /// rule classifies projectives.
    pub fn idempotent_rank(self, m: &[Vec<Coeff>]) -> Option<usize> {
        match self.rank_rule() {
            RankRule::Field if self == Base::Rationals => Some(linalg::rational_rank(m)),
            RankRule::Field => Some(linalg::rank_mod_p(&int_rows(m), self.modulus().unwrap())),
            RankRule::Integers => Some(linalg::rational_rank(m)),
            RankRule::Local { prime } => Some(linalg::rank_mod_p(&int_rows(m), i128::from(prime))),
            RankRule::None => None,
        }
    }
}

fn int_rows(m: &[Vec<Coeff>]) -> Vec<Vec<i128>> {
    m.iter().map(|r| r.iter().map(|c| c.to_integer()).collect()).collect()
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Base::Integers => write!(f, "Z"),
            Base::Rationals => write!(f, "Q"),
            Base::Mod(n) if linalg::prime_factors(*n) == vec![*n] => write!(f, "F{n}"),
            Base::Mod(n) => write!(f, "Z/{n}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_rules() {
        assert_eq!(Base::Mod(2).rank_rule(), RankRule::Field);
        assert_eq!(Base::Mod(4).rank_rule(), RankRule::Local { prime: 2 });
        assert_eq!(Base::Mod(6).rank_rule(), RankRule::None);
        assert_eq!(Base::Integers.rank_rule(), RankRule::Integers);
    }

    #[test]
    fn span_solving() {
        let z = Base::Integers;
        assert!(z.solve_in_span(&[vec![int(2)], vec![int(3)]], &[int(1)]).is_some());
        assert!(z.solve_in_span(&[vec![int(2)]], &[int(1)]).is_none());
        // 3 is a unit mod 4, 2 is not
        let m4 = Base::Mod(4);
        assert_eq!(m4.solve_in_span(&[vec![int(3)]], &[int(1)]), Some(vec![int(3)]));
        assert!(m4.solve_in_span(&[vec![int(2)]], &[int(1)]).is_none());
        let q = Base::Rationals;
        assert_eq!(q.solve_in_span(&[vec![int(2)]], &[int(1)]), Some(vec![Coeff::new(1, 2)]));
    }

    #[test]
    fn idempotent_ranks_over_local_rings() {
        // diag(1, 0) and an idempotent with a 2-divisible off-diagonal entry over Z/4
        let m4 = Base::Mod(4);
        assert_eq!(m4.idempotent_rank(&[vec![int(1), int(0)], vec![int(0), int(0)]]), Some(1));
        assert_eq!(m4.idempotent_rank(&[vec![int(1), int(2)], vec![int(0), int(0)]]), Some(1));
        assert_eq!(Base::Mod(6).idempotent_rank(&[vec![int(3)]]), None);
    }
}
