//! Exact dyadic rationals `k / 2^e`.
//!
//! Every probability in the fair-coin model has a power-of-two denominator, so
//! a big-integer numerator plus a binary exponent represents them exactly.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

/// A non-negative dyadic rational `numer / 2^exp`, kept in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    numer: BigUint,
    exp: u32,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic {
            numer: BigUint::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic {
            numer: BigUint::one(),
            exp: 0,
        }
    }

    /// `numer / 2^exp`, reduced.
    pub fn new(numer: BigUint, exp: u32) -> Self {
        let mut d = Dyadic { numer, exp };
        d.reduce();
        d
    }

    pub fn from_u64(numer: u64, exp: u32) -> Self {
        Self::new(BigUint::from(numer), exp)
    }

    fn reduce(&mut self) {
        if self.numer.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.numer.trailing_zeros().unwrap_or(0);
        let shift = tz.min(u64::from(self.exp));
        if shift > 0 {
            self.numer >>= shift;
            self.exp -= shift as u32;
        }
    }

    pub fn numer(&self) -> &BigUint {
        &self.numer
    }

    /// Binary exponent of the reduced denominator.
    pub fn denom_exp(&self) -> u32 {
        self.exp
    }

    pub fn denom(&self) -> BigUint {
        BigUint::one() << self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.numer.is_zero()
    }

    /// Numerator rescaled to the (possibly unreduced) denominator `2^exp`.
    ///
    /// Panics if `exp` is smaller than the reduced exponent.
    pub fn numer_over(&self, exp: u32) -> BigUint {
        assert!(
            exp >= self.exp,
            "2^{exp} is not a multiple of 2^{}",
            self.exp
        );
        &self.numer << (exp - self.exp)
    }

    /// `1 - self`; panics if `self > 1`.
    pub fn complement(&self) -> Dyadic {
        let whole = BigUint::one() << self.exp;
        assert!(self.numer <= whole, "complement of a value above one");
        Dyadic::new(whole - &self.numer, self.exp)
    }

    /// Nearest-ish `f64`; the numerator is truncated to 64 significant bits
    /// before conversion, so the relative error stays below `2^-52`.
    pub fn to_f64(&self) -> f64 {
        if self.numer.is_zero() {
            return 0.0;
        }
        let bits = self.numer.bits();
        let (top, dropped) = if bits > 64 {
            let drop = bits - 64;
            (
                (&self.numer >> drop).to_u64().unwrap_or(u64::MAX),
                drop as i64,
            )
        } else {
            (self.numer.to_u64().unwrap_or(u64::MAX), 0)
        };
        scale_by_pow2(top as f64, dropped - i64::from(self.exp))
    }
}

/// `x * 2^e`, applied in steps that cannot overflow an intermediate.
fn scale_by_pow2(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
        if x == 0.0 {
            return 0.0;
        }
    }
    x * 2f64.powi(e as i32)
}

impl Default for Dyadic {
    fn default() -> Self {
        Dyadic::zero()
    }
}

impl Add<&Dyadic> for &Dyadic {
    type Output = Dyadic;

    fn add(self, rhs: &Dyadic) -> Dyadic {
        let exp = self.exp.max(rhs.exp);
        Dyadic::new(self.numer_over(exp) + rhs.numer_over(exp), exp)
    }
}

impl Add for Dyadic {
    type Output = Dyadic;

    fn add(self, rhs: Dyadic) -> Dyadic {
        &self + &rhs
    }
}

impl AddAssign<&Dyadic> for Dyadic {
    fn add_assign(&mut self, rhs: &Dyadic) {
        *self = &*self + rhs;
    }
}

impl Mul<&Dyadic> for &Dyadic {
    type Output = Dyadic;

    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.numer * &rhs.numer, self.exp + rhs.exp)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let exp = self.exp.max(other.exp);
        self.numer_over(exp).cmp(&other.numer_over(exp))
    }
}

/// Reduced fraction, e.g. `1/8`; integers print without a denominator.
impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.numer)
        } else {
            write!(f, "{}/{}", self.numer, self.denom())
        }
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}
