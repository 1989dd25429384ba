//! Test-only oracles. Nothing here calls into the enumeration or erfc code it
//! is used to check.

#![allow(dead_code)]

use chsh_core::{Dyadic, Threshold};
use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Violation probability by listing all `2^N` per-round sign sequences.
///
/// Bits `[0, n₁)` are channel (1,1), the next `n₂` channel (1,2), and so on.
/// The comparison `|Σ ± m_k / n_k| > 2` is done on integers after scaling by
/// `Π n_k`.
pub fn brute_force_probability(rounds: [u32; 4], threshold: Threshold) -> Dyadic {
    let total: u32 = rounds.iter().sum();
    assert!(total <= 20, "brute force is for small N only");
    let signs = [1i64, -1, 1, 1];
    let product: i64 = rounds.iter().map(|&n| i64::from(n)).product();
    let mut hits = 0u64;
    for seq in 0u64..(1 << total) {
        let mut offset = 0;
        let mut scaled = 0i64;
        for k in 0..4 {
            let n = rounds[k];
            let mask = ((1u64 << n) - 1) << offset;
            let ups = i64::from((seq & mask).count_ones());
            let m = 2 * ups - i64::from(n);
            scaled += signs[k] * m * (product / i64::from(n));
            offset += n;
        }
        let violated = match threshold {
            Threshold::Strict => scaled.abs() > 2 * product,
            Threshold::NonStrict => scaled.abs() >= 2 * product,
        };
        if violated {
            hits += 1;
        }
    }
    Dyadic::from_u64(hits, total)
}

/// Bits of fixed-point precision in the series oracle.
pub const PREC: u32 = 512;

fn fixed_one() -> BigInt {
    BigInt::one() << PREC
}

/// Exact fixed-point image of a finite double (truncated below 2^-PREC).
pub fn to_fixed(x: f64) -> BigInt {
    let bits = x.to_bits();
    let negative = bits >> 63 == 1;
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mantissa, e) = if exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp - 1075)
    };
    let mut v = BigInt::from(mantissa);
    let shift = e + i64::from(PREC);
    v = if shift >= 0 {
        v << shift as u64
    } else {
        v >> (-shift) as u64
    };
    if negative {
        -v
    } else {
        v
    }
}

pub fn fixed_to_f64(v: &BigInt) -> f64 {
    // keep 64 leading bits, then scale
    let bits = v.bits() as i64;
    let drop = (bits - 64).max(0);
    let top = (v.abs() >> drop as u64).to_f64().unwrap();
    let signed = if v.sign() == Sign::Minus { -top } else { top };
    signed * 2f64.powi((drop - i64::from(PREC)) as i32)
}

/// `atan(1/k)` in fixed point by its alternating Taylor series.
fn atan_inverse(k: u64) -> BigInt {
    let k2 = BigInt::from(k * k);
    let mut power = fixed_one() / BigInt::from(k);
    let mut sum = BigInt::zero();
    let mut n = 0u64;
    while !power.is_zero() {
        let term = &power / BigInt::from(2 * n + 1);
        if n.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &k2;
        n += 1;
    }
    sum
}

/// `π = 16 atan(1/5) − 4 atan(1/239)`.
pub fn fixed_pi() -> BigInt {
    BigInt::from(16) * atan_inverse(5) - BigInt::from(4) * atan_inverse(239)
}

/// Series evaluation of `erfc(x)` with a rigorous bound on the error.
pub struct SeriesErfc {
    pub value: f64,
    /// Upper bound on `|value_exact − fixed-point result|`, as a double.
    pub error_bound: f64,
    pub terms: u64,
}

/// `erfc(x) = 1 − (2/√π) Σ (−1)^n x^{2n+1} / (n! (2n+1))` in fixed point.
///
/// The series is summed until terms are decreasing (past `n > x²`) and the
/// next term vanishes at working precision; by the alternating series bound
/// the truncation error is at most that next term. Rounding adds at most a
/// few ulp per term, tracked in `error_bound`.
pub fn erfc_series(x: f64) -> SeriesErfc {
    assert!(x.is_finite() && x >= 0.0);
    let one = fixed_one();
    let xf = to_fixed(x);
    let x2 = (&xf * &xf) >> PREC;
    let mut power = xf.clone(); // x^{2n+1}/n!
    let mut sum = BigInt::zero();
    let mut n: u64 = 0;
    let x_sq = x * x;
    // error bookkeeping in units of one ulp (2^-PREC): `power_err` bounds the
    // error of the current power term, `sum_err` the accumulated error of `sum`
    let mut power_err = 0.0f64;
    let mut sum_err = 0.0f64;
    let mut power_value = x;
    loop {
        let term = &power / BigInt::from(2 * n + 1);
        sum_err += power_err / (2 * n + 1) as f64 + 1.0;
        if n.is_multiple_of(2) {
            sum += &term;
        } else {
            sum -= &term;
        }
        n += 1;
        power = ((&power * &x2) >> PREC) / BigInt::from(n);
        // x2 is off by ≤ 1 ulp; each shift and division truncates by ≤ 1 ulp
        power_err = (power_err * (x_sq + 1.0) + power_value + 1.0) / n as f64 + 1.0;
        power_value = power_value * x_sq / n as f64;
        if (n as f64) > x_sq + 1.0 && power.is_zero() {
            break;
        }
    }
    // alternating tail: bounded by the first omitted term (< 1 ulp + its error)
    sum_err += power_err + 1.0;
    // √π to full precision
    let sqrt_pi = (fixed_pi() << PREC).sqrt();
    let erf = (BigInt::from(2) * (&sum << PREC)) / &sqrt_pi;
    let erfc = one - erf;
    let ulp = 2f64.powi(-(PREC as i32));
    SeriesErfc {
        value: fixed_to_f64(&erfc),
        // 2/√π < 1.13; a few more ulp for π, √π and the final division
        error_bound: ulp * (1.2 * sum_err + 16.0),
        terms: n,
    }
}

/// `binomial(n, k)` by the multiplicative formula, for pmf cross-checks.
pub fn binomial(n: u64, k: u64) -> BigUint {
    let k = k.min(n - k);
    let mut c = BigUint::one();
    for i in 0..k {
        c = c * (n - i) / (i + 1);
    }
    c
}
