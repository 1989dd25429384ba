//! The one-dimensional fair ±1 random walk and the half-space geometry of its
//! four-dimensional Gaussian limit.

use std::f64::consts::PI;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::dyadic::Dyadic;
use crate::error::{ChshError, Result};

/// Default cap on the number of steps accepted by [`walk_pmf`].
pub const DEFAULT_STEP_LIMIT: u32 = 4096;

/// Exact distribution of the endpoint `m` of an `n`-step fair ±1 walk.
///
/// Only parity-consistent displacements `m ∈ {-n, -n+2, …, n}` carry mass;
/// the mass of `m` is `binomial(n, (n+m)/2) / 2^n`. Numerators are stored in
/// order of increasing `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalkPmf {
    steps: u32,
    numerators: Vec<BigUint>,
}

impl WalkPmf {
    pub fn steps(&self) -> u32 {
        self.steps
    }

    /// `binomial(n, k)` for `k = 0..=n`, i.e. numerators over `2^n` for
    /// `m = 2k - n`.
    pub fn numerators(&self) -> &[BigUint] {
        &self.numerators
    }

    /// Numerator over `2^n` of the mass at `m`, or `None` when `m` is off the
    /// parity lattice or out of range.
    pub fn numerator(&self, m: i64) -> Option<&BigUint> {
        let n = i64::from(self.steps);
        if m.abs() > n || (n + m) % 2 != 0 {
            return None;
        }
        self.numerators.get(((n + m) / 2) as usize)
    }

    pub fn mass(&self, m: i64) -> Dyadic {
        match self.numerator(m) {
            Some(k) => Dyadic::new(k.clone(), self.steps),
            None => Dyadic::zero(),
        }
    }

    /// Support points with their masses, in increasing `m`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Dyadic)> + '_ {
        let n = i64::from(self.steps);
        self.numerators
            .iter()
            .enumerate()
            .map(move |(k, c)| (2 * k as i64 - n, Dyadic::new(c.clone(), self.steps)))
    }

    pub fn displacements(&self) -> impl Iterator<Item = i64> {
        let n = i64::from(self.steps);
        (0..=n).map(move |k| 2 * k - n)
    }
}

/// Exact walk distribution with the default step limit.
pub fn walk_pmf(n: u32) -> Result<WalkPmf> {
    walk_pmf_with_limit(n, DEFAULT_STEP_LIMIT)
}

pub fn walk_pmf_with_limit(n: u32, limit: u32) -> Result<WalkPmf> {
    if n == 0 {
        return Err(ChshError::InvalidConfig(
            "a walk needs at least one step".into(),
        ));
    }
    if n > limit {
        return Err(ChshError::StepLimit { steps: n, limit });
    }
    let mut numerators = Vec::with_capacity(n as usize + 1);
    let mut c = BigUint::one();
    for k in 0..=n {
        numerators.push(c.clone());
        // C(n, k+1) = C(n, k) * (n - k) / (k + 1), exact at every step
        c = c * (n - k) / (k + 1);
    }
    debug_assert!(c.is_zero());
    Ok(WalkPmf {
        steps: n,
        numerators,
    })
}

/// Gaussian limit of the walk distribution, `exp(-x²/2n) / sqrt(2πn)`.
///
/// Panics if `n == 0`.
pub fn gaussian_density(n: u64, x: f64) -> f64 {
    assert!(n >= 1, "gaussian_density needs n >= 1");
    let n = n as f64;
    (-x * x / (2.0 * n)).exp() / (2.0 * PI * n).sqrt()
}

/// The hyperplane `Σ a_k z_k = b` in four dimensions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfSpaceSpec {
    coefficients: [f64; 4],
    offset: f64,
}

impl HalfSpaceSpec {
    pub fn new(coefficients: [f64; 4], offset: f64) -> Result<Self> {
        if !offset.is_finite() {
            return Err(ChshError::NonFinite(format!("offset {offset}")));
        }
        if coefficients.iter().all(|&a| a == 0.0) {
            return Err(ChshError::InvalidConfig("zero coefficient vector".into()));
        }
        if let Some(a) = coefficients.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
            return Err(ChshError::InvalidConfig(format!(
                "coefficient {a} is not strictly positive and finite"
            )));
        }
        Ok(HalfSpaceSpec {
            coefficients,
            offset,
        })
    }

    /// The boundary `|C| = 2` in isotropic coordinates `z_k = x_k / sqrt(2 n_k)`:
    /// coefficients `sqrt(2 / n_k)`, offset 2. Counts may be fractional.
    pub fn chsh(counts: [f64; 4]) -> Result<Self> {
        if let Some(n) = counts.iter().find(|n| !(n.is_finite() && **n > 0.0)) {
            return Err(ChshError::InvalidConfig(format!(
                "round count {n} must be positive and finite"
            )));
        }
        Self::new(counts.map(|n| (2.0 / n).sqrt()), 2.0)
    }

    pub fn coefficients(&self) -> [f64; 4] {
        self.coefficients
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }
}

/// Distance from the origin to the hyperplane, `|b| / ||a||`.
pub fn hyperplane_distance(spec: &HalfSpaceSpec) -> f64 {
    let norm_sq: f64 = spec.coefficients.iter().map(|a| a * a).sum();
    spec.offset.abs() / norm_sq.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Endpoint distribution by listing every ±1 sequence.
    fn enumerate_endpoints(n: u32) -> Vec<(i64, u64)> {
        let mut counts = std::collections::BTreeMap::new();
        for bits in 0u64..(1 << n) {
            let ups = bits.count_ones() as i64;
            *counts.entry(2 * ups - i64::from(n)).or_insert(0u64) += 1;
        }
        counts.into_iter().collect()
    }

    #[test]
    fn single_step() {
        let pmf = walk_pmf(1).unwrap();
        assert_eq!(pmf.mass(-1), Dyadic::from_u64(1, 1));
        assert_eq!(pmf.mass(1), Dyadic::from_u64(1, 1));
        assert!(pmf.mass(0).is_zero());
    }

    #[test]
    fn two_and_four_steps() {
        let pmf = walk_pmf(2).unwrap();
        let masses: Vec<String> = pmf.iter().map(|(_, p)| p.to_string()).collect();
        assert_eq!(masses, ["1/4", "1/2", "1/4"]);
        assert_eq!(walk_pmf(4).unwrap().mass(0), Dyadic::from_u64(6, 4));
    }

    #[test]
    fn matches_sequence_enumeration_up_to_twelve() {
        for n in 1..=12 {
            let pmf = walk_pmf(n).unwrap();
            let brute = enumerate_endpoints(n);
            assert_eq!(brute.len(), n as usize + 1);
            for (m, count) in brute {
                assert_eq!(pmf.mass(m), Dyadic::from_u64(count, n), "n={n} m={m}");
            }
        }
    }

    #[test]
    fn off_lattice_and_out_of_range_are_empty() {
        let pmf = walk_pmf(5).unwrap();
        assert!(pmf.numerator(0).is_none());
        assert!(pmf.numerator(7).is_none());
        assert!(pmf.numerator(-7).is_none());
        assert!(pmf.mass(2).is_zero());
    }

    #[test]
    fn rejects_zero_and_oversized() {
        assert!(matches!(walk_pmf(0), Err(ChshError::InvalidConfig(_))));
        assert!(walk_pmf(DEFAULT_STEP_LIMIT).is_ok());
        assert!(walk_pmf(DEFAULT_STEP_LIMIT + 1).unwrap_err().is_limit());
        assert_eq!(
            walk_pmf_with_limit(10, 8),
            Err(ChshError::StepLimit {
                steps: 10,
                limit: 8
            })
        );
    }

    #[test]
    fn normalised_and_symmetric_large_n() {
        for n in [63, 64, 500, 1001] {
            let pmf = walk_pmf(n).unwrap();
            let total: BigUint = pmf.numerators().iter().sum();
            assert_eq!(total, BigUint::one() << n);
            for m in pmf.displacements() {
                assert_eq!(pmf.numerator(m), pmf.numerator(-m));
            }
        }
    }

    #[test]
    fn gaussian_density_values() {
        assert!((gaussian_density(1, 0.0) - 0.398_942_280_401_432_7).abs() < 1e-15);
        assert_eq!(gaussian_density(4, 0.0), 1.0 / (8.0 * PI).sqrt());
    }

    #[test]
    fn gaussian_tracks_pmf_within_three_sigma() {
        for n in [64u32, 256] {
            let pmf = walk_pmf(n).unwrap();
            let reach = 3.0 * f64::from(n).sqrt();
            for (m, mass) in pmf.iter().filter(|(m, _)| (*m as f64).abs() <= reach) {
                let exact = mass.to_f64();
                let approx = 2.0 * gaussian_density(u64::from(n), m as f64);
                assert!(
                    (approx - exact).abs() <= 0.05 * exact,
                    "n={n} m={m}: {approx} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn distance_examples() {
        let unit = HalfSpaceSpec::new([1.0; 4], 2.0).unwrap();
        assert_eq!(hyperplane_distance(&unit), 1.0);
        let d1 = hyperplane_distance(&HalfSpaceSpec::chsh([1.0; 4]).unwrap());
        assert!((d1 - 0.5f64.sqrt()).abs() < 1e-15);
        let d25 = hyperplane_distance(&HalfSpaceSpec::chsh([25.0; 4]).unwrap());
        assert!((d25 - 12.5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn halfspace_rejects_bad_coefficients() {
        assert!(HalfSpaceSpec::new([0.0; 4], 2.0).is_err());
        assert!(HalfSpaceSpec::new([1.0, 0.0, 1.0, 1.0], 2.0).is_err());
        assert!(HalfSpaceSpec::new([1.0, f64::INFINITY, 1.0, 1.0], 2.0).is_err());
        assert!(HalfSpaceSpec::new([1.0; 4], f64::NAN).is_err());
        assert!(HalfSpaceSpec::chsh([1.0, 0.0, 1.0, 1.0]).is_err());
    }

    proptest! {
        #[test]
        fn gaussian_density_is_even(n in 1u64..10_000, x in -500.0f64..500.0) {
            prop_assert_eq!(gaussian_density(n, x), gaussian_density(n, -x));
        }

        #[test]
        fn distance_ignores_permutation_and_offset_sign(
            a in prop::array::uniform4(0.01f64..100.0),
            b in 0.1f64..10.0,
            rot in 0usize..4,
        ) {
            let mut permuted = a;
            permuted.rotate_left(rot);
            permuted.swap(0, 3);
            let base = hyperplane_distance(&HalfSpaceSpec::new(a, b).unwrap());
            let perm = hyperplane_distance(&HalfSpaceSpec::new(permuted, b).unwrap());
            let flipped = hyperplane_distance(&HalfSpaceSpec::new(a, -b).unwrap());
            prop_assert!((base - perm).abs() <= 1e-12 * base);
            prop_assert_eq!(base, flipped);
        }
    }
}
