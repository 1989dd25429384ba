//! Violation probabilities by exact enumeration and by the Gaussian
//! half-space approximation, plus a Monte Carlo integrator of that Gaussian
//! measure used to check the approximation.

use std::f64::consts::FRAC_1_SQRT_2;

use num_bigint::BigUint;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::dyadic::Dyadic;
use crate::erfc::erfc;
use crate::error::{ChshError, Result};
use crate::exec::{map_reduce, Parallelism};
use crate::model::{ExperimentConfig, Threshold, ViolationTest};
use crate::walk::{
    hyperplane_distance, walk_pmf_with_limit, HalfSpaceSpec, WalkPmf, DEFAULT_STEP_LIMIT,
};

/// Default cap on `Π (n_k + 1)`, the number of displacement tuples.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 100_000_000;

const SEQUENTIAL_BELOW: u128 = 1 << 14;
const ORACLE_MIN_SAMPLES: u64 = 10_000;
const ORACLE_BATCH: u64 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    Analytic,
    MonteCarlo,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Exact => "exact",
            Method::Analytic => "analytic",
            Method::MonteCarlo => "monte-carlo",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ProbabilityValue {
    Exact(Dyadic),
    Real(f64),
}

impl ProbabilityValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            ProbabilityValue::Exact(d) => d.to_f64(),
            ProbabilityValue::Real(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&Dyadic> {
        match self {
            ProbabilityValue::Exact(d) => Some(d),
            ProbabilityValue::Real(_) => None,
        }
    }
}

/// A probability together with how it was obtained.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ViolationProbability {
    pub value: ProbabilityValue,
    pub method: Method,
    pub threshold: Threshold,
    pub config: ExperimentConfig,
}

#[derive(Clone, Copy, Debug)]
pub struct EnumerationOptions {
    /// Largest admissible `Π (n_k + 1)`.
    pub budget: u128,
    pub step_limit: u32,
    pub parallelism: Parallelism,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        EnumerationOptions {
            budget: DEFAULT_ENUMERATION_BUDGET,
            step_limit: DEFAULT_STEP_LIMIT,
            parallelism: Parallelism::Auto,
        }
    }
}

pub fn exact_violation_probability(
    config: &ExperimentConfig,
    threshold: Threshold,
) -> Result<ViolationProbability> {
    exact_violation_probability_with(config, threshold, &EnumerationOptions::default())
}

/// Exact `P(|C| > 2)` (or `≥`) as a dyadic rational over `2^N`.
///
/// Sums `Π_k P_{n_k}(m_k)` over every displacement tuple that violates. The
/// channel with the most rounds is not looped over: for fixed values of the
/// other three, its violating displacements form two tails whose mass comes
/// from a suffix-sum table. Each walk is symmetric in `m`, so the sign of a
/// channel's weight can be dropped.
pub fn exact_violation_probability_with(
    config: &ExperimentConfig,
    threshold: Threshold,
    opts: &EnumerationOptions,
) -> Result<ViolationProbability> {
    let rounds = config.rounds();
    let required: u128 = rounds.iter().map(|&n| u128::from(n) + 1).product();
    if required > opts.budget {
        return Err(ChshError::BudgetExceeded {
            required,
            budget: opts.budget,
        });
    }
    let pmfs = rounds
        .iter()
        .map(|&n| walk_pmf_with_limit(n, opts.step_limit))
        .collect::<Result<Vec<_>>>()?;

    let test = ViolationTest::new(config);
    let weights = test.weights().map(i128::abs);

    let collapsed = (0..4).rev().max_by_key(|&k| rounds[k]).unwrap_or(3);
    let mut loops = (0..4).filter(|&k| k != collapsed);
    let (outer, middle, inner) = match (loops.next(), loops.next(), loops.next()) {
        (Some(a), Some(b), Some(c)) => (a, b, c),
        _ => unreachable!("three channels remain"),
    };
    let tails = TailTable::new(
        &pmfs[collapsed],
        weights[collapsed],
        test.bound(),
        threshold,
    );

    let span = |k: usize| -> Vec<(i128, &BigUint)> {
        let pmf = &pmfs[k];
        pmf.displacements()
            .zip(pmf.numerators())
            .map(|(m, c)| (weights[k] * i128::from(m), c))
            .collect()
    };
    let outer_terms = span(outer);
    let middle_terms = span(middle);
    let inner_terms = span(inner);

    // not worth waking a pool for a few thousand cells
    let par = if required < SEQUENTIAL_BELOW {
        Parallelism::Sequential
    } else {
        opts.parallelism
    };
    let numer = map_reduce(
        outer_terms.len() as u64,
        par,
        |idx| {
            let (s1, c1) = outer_terms[idx as usize];
            let mut acc_middle = BigUint::zero();
            for &(s2, c2) in &middle_terms {
                let mut acc_inner = BigUint::zero();
                for &(s3, c3) in &inner_terms {
                    let tail = tails.mass(s1 + s2 + s3);
                    if !tail.is_zero() {
                        acc_inner += c3 * tail;
                    }
                }
                if !acc_inner.is_zero() {
                    acc_middle += c2 * acc_inner;
                }
            }
            c1 * acc_middle
        },
        |a, b| a + b,
    );

    let exp = u32::try_from(config.total()).map_err(|_| {
        ChshError::InvalidConfig("total round count does not fit a dyadic exponent".into())
    })?;
    Ok(ViolationProbability {
        value: ProbabilityValue::Exact(Dyadic::new(numer, exp)),
        method: Method::Exact,
        threshold,
        config: *config,
    })
}

/// Violating mass of one channel given the partial sum of the others.
struct TailTable {
    steps: i128,
    weight: i128,
    bound: i128,
    threshold: Threshold,
    /// `suffix[k] = Σ_{j ≥ k} binomial(n, j)`; `suffix[n + 1] = 0`.
    suffix: Vec<BigUint>,
}

impl TailTable {
    fn new(pmf: &WalkPmf, weight: i128, bound: i128, threshold: Threshold) -> Self {
        let mut suffix = vec![BigUint::zero(); pmf.numerators().len() + 1];
        for (k, c) in pmf.numerators().iter().enumerate().rev() {
            suffix[k] = &suffix[k + 1] + c;
        }
        TailTable {
            steps: i128::from(pmf.steps()),
            weight,
            bound,
            threshold,
            suffix,
        }
    }

    /// Numerator over `2^n` of `P(|s + w·m| crosses the bound)`.
    fn mass(&self, s: i128) -> BigUint {
        self.upper(s) + self.upper(-s)
    }

    /// Mass of `{m : w·m > bound - s}` (or `≥`).
    fn upper(&self, s: i128) -> &BigUint {
        let t = self.bound - s;
        let m_min = match self.threshold {
            Threshold::Strict => t.div_euclid(self.weight) + 1,
            Threshold::NonStrict => -(-t).div_euclid(self.weight),
        };
        // m = 2k - n, so k ≥ ceil((m_min + n) / 2)
        let k_min = (m_min + self.steps + 1).div_euclid(2);
        let k = k_min.clamp(0, self.steps + 1) as usize;
        &self.suffix[k]
    }
}

/// `erfc(sqrt(2 / Σ 1/n_k))`, the Gaussian half-space estimate.
///
/// The continuous measure puts no mass on `|C| = 2`, so the result is tagged
/// [`Threshold::Strict`].
pub fn analytic_violation_probability(config: &ExperimentConfig) -> Result<ViolationProbability> {
    let p = analytic_probability_for_counts(config.rounds_f64())?;
    Ok(ViolationProbability {
        value: ProbabilityValue::Real(p),
        method: Method::Analytic,
        threshold: Threshold::Strict,
        config: *config,
    })
}

/// The same estimate for real-valued round counts.
pub fn analytic_probability_for_counts(counts: [f64; 4]) -> Result<f64> {
    let spec = HalfSpaceSpec::chsh(counts)?;
    erfc(hyperplane_distance(&spec))
}

/// Fraction of points drawn from the isotropic measure `π⁻² e^{-|z|²} d⁴z`
/// that land outside the layer `|Σ sqrt(2/n_k) z_k| ≤ 2`.
///
/// Sampling runs in batches of 65 536 points; batch `b` uses ChaCha8 seeded
/// with `seed` on stream `b`, so the answer does not depend on worker count.
pub fn gaussian_halfspace_oracle(
    config: &ExperimentConfig,
    samples: u64,
    seed: u64,
) -> Result<f64> {
    gaussian_halfspace_oracle_with(config, samples, seed, Parallelism::Auto)
}

pub fn gaussian_halfspace_oracle_with(
    config: &ExperimentConfig,
    samples: u64,
    seed: u64,
    par: Parallelism,
) -> Result<f64> {
    if samples < ORACLE_MIN_SAMPLES {
        return Err(ChshError::InvalidConfig(format!(
            "the half-space oracle needs at least {ORACLE_MIN_SAMPLES} samples"
        )));
    }
    let spec = HalfSpaceSpec::chsh(config.rounds_f64())?;
    let a = spec.coefficients();
    let bound = spec.offset();
    let batches = samples.div_ceil(ORACLE_BATCH);
    let hits = map_reduce(
        batches,
        par,
        |b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let len = ORACLE_BATCH.min(samples - b * ORACLE_BATCH);
            let mut hits = 0u64;
            for _ in 0..len {
                let proj: f64 = a
                    .iter()
                    .map(|ak| {
                        let z: f64 = rng.sample(StandardNormal);
                        ak * z * FRAC_1_SQRT_2
                    })
                    .sum();
                if proj.abs() > bound {
                    hits += 1;
                }
            }
            hits
        },
        |x, y| x + y,
    );
    Ok(hits as f64 / samples as f64)
}
