//! Seeded Monte Carlo replay of whole experiments, round by round.
//!
//! Trials are cut into fixed-size batches. Batch `b` draws from ChaCha8
//! seeded with the user seed and switched to stream `b`, so a run is
//! reproducible bit for bit regardless of how many workers execute it.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{ChshError, Result};
use crate::exec::{map_reduce, Parallelism};
use crate::model::{Channel, ExperimentConfig, RoundTally, Threshold, ViolationTest};

/// Seed used when the caller does not pick one.
pub const DEFAULT_SEED: u64 = 0x0C45_4853;
pub const DEFAULT_BATCH_SIZE: u64 = 10_000;
/// Two-sided 95% standard normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Copy, Debug)]
pub struct McOptions {
    pub batch_size: u64,
    pub parallelism: Parallelism,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions {
            batch_size: DEFAULT_BATCH_SIZE,
            parallelism: Parallelism::Auto,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub trials: u64,
    pub hits: u64,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
    pub threshold: Threshold,
    pub config: ExperimentConfig,
}

impl McEstimate {
    /// Binomial standard error at the point estimate.
    pub fn standard_error(&self) -> f64 {
        (self.estimate * (1.0 - self.estimate) / self.trials as f64).sqrt()
    }
}

/// One experiment: for each channel in order, `n_k` fair ±1 outcomes `c`.
/// Each round consumes one `u32` from `rng`; its top bit set means `c = +1`.
pub fn simulate_experiment<R: RngCore + ?Sized>(
    config: &ExperimentConfig,
    rng: &mut R,
) -> RoundTally {
    let mut tally = RoundTally::default();
    for (channel, n) in Channel::ALL.into_iter().zip(config.rounds()) {
        for _ in 0..n {
            let c = if rng.next_u32() >> 31 == 1 { 1 } else { -1 };
            tally.record_step(channel, c);
        }
    }
    tally
}

pub fn estimate_violation_probability(
    config: &ExperimentConfig,
    trials: u64,
    seed: u64,
    threshold: Threshold,
) -> Result<McEstimate> {
    estimate_violation_probability_with(config, trials, seed, threshold, &McOptions::default())
}

pub fn estimate_violation_probability_with(
    config: &ExperimentConfig,
    trials: u64,
    seed: u64,
    threshold: Threshold,
    opts: &McOptions,
) -> Result<McEstimate> {
    if trials == 0 {
        return Err(ChshError::InvalidConfig(
            "at least one trial is required".into(),
        ));
    }
    if opts.batch_size == 0 {
        return Err(ChshError::InvalidConfig(
            "batch size must be positive".into(),
        ));
    }
    let test = ViolationTest::new(config);
    let batch = opts.batch_size;
    let hits = map_reduce(
        trials.div_ceil(batch),
        opts.parallelism,
        |b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let len = batch.min(trials - b * batch);
            (0..len)
                .filter(|_| {
                    let tally = simulate_experiment(config, &mut rng);
                    test.violates(tally.displacements(), threshold)
                })
                .count() as u64
        },
        |x, y| x + y,
    );
    let (ci_low, ci_high) = wilson_interval(hits, trials, Z_95);
    Ok(McEstimate {
        trials,
        hits,
        estimate: hits as f64 / trials as f64,
        ci_low,
        ci_high,
        seed,
        threshold,
        config: *config,
    })
}

/// Wilson score interval for `hits` successes in `trials`, clamped so that it
/// lies in `[0, 1]` and contains the point estimate.
pub fn wilson_interval(hits: u64, trials: u64, z: f64) -> (f64, f64) {
    assert!(trials > 0 && hits <= trials);
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let low = (center - half).clamp(0.0, p);
    let high = (center + half).clamp(p, 1.0);
    (low, high)
}
