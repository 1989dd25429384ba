//! Probability that a classical, finite-round CHSH experiment reads `|C| > 2`.
//!
//! Every channel `(i, j)` of the experiment is a fair ±1 random walk. Three
//! independent routes to the violation probability are provided:
//!
//! * [`exact_violation_probability`]: exact dyadic-rational enumeration over
//!   the channel displacements,
//! * [`analytic_violation_probability`]: the Gaussian half-space estimate
//!   `erfc(sqrt(2 / Σ 1/n_k))`,
//! * [`estimate_violation_probability`]: seeded Bernoulli Monte Carlo with a
//!   Wilson score interval.
//!
//! With the default `parallel` feature the enumeration, the Monte Carlo
//! batches and sweeps run on rayon; results are bit-identical to the
//! sequential path for any worker count.

pub mod dyadic;
pub mod erfc;
pub mod error;
pub mod exec;
pub mod mc;
pub mod model;
pub mod probability;
pub mod sweep;
pub mod walk;

pub use dyadic::Dyadic;
pub use erfc::erfc;
pub use error::{ChshError, Result};
pub use exec::Parallelism;
pub use mc::{
    estimate_violation_probability, simulate_experiment, wilson_interval, McEstimate, McOptions,
};
pub use model::{
    chsh_correlation, is_violation, table_one, tally, Channel, ExperimentConfig, MeasurementRecord,
    RoundTally, Threshold,
};
pub use probability::{
    analytic_probability_for_counts, analytic_violation_probability, exact_violation_probability,
    exact_violation_probability_with, gaussian_halfspace_oracle, EnumerationOptions, Method,
    ProbabilityValue, ViolationProbability,
};
pub use sweep::{run_sweep, SweepRequest, SweepRow, Variant};
pub use walk::{
    gaussian_density, hyperplane_distance, walk_pmf, walk_pmf_with_limit, HalfSpaceSpec, WalkPmf,
};
