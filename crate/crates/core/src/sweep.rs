//! Probability-versus-N sweeps for the three round splits
//! `n₁=n₂=n₃=n₄`, `10n₁=n₂=n₃=n₄` and `100n₁=n₂=n₃=n₄`, with optional exact
//! strict/non-strict brackets at small equal-split N.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dyadic::Dyadic;
use crate::error::ChshError;
use crate::exec::{map_collect, Parallelism};
use crate::model::{ExperimentConfig, Threshold};
use crate::probability::{
    analytic_probability_for_counts, exact_violation_probability_with, EnumerationOptions,
};

/// Largest total on the default grids.
pub const DEFAULT_MAX_TOTAL: u64 = 4096;

/// Equal-split totals that get exact brackets.
pub const EXACT_INTERVAL_TOTALS: [u64; 5] = [4, 8, 12, 16, 20];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Equal,
    Ratio10,
    Ratio100,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Equal, Variant::Ratio10, Variant::Ratio100];

    /// Rounds per channel in units of `n₁`.
    pub fn weights(self) -> [u64; 4] {
        match self {
            Variant::Equal => [1, 1, 1, 1],
            Variant::Ratio10 => [1, 10, 10, 10],
            Variant::Ratio100 => [1, 100, 100, 100],
        }
    }

    /// `N / n₁`: 4, 31 or 301.
    pub fn split(self) -> u64 {
        self.weights().iter().sum()
    }

    /// Integer round counts for total `n`, if `n` divides evenly.
    pub fn counts(self, total: u64) -> Option<[u32; 4]> {
        if total == 0 || !total.is_multiple_of(self.split()) {
            return None;
        }
        let unit = total / self.split();
        let counts = self.weights().map(|w| u32::try_from(w * unit).ok());
        match counts {
            [Some(a), Some(b), Some(c), Some(d)] => Some([a, b, c, d]),
            _ => None,
        }
    }

    /// Real-valued round counts `N·w_k / split`.
    pub fn continuous_counts(self, total: f64) -> [f64; 4] {
        let split = self.split() as f64;
        self.weights().map(|w| total * w as f64 / split)
    }

    /// Default grid: `N = split · 2^k` up to 4096, i.e. 4, 8, …, 4096 for the
    /// equal split, 31 … 3968 and 301 … 2408 for the ratio splits.
    pub fn default_totals(self) -> Vec<u64> {
        (0..)
            .map(|k| self.split() << k)
            .take_while(|&n| n <= DEFAULT_MAX_TOTAL)
            .collect()
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Equal => "equal",
            Variant::Ratio10 => "ratio10",
            Variant::Ratio100 => "ratio100",
        })
    }
}

impl FromStr for Variant {
    type Err = ChshError;

    fn from_str(s: &str) -> Result<Self, ChshError> {
        match s {
            "equal" => Ok(Variant::Equal),
            "ratio10" | "ratio-10" => Ok(Variant::Ratio10),
            "ratio100" | "ratio-100" => Ok(Variant::Ratio100),
            other => Err(ChshError::InvalidConfig(format!(
                "unknown variant {other:?}"
            ))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepRequest {
    pub variants: Vec<Variant>,
    /// Totals to evaluate; `None` uses each variant's default grid.
    pub totals: Option<Vec<u64>>,
    pub include_exact_intervals: bool,
    /// Evaluate non-divisible totals with real-valued counts.
    pub continuous: bool,
    pub enumeration: EnumerationOptions,
    pub parallelism: Parallelism,
}

impl Default for SweepRequest {
    fn default() -> Self {
        SweepRequest {
            variants: Variant::ALL.to_vec(),
            totals: None,
            include_exact_intervals: true,
            continuous: false,
            enumeration: EnumerationOptions::default(),
            parallelism: Parallelism::Auto,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub variant: Variant,
    pub total: u64,
    /// Round counts; fractional only for continuous rows.
    pub counts: Option<[f64; 4]>,
    pub p_analytic: Option<f64>,
    pub exact_strict: Option<Dyadic>,
    pub exact_nonstrict: Option<Dyadic>,
    pub error: Option<String>,
}

impl SweepRow {
    fn failed(variant: Variant, total: u64, error: String) -> Self {
        SweepRow {
            variant,
            total,
            counts: None,
            p_analytic: None,
            exact_strict: None,
            exact_nonstrict: None,
            error: Some(error),
        }
    }
}

/// Evaluates every (variant, N) cell. Rows come back sorted by variant then N;
/// a cell that cannot be evaluated carries an `error` instead of values.
pub fn run_sweep(req: &SweepRequest) -> Vec<SweepRow> {
    let mut cells = Vec::new();
    for &variant in &req.variants {
        let mut totals = match &req.totals {
            Some(t) => t.clone(),
            None => variant.default_totals(),
        };
        if req.include_exact_intervals && variant == Variant::Equal {
            totals.extend(EXACT_INTERVAL_TOTALS);
        }
        totals.sort_unstable();
        totals.dedup();
        cells.extend(totals.into_iter().map(|n| (variant, n)));
    }
    cells.sort_unstable();
    cells.dedup();
    map_collect(&cells, req.parallelism, |&(variant, total)| {
        evaluate(req, variant, total)
    })
}

fn evaluate(req: &SweepRequest, variant: Variant, total: u64) -> SweepRow {
    let counts = match variant.counts(total) {
        Some(c) => c.map(f64::from),
        None if req.continuous && total > 0 => variant.continuous_counts(total as f64),
        None => {
            return SweepRow::failed(
                variant,
                total,
                format!(
                    "N = {total} is not a positive multiple of {}",
                    variant.split()
                ),
            )
        }
    };
    let p_analytic = match analytic_probability_for_counts(counts) {
        Ok(p) => p,
        Err(e) => return SweepRow::failed(variant, total, e.to_string()),
    };
    let mut row = SweepRow {
        variant,
        total,
        counts: Some(counts),
        p_analytic: Some(p_analytic),
        exact_strict: None,
        exact_nonstrict: None,
        error: None,
    };
    let bracketed = req.include_exact_intervals
        && variant == Variant::Equal
        && EXACT_INTERVAL_TOTALS.contains(&total);
    if let (true, Some(rounds)) = (bracketed, variant.counts(total)) {
        let mut opts = req.enumeration;
        // rows already run concurrently
        opts.parallelism = Parallelism::Sequential;
        let exact = |threshold| {
            ExperimentConfig::new(rounds)
                .and_then(|c| exact_violation_probability_with(&c, threshold, &opts))
                .map(|p| p.value.as_exact().cloned())
        };
        match (exact(Threshold::Strict), exact(Threshold::NonStrict)) {
            (Ok(s), Ok(ns)) => {
                row.exact_strict = s;
                row.exact_nonstrict = ns;
            }
            (Err(e), _) | (_, Err(e)) => row.error = Some(e.to_string()),
        }
    }
    row
}
