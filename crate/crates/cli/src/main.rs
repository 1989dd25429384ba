//! `chsh`: finite-round CHSH violation probabilities from the command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 budget or size limit exceeded.

mod output;
mod toy;

use std::io::{self, Write};
use std::process::ExitCode;

use chsh_core::mc::{estimate_violation_probability_with, McOptions, DEFAULT_SEED};
use chsh_core::probability::DEFAULT_ENUMERATION_BUDGET;
use chsh_core::{
    analytic_violation_probability, exact_violation_probability_with, run_sweep, ChshError,
    EnumerationOptions, ExperimentConfig, Parallelism, SweepRequest, Threshold, Variant,
};
use clap::{Args, Parser, Subcommand};

use output::{Format, ProbabilityRow, SweepRecord};

#[derive(Debug, Parser)]
#[command(
    name = "chsh",
    version,
    about = "Probability of CHSH violations in finite local experiments"
)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Replay the four-round maximally violating dataset.
    Toy {
        #[arg(long)]
        json: bool,
    },
    /// Exact probability by enumeration.
    Exact {
        #[command(flatten)]
        rounds: Rounds,
        #[command(flatten)]
        threshold: ThresholdArgs,
        /// Largest admissible product of (n_k + 1).
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_BUDGET)]
        budget: u128,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Analytic large-N estimate erfc(sqrt(2 / sum 1/n_k)).
    Approx {
        #[command(flatten)]
        rounds: Rounds,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Monte Carlo estimate with a 95% Wilson interval.
    Mc {
        #[command(flatten)]
        rounds: Rounds,
        #[command(flatten)]
        threshold: ThresholdArgs,
        #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Probability against total rounds N for the equal and ratio splits.
    Sweep {
        /// Comma-separated list of equal, ratio10, ratio100.
        #[arg(long, value_delimiter = ',', default_value = "equal,ratio10,ratio100")]
        variant: Vec<Variant>,
        /// Comma-separated totals; default is split * 2^k up to 4096.
        #[arg(long, value_delimiter = ',')]
        n_values: Option<Vec<u64>>,
        /// Add exact strict/non-strict values at equal-split N = 4, 8, 12, 16, 20.
        #[arg(long)]
        intervals: bool,
        /// Evaluate indivisible N with real-valued round counts.
        #[arg(long)]
        continuous: bool,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_BUDGET)]
        budget: u128,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
}

#[derive(Debug, Args)]
struct Rounds {
    /// Rounds with settings (1,1), (1,2), (2,1), (2,2).
    #[arg(num_args = 4, required = true, value_names = ["N1", "N2", "N3", "N4"],
          value_parser = clap::value_parser!(u32).range(1..))]
    n: Vec<u32>,
}

impl Rounds {
    fn config(&self) -> Result<ExperimentConfig, ChshError> {
        let rounds: [u32; 4] = self.n.as_slice().try_into().map_err(|_| {
            ChshError::InvalidConfig(format!("expected 4 round counts, got {}", self.n.len()))
        })?;
        ExperimentConfig::new(rounds)
    }
}

#[derive(Debug, Args)]
struct ThresholdArgs {
    /// Count |C| > 2 (default).
    #[arg(long, conflicts_with = "nonstrict")]
    strict: bool,
    /// Count |C| >= 2.
    #[arg(long)]
    nonstrict: bool,
}

impl ThresholdArgs {
    fn get(&self) -> Threshold {
        if self.nonstrict {
            Threshold::NonStrict
        } else {
            Threshold::Strict
        }
    }
}

enum Failure {
    Usage(String),
    Limit(String),
    Io(io::Error),
}

impl From<ChshError> for Failure {
    fn from(e: ChshError) -> Self {
        if e.is_limit() {
            Failure::Limit(format!("{e}; use `chsh approx` for the analytic estimate"))
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let parallelism = match cli.threads {
        Some(k) => Parallelism::Threads(k.into()),
        None => Parallelism::Auto,
    };
    let stdout = io::stdout().lock();
    match cli.command {
        Command::Toy { json } => toy::run(stdout, json)?,
        Command::Exact {
            rounds,
            threshold,
            budget,
            format,
        } => {
            let config = rounds.config()?;
            let opts = EnumerationOptions {
                budget,
                parallelism,
                ..Default::default()
            };
            let p = exact_violation_probability_with(&config, threshold.get(), &opts)?;
            let row = ProbabilityRow::from(&p);
            eprintln!(
                "exact {} {config}: p = {} ({})",
                p.threshold,
                row.fraction.as_deref().unwrap_or("?"),
                row.value
            );
            output::write_one(stdout, format, &row)?;
        }
        Command::Approx { rounds, format } => {
            let p = analytic_violation_probability(&rounds.config()?)?;
            output::write_one(stdout, format, &ProbabilityRow::from(&p))?;
        }
        Command::Mc {
            rounds,
            threshold,
            trials,
            seed,
            format,
        } => {
            let config = rounds.config()?;
            let p = analytic_violation_probability(&config)?.value.to_f64();
            let expected = p * trials as f64;
            if expected < 10.0 {
                eprintln!(
                    "warning: analytic p = {p:.3e} gives about {expected:.2e} expected hits in \
                     {trials} trials; the estimate is mostly noise, prefer `chsh exact` or `chsh approx`"
                );
            }
            let opts = McOptions {
                parallelism,
                ..Default::default()
            };
            let est =
                estimate_violation_probability_with(&config, trials, seed, threshold.get(), &opts)?;
            output::write_one(stdout, format, &ProbabilityRow::from(&est))?;
        }
        Command::Sweep {
            variant,
            n_values,
            intervals,
            continuous,
            budget,
            format,
        } => {
            let req = SweepRequest {
                variants: variant,
                totals: n_values,
                include_exact_intervals: intervals,
                continuous,
                enumeration: EnumerationOptions {
                    budget,
                    ..Default::default()
                },
                parallelism,
            };
            let rows = run_sweep(&req);
            for row in &rows {
                if let Some(e) = &row.error {
                    eprintln!("warning: {} N={}: {e}", row.variant, row.total);
                }
            }
            let records: Vec<SweepRecord> = rows.iter().map(SweepRecord::from).collect();
            output::write_all(stdout, format, &records)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Limit(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        // a closed pipe is not worth a complaint
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Io(e)) => {
            let _ = writeln!(io::stderr(), "error: {e}");
            ExitCode::from(1)
        }
    }
}
