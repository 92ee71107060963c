//! Command line front end for `curvetrace-core`.
//!
//! Every command reads structured-text inputs, writes one CSV report with a
//! provenance header, and exits 0 when its job succeeded, 1 when a claim it
//! was asked to verify came out false, and 2 when the inputs could not be
//! read or fail a precondition.

mod commands;
mod io;
mod report;
mod suite;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// A terminated run: `code` 1 means a verification failed, 2 an input error.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    pub fn check(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }
}

impl From<curvetrace_core::error::Error> for Failure {
    fn from(e: curvetrace_core::error::Error) -> Self {
        Failure::input(e.to_string())
    }
}

/// Report plus the optional verification failure to signal after writing it.
pub struct Outcome {
    pub report: report::Report,
    pub failure: Option<String>,
}

impl Outcome {
    pub fn ok(report: report::Report) -> Self {
        Outcome { report, failure: None }
    }
}

#[derive(Parser)]
#[command(
    name = "curvetrace",
    version,
    about = "Trace functions of multicurves on pants decompositions"
)]
struct Cli {
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a graph file (and optionally a Dehn parameter file) for
    /// well-formedness, listing every violation found.
    Validate {
        graph: PathBuf,
        /// Dehn parameter file to check against the graph.
        #[arg(long)]
        dehn: Option<PathBuf>,
    },
    /// List the components of the multicurve with the given Dehn parameter.
    Route { graph: PathBuf, dehn: PathBuf },
    /// Evaluate the multicurve's trace function at a representation point.
    Eval {
        graph: PathBuf,
        dehn: PathBuf,
        /// Angle file: edge id -> angle in [0, pi].
        #[arg(long)]
        angles: PathBuf,
        /// Twist file: internal edge id -> twist; absent edges get 0.
        #[arg(long)]
        twists: Option<PathBuf>,
    },
    /// Draw angles and twists from the interior of the moment polytope.
    Sample {
        graph: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Smallest slack kept from every polytope face.
        #[arg(long, default_value_t = 0.05)]
        margin: f64,
    },
    /// Locate an angle vector relative to the moment polytope.
    Delta { graph: PathBuf, angles: PathBuf },
    /// Fourier coefficients of the trace function along the torus orbits.
    Fourier {
        graph: PathBuf,
        dehn: PathBuf,
        /// Seed for the interior base point.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.05)]
        margin: f64,
        /// Restrict to this edge's circle action (one-dimensional table).
        #[arg(long)]
        edge: Option<usize>,
        /// Grid half-width overrides, e.g. "0=4,2=5"; default is m_j + 1.
        #[arg(long)]
        grid: Option<String>,
    },
    /// Recover the intersection number with an edge core from isotype support.
    Intersect {
        graph: PathBuf,
        dehn: PathBuf,
        #[arg(long)]
        edge: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.05)]
        margin: f64,
        /// Scan isotypes k = 0..k_max; default is the routed crossing count.
        #[arg(long)]
        k_max: Option<usize>,
    },
    /// Verify the fractional twist phase law on one edge.
    TwistCheck {
        graph: PathBuf,
        dehn: PathBuf,
        #[arg(long)]
        edge: usize,
        /// Number of twist steps applied to the Dehn parameter.
        #[arg(long, allow_hyphen_values = true)]
        ell: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.05)]
        margin: f64,
    },
    /// Rank test for the trace functions of all multicurves up to a bound.
    Independence {
        graph: PathBuf,
        #[arg(long)]
        m_max: u64,
        #[arg(long)]
        t_max: u64,
        /// Number of sampled points (rows); default is 3x the column count.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Relative singular value cutoff.
        #[arg(long, default_value_t = curvetrace_core::tol::RANK_REL)]
        tol: f64,
        #[arg(long, default_value_t = 0.05)]
        margin: f64,
        /// Lift the 500-column safety cap.
        #[arg(long)]
        allow_large: bool,
    },
    /// Run the whole verification checklist against one graph.
    Suite {
        graph: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

/// Caps the global worker pool when CURVETRACE_THREADS is set. Results do
/// not depend on the pool size; only wall time does.
fn init_thread_pool() -> Result<(), Failure> {
    let raw = match std::env::var("CURVETRACE_THREADS") {
        Ok(v) => v,
        Err(_) => return Ok(()),
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| {
            Failure::input(format!(
                "CURVETRACE_THREADS must be a positive integer, got {raw:?}"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::input(format!("cannot size the thread pool: {e}")))
}

fn run(cli: Cli) -> Result<Outcome, Failure> {
    match cli.command {
        Command::Validate { graph, dehn } => commands::validate(&graph, dehn.as_deref()),
        Command::Route { graph, dehn } => commands::route(&graph, &dehn),
        Command::Eval { graph, dehn, angles, twists } => {
            commands::eval(&graph, &dehn, &angles, twists.as_deref())
        }
        Command::Sample { graph, seed, margin } => commands::sample(&graph, seed, margin),
        Command::Delta { graph, angles } => commands::delta(&graph, &angles),
        Command::Fourier { graph, dehn, seed, margin, edge, grid } => {
            commands::fourier(&graph, &dehn, seed, margin, edge, grid.as_deref())
        }
        Command::Intersect { graph, dehn, edge, seed, margin, k_max } => {
            commands::intersect(&graph, &dehn, edge, seed, margin, k_max)
        }
        Command::TwistCheck { graph, dehn, edge, ell, seed, margin } => {
            commands::twist_check(&graph, &dehn, edge, ell, seed, margin)
        }
        Command::Independence {
            graph,
            m_max,
            t_max,
            samples,
            seed,
            tol,
            margin,
            allow_large,
        } => commands::independence(&graph, m_max, t_max, samples, seed, tol, margin, allow_large),
        Command::Suite { graph, seed } => suite::run(&graph, seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let output = cli.output.clone();
    let result = init_thread_pool().and_then(|_| run(cli));
    let code = match result {
        Ok(outcome) => match outcome.report.write(output.as_deref()) {
            Ok(()) => match outcome.failure {
                None => 0,
                Some(message) => {
                    eprintln!("check failed: {message}");
                    1
                }
            },
            Err(f) => {
                eprintln!("error: {}", f.message);
                f.code
            }
        },
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    };
    ExitCode::from(code)
}
