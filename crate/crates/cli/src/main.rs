//! Command-line front end: reads family definitions, runs implicitization,
//! convergence studies and benchmarks, and writes coefficient files, study
//! tables and contour grids for external plotting.

mod commands;
mod files;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "envcheb", version, about = "Approximate implicit equations of envelopes of rational curve families")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute an implicit approximation of a family's envelope.
    Implicitize {
        /// Family definition (JSON).
        #[arg(long)]
        family: PathBuf,
        /// Total degree of the implicit polynomial (>= 1).
        #[arg(long)]
        degree: usize,
        /// Override the cofactor degree in s.
        #[arg(long)]
        k1: Option<usize>,
        /// Override the cofactor degree in t.
        #[arg(long)]
        k2: Option<usize>,
        /// Use plain Chebyshev coefficients instead of the orthonormalized
        /// row scaling.
        #[arg(long)]
        no_row_weighting: bool,
        /// Result path (default: `<family>.result.json`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Subdivision convergence study around a point of the envelope.
    Study {
        #[arg(long)]
        family: PathBuf,
        /// Largest implicit degree.
        #[arg(long)]
        dmax: usize,
        /// Deepest subdivision level (regions of diameter 2^-i).
        #[arg(long)]
        imax: usize,
        /// Subdivision center "s,t" on the envelope zero set (default:
        /// traced point nearest the domain midpoint).
        #[arg(long)]
        center: Option<String>,
        /// CSV path (default: `<family>.study.csv`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample a result's implicit polynomial on a grid for plotting.
    Contour {
        /// Result file written by `implicitize`.
        #[arg(long)]
        result: PathBuf,
        /// Grid resolution per axis.
        #[arg(long)]
        grid: usize,
        /// Sampling box "x0,y0,x1,y1" (default: bounding box of the
        /// reference triangle).
        #[arg(long, value_name = "BOX")]
        r#box: Option<String>,
        /// Family definition; when given, 64 member-curve polylines are
        /// written next to the grid for overlay.
        #[arg(long)]
        family: Option<PathBuf>,
        /// Grid CSV path (default: `<result>.contour.csv`); the polylines
        /// land in a `_members` sibling.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time matrix assembly and the singular value solve per degree.
    Bench {
        #[arg(long)]
        family: PathBuf,
        /// Degrees to run: "1..6", "3" or "1,2,4".
        #[arg(long)]
        degrees: String,
        /// CSV path (default: `<family>.bench.csv`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Process-level error classification: exit 2 for malformed input, 3 for
/// numerical failures, 4 when no envelope zero set is found.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Numerical(String),
    EmptyZeroSet(String),
}

impl CliError {
    pub fn from_core(err: envcheb::Error) -> Self {
        use envcheb::Error::*;
        match err {
            EmptyZeroSet | CenterOffZeroSet { .. } => CliError::EmptyZeroSet(err.to_string()),
            InvalidParameter(_) | InvalidFamily(_) => CliError::Input(err.to_string()),
            _ => CliError::Numerical(err.to_string()),
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::EmptyZeroSet(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Numerical(m) | CliError::EmptyZeroSet(m) => m,
        }
    }
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("ENVCHEB_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }

    let cli = Cli::parse();
    let result = match cli.command {
        Command::Implicitize {
            family,
            degree,
            k1,
            k2,
            no_row_weighting,
            out,
        } => commands::implicitize(&family, degree, k1, k2, no_row_weighting, out),
        Command::Study {
            family,
            dmax,
            imax,
            center,
            out,
        } => commands::study(&family, dmax, imax, center.as_deref(), out),
        Command::Contour {
            result,
            grid,
            r#box,
            family,
            out,
        } => commands::contour(&result, grid, r#box.as_deref(), family.as_deref(), out),
        Command::Bench {
            family,
            degrees,
            out,
        } => commands::bench(&family, &degrees, out),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.exit_code())
        }
    }
}
