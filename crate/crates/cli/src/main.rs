//! `cmshift` command-line front end. Every command prints a JSON report on stdout and, with
//! `--out`, also writes it with its CSV tables into a directory.

mod commands;
mod manifest;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::Outcome;

#[derive(Parser, Debug)]
#[command(name = "cmshift", version, about = "Entropy at infinity for countable Markov shifts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Write report.json and CSV tables here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Exit with status 3 when the verdict is inconclusive.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Args, Debug, Clone)]
pub struct GraphArg {
    /// Graph document (JSON).
    #[arg(long)]
    pub graph: PathBuf,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Gurevich entropy at a vertex.
    Entropy {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long, default_value_t = 1)]
        vertex: u64,
        #[arg(long, default_value_t = 24)]
        n_max: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Grid estimate of the entropy at infinity.
    DeltaInf {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long = "M", value_delimiter = ',', default_values_t = [8u64, 16, 32, 64])]
        m: Vec<u64>,
        #[arg(long, value_delimiter = ',', default_values_t = [1u64, 2, 4])]
        q: Vec<u64>,
        #[arg(long, default_value_t = 256)]
        n_max: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Vere-Jones recurrence class.
    Classify {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long, default_value_t = 1)]
        vertex: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Strong positive recurrence verdict.
    Spr {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long, default_value_t = 256)]
        n_max: usize,
        /// Skip the numerical grid.
        #[arg(long)]
        no_grid: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Pressure-duality bound for the finite-subgraph entropy at infinity.
    BInf {
        #[command(flatten)]
        graph: GraphArg,
        /// Largest t on the grid.
        #[arg(long, default_value_t = 40.0)]
        t: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Lower bound for the entropy at infinity from drifting measures.
    HInf {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long, default_value_t = 12)]
        steps: usize,
        /// Window width factor: step i uses loop lengths in [k_i, width k_i].
        #[arg(long, default_value_t = 1)]
        width: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Katok covering numbers of a Markov measure.
    Katok {
        /// Measure document; defaults to the Parry measure of a finite --graph.
        #[arg(long)]
        measure: Option<PathBuf>,
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_values_t = [0.1f64, 0.4])]
        delta: Vec<f64>,
        #[arg(long, default_value_t = 10)]
        n_min: usize,
        #[arg(long, default_value_t = 20)]
        n_max: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Escape-of-mass inequality along a family of measures.
    VerifyMain {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long, default_value = "half-mme-half-drift")]
        family: String,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        /// Entropy at infinity to use; defaults to the exact value or the grid headline.
        #[arg(long)]
        delta_inf: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Lower bound on the limit mass of sequences with entropy at least c.
    MassBound {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long, default_value = "half-mme-half-drift")]
        family: String,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        /// Entropy floor; defaults to the smallest entropy in the family.
        #[arg(long)]
        c: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Partial sums of the dimension covering series.
    DimSeries {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long = "M", default_value_t = 16)]
        m: u64,
        #[arg(long, default_value_t = 1)]
        q: u64,
        #[arg(long, default_value_t = 0.5)]
        t: f64,
        /// Longest word length in the series.
        #[arg(long, default_value_t = 120)]
        n_max: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Build a compactly supported measure close to the two-component demo mixture.
    DensityDemo {
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long = "M", default_value_t = 4)]
        m: usize,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Run every entry of a manifest.
    Run {
        manifest: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Output directory; overrides the manifest's.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { manifest, jobs, out } => manifest::run(&manifest, jobs, out.as_deref()),
        cmd => commands::execute(&cmd),
    };
    match &outcome {
        Outcome::Done { json, .. } => {
            let _ = writeln!(std::io::stdout().lock(), "{json}");
        }
        Outcome::Failed { json, .. } => {
            let _ = writeln!(std::io::stderr().lock(), "{json}");
        }
    }
    ExitCode::from(outcome.code())
}
