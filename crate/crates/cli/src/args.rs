use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

use asep_core::Mode;

/// Seed override for `simulate` when `--seed` is absent.
pub const SEED_ENV: &str = "ASEP_LAB_SEED";

#[derive(Parser, Debug)]
#[command(
    name = "asep-lab",
    version,
    about = "Verify the open-ASEP duality identities and simulate the process"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run verification checks.
    Verify {
        #[arg(value_enum)]
        which: Which,
        #[command(flatten)]
        opts: Options,
    },
    /// Monte Carlo experiments.
    Simulate {
        #[command(subcommand)]
        experiment: Experiment,
    },
    /// Report utilities.
    Report {
        #[command(subcommand)]
        what: ReportCommand,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    All,
    Prop1,
    Lemma,
    Duality,
    Corollary,
    Symmetry,
    Examples,
    Conventions,
}

#[derive(Subcommand, Debug)]
pub enum Experiment {
    /// Estimate E[D(η_t, ξ)] − E[D(η, ξ_t)] by simulation.
    DualityMc {
        #[command(flatten)]
        opts: Options,
        /// Initial configuration of the left process, site 1 first.
        #[arg(long)]
        eta: Option<String>,
        /// Initial configuration of the right process, site 1 first.
        #[arg(long)]
        xi: Option<String>,
        #[arg(long, default_value_t = 10_000)]
        trajectories: usize,
        #[arg(long, env = SEED_ENV, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand, Debug)]
pub enum ReportCommand {
    /// Print the JSON schema of reports.
    Schema,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeArg {
    Exact,
    Numeric,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Numeric => Mode::Numeric,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct Options {
    /// Single lattice size.
    #[arg(long = "L", conflicts_with = "l_max")]
    pub l: Option<usize>,
    /// Run L = 1..=Lmax.
    #[arg(long = "Lmax")]
    pub l_max: Option<usize>,
    /// Single particle number of the duality function.
    #[arg(long = "N", conflicts_with = "n_max")]
    pub n: Option<u32>,
    /// Run N = 1..=Nmax.
    #[arg(long = "Nmax")]
    pub n_max: Option<u32>,
    /// Asymmetry τ = √(p/q); rates become p = τ, q = 1/τ.
    #[arg(long, conflicts_with_all = ["p", "q"])]
    pub tau: Option<String>,
    /// Right jump rate.
    #[arg(long, requires = "q")]
    pub p: Option<String>,
    /// Left jump rate.
    #[arg(long, requires = "p")]
    pub q: Option<String>,
    /// Entry rate at site 1 (default: the duality value γp/q).
    #[arg(long)]
    pub alpha: Option<String>,
    /// Exit rate at site L.
    #[arg(long)]
    pub beta: Option<String>,
    /// Exit rate at site 1.
    #[arg(long, default_value = "1")]
    pub gamma: String,
    /// Entry rate at site L.
    #[arg(long)]
    pub delta: Option<String>,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    pub mode: ModeArg,
    /// Time for the semigroup check (numeric) or the simulation horizon.
    #[arg(long)]
    pub t: Option<f64>,
    /// Also run the unit-step shift variants, which are known to fail.
    #[arg(long)]
    pub printed: bool,
    /// Append broken-hypothesis duality checks (`verify all`).
    #[arg(long)]
    pub negative_controls: bool,
    /// Write the JSON report here (`-` for stdout).
    #[arg(long)]
    pub json: Option<PathBuf>,
}

impl Options {
    pub fn sites(&self) -> Vec<usize> {
        match self.l {
            Some(l) => vec![l],
            None => (1..=self.l_max.unwrap_or(4)).collect(),
        }
    }

    pub fn particles(&self) -> Vec<u32> {
        match self.n {
            Some(n) => vec![n],
            None => (1..=self.n_max.unwrap_or(2)).collect(),
        }
    }
}
