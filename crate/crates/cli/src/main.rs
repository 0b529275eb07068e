//! `granulate`: batch front end for the granulation toolkit. Every command
//! is deterministic given its inputs, flags, config file, and `--seed`, and
//! leaves a `manifest.txt` of input/output digests beside its outputs.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod cfg;
mod commands;
mod levelmaps;
mod manifest;
mod synth;

#[derive(Parser)]
#[command(
    name = "granulate",
    version,
    about = "Granulation, fuzzy inference, rough rules, and their balancing loops for tabular data"
)]
pub struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Line-oriented `key = value` config file; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = ".", value_name = "DIR")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Generate a seeded synthetic dataset.
    Synth {
        /// Schema preset: dam5 (Z,L,RQD,TWR,lugeon) or xyz (X,Y,Z,lugeon).
        #[arg(long)]
        preset: String,
        /// Number of objects.
        #[arg(long)]
        n: usize,
        /// dam5 only: fraction of depth zones with inverted quality-take
        /// relation (default 0.7).
        #[arg(long)]
        neg_frac: Option<f64>,
    },
    /// Split a table into disjoint train and test parts.
    Split {
        #[arg(long)]
        input: PathBuf,
        /// Decision column (default: last header column).
        #[arg(long)]
        decision: Option<String>,
        /// Objects drawn into the training part.
        #[arg(long)]
        train: usize,
        /// Objects drawn into the test part.
        #[arg(long)]
        test: usize,
    },
    /// Train a self-organizing map on all columns and granulate the objects.
    SomTrain {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        decision: Option<String>,
        /// Lattice rows (default 3).
        #[arg(long)]
        rows: Option<usize>,
        /// Lattice columns (default 3).
        #[arg(long)]
        cols: Option<usize>,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        lr_initial: Option<f64>,
        #[arg(long)]
        lr_final: Option<f64>,
        /// Initial neighborhood radius (default: half the longer side).
        #[arg(long)]
        radius: Option<f64>,
        /// gaussian or bubble.
        #[arg(long)]
        neighborhood: Option<String>,
    },
    /// Fit a fuzzy inference model (cluster, least squares, hybrid tuning).
    NfisTrain {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        decision: Option<String>,
        /// Cap the rule count (cluster radius is searched automatically).
        #[arg(long)]
        rules: Option<usize>,
        /// Cluster radius in (0, 1] (default 0.5); ignored when --rules is
        /// given.
        #[arg(long)]
        radius: Option<f64>,
        /// Tuning epochs (default 30).
        #[arg(long)]
        epochs: Option<usize>,
        /// Gradient step (default 0.05).
        #[arg(long)]
        step: Option<f64>,
    },
    /// Discretize a numeric table into levels and induce rough decision rules.
    RstRules {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        decision: Option<String>,
        /// Levels per attribute (default 5; per-attribute overrides via
        /// config keys `levels.<attribute>`).
        #[arg(long)]
        levels: Option<usize>,
        /// minimal, exhaustive, or strong (default minimal).
        #[arg(long)]
        strategy: Option<String>,
        /// Drop disjunctive-decision rules.
        #[arg(long)]
        exact_only: bool,
        /// Minimum dependency factor a rule must reach (default 0).
        #[arg(long)]
        threshold: Option<f64>,
        /// Dependency-factor universe: whole or covered (default whole).
        #[arg(long)]
        universe: Option<String>,
        /// Code reported for unrecognized objects (default 4).
        #[arg(long)]
        fallback: Option<f64>,
    },
    /// Self-organizing neuro-fuzzy balancing loop over map sizes.
    Sonfis {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        test: PathBuf,
        #[arg(long)]
        decision: Option<String>,
        /// Close-open iterations (default 10).
        #[arg(long)]
        iterations: Option<usize>,
        /// Hard cap on fuzzy rules (default 4).
        #[arg(long)]
        max_rules: Option<usize>,
        /// Smallest neuron count (default 10).
        #[arg(long)]
        neurons_min: Option<usize>,
        /// Largest neuron count (default 100).
        #[arg(long)]
        neurons_max: Option<usize>,
        /// random or adaptive (default adaptive).
        #[arg(long)]
        mode: Option<String>,
        /// min-error, min-rules, or min-objects (default min-error).
        #[arg(long)]
        criterion: Option<String>,
        /// Growth-law neuron coefficient (default 1.01).
        #[arg(long)]
        alpha: Option<f64>,
        /// Growth-law error coefficient (default 0.001).
        #[arg(long)]
        beta: Option<f64>,
        /// Growth-law constant (default 0.5).
        #[arg(long)]
        gamma: Option<f64>,
        /// Stop once the test error reaches this value.
        #[arg(long)]
        error_target: Option<f64>,
        /// Map training epochs per iteration (default 100).
        #[arg(long)]
        som_epochs: Option<usize>,
        /// Fuzzy tuning epochs per iteration (default 30).
        #[arg(long)]
        nfis_epochs: Option<usize>,
        /// Fuzzy tuning gradient step (default 0.05).
        #[arg(long)]
        nfis_step: Option<f64>,
    },
    /// Rough-set balancing loop over random structures.
    Sorst {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        test: PathBuf,
        #[arg(long)]
        decision: Option<String>,
        /// Random structures to try (default 7).
        #[arg(long)]
        structures: Option<usize>,
        /// Levels per attribute (default 3; per-attribute overrides via
        /// config keys `levels.<attribute>`).
        #[arg(long)]
        levels: Option<usize>,
        /// Smallest neuron count (default 10).
        #[arg(long)]
        neurons_min: Option<usize>,
        /// Largest neuron count (default 100).
        #[arg(long)]
        neurons_max: Option<usize>,
        /// Minimum dependency factor a rule must reach (default 0).
        #[arg(long)]
        threshold: Option<f64>,
        /// Multiply the threshold by this after each rejected structure.
        #[arg(long)]
        decay: Option<f64>,
        /// Drop disjunctive-decision rules before filtering.
        #[arg(long)]
        exact_only: bool,
        /// minimal, exhaustive, or strong (default minimal).
        #[arg(long)]
        strategy: Option<String>,
        /// Dependency-factor universe: whole or covered (default whole).
        #[arg(long)]
        universe: Option<String>,
        /// Code reported for unrecognized test objects (default 4).
        #[arg(long)]
        fallback: Option<f64>,
        /// Map training epochs per structure (default 100).
        #[arg(long)]
        som_epochs: Option<usize>,
    },
    /// Sweep a fitted model over a regular grid of inputs.
    PredictGrid {
        /// Fuzzy model export to sweep.
        #[arg(long)]
        tsk: Option<PathBuf>,
        /// Rough rule export to sweep (needs --levelmaps).
        #[arg(long)]
        rules: Option<PathBuf>,
        /// Level maps matching the rules.
        #[arg(long)]
        levelmaps: Option<PathBuf>,
        /// Axis as name:min:max:step; repeat per dimension (up to 3).
        #[arg(long)]
        axis: Vec<String>,
        /// Code for grid points no rule recognizes (default: one past the
        /// decision level count).
        #[arg(long)]
        unknown_code: Option<f64>,
    },
    /// Second-difference curvature field of a gridded surface.
    Divergence {
        /// A grid file produced by predict-grid.
        #[arg(long)]
        input: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
