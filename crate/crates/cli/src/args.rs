use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "nlg",
    version,
    about = "Non-local games, threshold repetition and entanglement certification"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classical or seesaw (quantum lower bound) value of a game.
    #[command(subcommand)]
    Value(ValueCmd),
    /// Threshold-game simulation.
    #[command(subcommand)]
    Simulate(SimulateCmd),
    /// Entanglement-of-formation lower bound from an observed threshold win.
    Certify(CertifyArgs),
    /// Proof-parameter ledgers.
    #[command(subcommand)]
    Ledger(LedgerCmd),
    /// Exact inequality audits on an n-round table.
    #[command(subcommand)]
    Audit(AuditCmd),
    /// Sampling protocols.
    #[command(subcommand)]
    Sample(SampleCmd),
}

#[derive(Debug, Args)]
pub struct OutArgs {
    /// Write the report here (atomically) instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum ValueCmd {
    Classical {
        #[arg(long)]
        game: PathBuf,
        /// Print only the value.
        #[arg(long)]
        plain: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    QuantumSeesaw {
        #[arg(long)]
        game: PathBuf,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        plain: bool,
        /// Also save the best strategy as strategy JSON.
        #[arg(long)]
        save_strategy: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Debug, Args)]
pub struct StrategyInput {
    #[arg(long)]
    pub game: PathBuf,
    #[arg(long)]
    pub strategy: PathBuf,
    /// Depolarizing noise applied to the strategy's state.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
}

#[derive(Debug, Subcommand)]
pub enum SimulateCmd {
    Threshold {
        #[command(flatten)]
        input: StrategyInput,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        threshold: f64,
        #[arg(long, required_unless_present = "exact", conflicts_with = "exact")]
        trials: Option<usize>,
        /// Exact binomial tail only.
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// CSV with one row per n.
    Sweep {
        #[command(flatten)]
        input: StrategyInput,
        #[arg(long)]
        n_min: usize,
        #[arg(long)]
        n_max: usize,
        #[arg(long, default_value_t = 1)]
        n_step: usize,
        #[arg(long)]
        threshold: f64,
        #[arg(long)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long)]
    pub delta: f64,
    #[arg(long)]
    pub nu: f64,
    #[arg(long)]
    pub answer_pairs: usize,
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub kappa: f64,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Subcommand)]
pub enum LedgerCmd {
    Prop32 {
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        kappa: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    Errors {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        answer_pairs: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        s_size: usize,
        #[arg(long)]
        p_ws: f64,
        #[arg(long)]
        entanglement: f64,
        /// Overrides beta = alpha^2 / (1000 C).
        #[arg(long)]
        beta: Option<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Debug, Args)]
pub struct AuditInput {
    #[arg(long)]
    pub game: PathBuf,
    /// Single-round strategy (lifted i.i.d.) or an n-round strategy over vector alphabets.
    #[arg(long)]
    pub strategy: PathBuf,
    #[arg(long)]
    pub n: usize,
    /// Conditioning rounds, 0-based.
    #[arg(long, value_delimiter = ',', required = true)]
    pub s: Vec<usize>,
    #[arg(long)]
    pub tau: f64,
    #[arg(long)]
    pub beta: f64,
    /// Entanglement entropy in bits; required when the state is mixed.
    #[arg(long)]
    pub entanglement: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum AuditCmd {
    Lemmas {
        #[command(flatten)]
        input: AuditInput,
        /// Fixed T for the lemmas stated per T.
        #[arg(long, value_delimiter = ',')]
        t: Vec<usize>,
        #[command(flatten)]
        out: OutArgs,
    },
    Protocol {
        #[command(flatten)]
        input: AuditInput,
        /// Also run the protocol this many times with sampled inputs.
        #[arg(long)]
        trials: Option<usize>,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Debug, Subcommand)]
pub enum SampleCmd {
    Correlated {
        /// JSON array of probabilities.
        #[arg(long)]
        p: PathBuf,
        #[arg(long)]
        q: PathBuf,
        #[arg(long)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
}
