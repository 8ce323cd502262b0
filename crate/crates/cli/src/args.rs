use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "qcantor", version, about = "Exact Q-Cantor series experiments")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Output format; each command has a natural default.
    #[arg(long, global = true, value_enum)]
    pub output: Option<Format>,

    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    pub output_path: Option<PathBuf>,

    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Bits of precision certified comparisons may escalate to.
    #[arg(long, global = true, env = "QCANTOR_PRECISION_CAP", default_value_t = 1 << 16)]
    pub precision_cap: u32,

    /// Largest lookahead when resolving transformed digits.
    #[arg(long, global = true, default_value_t = 1 << 16)]
    pub lookahead_cap: u64,

    /// Largest number of blocks or positions a command may enumerate.
    #[arg(long, global = true, default_value_t = 1 << 24)]
    pub enumeration_budget: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-index parameters of the construction.
    Params {
        #[arg(long, default_value_t = 2)]
        min_i: u64,
        #[arg(long)]
        max_i: u64,
    },
    /// Bases of the constructed sequence.
    QDigits {
        #[arg(long)]
        positions: String,
    },
    /// Digits of eta.
    EtaDigits {
        #[arg(long)]
        positions: String,
    },
    /// Expansion of a rational.
    Expand {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long = "N")]
        n: usize,
        /// Comma-separated period of a periodic basic sequence; the
        /// constructed sequence when absent.
        #[arg(long)]
        q: Option<String>,
    },
    /// Digits of r x + s for a digit source x.
    Transform {
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        r: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        s: String,
        #[arg(long, default_value = "eta")]
        source: String,
        #[arg(long)]
        positions: String,
    },
    /// Block counts and normality ratios at checkpoints.
    Stats {
        #[arg(long, default_value = "eta")]
        source: String,
        #[arg(long)]
        block: String,
        #[arg(long)]
        checkpoints: String,
    },
    /// Star discrepancy of the digit ratios E_n / q_n over a range.
    Discrepancy {
        #[arg(long, default_value = "eta")]
        source: String,
        #[arg(long)]
        positions: String,
    },
    /// Block count and block weight over one copy of X_i.
    Segment {
        #[arg(long, default_value = "eta")]
        source: String,
        #[arg(long)]
        i: u64,
        #[arg(long, default_value = "1")]
        j: String,
        #[arg(long)]
        block: String,
    },
    /// Certified check of a tail bound.
    VerifyBounds {
        #[arg(long, value_enum)]
        lemma: Lemma,
        #[arg(long)]
        b: u64,
        #[arg(long)]
        n: u64,
        /// One value or a comma-separated grid.
        #[arg(long)]
        eps: String,
        #[arg(long, default_value_t = 1)]
        k: u64,
        /// Fill the seconds column with wall-clock time.
        #[arg(long)]
        timings: bool,
    },
    /// Seeded sample from the Moran set.
    ThetaSample {
        #[arg(long)]
        positions: String,
    },
    /// Membership of a digit window (Expansion JSON) in the Moran set.
    ThetaCheck {
        /// JSON file; standard input when absent.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Certified ln |I_i| / ln (i!)^2.
    DimRatio {
        /// Comma-separated indices.
        #[arg(long)]
        i: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Lemma {
    Bugeaud,
    K1,
    Epsilonk,
}
