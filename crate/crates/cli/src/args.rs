use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "werner", version, about = "Bell-expression bounds and Werner-state detectability")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Markdown, global = true)]
    pub format: Format,

    /// Worker threads for the parallel kernels.
    #[arg(long, env = "WERNER_THREADS", global = true)]
    pub threads: Option<usize>,

    /// Record the wall-clock time in the report.
    #[arg(long, global = true)]
    pub timestamp: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Markdown,
    Csv,
    /// Pretty-printed JSON.
    Structured,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classical, closed-form and quantum bounds of an expression.
    Bounds(BoundsArgs),
    /// Reproduce a reference table.
    Tables(TablesArgs),
    /// Werner-state detectability.
    #[command(subcommand)]
    Werner(WernerCommand),
    /// Monte-Carlo estimate of the pure-state fraction with a large
    /// complementary coherence.
    Measure(MeasureArgs),
    /// Sampled lower bounds on the block ratios γ_i.
    Gamma(GammaArgs),
    /// Run CHSH, Mermin(3), CH and SASA end to end.
    Examples(ExamplesArgs),
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Expression file, or `builtin:NAME` (chsh, mermin, ch, sasa).
    pub expr: String,

    /// Require the closed-form bound (fails for expressions with
    /// sub-correlations).
    #[arg(long)]
    pub closed_form: bool,

    /// Also run the see-saw lower bound on the quantum value.
    #[arg(long)]
    pub seesaw: bool,

    #[arg(long, default_value_t = 20)]
    pub restarts: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Largest party count for exhaustive enumeration.
    #[arg(long, default_value_t = werner_core::classical::DEFAULT_PARTY_CAP)]
    pub cap: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Table {
    #[value(name = "I", alias = "i", alias = "1")]
    I,
    #[value(name = "II", alias = "ii", alias = "2")]
    II,
    #[value(name = "III", alias = "iii", alias = "3")]
    III,
}

#[derive(Debug, Args)]
pub struct TablesArgs {
    #[arg(value_enum)]
    pub which: Table,

    /// Samples per party count (table II); defaults depend on m.
    #[arg(long)]
    pub samples: Option<u64>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Largest m for table II.
    #[arg(long, default_value_t = werner_core::tables::TABLE2_DEFAULT_MAX)]
    pub max_m: usize,

    /// Allow table II rows beyond the default maximum.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Subcommand)]
pub enum WernerCommand {
    /// Generalized GHZ family cos θ|0…0⟩ + sin θ|1…1⟩.
    Ghz(GhzArgs),
    /// Pure state read from a file.
    Pure(PureArgs),
}

#[derive(Debug, Args)]
pub struct Detector {
    /// Classical bound of the detecting expression.
    #[arg(long, default_value_t = 1.0)]
    pub c1: f64,

    /// Quantum bound of the detecting expression; defaults to √3 · c1.
    #[arg(long)]
    pub c2: Option<f64>,

    /// Also find the empirical violation threshold of this expression
    /// (file or `builtin:NAME`).
    #[arg(long)]
    pub detect: Option<String>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct GhzArgs {
    #[arg(long)]
    pub m: usize,

    /// Angle in radians, inside (0, π/2).
    #[arg(long, allow_negative_numbers = true)]
    pub theta: f64,

    /// Block ratios γ_1 … γ_{m-1}; selects the general angle range.
    #[arg(long, value_delimiter = ',')]
    pub gammas: Option<Vec<f64>>,

    #[command(flatten)]
    pub detector: Detector,
}

#[derive(Debug, Args)]
pub struct PureArgs {
    #[arg(long)]
    pub state: PathBuf,

    #[command(flatten)]
    pub detector: Detector,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    #[arg(long)]
    pub m: usize,

    /// Value of the polynomial in the threshold; defaults to m.
    #[arg(long)]
    pub poly: Option<f64>,

    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct GammaArgs {
    #[arg(long)]
    pub m: usize,

    /// Defaults to 10⁴ for m ≤ 4 and 10³ above.
    #[arg(long)]
    pub samples: Option<u64>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, default_value_t = werner_core::classical::DEFAULT_PARTY_CAP)]
    pub cap: usize,
}

#[derive(Debug, Args)]
pub struct ExamplesArgs {
    #[arg(long, default_value_t = 20)]
    pub restarts: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}
