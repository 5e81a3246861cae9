use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "spca",
    version,
    about = "Sparse PCA with coordinate-wise optimality"
)]
pub struct Cli {
    /// Worker threads for enumeration and sweeps (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one solver and print a JSON record.
    Solve(SolveArgs),
    /// Check an optimality condition at a point; exit 1 if it fails.
    Verify(VerifyArgs),
    /// Enumerate and classify the SO points of every support of size s.
    Enumerate(EnumerateArgs),
    /// Solve over sparsity levels and seeds; CSV on stdout.
    Sweep(SweepArgs),
    /// Write a seeded Gaussian data matrix with N(0, 1/m) entries.
    Gen(GenArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    /// The file holds the matrix A itself.
    Cov,
    /// The file holds a data matrix D; A = DᵀD.
    Data,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Gcw,
    Pcw,
    Congradu,
    Threshold,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Condition {
    /// Support optimality.
    So,
    /// Co-stationarity.
    Co,
    /// Coordinate-wise maximality.
    Cw,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// CSV file with the matrix; a first row of labels is allowed.
    #[arg(long, conflicts_with = "random", required_unless_present = "random")]
    pub input: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "cov")]
    pub kind: Kind,

    /// Use a generated instance with this many variables instead of a file.
    #[arg(long, value_name = "N")]
    pub random: Option<usize>,

    /// Observations for --random.
    #[arg(long, default_value_t = 150)]
    pub m: usize,

    /// Seed for --random.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub input: InputArgs,

    #[arg(long, value_enum)]
    pub algo: Algo,

    /// Sparsity level.
    #[arg(long)]
    pub s: usize,

    /// Initial support, 1-based, e.g. 1,2,9.
    #[arg(long, value_delimiter = ',')]
    pub init_support: Option<Vec<usize>>,

    /// Strict-improvement threshold.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,

    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub input: InputArgs,

    #[arg(long, value_enum)]
    pub condition: Condition,

    #[arg(long)]
    pub s: usize,

    /// The SO point on this 1-based support.
    #[arg(
        long,
        value_delimiter = ',',
        conflicts_with = "point",
        required_unless_present = "point"
    )]
    pub support: Option<Vec<usize>>,

    /// CSV file with the point as one row or one column.
    #[arg(long)]
    pub point: Option<PathBuf>,

    /// Absolute tolerance on value comparisons.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[command(flatten)]
    pub input: InputArgs,

    #[arg(long)]
    pub s: usize,

    /// Also enumerate supports smaller than s.
    #[arg(long)]
    pub up_to: bool,

    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,

    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// CSV file with the matrix (instead of --random).
    #[arg(long, conflicts_with = "random", required_unless_present = "random")]
    pub input: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "cov")]
    pub kind: Kind,

    /// Variables per generated instance.
    #[arg(long, value_name = "N")]
    pub random: Option<usize>,

    #[arg(long, default_value_t = 150)]
    pub m: usize,

    /// Number of generated instances; seeds are first-seed, first-seed + 1, ...
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,

    #[arg(long, default_value_t = 0)]
    pub first_seed: u64,

    /// Comma-separated solvers.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "pcw")]
    pub algos: Vec<Algo>,

    /// Sparsity levels as LO:HI:STEP (inclusive).
    #[arg(long)]
    pub s_range: String,

    /// Warm-start each PCW level from the previous level's support.
    #[arg(long)]
    pub warm: bool,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,

    #[arg(long, default_value_t = 150)]
    pub m: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long)]
    pub out: PathBuf,
}
