use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "qdunkl",
    version,
    about = "Dunkl q-parametric Szász-Mirakjan operators: evaluation, convergence studies and bound checks"
)]
pub struct Cli {
    #[command(flatten)]
    pub trunc: TruncationArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct TruncationArgs {
    /// Relative tolerance for series tails.
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub rel_tol: f64,

    /// Absolute tolerance for series tails.
    #[arg(long, global = true, default_value_t = 1e-300)]
    pub abs_tol: f64,

    /// Give up on a series after this many terms.
    #[arg(long, global = true, default_value_t = 10_000)]
    pub max_terms: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one operator on one test function over a grid of x.
    Eval(EvalArgs),
    /// Raw and central moments of D* with the closed-form second-moment bounds.
    Moments(MomentsArgs),
    /// Korovkin study: errors on e0, e1, e2 along a q_n schedule.
    Converge(ConvergeArgs),
    /// Check a rate-of-convergence bound over a parameter sweep.
    Bounds(BoundsArgs),
    /// Evaluate the bivariate operator over an (x, y) grid.
    Bivariate(BivariateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Operator {
    Dstar,
    Icoz,
    Sucu,
    Szasz,
    Bivariate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Svg,
    Both,
}

impl Format {
    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    pub fn svg(self) -> bool {
        matches!(self, Format::Svg | Format::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotScale {
    Linear,
    Loglog,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Schedule {
    OneMinusInverse,
    Ratio,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Theorem {
    Moc,
    Lipschitz,
    Cb2,
    Peetre,
    Moc2,
    Lipschitz2,
}

impl Theorem {
    pub fn is_bivariate(self) -> bool {
        matches!(self, Theorem::Moc2 | Theorem::Lipschitz2)
    }
}

#[derive(Debug, Args)]
pub struct Output {
    /// Output path; `.csv` / `.svg` is appended as needed.
    #[arg(long, short)]
    pub out: PathBuf,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    #[arg(long, value_enum)]
    pub plot: Option<PlotScale>,
}

#[derive(Debug, Args)]
pub struct Grid {
    /// Right end of the x grid (the grid starts at 0).
    #[arg(long, default_value_t = 2.0)]
    pub x_max: f64,

    /// Number of grid points, at least 2.
    #[arg(long, default_value_t = 5)]
    pub points: usize,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, value_enum, default_value_t = Operator::Dstar)]
    pub operator: Operator,

    /// Registry name of the test function.
    #[arg(long, short = 'f', default_value = "e1")]
    pub function: String,

    #[arg(long, short)]
    pub n: u32,

    /// Deformation parameter in (0, 1); unused by `szasz` and `sucu`.
    #[arg(long, short, default_value_t = 0.9)]
    pub q: f64,

    /// Dunkl parameter; unused by `szasz`.
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,

    #[command(flatten)]
    pub grid: Grid,

    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[arg(long, short)]
    pub n: u32,

    #[arg(long, short, default_value_t = 0.9)]
    pub q: f64,

    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,

    #[command(flatten)]
    pub grid: Grid,

    #[command(flatten)]
    pub output: Output,

    /// Exit with status 3 if a row leaves the closed-form bounds.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    #[arg(long, value_enum, default_value_t = Schedule::Ratio)]
    pub schedule: Schedule,

    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,

    /// Strictly ascending list of n.
    #[arg(long, value_delimiter = ',', default_values_t = [4, 8, 16, 32, 64, 128, 256])]
    pub n_list: Vec<u32>,

    /// Window for the plain sup error.
    #[arg(long, default_value_t = 2.0)]
    pub x_max: f64,

    #[arg(long, default_value_t = 65)]
    pub points: usize,

    /// Window for the ρ-weighted error.
    #[arg(long, default_value_t = 32.0)]
    pub weighted_x_max: f64,

    #[arg(long, default_value_t = 129)]
    pub weighted_points: usize,

    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long, short, value_enum)]
    pub theorem: Theorem,

    /// Registry names; defaults depend on the theorem.
    #[arg(long, value_delimiter = ',')]
    pub functions: Vec<String>,

    /// Defaults to 4,8,...,256 (4,16,64 for the bivariate theorems).
    #[arg(long, value_delimiter = ',')]
    pub n_list: Vec<u32>,

    #[arg(long, value_enum, default_value_t = Schedule::Both)]
    pub schedule: Schedule,

    #[arg(long, value_delimiter = ',', default_values_t = [0.6, 1.0, 2.5])]
    pub mu_list: Vec<f64>,

    /// Evaluation points; used for both coordinates in the bivariate theorems.
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 1.0, 2.0, 3.0, 4.0])]
    pub x_list: Vec<f64>,

    /// Window end for grid moduli and norms.
    #[arg(long, default_value_t = 4.0)]
    pub window: f64,

    #[arg(long, default_value_t = 257)]
    pub window_points: usize,

    #[command(flatten)]
    pub output: Output,

    /// Exit with status 3 if any row fails its bound.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct BivariateArgs {
    /// Bivariate registry name.
    #[arg(long, short = 'f', default_value = "e00")]
    pub function: String,

    #[arg(long)]
    pub n: u32,

    #[arg(long, default_value_t = 0.9)]
    pub q: f64,

    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,

    #[arg(long)]
    pub n2: u32,

    #[arg(long, default_value_t = 0.9)]
    pub q2: f64,

    #[arg(long, default_value_t = 1.0)]
    pub mu2: f64,

    #[command(flatten)]
    pub grid: Grid,

    #[command(flatten)]
    pub output: Output,
}
