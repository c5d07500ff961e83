use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "nullfront",
    version,
    about = "Framed curves in AdS^3 and the singularities of their nullcone fronts"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the built-in curves, or print one as a curve-spec document.
    Catalog(CatalogArgs),
    /// Check the framed-curve identities on a grid.
    Verify(VerifyArgs),
    /// Tabulate the curvature (alpha, ell, m, n) and its first derivatives.
    Frame(FrameArgs),
    /// Tabulate tangent, normals, curvature and torsion of a unit-speed curve.
    Frenet(FrenetArgs),
    /// Sample a front sheet as a mesh.
    Front(FrontArgs),
    /// Locate and classify the distinguished singular points of a front sheet.
    Singular(SingularArgs),
    /// Integrate the frame equations for a prescribed curvature.
    Integrate(IntegrateArgs),
    /// Align two framed curves by an isometry and measure the mismatch.
    Congruence(CongruenceArgs),
    /// Evaluate the distance-squared ladder at a point.
    Distance(DistanceArgs),
    /// Run the built-in verification suite.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct SourceArgs {
    /// Built-in curve name.
    #[arg(long, value_name = "NAME")]
    pub curve: Option<String>,
    /// Curve-spec JSON file.
    #[arg(long, value_name = "FILE.json")]
    pub spec: Option<PathBuf>,
    /// Sampled frame CSV.
    #[arg(long, value_name = "FILE.csv")]
    pub samples: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct OutArgs {
    /// Output path (stdout when absent).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Obj,
    Csv,
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SheetArg {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Args)]
pub struct TolArgs {
    /// Zero band for alpha and sigma.
    #[arg(long, value_name = "X")]
    pub tol: Option<f64>,
    /// Zero band for m +/- n.
    #[arg(long = "tol-denom", value_name = "X")]
    pub tol_denom: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CatalogArgs {
    #[arg(long, value_name = "NAME")]
    pub curve: Option<String>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, value_name = "N", default_value_t = 200)]
    pub grid: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct FrameArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Parameter range; accepts expressions such as `2*pi`.
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_hyphen_values = true)]
    pub range: Option<Vec<String>>,
    #[arg(long, value_name = "N", default_value_t = 101)]
    pub grid: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct FrenetArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_hyphen_values = true)]
    pub range: Option<Vec<String>>,
    #[arg(long, value_name = "N", default_value_t = 101)]
    pub grid: usize,
    #[arg(long, value_name = "X")]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct FrontArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, value_enum, default_value_t = SheetArg::Plus)]
    pub sheet: SheetArg,
    #[arg(long = "s-range", num_args = 2, value_names = ["A", "B"], allow_hyphen_values = true)]
    pub s_range: Option<Vec<String>>,
    #[arg(long = "l-range", num_args = 2, value_names = ["A", "B"], allow_hyphen_values = true)]
    pub l_range: Option<Vec<String>>,
    #[arg(long, num_args = 2, value_names = ["NS", "NL"])]
    pub grid: Option<Vec<usize>>,
    #[command(flatten)]
    pub tol: TolArgs,
    /// `drop1`..`drop4` removes that coordinate; `matrix FILE` applies a 3x4 JSON matrix.
    #[arg(long, num_args = 1..=2, value_names = ["MODE", "FILE"])]
    pub projection: Option<Vec<String>>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct SingularArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, value_enum, default_value_t = SheetArg::Plus)]
    pub sheet: SheetArg,
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_hyphen_values = true)]
    pub range: Option<Vec<String>>,
    /// Scan grid size.
    #[arg(long, value_name = "N", default_value_t = 512)]
    pub grid: usize,
    #[command(flatten)]
    pub tol: TolArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct IntegrateArgs {
    /// Curvature JSON: {alpha, ell, m, n, epsilon[, init][, interval]}.
    #[arg(long, value_name = "FILE.json")]
    pub quad: PathBuf,
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_hyphen_values = true)]
    pub range: Option<Vec<String>>,
    #[arg(long, value_name = "H", default_value_t = 1e-3)]
    pub step: f64,
    /// Skip the projection back onto the frame manifold after each step.
    #[arg(long = "no-reorth")]
    pub no_reorth: bool,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct CongruenceArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Second curve: a catalog name, a `.csv` sample file or a curve-spec JSON file.
    #[arg(long = "with", value_name = "SOURCE")]
    pub with: String,
    /// Parameter at which the frames are matched (default: start of the common interval).
    #[arg(long, value_name = "S", allow_hyphen_values = true)]
    pub s0: Option<String>,
    #[arg(long, value_name = "N", default_value_t = 101)]
    pub grid: usize,
    #[arg(long, value_name = "X", default_value_t = 1e-6)]
    pub tol: f64,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct DistanceArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, value_name = "S", allow_hyphen_values = true)]
    pub s0: String,
    /// Target point in AdS^3.
    #[arg(long, num_args = 4, value_names = ["U1", "U2", "U3", "U4"], allow_hyphen_values = true,
          conflicts_with_all = ["lambda", "locus"])]
    pub v0: Option<Vec<String>>,
    /// Target the front point at this lambda.
    #[arg(
        long,
        value_name = "L",
        allow_hyphen_values = true,
        conflicts_with = "locus"
    )]
    pub lambda: Option<String>,
    /// Target the point of the singular curve over s0.
    #[arg(long)]
    pub locus: bool,
    #[arg(long, value_enum, default_value_t = SheetArg::Plus)]
    pub sheet: SheetArg,
    /// Vanishing band for the derivatives of d.
    #[arg(long, value_name = "X")]
    pub tol: Option<f64>,
    /// Measure the band relative to the largest derivative.
    #[arg(long)]
    pub relative: bool,
    #[arg(long = "tol-denom", value_name = "X")]
    pub tol_denom: Option<f64>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {}
