use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "flexqr",
    version,
    about = "Quantile regression with flexible check functions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a single quantile and print the coefficients.
    Fit(FitArgs),
    /// Fit a tau grid for several methods and write count curves and event tables.
    Grid(GridArgs),
    /// Run the synthetic event-count benchmark.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Rq,
    Srq,
    Smrq,
    Rrq,
    Flex,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DataArgs {
    /// CSV file with a header row.
    #[arg(long)]
    pub data: PathBuf,
    /// Response column.
    #[arg(long)]
    pub response: String,
    /// Predictor columns (default: every other column).
    #[arg(long, value_delimiter = ',')]
    pub predictors: Option<Vec<String>>,
}

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct FlexArgs {
    /// Flex parameter c (> 0).
    #[arg(long, allow_negative_numbers = true)]
    pub c: Option<f64>,
    /// Flex parameter h.
    #[arg(long, allow_negative_numbers = true)]
    pub h: Option<f64>,
    /// Flex parameter s (in [0, 1]).
    #[arg(long, allow_negative_numbers = true)]
    pub s: Option<f64>,
    /// Flex parameter v.
    #[arg(long, allow_negative_numbers = true)]
    pub v: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub tau: f64,
    #[arg(long, value_enum)]
    pub method: MethodArg,
    #[command(flatten)]
    pub flex: FlexArgs,
    /// Start smooth fits from the linear-programming solution instead of zero.
    #[arg(long)]
    pub warm_start: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GridArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// `start,end,step` or a count m (tau_i = i/(m+1)).
    #[arg(long)]
    pub grid: String,
    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_value = "rq,rrq,srq,smrq"
    )]
    pub methods: Vec<MethodArg>,
    #[command(flatten)]
    pub flex: FlexArgs,
    /// Also report suppressed curves as `<method>-s` columns.
    #[arg(long)]
    pub suppress: bool,
    /// Start each smooth fit from the previous tau's solution.
    #[arg(long)]
    pub warm_start: bool,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write curves.svg.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KindArg {
    Pareto,
    Normal,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub kind: KindArg,
    #[arg(long, value_delimiter = ',', default_value = "20,40,60,100,400")]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    pub replicates: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "rq,rrq,srq")]
    pub methods: Vec<MethodArg>,
    #[command(flatten)]
    pub flex: FlexArgs,
    /// Grid count per fit.
    #[arg(long, default_value_t = 99)]
    pub grid: usize,
    #[arg(long)]
    pub out: PathBuf,
}
