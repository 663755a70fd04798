use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "concentro", version, about = "Partition norms, polynomial moment bounds and concentration experiments")]
pub struct Cli {
    /// Worker threads; results do not depend on it
    #[arg(long, global = true, env = "CONCENTRO_WORKERS")]
    pub workers: Option<usize>,

    /// JSON object of flag values; flags given on the command line win
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum Command {
    /// Partition norm ‖A‖_J of a tensor
    Norm(NormCmd),
    /// Mixed norm ‖A‖_{J|K} of a tensor
    Mixednorm(MixedCmd),
    /// Moment bound for a polynomial
    Bounds(BoundsCmd),
    /// Tail bound 2 exp(-η_f(t)/C) for a polynomial
    Tail(TailCmd),
    /// Monte Carlo experiments
    #[command(subcommand)]
    Mc(McCmd),
    /// Subgraph counts in G(n, p)
    #[command(subcommand)]
    Graphs(GraphsCmd),
    /// Linear eigenvalue statistics of Wigner matrices
    Rmt(RmtCmd),
    /// Hermite polynomials and Hermite expansions
    Hermite(HermiteCmd),
}

#[derive(Debug, Args, Serialize)]
pub struct NormArgs {
    /// Alternating-maximization restarts
    #[arg(long, default_value_t = 64)]
    pub restarts: usize,
    /// Relative convergence tolerance
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Sweep cap per restart
    #[arg(long, default_value_t = 500)]
    pub max_sweeps: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct LawArgs {
    /// gaussian, rademacher, bernoulli or weibull
    #[arg(long, default_value = "gaussian")]
    pub law: String,
    /// Success probability of the bernoulli law
    #[arg(long)]
    pub pp: Option<f64>,
    /// Shape of the weibull law
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Distribution JSON file, replacing --law
    #[arg(long, value_name = "FILE")]
    pub dist: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ConstantArgs {
    /// Sobolev constant L, or "auto" for the law's own value
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub l: Option<String>,
    /// Sobolev exponent gamma
    #[arg(long)]
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KindArg {
    Gaussian,
    Sobolev,
    Weibull,
}

#[derive(Debug, Args, Serialize)]
pub struct NormCmd {
    #[arg(long, value_name = "FILE")]
    pub tensor: PathBuf,
    /// Partition such as "1,2|3"
    #[arg(long)]
    pub partition: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub norm: NormArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the maximizing vectors as JSON
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub cert: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct MixedCmd {
    #[arg(long, value_name = "FILE")]
    pub tensor: PathBuf,
    /// Split partition such as "1||2,3"
    #[arg(long)]
    pub split: String,
    #[arg(long)]
    pub alpha: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub norm: NormArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct BoundsCmd {
    #[arg(long, value_name = "FILE")]
    pub poly: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub law: LawArgs,
    /// Moment order
    #[arg(long)]
    pub p: f64,
    /// Bound family; chosen from the law when omitted
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
    #[command(flatten)]
    #[serde(flatten)]
    pub constants: ConstantArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub norm: NormArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct TailCmd {
    #[arg(long, value_name = "FILE")]
    pub poly: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub law: LawArgs,
    #[arg(long)]
    pub t: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub constants: ConstantArgs,
    /// Universal constant in the exponent
    #[arg(long = "C", default_value_t = 1.0)]
    #[serde(rename = "C")]
    pub c: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub norm: NormArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SampleArgs {
    /// Number of samples
    #[arg(long = "N", default_value_t = 100_000)]
    #[serde(rename = "N")]
    pub n_samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Samples per RNG chunk
    #[arg(long, default_value_t = 4096)]
    pub batch: usize,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum McCmd {
    /// Empirical centered moments ‖f - Ef‖_p
    Moments(McMomentsCmd),
    /// Empirical tail probabilities P(|f - Ef| ≥ t)
    Tail(McTailCmd),
    /// Decoupled versus undecoupled Gaussian chaos moments
    Chaos(McChaosCmd),
    /// Empirical moments divided by the moment bound
    Sandwich(McSandwichCmd),
    /// Tetrahedral approximation of Hermite polynomials
    Hermite(McHermiteCmd),
    /// Moment growth against L p^γ ‖|∇f|‖_p
    Sobolev(McSobolevCmd),
}

#[derive(Debug, Args, Serialize)]
pub struct McMomentsCmd {
    #[arg(long, value_name = "FILE")]
    pub poly: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub law: LawArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub sample: SampleArgs,
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub p: Vec<f64>,
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct McTailCmd {
    #[arg(long, value_name = "FILE")]
    pub poly: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub law: LawArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub sample: SampleArgs,
    #[arg(long, value_delimiter = ',', required = true)]
    pub t: Vec<f64>,
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChaosArg {
    Decoupled,
    Undecoupled,
    Both,
}

#[derive(Debug, Args, Serialize)]
pub struct McChaosCmd {
    #[arg(long, value_name = "FILE")]
    pub tensor: PathBuf,
    #[arg(long, value_enum, default_value = "both")]
    pub mode: ChaosArg,
    #[command(flatten)]
    #[serde(flatten)]
    pub sample: SampleArgs,
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub p: Vec<f64>,
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct McSandwichCmd {
    #[arg(long, value_name = "FILE")]
    pub poly: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub law: LawArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub sample: SampleArgs,
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub p: Vec<f64>,
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
    #[command(flatten)]
    #[serde(flatten)]
    pub constants: ConstantArgs,
    /// Lower end of the accepted ratio window
    #[arg(long, default_value_t = 0.1)]
    pub lo: f64,
    /// Upper end of the accepted ratio window
    #[arg(long, default_value_t = 10.0)]
    pub hi: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub norm: NormArgs,
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct McHermiteCmd {
    /// Hermite degree, 1 to 4
    #[arg(long)]
    pub d: usize,
    /// Numbers of summands N
    #[arg(long, value_delimiter = ',', default_value = "10,100,1000")]
    pub sizes: Vec<usize>,
    /// Replicates per size
    #[arg(long = "N", default_value_t = 10_000)]
    #[serde(rename = "N")]
    pub n_samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 4096)]
    pub batch: usize,
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct McSobolevCmd {
    #[arg(long, value_name = "FILE")]
    pub poly: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub law: LawArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub sample: SampleArgs,
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub p: Vec<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub constants: ConstantArgs,
    /// Ratios above this constant fail
    #[arg(long = "C", default_value_t = 1.0)]
    #[serde(rename = "C")]
    pub c: f64,
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum GraphsCmd {
    /// Simulated cycle-count tails against the bounds
    Triangles(TrianglesCmd),
    /// Edge-sequence bound on ‖E D^d X_H‖_J
    Cyclebound(CycleBoundCmd),
}

#[derive(Debug, Args, Serialize)]
pub struct TrianglesCmd {
    #[arg(long)]
    pub n: usize,
    /// Edge probability
    #[arg(long)]
    pub p: f64,
    /// Cycle length, 3 to 5
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// Relative deviations; thresholds are t = eps · E Y
    #[arg(long, value_delimiter = ',', default_value = "0.5")]
    pub eps: Vec<f64>,
    #[arg(long = "C", default_value_t = 1.0)]
    #[serde(rename = "C")]
    pub c: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub sample: SampleArgs,
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct CycleBoundCmd {
    /// Cycle length (ignored with --graph)
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// Pattern graph JSON file
    #[arg(long, value_name = "FILE")]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub partition: String,
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConventionArg {
    Unit,
    Goe,
}

#[derive(Debug, Args, Serialize)]
pub struct RmtCmd {
    /// One-variable polynomial JSON file
    #[arg(long, value_name = "FILE")]
    pub f: PathBuf,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1000)]
    pub replicas: usize,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub t: Vec<f64>,
    #[arg(long = "CL", default_value_t = 1.0)]
    #[serde(rename = "CL")]
    pub cl: f64,
    /// Half-width of the interval for sup |f''|
    #[arg(long = "K", default_value_t = 4.0)]
    #[serde(rename = "K")]
    pub k: f64,
    #[arg(long, value_enum, default_value = "unit")]
    pub convention: ConventionArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 64)]
    pub batch: usize,
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct HermiteCmd {
    /// Print the coefficients of h_k
    #[arg(long, conflicts_with = "poly", required_unless_present = "poly")]
    pub k: Option<usize>,
    /// Expand a polynomial in the Hermite basis
    #[arg(long, value_name = "FILE")]
    pub poly: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}
