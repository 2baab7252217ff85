use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "rvz", version, about = "Rendezvous numbers, Chebyshev constants and average intervals of finite spaces")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Print a human-readable rendering to stdout (the JSON report still
    /// goes to --out when given).
    #[arg(long, global = true)]
    pub pretty: bool,
    /// Write the command's table as CSV to this path.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// Leave the timings field out of the report.
    #[arg(long, global = true)]
    pub no_timings: bool,
    /// Worker threads (default: hardware count). Never changes results.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Neither read nor write the result cache.
    #[arg(long, global = true)]
    pub no_cache: bool,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Average interval of a space file; a single rendezvous number when H = L.
    Value(ValueArgs),
    /// Chebyshev constants M_n and M̄_n by multiset enumeration.
    Cheb(ChebArgs),
    /// Chebyshev centre of the hull of a vertex list.
    Center(CenterArgs),
    /// Covering number by open t-balls and the lower bounds it implies.
    Cover(CoverArgs),
    /// Envelopes and sampled potentials on l_p spheres.
    Lp(LpArgs),
    /// Certified rendezvous numbers of sphere samples in growing dimension.
    Converge(ConvergeArgs),
    /// Reference table of named constants.
    Constants(ConstantsArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SubsetArgs {
    /// Subset used for centres / measures (default: subset "H" if present, else all points).
    #[arg(long = "H", alias = "h")]
    pub h: Option<String>,
    /// Subset evaluated against (default: subset "L" if present, else all points).
    #[arg(long = "L", alias = "l")]
    pub l: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct ValueArgs {
    pub space: PathBuf,
    #[command(flatten)]
    pub subsets: SubsetArgs,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct ChebArgs {
    pub space: PathBuf,
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    pub subsets: SubsetArgs,
    /// Largest number of multisets to visit.
    #[arg(long, default_value_t = rvz_core::DEFAULT_ENUM_BUDGET)]
    pub budget: u128,
}

#[derive(Debug, Clone, Args)]
pub struct CenterArgs {
    /// JSON file holding either an array of points or {"vertices": [...]}.
    pub vertices: PathBuf,
    #[arg(long, default_value = "l2")]
    pub norm: String,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Also compare with the rendezvous number of a grid filling the hull.
    #[arg(long)]
    pub check_szekeres: bool,
    /// Grid spacing for --check-szekeres.
    #[arg(long, default_value_t = 0.05)]
    pub grid: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Greedy,
}

#[derive(Debug, Clone, Args)]
pub struct CoverArgs {
    pub space: PathBuf,
    #[arg(long)]
    pub t: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    pub mode: ModeArg,
    #[command(flatten)]
    pub subsets: SubsetArgs,
    /// Branch-and-bound node budget in exact mode.
    #[arg(long, default_value_t = rvz_core::geometry::DEFAULT_COVER_BUDGET)]
    pub budget: u64,
}

#[derive(Debug, Clone, Args)]
pub struct LpArgs {
    #[arg(long)]
    pub p: f64,
    /// Comma-separated configuration sizes.
    #[arg(long, value_delimiter = ',', default_value = "2,4,8,16")]
    pub n_list: Vec<usize>,
    /// Ambient dimension: `n` (one per configuration size) or a fixed number.
    #[arg(long, default_value = "n")]
    pub dims: String,
    /// Random sphere points per row.
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
    #[arg(long, default_value_t = rvz_core::spaces::DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct ConvergeArgs {
    #[arg(long, default_value = "l2")]
    pub norm: String,
    /// Comma-separated, strictly increasing dimensions.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    pub dims: Vec<usize>,
    /// Sample size per dimension.
    #[arg(long, default_value_t = 400)]
    pub budget: usize,
}

#[derive(Debug, Clone, Args)]
pub struct ConstantsArgs {
    /// Exponents at which to evaluate the l_p entry.
    #[arg(long, value_delimiter = ',')]
    pub p: Vec<f64>,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Value(_) => "value",
            Command::Cheb(_) => "cheb",
            Command::Center(_) => "center",
            Command::Cover(_) => "cover",
            Command::Lp(_) => "lp",
            Command::Converge(_) => "converge",
            Command::Constants(_) => "constants",
        }
    }
}
