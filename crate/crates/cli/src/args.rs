use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "origami", version, about = "Experiments on square-tiled surfaces")]
pub struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Memory budget for visited-cell flags, e.g. `256M`, `1G` or a byte count.
    #[arg(long, global = true, default_value = "256M", value_parser = parse_bytes)]
    pub mem_budget: u64,
    /// Directory for relative output paths.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Squares, cones, genus and automorphisms of an origami.
    Info(InfoArgs),
    /// Image of an origami under a matrix of SL(2,Z).
    Act(ActArgs),
    /// SL(2,Z)-orbit up to isomorphism.
    Orbit(OrbitArgs),
    /// Continued fraction expansions and the convergent identity suite.
    Cf(CfArgs),
    /// Edge crossings of a linear flow.
    Flow(FlowArgs),
    /// Cutting sequence of a straight segment.
    Cutseq(CutseqArgs),
    /// Computational checks of the intersection property.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Cylinder decompositions and the transversal bound audit.
    Cylinders(CylindersArgs),
    /// r-dense times of linear flows.
    Hitting(HittingArgs),
    /// Hitting exponent fit from hitting records.
    Exponent(ExponentArgs),
    /// Runs the tasks of a TOML config.
    Run(RunArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OrigamiArg {
    /// Builtin name (`ornithorynque`, `genus2_L`, `torus`) or origami file.
    #[arg(long, default_value = "ornithorynque")]
    pub origami: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct InfoArgs {
    #[command(flatten)]
    pub src: OrigamiArg,
    /// JSON report path.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ActArgs {
    #[command(flatten)]
    pub src: OrigamiArg,
    /// Matrix entries `a,b,c,d`.
    #[arg(long, allow_hyphen_values = true)]
    pub matrix: Option<String>,
    /// Apply the reflection `(x, y) ↦ (−x, y)` instead of a matrix.
    #[arg(long, conflicts_with = "matrix")]
    pub reflect: bool,
    /// Origami file for the image.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OrbitArgs {
    #[command(flatten)]
    pub src: OrigamiArg,
    /// Stop after this many classes.
    #[arg(long, default_value_t = 10_000)]
    pub cap: usize,
    /// Directory for one origami file per class, `adjacency.csv` and `orbit.json`.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CfArgs {
    /// Expand a rational `p/q` in `(0,1)`.
    #[arg(long, group = "cf_input")]
    pub rational: Option<String>,
    /// Expand the slope of diophantine type `w`.
    #[arg(long = "type", group = "cf_input")]
    pub w: Option<String>,
    /// Prefix for `--type`, e.g. `1,1`.
    #[arg(long, requires = "w")]
    pub prefix: Option<String>,
    /// Expand a slope spec (`golden`, `type:w=2`, `quotients:[..]`, `rational:p/q`).
    #[arg(long, group = "cf_input")]
    pub slope: Option<String>,
    /// Audit the convergent identities on this many random slopes plus the golden and `w = 2` slopes.
    #[arg(long, group = "cf_input")]
    pub suite: Option<usize>,
    #[arg(long, default_value_t = 20)]
    pub depth: usize,
    /// CSV of convergents, or the JSON suite report.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DirectionArgs {
    /// Slope `Δx/Δy`: a rational, `inf`, or a slope spec realized by its convergent at `--depth`.
    #[arg(long, allow_hyphen_values = true)]
    pub slope: Option<String>,
    /// Direction vector `dx,dy`.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "slope")]
    pub direction: Option<String>,
    /// Convergent depth for slope specs.
    #[arg(long, default_value_t = 12)]
    pub depth: usize,
    /// Flow downward along the slope.
    #[arg(long)]
    pub down: bool,
    /// Start point `j,x,y` with rational coordinates.
    #[arg(long, default_value = "0,1/3,1/7")]
    pub start: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FlowArgs {
    #[command(flatten)]
    pub src: OrigamiArg,
    #[command(flatten)]
    pub dir: DirectionArgs,
    /// Number of events to record.
    #[arg(long, group = "stop")]
    pub crossings: Option<usize>,
    /// Flat time to flow for.
    #[arg(long, group = "stop")]
    pub time: Option<String>,
    /// CSV of events.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CutseqArgs {
    #[command(flatten)]
    pub src: OrigamiArg,
    #[command(flatten)]
    pub dir: DirectionArgs,
    /// Minimum Euclidean length of the segment.
    #[arg(long, default_value = "17")]
    pub length: String,
    /// JSON report path.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyCommand {
    /// Sampled letter-transition relation against the asserted successor sets.
    Transitions(TransitionArgs),
    /// Every long segment in the cone crosses all three tiles.
    Tiles(TileArgs),
    /// Random pairs of long segments in the cone pairs always intersect.
    Intersections(IntersectionArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TransitionArgs {
    #[command(flatten)]
    pub src: OrigamiArg,
    /// Slope cone `a,b` (`inf` for an infinite end).
    #[arg(long, default_value = "0,1", allow_hyphen_values = true)]
    pub cone: String,
    /// Grid sides of the sampling rounds; the last round has `g²` samples per letter.
    #[arg(long, default_value = "25,50,100")]
    pub rounds: String,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TileArgs {
    #[command(flatten)]
    pub src: OrigamiArg,
    /// Slope cone `a,b`.
    #[arg(long, default_value = "0,1", allow_hyphen_values = true)]
    pub cone: String,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 6)]
    pub min_letters: usize,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairChoice {
    Main,
    Reflected,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expectation {
    /// Every pair intersects.
    Hold,
    /// Some pair fails to intersect.
    Fail,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct IntersectionArgs {
    #[command(flatten)]
    pub src: OrigamiArg,
    /// Minimum segment length.
    #[arg(long = "K", alias = "k", default_value = "17")]
    pub k: String,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, value_enum, default_value_t = PairChoice::Both)]
    pub pair: PairChoice,
    #[arg(long, value_enum, default_value_t = Expectation::Hold)]
    pub expect: Expectation,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CylindersArgs {
    #[command(flatten)]
    pub src: OrigamiArg,
    /// Matrix `A`: cylinders in the slope of `A·0` (vertical base) or `A·∞` (horizontal base).
    #[arg(long, allow_hyphen_values = true)]
    pub matrix: Option<String>,
    #[arg(long, default_value = "vertical")]
    pub base: String,
    /// Audit the transversal bound on this many random segments instead.
    #[arg(long)]
    pub audit: Option<usize>,
    /// Largest matrix entry of the audited decompositions.
    #[arg(long, default_value_t = 50)]
    pub qmax: u64,
    /// CSV of cylinders, or the JSON audit report.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HittingMode {
    /// One record per radius.
    Records,
    /// `T(r_n) ≤ 4K q_n` at `r_n = 2(K+1)/q_n`.
    Special,
    /// `T(r_k) ≥ q^w/√8` at `r_k = 1/(q√32)`, with the tube audit.
    Lower,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct HittingArgs {
    #[command(flatten)]
    pub src: OrigamiArg,
    /// Slope spec.
    #[arg(long, default_value = "golden")]
    pub slope: String,
    #[arg(long, value_enum, default_value_t = HittingMode::Records)]
    pub mode: HittingMode,
    /// `auto`, `auto:COUNT:RMIN`, a list `0.1,0.05`, or `lower:QMIN..QMAX`; join with `+`.
    #[arg(long, default_value = "auto")]
    pub radii: String,
    /// Time cap.
    #[arg(long, default_value_t = 1e7)]
    pub cap: f64,
    /// Start point `j,x,y`; drawn from the seed when absent.
    #[arg(long)]
    pub start: Option<String>,
    /// Levels `n` for the special mode, e.g. `6..14`.
    #[arg(long, default_value = "6..14")]
    pub levels: String,
    #[arg(long = "K", alias = "k", default_value_t = 17)]
    pub k: u32,
    /// Range of `q_{2k}` for the lower mode.
    #[arg(long, default_value_t = 50)]
    pub qmin: u64,
    #[arg(long, default_value_t = 1000)]
    pub qmax: u64,
    /// CSV output.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExponentArgs {
    /// Hitting record CSV files.
    #[arg(long = "in", required = true)]
    pub input: Vec<PathBuf>,
    /// Fail unless `lo ≤ Ĥ ≤ hi`, given as `lo,hi`.
    #[arg(long)]
    pub expect_range: Option<String>,
    /// Slope spec whose lower-bound radii `r_k` are checked for per-point exponents.
    #[arg(long)]
    pub special_slope: Option<String>,
    #[arg(long, default_value_t = 50)]
    pub qmin: u64,
    #[arg(long, default_value_t = 1000)]
    pub qmax: u64,
    /// Required per-point exponent at the special radii.
    #[arg(long, default_value_t = 1.6)]
    pub special_min: f64,
    /// Number of largest special levels checked.
    #[arg(long, default_value_t = 2)]
    pub special_count: usize,
    /// JSON fit report.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// SVG plot.
    #[arg(long)]
    #[serde(skip)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
}

/// Parses `256M`, `1G`, `64K` or a plain byte count.
pub fn parse_bytes(s: &str) -> Result<u64, String> {
    let s = s.trim();
    let (num, mult) = match s.chars().last() {
        Some('K' | 'k') => (&s[..s.len() - 1], 1u64 << 10),
        Some('M' | 'm') => (&s[..s.len() - 1], 1 << 20),
        Some('G' | 'g') => (&s[..s.len() - 1], 1 << 30),
        _ => (s, 1),
    };
    num.trim()
        .parse::<u64>()
        .ok()
        .and_then(|n| n.checked_mul(mult))
        .ok_or_else(|| format!("not a byte size: {s:?}"))
}
