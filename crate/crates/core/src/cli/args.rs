use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub fn long_version() -> &'static str {
    concat!(
        env!("CARGO_PKG_VERSION"),
        "\nformats: edge-list 1, labels 1, scores 1, edge-scores 1, features 1, model 1, sweep 1, ranking 1"
    )
}

#[derive(Debug, Parser)]
#[command(name = "trustprop", version, long_version = long_version(), about = "Sybil detection by trust propagation")]
pub struct Cli {
    /// Base seed; every random stage derives its own stream from it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: all cores). Outputs do not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Directory for output files.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
    /// `key = value` file supplying options not given on the command line.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic benign/Sybil scenario with simulated local scores.
    Generate(GenerateArgs),
    /// Keep only reciprocated edges of a directed edge list.
    Mutualize(MutualizeArgs),
    /// Extract Req_in, Req_out and clustering-coefficient features.
    Features(FeaturesArgs),
    /// Train the local node classifier and score every node.
    Train(TrainArgs),
    /// Compute local edge scores.
    ScoreEdges(ScoreEdgesArgs),
    /// Run a propagation engine or baseline.
    Propagate(PropagateArgs),
    /// Rank evaluated nodes by final score.
    Rank(RankArgs),
    /// Compute AUC, accuracy and top-K metrics.
    Evaluate(EvaluateArgs),
    /// Run a robustness sweep over synthetic scenarios.
    Sweep(SweepArgs),
    /// Run the full detection pipeline.
    Pipeline(PipelineArgs),
    /// Connected-component census.
    Components(ComponentsArgs),
    /// Modularity of the benign/Sybil partition.
    Modularity(ModularityArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Targeting {
    Uniform,
    DegreeBiased,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    #[arg(long, default_value_t = 1000)]
    pub benign: usize,
    #[arg(long, default_value_t = 500)]
    pub sybil: usize,
    #[arg(long, default_value_t = 10)]
    pub avg_degree: usize,
    #[arg(long, default_value_t = 1000)]
    pub attack_edges: usize,
    #[arg(long, value_enum, default_value_t = Targeting::Uniform)]
    pub targeting: Targeting,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Node-score error rate on benign nodes.
    #[arg(long, default_value_t = 0.3)]
    pub fpr: f64,
    /// Node-score error rate on Sybil nodes.
    #[arg(long, default_value_t = 0.3)]
    pub fnr: f64,
    /// Edge-score error rate on same-label edges.
    #[arg(long, default_value_t = 0.3)]
    pub edge_fpr: f64,
    /// Edge-score error rate on attack edges.
    #[arg(long, default_value_t = 0.3)]
    pub edge_fnr: f64,
}

#[derive(Debug, Args)]
pub struct MutualizeArgs {
    /// Directed edge list.
    #[arg(long)]
    pub graph: PathBuf,
}

#[derive(Debug, Args)]
pub struct FeaturesArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Read the edge list as directed (request ratios use edge direction).
    #[arg(long)]
    pub directed: bool,
}

#[derive(Debug, Args)]
pub struct HyperArgs {
    #[arg(long, default_value_t = 0.1)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub l2: f64,
    #[arg(long, default_value_t = 500)]
    pub epochs: usize,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub features: PathBuf,
    /// Labels to train on (all labeled nodes unless sample sizes are given).
    #[arg(long)]
    pub labels: PathBuf,
    /// Sample this many benign training nodes.
    #[arg(long, requires = "sample_sybil")]
    pub sample_benign: Option<usize>,
    /// Sample this many Sybil training nodes.
    #[arg(long, requires = "sample_benign")]
    pub sample_sybil: Option<usize>,
    #[command(flatten)]
    pub hyper: HyperArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum EdgeMethod {
    Default,
    Cosine,
    Jaccard,
    AdamicAdar,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Rescale {
    Minmax,
    Fixed,
}

#[derive(Debug, Args)]
pub struct ScoreEdgesArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, value_enum, default_value_t = EdgeMethod::Default)]
    pub method: EdgeMethod,
    /// Score used by the `default` method.
    #[arg(long, default_value_t = 0.9)]
    pub value: f64,
    #[arg(long, value_enum, default_value_t = Rescale::Minmax)]
    pub rescale: Rescale,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Lbp,
    Rw,
    Sr,
    Cia,
    Sb,
    Int,
}

#[derive(Debug, Args)]
pub struct PropagateArgs {
    #[arg(long, value_enum)]
    pub engine: EngineArg,
    #[arg(long)]
    pub graph: PathBuf,
    /// Local node scores (lbp, rw).
    #[arg(long)]
    pub node_scores: Option<PathBuf>,
    /// Local edge scores (lbp, rw); all edges 0.9 when omitted.
    #[arg(long)]
    pub edge_scores: Option<PathBuf>,
    /// Seed labels, in label-file format.
    #[arg(long)]
    pub seeds: Option<PathBuf>,
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Re-apply seed scores after every walk step.
    #[arg(long)]
    pub pin_seeds: bool,
    /// Divide walk output by weighted degree.
    #[arg(long)]
    pub degree_normalize: bool,
    /// CIA restart probability.
    #[arg(long, default_value_t = 0.85)]
    pub restart: f64,
    /// SybilBelief edge homophily.
    #[arg(long, default_value_t = 0.9)]
    pub homophily: f64,
    /// Íntegro weight scale.
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Íntegro victim probabilities, `node_id p`.
    #[arg(long)]
    pub victims: Option<PathBuf>,
    /// Output file name under --out-dir.
    #[arg(long, default_value = "final_scores.tsv")]
    pub output: String,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[arg(long)]
    pub scores: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    /// Seed labels excluded from the ranking.
    #[arg(long)]
    pub seeds: Option<PathBuf>,
    /// Graph for the Sybil component classes.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
    /// Rank by `1 - score` (for badness scores such as CIA).
    #[arg(long)]
    pub invert: bool,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub scores: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long)]
    pub seeds: Option<PathBuf>,
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
    #[arg(long, value_delimiter = ',')]
    pub top_k: Vec<usize>,
    #[arg(long)]
    pub invert: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum VariableArg {
    FprFnr,
    AttackEdges,
    SybilCount,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Node,
    Edge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepEngine {
    Lbp,
    Rw,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub variable: VariableArg,
    /// Comma-separated values; the variable's default grid when omitted.
    #[arg(long, value_delimiter = ',')]
    pub grid: Vec<f64>,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [SweepEngine::Lbp, SweepEngine::Rw])]
    pub engines: Vec<SweepEngine>,
    #[arg(long, value_enum, default_value_t = ModeArg::Node)]
    pub mode: ModeArg,
    /// FPR = FNR when noise is not swept.
    #[arg(long, default_value_t = 0.3)]
    pub noise: f64,
    /// Edge score in node mode.
    #[arg(long, default_value_t = 0.9)]
    pub edge_score: f64,
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Rank random-walk output without degree normalization.
    #[arg(long)]
    pub raw_rw: bool,
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[arg(long, default_value = "sweep.tsv")]
    pub output: String,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long)]
    pub directed: bool,
    #[arg(long, default_value_t = 50)]
    pub train_benign: usize,
    #[arg(long, default_value_t = 50)]
    pub train_sybil: usize,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    #[command(flatten)]
    pub hyper: HyperArgs,
    #[arg(long, value_enum, default_value_t = EdgeMethod::Default)]
    pub edge_method: EdgeMethod,
    #[arg(long, default_value_t = 0.9)]
    pub edge_value: f64,
    #[arg(long, value_enum, default_value_t = Rescale::Minmax)]
    pub rescale: Rescale,
    #[arg(long)]
    pub lbp_iterations: Option<usize>,
    #[arg(long)]
    pub rw_iterations: Option<usize>,
    #[arg(long)]
    pub pin_seeds: bool,
    /// Rank SF-RW output without degree normalization.
    #[arg(long)]
    pub raw_rw: bool,
    #[arg(long, default_value_t = 0.85)]
    pub restart: f64,
    #[arg(long, default_value_t = 0.9)]
    pub homophily: f64,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [100, 200, 400])]
    pub top_k: Vec<usize>,
    /// Comma-separated subset of sf-lbp, sf-rw, sr, cia, sb, int-pf, local, rg.
    #[arg(long, value_delimiter = ',')]
    pub methods: Vec<String>,
}

#[derive(Debug, Args)]
pub struct ComponentsArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// With labels, restrict to the Sybil-induced subgraph and report the census.
    #[arg(long)]
    pub labels: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ModularityArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
}
