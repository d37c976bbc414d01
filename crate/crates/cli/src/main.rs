use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod run;

/// Co-movement pattern mining over trajectory data.
#[derive(Debug, Parser)]
#[command(name = "comove", version, about)]
pub struct Cli {
    /// Worker threads; 1 runs everything on the calling thread.
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cluster, mine and extract patterns; writes patterns and an FCI store.
    Mine(MineArgs),
    /// Combine new data with a store written by `mine`, then rewrite it.
    Append(AppendArgs),
    /// Generate synthetic moving groups as trajectory CSV.
    Gen(GenArgs),
    /// Rewrite an input in another format.
    Convert(ConvertArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Monolithic,
    Incremental,
    Nested,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Csv,
    Geojson,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Clusters,
    Trajectories,
}

#[derive(Debug, Clone, Args)]
pub struct ClusteringArgs {
    /// DBSCAN neighbourhood radius, in dataset units.
    #[arg(long, default_value_t = 0.001)]
    pub eps: f64,
    /// DBSCAN minimum neighbourhood size, the point itself included.
    #[arg(long, default_value_t = 2)]
    pub minpts: usize,
    /// Read `timestamp<TAB>ordinal<TAB>objects` clusters instead of trajectories.
    #[arg(long)]
    pub pre_clustered: bool,
}

#[derive(Debug, Clone, Args)]
pub struct PatternArgs {
    /// Minimum number of objects in a pattern.
    #[arg(long)]
    pub epsilon: Option<usize>,
    /// Minimum number of timestamps in a pattern.
    #[arg(long, default_value_t = 1)]
    pub min_t: usize,
    /// Minimum Jaccard similarity between consecutive clusters of a moving cluster.
    #[arg(long, default_value_t = 0.5)]
    pub theta: f64,
    /// Minimum number of convoys in a group pattern.
    #[arg(long, default_value_t = 1)]
    pub min_c: usize,
    /// Minimum share of all timestamps covered by a group pattern.
    #[arg(long, default_value_t = 0.0)]
    pub min_wei: f64,
    /// Output formats for the patterns.
    #[arg(long, value_enum, default_value_t = Emit::Both)]
    pub emit: Emit,
}

#[derive(Debug, Clone, Args)]
pub struct MineArgs {
    /// Trajectory CSV, or clusters with --pre-clustered.
    pub input: PathBuf,
    /// Output directory, created if missing.
    pub output: PathBuf,
    #[command(flatten)]
    pub clustering: ClusteringArgs,
    #[command(flatten)]
    pub patterns: PatternArgs,
    /// Timestamps per block in incremental mode.
    #[arg(long, default_value_t = 25)]
    pub block_size: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Monolithic)]
    pub mode: ModeArg,
    /// Cut trajectories into sub-trajectories of this many timestamps and
    /// mine periodic patterns.
    #[arg(long, value_name = "TIMESTAMPS")]
    pub period: Option<u32>,
}

#[derive(Debug, Clone, Args)]
pub struct AppendArgs {
    /// New trajectory CSV (or clusters), strictly later than the store.
    pub input: PathBuf,
    /// Directory written by `mine`.
    #[arg(long)]
    pub store: PathBuf,
    #[command(flatten)]
    pub clustering: ClusteringArgs,
    #[command(flatten)]
    pub patterns: PatternArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    /// Output trajectory CSV.
    pub output: PathBuf,
    #[arg(long, default_value_t = 100)]
    pub objects: u32,
    #[arg(long, default_value_t = 500)]
    pub times: u32,
    #[arg(long, default_value_t = 5)]
    pub groups: u32,
    /// Probability that an object changes group at each step.
    #[arg(long, default_value_t = 0.001)]
    pub switch_prob: f64,
    /// Half-width of the square members are scattered over.
    #[arg(long, default_value_t = 0.0003)]
    pub spread: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct ConvertArgs {
    pub input: PathBuf,
    pub output: PathBuf,
    #[arg(long, value_enum)]
    pub to: Target,
    #[command(flatten)]
    pub clustering: ClusteringArgs,
    /// Fill interior gaps of each trajectory before writing.
    #[arg(long)]
    pub interpolate: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
