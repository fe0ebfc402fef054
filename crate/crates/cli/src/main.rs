use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser)]
#[command(name = "multinet", version, about = "Compose and analyze multi-layer networks under one random walk")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replace every layer by the interaction matrix of its bias/delay dynamics.
    Transform(TransformArgs),
    /// Build the super-adjacency of a layered dataset.
    Compose(ComposeArgs),
    /// Check a super-adjacency against its layers and ego matrices.
    Verify(VerifyArgs),
    /// Spectral bisection, conductance, layer load and stationary distribution.
    Analyze(AnalyzeArgs),
    /// Convert a DIMACS road network into a two-layer dataset.
    IngestDimacs(IngestArgs),
}

#[derive(Args)]
struct DynamicsArgs {
    /// JSON `{layer: {label: b}}`; unlisted vertices get 1.
    #[arg(long)]
    bias_file: Option<PathBuf>,
    /// JSON `{layer: {label: tau}}`; unlisted vertices get 1.
    #[arg(long)]
    delay_file: Option<PathBuf>,
}

#[derive(Args)]
struct TransformArgs {
    layers: PathBuf,
    #[command(flatten)]
    dynamics: DynamicsArgs,
    /// Output layered file; stdout when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Multiplex,
    Ego,
    Stationary,
    Distance,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kernel {
    Reciprocal,
    Constant,
}

#[derive(Args)]
struct ComposeArgs {
    layers: PathBuf,
    #[arg(long, value_enum, default_value = "multiplex")]
    mode: Mode,
    /// JSON `{label: [[...]]}`, columns are source layers.
    #[arg(long)]
    ego_file: Option<PathBuf>,
    /// JSON `{label: [pi...]}`; key `*` applies to every vertex on all layers.
    #[arg(long)]
    pi_file: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    coupling: f64,
    /// JSON `l x l` layer distances; unit-spaced snapshots when absent.
    #[arg(long)]
    distances: Option<PathBuf>,
    /// Couple only consecutive layers (implied without `--distances`).
    #[arg(long)]
    adjacent_only: bool,
    #[arg(long, value_enum, default_value = "reciprocal")]
    kernel: Kernel,
    /// Average asymmetric undirected ego blocks instead of failing.
    #[arg(long)]
    force_symmetric: bool,
    #[command(flatten)]
    dynamics: DynamicsArgs,
    /// `mm` (Matrix Market) or `json`.
    #[arg(long, default_value = "mm")]
    format: multinet::io::SuperFormat,
    /// Output path; stdout when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Super-adjacency file (Matrix Market or JSON).
    super_file: PathBuf,
    /// Layered dataset the super-adjacency was composed from.
    #[arg(long)]
    layers: PathBuf,
    #[arg(long)]
    ego_file: Option<PathBuf>,
    #[command(flatten)]
    dynamics: DynamicsArgs,
    /// Overrides `verify.tol`.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Super-adjacency file or layered dataset (layers left uncoupled).
    input: PathBuf,
    /// Sweep cut along the Fiedler vector.
    #[arg(long)]
    bisect: bool,
    /// JSON array of instance names (`label@layer`) forming `S`.
    #[arg(long)]
    conductance: Option<PathBuf>,
    /// Share of total degree held by each layer.
    #[arg(long)]
    layer_load: bool,
    /// With `--load-layer`: find the intra-layer scale reaching this load.
    #[arg(long, requires = "load_layer")]
    load_target: Option<f64>,
    #[arg(long, requires = "load_target")]
    load_layer: Option<String>,
    /// Stationary distribution of the unbiased walk.
    #[arg(long)]
    stationary: bool,
    /// Graphviz output colored by bisection side.
    #[arg(long)]
    dot: Option<PathBuf>,
    /// JSON report path in addition to stdout.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct IngestArgs {
    gr: PathBuf,
    /// `<u> <v> <class>` lines.
    categories: PathBuf,
    /// Layered dataset output.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also compose and write the super-adjacency here.
    #[arg(long)]
    super_out: Option<PathBuf>,
    #[arg(long, default_value = "mm")]
    format: multinet::io::SuperFormat,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            let kind = e.kind();
            let report = serde_json::json!({ "error": kind.as_str(), "message": e.to_string(), "exit_code": kind.exit_code() });
            eprintln!("{report}");
            ExitCode::from(kind.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, commands::CliError> {
    let cfg = multinet::RunConfig::load(cli.config.as_deref()).map_err(multinet::Error::from)?;
    match cli.command {
        Command::Transform(a) => commands::transform(&cfg, a),
        Command::Compose(a) => commands::compose(&cfg, a),
        Command::Verify(a) => commands::verify(&cfg, a),
        Command::Analyze(a) => commands::analyze(&cfg, a),
        Command::IngestDimacs(a) => commands::ingest(&cfg, a),
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), commands::CliError> {
    match path {
        Some(p) => Ok(multinet::io::write_text(p, text).map_err(multinet::Error::from)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
