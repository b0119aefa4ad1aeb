use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use traj_core::analysis::{all_pairs, distance_histogram, importance, ImportanceTag};
use traj_core::baselines::{dtw, dtw_pruned, seq_align};
use traj_core::params::{select_params, SelectOptions};
use traj_core::semicontinuous::semicontinuous_local_align;
use traj_core::trajectory::load_geo_points;
use traj_core::{
    global_align, load_trajectory, local_align, normalize, project_geo, semicontinuous_align, CsvFormat, ScoringParams,
    TrajError, Trajectory,
};

mod output;

use output::AlignDoc;

const DEFAULT_R: f64 = 100.0;
const DEFAULT_L: u32 = 4;
const DEFAULT_R_HAT: f64 = 1000.0;

#[derive(Parser, Debug)]
#[command(name = "traj", version, about = "Gap-aware trajectory similarity by monotone assignment")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Align two trajectories and print the assignment as JSON
    Align(AlignArgs),
    /// Count outgoing correspondences of every point over all pairs (CSV)
    Importance(ImportanceArgs),
    /// Histogram of the edge distances in an `align` JSON document (CSV)
    Histogram(HistogramArgs),
    /// Infer the distance threshold iteratively (JSON trace)
    Params(ParamsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Global,
    Local,
    Semicontinuous,
    SemicontinuousLocal,
    Dtw,
    DtwPruned,
    Seqalign,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Global => "global",
            Mode::Local => "local",
            Mode::Semicontinuous => "semicontinuous",
            Mode::SemicontinuousLocal => "semicontinuous-local",
            Mode::Dtw => "dtw",
            Mode::DtwPruned => "dtw-pruned",
            Mode::Seqalign => "seqalign",
        }
    }

    fn default_tau_factor(self) -> Option<f64> {
        match self {
            Mode::Local => Some(traj_core::local::DEFAULT_TAU_FACTOR),
            Mode::SemicontinuousLocal => Some(traj_core::semicontinuous::DEFAULT_TAU_FACTOR),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    Assignment,
    Dtw,
    DtwPruned,
}

#[derive(clap::Args, Debug)]
struct Ingest {
    /// Read `lat,lon` / `t,lat,lon` rows and project them to meters
    #[arg(long)]
    geo: bool,
}

#[derive(clap::Args, Debug)]
struct AlignArgs {
    a: PathBuf,
    b: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Global)]
    mode: Mode,
    /// Distance threshold in meters
    #[arg(long, default_value_t = DEFAULT_R, allow_negative_numbers = true)]
    r: f64,
    /// Minimum gap length
    #[arg(long, default_value_t = DEFAULT_L)]
    min_gap_len: u32,
    /// Local modes: tau as a multiple of delta (default 1.5, or 2.0 for semicontinuous-local)
    #[arg(long, allow_negative_numbers = true)]
    tau_factor: Option<f64>,
    /// Infer r from the data instead of using --r
    #[arg(long)]
    auto_params: bool,
    /// Initial guess for --auto-params, in meters
    #[arg(long, requires = "auto_params", allow_negative_numbers = true)]
    r_hat: Option<f64>,
    #[command(flatten)]
    ingest: Ingest,
}

#[derive(clap::Args, Debug)]
struct ImportanceArgs {
    /// Trajectory files, or directories of `.csv` files
    #[arg(required = true)]
    paths: Vec<PathBuf>,
    #[arg(long, value_enum)]
    algorithm: Algorithm,
    #[arg(long, default_value_t = DEFAULT_R, allow_negative_numbers = true)]
    r: f64,
    #[arg(long, default_value_t = DEFAULT_L)]
    min_gap_len: u32,
    #[command(flatten)]
    ingest: Ingest,
}

#[derive(clap::Args, Debug)]
struct HistogramArgs {
    json: PathBuf,
    #[arg(long, default_value_t = 20)]
    bins: usize,
    /// Equal-width bins in log10 space
    #[arg(long)]
    log: bool,
}

#[derive(clap::Args, Debug)]
struct ParamsArgs {
    a: PathBuf,
    b: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    r_hat: f64,
    #[arg(long, default_value_t = DEFAULT_L)]
    min_gap_len: u32,
    #[arg(long)]
    discard_frac: Option<f64>,
    #[arg(long)]
    c1: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[command(flatten)]
    ingest: Ingest,
}

/// Bad option values that clap cannot check on its own.
#[derive(Debug)]
struct ConfigError(String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn config_err(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<ConfigError>() {
            return 3;
        }
        if let Some(e) = cause.downcast_ref::<TrajError>() {
            return match e {
                TrajError::Io { .. } => 1,
                TrajError::Parse { .. }
                | TrajError::NoRows(_)
                | TrajError::NonFinite(_)
                | TrajError::GeoOutOfRange { .. }
                | TrajError::EmptyTrajectory => 2,
                _ => 3,
            };
        }
        if cause.is::<serde_json::Error>() {
            return 2;
        }
        if cause.is::<std::io::Error>() {
            return 1;
        }
    }
    3
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(3);
        }
    };
    let out = match cli.command {
        Command::Align(args) => cmd_align(&args),
        Command::Importance(args) => cmd_importance(&args),
        Command::Histogram(args) => cmd_histogram(&args),
        Command::Params(args) => cmd_params(&args),
    };
    match out.and_then(|text| write_stdout(&text)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn write_stdout(text: &str) -> Result<()> {
    let mut stdout = std::io::stdout().lock();
    stdout.write_all(text.as_bytes())?;
    stdout.flush()?;
    Ok(())
}

fn file_stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| path.display().to_string())
}

/// Loads all files; with `geo`, every file is projected about the first point of the first one.
fn load_all(paths: &[PathBuf], geo: bool) -> Result<Vec<Trajectory>> {
    if !geo {
        return paths.iter().map(|p| Ok(load_trajectory(p, CsvFormat::Xy)?)).collect();
    }
    let raw = paths.iter().map(|p| load_geo_points(p)).collect::<traj_core::Result<Vec<_>>>()?;
    let origin = raw.first().and_then(|pts| pts.first()).copied();
    paths
        .iter()
        .zip(&raw)
        .map(|(path, pts)| Ok(project_geo(file_stem(path), pts, origin)?))
        .collect()
}

fn load_pair(a: &Path, b: &Path, geo: bool) -> Result<(Trajectory, Trajectory)> {
    let mut both = load_all(&[a.to_path_buf(), b.to_path_buf()], geo)?;
    let q = both.pop().expect("two trajectories");
    let p = both.pop().expect("two trajectories");
    Ok((p, q))
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

fn cmd_align(args: &AlignArgs) -> Result<String> {
    if args.tau_factor.is_some() && args.mode.default_tau_factor().is_none() {
        return Err(config_err(format!("--tau-factor only applies to local modes, not {}", args.mode.name())));
    }
    let (p, q) = load_pair(&args.a, &args.b, args.ingest.geo)?;

    let (mut params, trace) = if args.auto_params {
        let r_hat = args.r_hat.unwrap_or(DEFAULT_R_HAT);
        let trace = select_params(&p, &q, r_hat, args.min_gap_len, &SelectOptions::default())?;
        (trace.final_params, Some(trace))
    } else {
        (ScoringParams::from_threshold(args.r, args.min_gap_len)?, None)
    };
    if let Some(default) = args.mode.default_tau_factor() {
        let factor = args.tau_factor.unwrap_or(default);
        if !(factor >= 0.0) || !factor.is_finite() {
            return Err(config_err(format!("tau factor must be a finite non-negative number, got {factor}")));
        }
        params = params.with_tau_factor(factor);
    }

    let name = args.mode.name();
    let mut doc = match args.mode {
        Mode::Global => AlignDoc::global(name, &params, &global_align(&p, &q, &params)?, &p, &q),
        Mode::Local => AlignDoc::local(name, &params, &local_align(&p, &q, &params)?, &p, &q),
        Mode::Semicontinuous => AlignDoc::semicontinuous(&params, &semicontinuous_align(&p, &q, &params)?, &p, &q),
        Mode::SemicontinuousLocal => {
            AlignDoc::semicontinuous_local(&params, &semicontinuous_local_align(&p, &q, &params)?, &p, &q)
        }
        Mode::Dtw => AlignDoc::baseline(name, &params, &dtw(&p, &q)?, None, &p, &q),
        Mode::DtwPruned => AlignDoc::baseline(name, &params, &dtw_pruned(&p, &q, params.r)?, None, &p, &q),
        Mode::Seqalign => {
            let set = seq_align(&p, &q, &params)?;
            let norm = normalize(set.total_cost, p.len(), q.len(), params.c);
            AlignDoc::baseline(name, &params, &set, Some(norm), &p, &q)
        }
    };
    doc.param_trace = trace;
    to_json(&doc)
}

fn expand_paths(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for path in paths {
        if path.is_dir() {
            let mut files: Vec<PathBuf> = fs::read_dir(path)
                .with_context(|| format!("failed to list {}", path.display()))?
                .map(|e| e.map(|e| e.path()))
                .collect::<std::io::Result<_>>()?;
            files.retain(|f| f.is_file() && f.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")));
            files.sort();
            out.extend(files);
        } else {
            out.push(path.clone());
        }
    }
    Ok(out)
}

fn cmd_importance(args: &ImportanceArgs) -> Result<String> {
    let params = ScoringParams::from_threshold(args.r, args.min_gap_len)?;
    let files = expand_paths(&args.paths)?;
    let trajs = load_all(&files, args.ingest.geo)?;
    let tag = match args.algorithm {
        Algorithm::Assignment => ImportanceTag::Assignment,
        Algorithm::Dtw => ImportanceTag::Dtw,
        Algorithm::DtwPruned => ImportanceTag::DtwPruned,
    };
    let table = all_pairs(&trajs, tag.method(), &params, true)?;
    Ok(importance(&trajs, &table, tag)?.to_csv(&trajs))
}

#[derive(serde::Deserialize)]
struct DistancesDoc {
    edge_distances: Vec<EdgeDist>,
}

#[derive(serde::Deserialize)]
struct EdgeDist {
    dist: f64,
}

fn cmd_histogram(args: &HistogramArgs) -> Result<String> {
    if args.bins == 0 {
        return Err(config_err("--bins must be at least 1"));
    }
    let text = fs::read_to_string(&args.json).with_context(|| format!("failed to read {}", args.json.display()))?;
    let doc: DistancesDoc =
        serde_json::from_str(&text).with_context(|| format!("{}: not an alignment document", args.json.display()))?;
    let distances: Vec<f64> = doc.edge_distances.iter().map(|e| e.dist).collect();
    Ok(distance_histogram(&distances, args.bins, args.log)?.to_csv())
}

fn cmd_params(args: &ParamsArgs) -> Result<String> {
    let defaults = SelectOptions::default();
    let opts = SelectOptions {
        discard_frac: args.discard_frac.unwrap_or(defaults.discard_frac),
        c1: args.c1.unwrap_or(defaults.c1),
        max_iters: args.max_iters.unwrap_or(defaults.max_iters),
        ..defaults
    };
    let (p, q) = load_pair(&args.a, &args.b, args.ingest.geo)?;
    let trace = select_params(&p, &q, args.r_hat, args.min_gap_len, &opts)?;
    to_json(&trace)
}
