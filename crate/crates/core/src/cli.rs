//! Command-line entry points.

use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{hop_homophily, Graph, GraphError};
use crate::io::configs::{config_for_task, synthetic_run_config, synthetic_spec, synthetic_task_for};
use crate::io::loader::{align_feature_dims, load_dir, LoadError};
use crate::io::metrics::{write_metrics, write_weighted_edges};
use crate::io::synthetic::{generate_synthetic, SyntheticError, SyntheticSpec};
use crate::pipeline::{homophily_report, run_rsgda, Ablation, PipelineError, RunConfig, RunMetrics};
use crate::reconstruct::{reconstruct, HomophilicSolveConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        if matches!(e, PipelineError::Config(_)) {
            CliError::Usage(e.to_string())
        } else if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Data(e.to_string())
        }
    }
}

impl From<LoadError> for CliError {
    fn from(e: LoadError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<SyntheticError> for CliError {
    fn from(e: SyntheticError) -> Self {
        match e {
            SyntheticError::Spec(m) => CliError::Usage(m),
            SyntheticError::Graph(g) => CliError::Data(g.to_string()),
        }
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        CliError::Data(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "rsgda", version, about = "Graph domain adaptation with reconstructed homophilic and heterophilic structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train on a labeled source graph and evaluate on the target.
    Run(RunArgs),
    /// Write the reconstructed structures of one graph as edge lists.
    Reconstruct(ReconstructArgs),
    /// Print the hop homophily of one graph for l = 1..L.
    Homophily(HomophilyArgs),
    /// Grid over mu1, mu2 and l, one run per point.
    Sweep(SweepArgs),
}

#[derive(Debug, Args, Clone)]
struct PairArgs {
    /// Directory with the source dataset files.
    #[arg(long)]
    source_dir: Option<PathBuf>,
    /// Directory with the target dataset files.
    #[arg(long)]
    target_dir: Option<PathBuf>,
    /// Source generator spec, e.g. `h=0.8,n=500,seed=0`.
    #[arg(long)]
    synthetic_src: Option<String>,
    /// Target generator spec.
    #[arg(long)]
    synthetic_tgt: Option<String>,
    /// Named synthetic task: homophily-shift, reverse-shift or self-transfer.
    #[arg(long)]
    synthetic_task: Option<String>,
    /// Task name used to pick shipped hyperparameters, e.g. `CO→WI` or `CO->WI`.
    #[arg(long)]
    task: Option<String>,
}

#[derive(Debug, Args, Clone)]
struct HyperArgs {
    /// Hop order of the reconstruction; also the filter order unless --k is given.
    #[arg(long)]
    l: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    mu1: Option<f64>,
    #[arg(long)]
    mu2: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    mu_ce: Option<f64>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    weight_decay: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// full, no_cr, no_re or random_split.
    #[arg(long)]
    ablation: Option<Ablation>,
    #[arg(long)]
    topk: Option<usize>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[command(flatten)]
    hyper: HyperArgs,
    /// Text metrics go here and JSON metrics to `<out>.json`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
struct GraphArgs {
    /// Directory with the dataset files.
    #[arg(long)]
    dir: Option<PathBuf>,
    /// Generator spec, e.g. `h=0.4,n=500,seed=1`.
    #[arg(long)]
    synthetic: Option<String>,
}

#[derive(Debug, Args)]
struct ReconstructArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, default_value_t = 2)]
    l: usize,
    #[arg(long, default_value_t = 5)]
    topk: usize,
    #[arg(long, default_value_t = 10)]
    solve_iters: usize,
    /// Largest hop in the printed homophily table; defaults to --l.
    #[arg(long)]
    max_hop: Option<usize>,
    /// Receives `a_o.txt` and `a_e.txt`.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct HomophilyArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, default_value_t = 4)]
    max_hop: usize,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[command(flatten)]
    hyper: HyperArgs,
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.01, 0.05, 0.1, 0.5, 1.0])]
    mu1_grid: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.01, 0.05, 0.1, 0.5, 1.0])]
    mu2_grid: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = vec![2, 4, 6, 8])]
    l_grid: Vec<usize>,
    /// One metrics pair per grid point is written here.
    #[arg(long)]
    out_dir: PathBuf,
}

/// Parses `key=value,key=value` over the generator fields; `h` is short for
/// `homophily`. Unset fields take the synthetic preset values.
pub fn parse_synthetic_spec(text: &str) -> Result<SyntheticSpec, CliError> {
    let base = serde_json::to_value(synthetic_spec(0.5, 0, 100)).expect("spec serializes");
    let serde_json::Value::Object(mut fields) = base else {
        unreachable!("spec is a struct")
    };
    for pair in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("expected key=value in synthetic spec, got {pair:?}")))?;
        let key = match k.trim() {
            "h" => "homophily",
            other => other,
        };
        if !fields.contains_key(key) {
            return Err(CliError::Usage(format!("unknown synthetic spec key {k:?}")));
        }
        let value: serde_json::Value =
            serde_json::from_str(v.trim()).map_err(|_| CliError::Usage(format!("invalid value for {key}: {v:?}")))?;
        fields.insert(key.to_string(), value);
    }
    let spec: SyntheticSpec = serde_json::from_value(serde_json::Value::Object(fields))
        .map_err(|e| CliError::Usage(format!("synthetic spec: {e}")))?;
    spec.validate()?;
    Ok(spec)
}

fn dir_name(p: &Path) -> String {
    p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Source and target graphs plus the base config implied by their origin.
fn load_pair(pair: &PairArgs, seed: Option<u64>) -> Result<(Graph, Graph, RunConfig), CliError> {
    if let Some(name) = &pair.synthetic_task {
        let task = synthetic_task_for(name, seed.unwrap_or(0))
            .ok_or_else(|| CliError::Usage(format!("unknown synthetic task {name:?}")))?;
        return Ok((generate_synthetic(&task.source)?, generate_synthetic(&task.target)?, task.config));
    }
    match (&pair.source_dir, &pair.target_dir, &pair.synthetic_src, &pair.synthetic_tgt) {
        (Some(s), Some(t), None, None) => {
            let task = pair.task.clone().unwrap_or_else(|| format!("{}→{}", dir_name(s), dir_name(t)));
            let (source, target) = align_feature_dims(load_dir(s)?.graph, load_dir(t)?.graph)?;
            Ok((source, target, config_for_task(&task)))
        }
        (None, None, Some(s), Some(t)) => {
            let base = pair.task.as_deref().map_or_else(synthetic_run_config, config_for_task);
            let source = generate_synthetic(&parse_synthetic_spec(s)?)?;
            let target = generate_synthetic(&parse_synthetic_spec(t)?)?;
            let (source, target) = align_feature_dims(source, target)?;
            Ok((source, target, base))
        }
        _ => Err(CliError::Usage(
            "give --source-dir and --target-dir, --synthetic-src and --synthetic-tgt, or --synthetic-task".into(),
        )),
    }
}

fn load_single(args: &GraphArgs) -> Result<Graph, CliError> {
    match (&args.dir, &args.synthetic) {
        (Some(d), None) => Ok(load_dir(d)?.graph),
        (None, Some(s)) => Ok(generate_synthetic(&parse_synthetic_spec(s)?)?),
        _ => Err(CliError::Usage("give exactly one of --dir or --synthetic".into())),
    }
}

fn apply_overrides(mut cfg: RunConfig, h: &HyperArgs) -> RunConfig {
    if let Some(l) = h.l {
        cfg.hops = l;
        cfg.order = l;
    }
    if let Some(k) = h.k {
        cfg.order = k;
    }
    macro_rules! set {
        ($($field:ident),*) => {$( if let Some(v) = h.$field { cfg.$field = v; } )*};
    }
    set!(mu1, mu2, beta, mu_ce, lr, weight_decay, epochs, seed, ablation, topk);
    cfg
}

/// Resolves the config a `run` would use without executing it.
pub fn resolve_run_config(argv: &[&str]) -> Result<RunConfig, CliError> {
    let cli = Cli::try_parse_from(argv).map_err(|e| CliError::Usage(e.to_string()))?;
    let Command::Run(args) = cli.command else {
        return Err(CliError::Usage("not a run command".into()));
    };
    let (_, _, base) = load_pair(&args.pair, args.hyper.seed)?;
    Ok(apply_overrides(base, &args.hyper))
}

fn summary(m: &RunMetrics) -> String {
    let acc = m.final_accuracy.map_or_else(|| "none".into(), |a| format!("{a:.4}"));
    format!(
        "ablation={} seed={} final_accuracy={acc} final_loss={:.6} seconds={:.2}",
        m.ablation,
        m.seed,
        m.loss_total.last().copied().unwrap_or(f64::NAN),
        m.wall_clock_seconds
    )
}

fn cmd_run(args: RunArgs) -> Result<(), CliError> {
    let (source, target, base) = load_pair(&args.pair, args.hyper.seed)?;
    let cfg = apply_overrides(base, &args.hyper);
    log::info!("run config: {cfg:?}");
    let m = run_rsgda(&source, &target, &cfg)?;
    if let Some(out) = &args.out {
        write_metrics(out, &m)?;
    }
    println!("{}", summary(&m));
    Ok(())
}

fn fmt_ratio(r: Option<f64>) -> String {
    r.map_or_else(|| "n/a".into(), |v| format!("{v:.4}"))
}

fn cmd_reconstruct(args: ReconstructArgs) -> Result<(), CliError> {
    let g = load_single(&args.graph)?;
    let cfg = HomophilicSolveConfig {
        hops: args.l,
        outer_iters: args.solve_iters,
        ..HomophilicSolveConfig::default()
    };
    let s = reconstruct(&g, &cfg, args.topk).map_err(|source| {
        CliError::from(PipelineError::Reconstruct {
            stage: "reconstruct",
            source,
        })
    })?;
    std::fs::create_dir_all(&args.out_dir).map_err(|e| CliError::Data(format!("{}: {e}", args.out_dir.display())))?;
    write_weighted_edges(&args.out_dir.join("a_o.txt"), &s.a_o)?;
    write_weighted_edges(&args.out_dir.join("a_e.txt"), &s.a_e)?;
    if g.labels().is_some() {
        println!("structure\thop\tratio");
        for row in homophily_report("graph", &g, &s, args.max_hop.unwrap_or(args.l), args.topk)? {
            println!("{}\t{}\t{}", row.structure, row.hop, fmt_ratio(row.ratio));
        }
    }
    Ok(())
}

fn cmd_homophily(args: HomophilyArgs) -> Result<(), CliError> {
    let g = load_single(&args.graph)?;
    for l in 1..=args.max_hop {
        let r = match hop_homophily(&g, l) {
            Ok(r) => Some(r),
            Err(GraphError::NoQualifyingPairs { .. }) => None,
            Err(e) => return Err(e.into()),
        };
        println!("l={l}\t{}", fmt_ratio(r));
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    let (source, target, base) = load_pair(&args.pair, args.hyper.seed)?;
    let base = apply_overrides(base, &args.hyper);
    std::fs::create_dir_all(&args.out_dir).map_err(|e| CliError::Data(format!("{}: {e}", args.out_dir.display())))?;
    let mut grid = Vec::new();
    for &l in &args.l_grid {
        for &mu1 in &args.mu1_grid {
            for &mu2 in &args.mu2_grid {
                grid.push((mu1, mu2, l));
            }
        }
    }
    let results: Vec<Result<(f64, f64, usize, RunMetrics), CliError>> = grid
        .par_iter()
        .map(|&(mu1, mu2, l)| {
            let cfg = RunConfig {
                mu1,
                mu2,
                hops: l,
                order: args.hyper.k.unwrap_or(l),
                ..base.clone()
            };
            let m = run_rsgda(&source, &target, &cfg)?;
            write_metrics(&args.out_dir.join(format!("mu1_{mu1}_mu2_{mu2}_l_{l}.txt")), &m)?;
            Ok((mu1, mu2, l, m))
        })
        .collect();
    println!("mu1\tmu2\tl\taccuracy");
    for r in results {
        let (mu1, mu2, l, m) = r?;
        println!("{mu1}\t{mu2}\t{l}\t{}", fmt_ratio(m.final_accuracy));
    }
    Ok(())
}

/// Runs the command line and returns the process exit code.
pub fn cli_run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Reconstruct(a) => cmd_reconstruct(a),
        Command::Homophily(a) => cmd_homophily(a),
        Command::Sweep(a) => cmd_sweep(a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
