//! Thin command-line front end over the library: dataset ingestion, split
//! management, model training/evaluation, and the benchmark protocol.
//!
//! Exit codes: 0 success, 2 configuration error, 3 data error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lglp::error::Error;
use lglp::experiment::{
    self, history_csv, sweep_summary_csv, DatasetSpec, ExperimentConfig, Method,
};
use lglp::heuristics::{self, HeuristicConfig};
use lglp::metrics::evaluate;
use lglp::model::{train, ModelConfig, TrainConfig};
use lglp::split::{split_links, DataSplit, LinkSample};
use lglp::LglpModel;

#[derive(Parser)]
#[command(
    name = "lglp",
    version,
    about = "Link prediction with line-graph convolution and classical baselines"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct DatasetArgs {
    /// Edge-list file, or a synthetic spec: er:<n>:<p>:<seed>,
    /// gnm:<n>:<m>:<seed>, ba:<n>:<m>:<seed>, pp:<n>:<k>:<p_in>:<p_out>:<seed>
    #[arg(long, env = "LGLP_DATASET")]
    dataset: String,
    /// Optional node-attribute CSV (one row per remapped node)
    #[arg(long, env = "LGLP_ATTRS")]
    attrs: Option<PathBuf>,
}

impl DatasetArgs {
    fn spec(&self) -> DatasetSpec {
        DatasetSpec::parse(&self.dataset, self.attrs.clone())
    }
}

#[derive(Args)]
struct CommonArgs {
    #[arg(long, env = "LGLP_TRAIN_FRAC", default_value_t = 0.8)]
    train_frac: f64,
    #[arg(long, env = "LGLP_SEED", default_value_t = 1)]
    seed: u64,
    /// Enclosing-subgraph hop radius
    #[arg(long, env = "LGLP_HOPS", default_value_t = 2)]
    hops: u32,
    /// DRNL label cap (one-hot width per endpoint)
    #[arg(long, env = "LGLP_LABEL_CAP", default_value_t = 32)]
    label_cap: u32,
    /// Cap on subgraph nodes; the outermost hop is down-sampled
    #[arg(long, env = "LGLP_MAX_SUBGRAPH_NODES")]
    max_subgraph_nodes: Option<usize>,
    /// Worker threads (default: all cores)
    #[arg(long, env = "LGLP_WORKERS")]
    workers: Option<usize>,
    /// Force single-worker execution
    #[arg(long, env = "LGLP_DETERMINISTIC", default_value_t = false)]
    deterministic: bool,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    dataset: DatasetArgs,
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, env = "LGLP_EPOCHS", default_value_t = 15)]
    epochs: usize,
    #[arg(long, env = "LGLP_BATCH_SIZE", default_value_t = 50)]
    batch_size: usize,
    #[arg(long, env = "LGLP_LR", default_value_t = 1e-4)]
    lr: f64,
    /// Reuse a dumped split instead of generating one
    #[arg(long)]
    split: Option<PathBuf>,
    /// Checkpoint output path
    #[arg(long, env = "LGLP_OUT")]
    out: PathBuf,
    /// Also write the per-epoch (epoch, train_loss, test_auc) CSV here
    #[arg(long)]
    history: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    dataset: DatasetArgs,
    #[command(flatten)]
    common: CommonArgs,
    /// Checkpoint produced by `lglp train` (required for --method lglp)
    #[arg(long)]
    model: Option<PathBuf>,
    /// Method to score with
    #[arg(long, default_value = "lglp")]
    method: Method,
    /// Reuse a dumped split instead of generating one
    #[arg(long)]
    split: Option<PathBuf>,
    /// Write per-pair scores as CSV rows (u,v,method,score)
    #[arg(long)]
    scores: Option<PathBuf>,
}

#[derive(Args)]
struct BenchmarkArgs {
    #[command(flatten)]
    dataset: DatasetArgs,
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, default_value = "lglp")]
    method: Method,
    #[arg(long, env = "LGLP_REPEATS", default_value_t = 10)]
    repeats: usize,
    #[arg(long, env = "LGLP_EPOCHS", default_value_t = 15)]
    epochs: usize,
    #[arg(long, env = "LGLP_BATCH_SIZE", default_value_t = 50)]
    batch_size: usize,
    #[arg(long, env = "LGLP_LR", default_value_t = 1e-4)]
    lr: f64,
    /// Report JSON output path
    #[arg(long, env = "LGLP_OUT")]
    out: Option<PathBuf>,
    /// Write the per-epoch convergence CSV here (lglp only)
    #[arg(long)]
    history: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    bench: BenchmarkArgs,
    /// Comma-separated training fractions, e.g. 0.3,0.4,0.5,0.6,0.7,0.8
    #[arg(long, default_value = "0.3,0.4,0.5,0.6,0.7,0.8")]
    fractions: String,
    /// Output directory for per-fraction reports and the summary CSV
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Subcommand)]
enum SplitCommand {
    /// Generate a split and write it as JSON
    Dump {
        #[command(flatten)]
        dataset: DatasetArgs,
        #[arg(long, default_value_t = 0.8)]
        train_frac: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Load a split JSON against its dataset and print a summary
    Load {
        #[command(flatten)]
        dataset: DatasetArgs,
        #[arg(long)]
        split: PathBuf,
    },
}

#[derive(Subcommand)]
enum Command {
    /// Train one model on one split and save a checkpoint
    Train(TrainArgs),
    /// Score test pairs with a trained model or a heuristic
    Eval(EvalArgs),
    /// Repeat-and-average protocol; emits a JSON report
    Benchmark(BenchmarkArgs),
    /// Benchmark across several training fractions
    Sweep(SweepArgs),
    /// Dump or load reusable splits
    #[command(subcommand)]
    Split(SplitCommand),
}

fn obtain_split(
    graph: &lglp::Graph,
    split_path: Option<&PathBuf>,
    train_frac: f64,
    seed: u64,
) -> lglp::Result<DataSplit> {
    match split_path {
        Some(path) => DataSplit::load(path, graph),
        None => split_links(graph, train_frac, seed),
    }
}

fn with_pool<T>(
    workers: Option<usize>,
    deterministic: bool,
    body: impl FnOnce() -> lglp::Result<T> + Send,
) -> lglp::Result<T>
where
    T: Send,
{
    let workers = if deterministic { Some(1) } else { workers };
    match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::config(format!("cannot build worker pool: {e}")))?
            .install(body),
        None => body(),
    }
}

fn cmd_train(args: TrainArgs) -> lglp::Result<()> {
    let (graph, _) = args.dataset.spec().load()?;
    let split = obtain_split(&graph, args.split.as_ref(), args.common.train_frac, args.common.seed)?;
    let mcfg = ModelConfig {
        label_cap: args.common.label_cap,
        ..ModelConfig::default()
    };
    let tcfg = TrainConfig {
        epochs: args.epochs,
        batch_size: args.batch_size,
        lr: args.lr,
        seed: args.common.seed,
        hops: args.common.hops,
        max_subgraph_nodes: args.common.max_subgraph_nodes,
    };
    let outcome = with_pool(args.common.workers, args.common.deterministic, || {
        train(&split, &mcfg, &tcfg)
    })?;
    let n_pos = split.test_pos.len();
    let eval = evaluate(
        &outcome.test_scores[..n_pos],
        &outcome.test_scores[n_pos..],
    )?;
    outcome.model.save(&args.out)?;
    if let Some(history_path) = &args.history {
        let mut csv = String::from("epoch,train_loss,test_auc\n");
        for s in &outcome.history {
            csv.push_str(&format!("{},{},{}\n", s.epoch, s.train_loss, s.test_auc));
        }
        std::fs::write(history_path, csv)?;
    }
    println!(
        "trained {} epochs; test AUC {:.4}, AP {:.4}; checkpoint -> {}",
        tcfg.epochs,
        eval.auc,
        eval.ap,
        args.out.display()
    );
    if outcome.cap_hits > 0 {
        println!("note: subgraph cap fired for {} samples", outcome.cap_hits);
    }
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> lglp::Result<()> {
    let (graph, _) = args.dataset.spec().load()?;
    let split = obtain_split(&graph, args.split.as_ref(), args.common.train_frac, args.common.seed)?;
    let pairs: Vec<(usize, usize)> = split
        .test_pos
        .iter()
        .chain(&split.test_neg)
        .map(LinkSample::pair)
        .collect();
    let scores = with_pool(args.common.workers, args.common.deterministic, || {
        match args.method {
            Method::Lglp => {
                let path = args.model.as_ref().ok_or_else(|| {
                    Error::config("--model is required when evaluating method 'lglp'")
                })?;
                let model = LglpModel::load(path)?;
                model.predict(&split.observed, &pairs, args.common.hops)
            }
            Method::Katz => {
                heuristics::katz_scores(&split.observed, &pairs, &HeuristicConfig::default())
            }
            Method::Pagerank => heuristics::rooted_pagerank_scores(
                &split.observed,
                &pairs,
                &HeuristicConfig::default(),
            ),
            Method::Simrank => {
                heuristics::simrank_scores(&split.observed, &pairs, &HeuristicConfig::default())
            }
        }
    })?;
    let n_pos = split.test_pos.len();
    let eval = evaluate(&scores[..n_pos], &scores[n_pos..])?;
    println!(
        "{}: AUC {:.4}, AP {:.4} over {} pos / {} neg",
        args.method, eval.auc, eval.ap, eval.n_pos, eval.n_neg
    );
    if let Some(out) = &args.scores {
        std::fs::write(out, heuristics::scores_csv(&pairs, &scores, args.method.name()))?;
        println!("scores -> {}", out.display());
    }
    Ok(())
}

fn benchmark_config(args: &BenchmarkArgs) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(args.dataset.spec(), args.method);
    cfg.train_frac = args.common.train_frac;
    cfg.repeats = args.repeats;
    cfg.hops = args.common.hops;
    cfg.seed = args.common.seed;
    cfg.model = ModelConfig {
        label_cap: args.common.label_cap,
        ..ModelConfig::default()
    };
    cfg.train = TrainConfig {
        epochs: args.epochs,
        batch_size: args.batch_size,
        lr: args.lr,
        max_subgraph_nodes: args.common.max_subgraph_nodes,
        ..TrainConfig::default()
    };
    cfg.workers = args.common.workers;
    cfg.deterministic = args.common.deterministic;
    cfg
}

fn cmd_benchmark(args: BenchmarkArgs) -> lglp::Result<()> {
    let cfg = benchmark_config(&args);
    let report = experiment::run(&cfg)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    for r in &report.repeats {
        println!(
            "repeat {:>2}: AUC {:.4}, AP {:.4} ({:.1}s)",
            r.repeat, r.eval.auc, r.eval.ap, r.seconds
        );
    }
    println!(
        "{} on {} nodes / {} edges: AUC {:.2} (±{:.2}), AP {:.2} (±{:.2}) over {} repeats",
        cfg.method,
        report.dataset.nodes,
        report.dataset.edges,
        100.0 * report.auc_mean,
        100.0 * report.auc_std,
        100.0 * report.ap_mean,
        100.0 * report.ap_std,
        cfg.repeats
    );
    if let Some(history_path) = &args.history {
        std::fs::write(history_path, history_csv(&report)?)?;
        println!("history -> {}", history_path.display());
    }
    if let Some(out) = &args.out {
        std::fs::write(out, serde_json::to_string_pretty(&report)?)?;
        println!("report -> {}", out.display());
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> lglp::Result<()> {
    let fractions: Vec<f64> = args
        .fractions
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::config(format!("bad fraction '{t}'")))
        })
        .collect::<lglp::Result<_>>()?;
    let cfg = benchmark_config(&args.bench);
    let reports = experiment::sweep(&cfg, &fractions)?;
    std::fs::create_dir_all(&args.out_dir)?;
    for report in &reports {
        let path = args
            .out_dir
            .join(format!("report_{:.2}.json", report.config.train_frac));
        std::fs::write(&path, serde_json::to_string_pretty(report)?)?;
        println!(
            "fraction {:.2}: AUC {:.2} (±{:.2}) -> {}",
            report.config.train_frac,
            100.0 * report.auc_mean,
            100.0 * report.auc_std,
            path.display()
        );
    }
    let summary = args.out_dir.join("sweep_summary.csv");
    std::fs::write(&summary, sweep_summary_csv(&reports))?;
    println!("summary -> {}", summary.display());
    Ok(())
}

fn cmd_split(cmd: SplitCommand) -> lglp::Result<()> {
    match cmd {
        SplitCommand::Dump {
            dataset,
            train_frac,
            seed,
            out,
        } => {
            let (graph, _) = dataset.spec().load()?;
            let split = split_links(&graph, train_frac, seed)?;
            split.save(&out)?;
            println!(
                "split: {} train pos, {} test pos, seed {} -> {}",
                split.train_pos.len(),
                split.test_pos.len(),
                seed,
                out.display()
            );
            Ok(())
        }
        SplitCommand::Load { dataset, split } => {
            let (graph, _) = dataset.spec().load()?;
            let loaded = DataSplit::load(&split, &graph)?;
            println!(
                "split seed {} frac {}: {} train pos, {} train neg, {} test pos, {} test neg, fingerprint {:016x}",
                loaded.seed,
                loaded.train_frac,
                loaded.train_pos.len(),
                loaded.train_neg.len(),
                loaded.test_pos.len(),
                loaded.test_neg.len(),
                loaded.fingerprint()
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(args) => cmd_train(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Benchmark(args) => cmd_benchmark(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Split(cmd) => cmd_split(cmd),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_data_error() {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
