//! Benchmark runner: dataset ingestion, the repeat-and-average protocol over
//! splits, fraction sweeps, and report emission.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{load_graph, Graph};
use crate::heuristics::{self, HeuristicConfig};
use crate::metrics::{evaluate, EvalResult};
use crate::model::{train, EpochStats, ModelConfig, TrainConfig};
use crate::split::{split_links, LinkSample};
use crate::synthetic;

/// Scoring method under benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Lglp,
    Katz,
    Pagerank,
    Simrank,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Lglp => "lglp",
            Method::Katz => "katz",
            Method::Pagerank => "pagerank",
            Method::Simrank => "simrank",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Method> {
        match s {
            "lglp" => Ok(Method::Lglp),
            "katz" => Ok(Method::Katz),
            "pagerank" | "pr" => Ok(Method::Pagerank),
            "simrank" | "sr" => Ok(Method::Simrank),
            other => Err(Error::config(format!(
                "unknown method '{other}' (expected lglp, katz, pagerank, or simrank)"
            ))),
        }
    }
}

/// Where the graph comes from: an edge-list file (optionally with a node
/// attribute file) or a synthetic generator spec like `pp:200:10:0.5:0.002:7`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub enum DatasetSpec {
    File {
        edges: PathBuf,
        attrs: Option<PathBuf>,
    },
    Synthetic(String),
}

impl DatasetSpec {
    /// Parses a CLI dataset argument: strings starting with a generator
    /// prefix (`er:`, `gnm:`, `ba:`, `pp:`) are synthetic, anything else is
    /// an edge-list path.
    pub fn parse(arg: &str, attrs: Option<PathBuf>) -> DatasetSpec {
        let synthetic_prefix = ["er:", "gnm:", "ba:", "pp:"]
            .iter()
            .any(|p| arg.starts_with(p));
        if synthetic_prefix {
            DatasetSpec::Synthetic(arg.to_string())
        } else {
            DatasetSpec::File {
                edges: PathBuf::from(arg),
                attrs,
            }
        }
    }

    /// Loads the graph; file datasets also return their id remapping table.
    pub fn load(&self) -> Result<(Graph, Option<Vec<u64>>)> {
        match self {
            DatasetSpec::File { edges, attrs } => {
                let (g, id_map) = load_graph(edges, attrs.as_deref())?;
                Ok((g, Some(id_map)))
            }
            DatasetSpec::Synthetic(spec) => Ok((synthetic::from_spec(spec)?, None)),
        }
    }
}

/// Full description of one benchmark run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dataset: DatasetSpec,
    pub method: Method,
    pub train_frac: f64,
    pub repeats: usize,
    pub hops: u32,
    pub seed: u64,
    pub model: ModelConfig,
    pub train: TrainConfig,
    pub heuristics: HeuristicConfig,
    /// Caps rayon parallelism for this run; `None` uses the global pool.
    pub workers: Option<usize>,
    /// Forces single-worker execution everywhere.
    pub deterministic: bool,
}

impl ExperimentConfig {
    pub fn new(dataset: DatasetSpec, method: Method) -> ExperimentConfig {
        ExperimentConfig {
            dataset,
            method,
            train_frac: 0.8,
            repeats: 10,
            hops: 2,
            seed: 1,
            model: ModelConfig::default(),
            train: TrainConfig::default(),
            heuristics: HeuristicConfig::default(),
            workers: None,
            deterministic: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.repeats == 0 {
            return Err(Error::config("repeats must be at least 1"));
        }
        self.model.validate()?;
        self.train.validate()?;
        self.heuristics.validate()?;
        Ok(())
    }
}

/// Identifies the exact graph a report was computed on.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DatasetFingerprint {
    pub nodes: usize,
    pub edges: usize,
    pub hash: String,
    /// Stable original-id remapping table for file datasets (index = dense
    /// id), kept so splits can be reproduced against the raw files.
    pub id_map: Option<Vec<u64>>,
}

impl DatasetFingerprint {
    fn of(g: &Graph, id_map: Option<Vec<u64>>) -> DatasetFingerprint {
        DatasetFingerprint {
            nodes: g.num_nodes(),
            edges: g.num_edges(),
            hash: format!("{:016x}", g.fingerprint()),
            id_map,
        }
    }
}

/// One repeat of the protocol.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepeatOutcome {
    pub repeat: usize,
    pub split_seed: u64,
    pub model_seed: Option<u64>,
    pub split_fingerprint: String,
    pub eval: EvalResult,
    pub cap_hits: usize,
    pub seconds: f64,
    pub history: Option<Vec<EpochStats>>,
}

/// Aggregated benchmark report; serialized as the run's JSON output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub config: ExperimentConfig,
    pub dataset: DatasetFingerprint,
    pub repeats: Vec<RepeatOutcome>,
    pub auc_mean: f64,
    /// Population standard deviation over repeats.
    pub auc_std: f64,
    pub ap_mean: f64,
    pub ap_std: f64,
    pub warnings: Vec<String>,
    pub wall_clock_seconds: f64,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn run_one_repeat(
    g: &Graph,
    cfg: &ExperimentConfig,
    repeat: usize,
) -> Result<RepeatOutcome> {
    let started = Instant::now();
    let split_seed = cfg.seed + repeat as u64;
    let split = split_links(g, cfg.train_frac, split_seed)?;
    let pairs: Vec<(usize, usize)> = split
        .test_pos
        .iter()
        .chain(&split.test_neg)
        .map(LinkSample::pair)
        .collect();
    let n_pos = split.test_pos.len();

    let (eval, model_seed, history, cap_hits) = match cfg.method {
        Method::Lglp => {
            // Split and init randomness are decorrelated but both derived
            // from the run seed.
            let model_seed = cfg.seed + 1000 + repeat as u64;
            let tcfg = TrainConfig {
                seed: model_seed,
                hops: cfg.hops,
                ..cfg.train.clone()
            };
            let outcome = train(&split, &cfg.model, &tcfg)?;
            let eval = evaluate(
                &outcome.test_scores[..n_pos],
                &outcome.test_scores[n_pos..],
            )?;
            (eval, Some(model_seed), Some(outcome.history), outcome.cap_hits)
        }
        Method::Katz => {
            let scores = heuristics::katz_scores(&split.observed, &pairs, &cfg.heuristics)?;
            (evaluate(&scores[..n_pos], &scores[n_pos..])?, None, None, 0)
        }
        Method::Pagerank => {
            let scores =
                heuristics::rooted_pagerank_scores(&split.observed, &pairs, &cfg.heuristics)?;
            (evaluate(&scores[..n_pos], &scores[n_pos..])?, None, None, 0)
        }
        Method::Simrank => {
            let scores = heuristics::simrank_scores(&split.observed, &pairs, &cfg.heuristics)?;
            (evaluate(&scores[..n_pos], &scores[n_pos..])?, None, None, 0)
        }
    };

    Ok(RepeatOutcome {
        repeat,
        split_seed,
        model_seed,
        split_fingerprint: format!("{:016x}", split.fingerprint()),
        eval,
        cap_hits,
        seconds: started.elapsed().as_secs_f64(),
        history,
    })
}

fn run_body(cfg: &ExperimentConfig) -> Result<Report> {
    let started = Instant::now();
    let (g, id_map) = cfg.dataset.load()?;
    let mut warnings = Vec::new();
    if matches!(cfg.method, Method::Katz) && cfg.heuristics.katz_divergence_risk(&g) {
        warnings.push(format!(
            "katz_beta {} times the maximum degree reaches 1; the walk series may diverge",
            cfg.heuristics.katz_beta
        ));
    }

    let outcomes: Vec<Result<RepeatOutcome>> = (0..cfg.repeats)
        .into_par_iter()
        .map(|i| run_one_repeat(&g, cfg, i))
        .collect();
    let repeats: Vec<RepeatOutcome> = outcomes.into_iter().collect::<Result<_>>()?;

    let aucs: Vec<f64> = repeats.iter().map(|r| r.eval.auc).collect();
    let aps: Vec<f64> = repeats.iter().map(|r| r.eval.ap).collect();
    let (auc_mean, auc_std) = mean_std(&aucs);
    let (ap_mean, ap_std) = mean_std(&aps);

    Ok(Report {
        config: cfg.clone(),
        dataset: DatasetFingerprint::of(&g, id_map),
        repeats,
        auc_mean,
        auc_std,
        ap_mean,
        ap_std,
        warnings,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    })
}

/// Runs the full protocol: one split + score + evaluation per repeat, then
/// mean and standard deviation over repeats.
pub fn run(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let workers = if cfg.deterministic { Some(1) } else { cfg.workers };
    match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::config(format!("cannot build worker pool: {e}")))?
            .install(|| run_body(cfg)),
        None => run_body(cfg),
    }
}

/// Runs the protocol once per training fraction.
pub fn sweep(cfg: &ExperimentConfig, fractions: &[f64]) -> Result<Vec<Report>> {
    if fractions.is_empty() {
        return Err(Error::EmptyFractions);
    }
    let mut reports = Vec::with_capacity(fractions.len());
    for &frac in fractions {
        let mut sub = cfg.clone();
        sub.train_frac = frac;
        reports.push(run(&sub)?);
    }
    Ok(reports)
}

/// Summary CSV over a sweep: one row per fraction.
pub fn sweep_summary_csv(reports: &[Report]) -> String {
    use std::fmt::Write as _;
    let mut out = String::from("fraction,mean_auc,std_auc,mean_ap,std_ap\n");
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.config.train_frac, r.auc_mean, r.auc_std, r.ap_mean, r.ap_std
        );
    }
    out
}

/// Per-epoch convergence CSV `(epoch, train_loss, test_auc)` averaged over
/// the report's repeats. Only model runs carry histories.
pub fn history_csv(report: &Report) -> Result<String> {
    use std::fmt::Write as _;
    let histories: Vec<&Vec<EpochStats>> = report
        .repeats
        .iter()
        .filter_map(|r| r.history.as_ref())
        .collect();
    if histories.is_empty() {
        return Err(Error::config(format!(
            "report for method '{}' has no training history",
            report.config.method
        )));
    }
    let epochs = histories[0].len();
    let mut out = String::from("epoch,train_loss,test_auc\n");
    for e in 0..epochs {
        let loss =
            histories.iter().map(|h| h[e].train_loss).sum::<f64>() / histories.len() as f64;
        let auc = histories.iter().map(|h| h[e].test_auc).sum::<f64>() / histories.len() as f64;
        let _ = writeln!(out, "{},{},{}", e + 1, loss, auc);
    }
    Ok(out)
}
