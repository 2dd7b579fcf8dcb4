//! The line-graph link-prediction network: K graph-convolution layers on the
//! line graph, multi-scale readout of the target node, a small classifier
//! head, the training loop, and per-pair scoring.

use std::path::Path;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linegraph::{to_line_graph, LineGraph};
use crate::metrics;
use crate::split::{DataSplit, LinkSample};
use crate::subgraph::{drnl_label, extract_enclosing_capped, EnclosingSubgraph, TARGET_LOCAL};
use crate::tensor::{
    adam_step, positive_probability, softmax_cross_entropy, AdamConfig, Matrix, Param, Tape, Var,
};

/// Architecture hyperparameters.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ModelConfig {
    /// Number of graph-convolution layers.
    pub num_layers: usize,
    /// Output channels of every convolution layer.
    pub channels: usize,
    /// DRNL label cap; one-hot width per endpoint label.
    pub label_cap: u32,
    /// Hidden width of the classifier head.
    pub mlp_hidden: usize,
    /// Dropout rate on the head's hidden layer (training only).
    pub dropout: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            num_layers: 3,
            channels: 32,
            label_cap: 32,
            mlp_hidden: 128,
            dropout: 0.5,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_layers == 0 {
            return Err(Error::config("need at least one convolution layer"));
        }
        if self.channels == 0 || self.mlp_hidden == 0 {
            return Err(Error::config("channel and hidden widths must be positive"));
        }
        if self.label_cap < 2 || self.label_cap > u32::from(u16::MAX) {
            return Err(Error::config("label cap must lie in [2, 65535]"));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::config("dropout must lie in [0, 1)"));
        }
        Ok(())
    }

    /// Line-graph attribute width this model consumes: two one-hot labels
    /// plus the node-attribute dimension.
    pub fn input_dim(&self, attr_dim: usize) -> usize {
        2 * self.label_cap as usize + attr_dim
    }
}

/// Training hyperparameters, including how training samples are extracted.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub seed: u64,
    /// Enclosing-subgraph hop radius.
    pub hops: u32,
    /// Optional cap on subgraph nodes (outermost hop down-sampled).
    pub max_subgraph_nodes: Option<usize>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 15,
            batch_size: 50,
            lr: 1e-4,
            seed: 0,
            hops: 2,
            max_subgraph_nodes: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::config("epochs must be at least 1"));
        }
        if self.batch_size == 0 {
            return Err(Error::config("batch size must be at least 1"));
        }
        if self.lr <= 0.0 {
            return Err(Error::BadLearningRate(self.lr));
        }
        if self.hops == 0 {
            return Err(Error::config("hop radius must be at least 1"));
        }
        Ok(())
    }
}

/// How a forward pass walks the line graph.
enum AggregateRoute {
    /// Explicit line-graph adjacency.
    Adjacency {
        adj: Arc<Vec<Vec<usize>>>,
        beta: Arc<Vec<f64>>,
    },
    /// Incidence form: line-graph neighbors are edges sharing an endpoint.
    /// Avoids materializing the line-graph adjacency entirely.
    Incidence {
        endpoints: Arc<Vec<(u32, u32)>>,
        num_points: usize,
        beta: Arc<Vec<f64>>,
    },
}

/// A sample ready for the model: line-graph structure in incidence form plus
/// the label-pair / attribute data needed to materialize the input matrix.
pub struct PreparedSample {
    endpoints: Arc<Vec<(u32, u32)>>,
    num_points: usize,
    beta: Arc<Vec<f64>>,
    target_index: usize,
    /// Per line-graph node: (min, max) of the two endpoint labels.
    label_pairs: Vec<(u16, u16)>,
    /// Per line-graph node: summed endpoint attribute rows, row-major.
    attr_sums: Option<Vec<f64>>,
    attr_dim: usize,
    pub label: u8,
}

impl PreparedSample {
    pub fn num_line_nodes(&self) -> usize {
        self.endpoints.len()
    }

    /// Builds the prepared form of a labeled enclosing subgraph with the
    /// target edge injected. Equivalent to running
    /// [`to_line_graph`](crate::linegraph::to_line_graph) and keeping only
    /// what the model needs, but skips the quadratic adjacency construction.
    pub fn from_subgraph(sub: &EnclosingSubgraph, label: u8) -> Result<PreparedSample> {
        if !sub.is_labeled() {
            return Err(Error::UnlabeledSubgraph);
        }
        let k = sub.num_nodes();
        let mut aug: Vec<(usize, usize)> = sub.local.edges().collect();
        aug.push(TARGET_LOCAL);
        aug.sort_unstable();
        let target_index = aug
            .binary_search(&TARGET_LOCAL)
            .expect("target edge injected");

        let mut aug_deg: Vec<u32> = (0..k).map(|v| sub.local.degree(v) as u32).collect();
        aug_deg[TARGET_LOCAL.0] += 1;
        aug_deg[TARGET_LOCAL.1] += 1;

        let endpoints: Vec<(u32, u32)> = aug.iter().map(|&(a, b)| (a as u32, b as u32)).collect();
        let beta: Vec<f64> = aug
            .iter()
            .map(|&(a, b)| {
                let lg_degree = aug_deg[a] + aug_deg[b] - 2;
                1.0 / (1.0 + f64::from(lg_degree))
            })
            .collect();
        let label_pairs: Vec<(u16, u16)> = aug
            .iter()
            .map(|&(a, b)| {
                let (fa, fb) = (sub.labels[a], sub.labels[b]);
                (fa.min(fb) as u16, fa.max(fb) as u16)
            })
            .collect();
        let (attr_sums, attr_dim) = match &sub.attrs {
            Some(rows) => {
                let dim = rows[0].len();
                let mut sums = Vec::with_capacity(aug.len() * dim);
                for &(a, b) in &aug {
                    for j in 0..dim {
                        sums.push(rows[a][j] + rows[b][j]);
                    }
                }
                (Some(sums), dim)
            }
            None => (None, 0),
        };

        Ok(PreparedSample {
            endpoints: Arc::new(endpoints),
            num_points: k,
            beta: Arc::new(beta),
            target_index,
            label_pairs,
            attr_sums,
            attr_dim,
            label,
        })
    }

    /// Materializes the dense input matrix (two-hot labels plus attribute
    /// sums) at a given label cap.
    fn input_matrix(&self, label_cap: u32) -> Result<Matrix> {
        let cap = label_cap as usize;
        let width = 2 * cap + self.attr_dim;
        let n = self.num_line_nodes();
        let mut x = Matrix::zeros(n, width);
        for (e, &(lo, hi)) in self.label_pairs.iter().enumerate() {
            if u32::from(hi) >= label_cap {
                return Err(Error::LabelOutOfRange {
                    label: u32::from(hi),
                    cap: label_cap,
                });
            }
            let row = x.row_mut(e);
            row[lo as usize] = 1.0;
            row[cap + hi as usize] = 1.0;
        }
        if let Some(sums) = &self.attr_sums {
            for e in 0..n {
                let row = x.row_mut(e);
                row[2 * cap..].copy_from_slice(&sums[e * self.attr_dim..(e + 1) * self.attr_dim]);
            }
        }
        Ok(x)
    }

    fn route(&self) -> AggregateRoute {
        AggregateRoute::Incidence {
            endpoints: Arc::clone(&self.endpoints),
            num_points: self.num_points,
            beta: Arc::clone(&self.beta),
        }
    }
}

/// Extracts, labels, and prepares one candidate pair against the observed
/// graph. Returns the sample and whether the subgraph cap fired.
pub fn prepare_sample(
    observed: &Graph,
    sample: LinkSample,
    hops: u32,
    label_cap: u32,
    max_subgraph_nodes: Option<usize>,
    extraction_seed: u64,
) -> Result<(PreparedSample, bool)> {
    let (sub, cap_hit) = extract_enclosing_capped(
        observed,
        sample.u,
        sample.v,
        hops,
        max_subgraph_nodes,
        extraction_seed,
    )?;
    let sub = drnl_label(sub, label_cap);
    Ok((PreparedSample::from_subgraph(&sub, sample.label)?, cap_hit))
}

/// Trained weights: one matrix per convolution layer plus a two-layer head.
pub struct LglpModel {
    pub config: ModelConfig,
    pub attr_dim: usize,
    /// Seed the weights were initialized from; checkpoint metadata.
    pub init_seed: u64,
    params: Vec<Param>,
}

/// Per-epoch training trace.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_loss: f64,
    pub test_auc: f64,
}

/// Everything `train` produces.
pub struct TrainOutcome {
    pub model: LglpModel,
    pub history: Vec<EpochStats>,
    /// Final-model scores for the test samples, positives first then
    /// negatives, in split order.
    pub test_scores: Vec<f64>,
    /// How many sample extractions hit the subgraph node cap.
    pub cap_hits: usize,
}

impl LglpModel {
    /// Fresh model with Glorot-initialized convolution and head weights.
    pub fn new(config: &ModelConfig, attr_dim: usize, seed: u64) -> Result<LglpModel> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut params = Vec::new();
        let input_dim = config.input_dim(attr_dim);
        for k in 0..config.num_layers {
            let fan_in = if k == 0 { input_dim } else { config.channels };
            params.push(Param::glorot(
                format!("conv{k}"),
                fan_in,
                config.channels,
                &mut rng,
            ));
        }
        let readout = config.num_layers * config.channels;
        params.push(Param::glorot(
            "head_w1",
            readout,
            config.mlp_hidden,
            &mut rng,
        ));
        params.push(Param::new("head_b1", Matrix::zeros(1, config.mlp_hidden)));
        params.push(Param::glorot("head_w2", config.mlp_hidden, 2, &mut rng));
        params.push(Param::new("head_b2", Matrix::zeros(1, 2)));
        Ok(LglpModel {
            config: config.clone(),
            attr_dim,
            init_seed: seed,
            params,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.config.input_dim(self.attr_dim)
    }

    pub fn params(&self) -> &[Param] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [Param] {
        &mut self.params
    }

    /// Records the full forward pass on a tape. Returns the logits variable
    /// and the tape variables holding each parameter, in parameter order.
    fn forward_on_tape(
        &self,
        tape: &mut Tape,
        x: Var,
        route: &AggregateRoute,
        target_index: usize,
        dropout_mask: Option<Arc<Vec<f64>>>,
    ) -> Result<(Var, Vec<Var>)> {
        let k = self.config.num_layers;
        let param_vars: Vec<Var> = self
            .params
            .iter()
            .map(|p| tape.leaf(p.value.clone()))
            .collect();

        let mut z = x;
        let mut readouts: Vec<Var> = Vec::with_capacity(k);
        for layer in 0..k {
            let agg = match route {
                AggregateRoute::Adjacency { adj, beta } => {
                    tape.aggregate(z, Arc::clone(adj), Arc::clone(beta))?
                }
                AggregateRoute::Incidence {
                    endpoints,
                    num_points,
                    beta,
                } => tape.edge_aggregate(z, Arc::clone(endpoints), *num_points, Arc::clone(beta))?,
            };
            let lin = tape.matmul(agg, param_vars[layer])?;
            z = tape.tanh(lin)?;
            readouts.push(tape.row_gather(z, vec![target_index])?);
        }
        let mut readout = readouts[0];
        for &r in &readouts[1..] {
            readout = tape.concat_cols(readout, r)?;
        }
        let (w1, b1, w2, b2) = (
            param_vars[k],
            param_vars[k + 1],
            param_vars[k + 2],
            param_vars[k + 3],
        );
        let pre = tape.matmul(readout, w1)?;
        let pre = tape.add(pre, b1)?;
        let mut hidden = tape.relu(pre)?;
        if let Some(mask) = dropout_mask {
            hidden = tape.mul_mask(hidden, mask)?;
        }
        let out = tape.matmul(hidden, w2)?;
        let logits = tape.add(out, b2)?;
        Ok((logits, param_vars))
    }

    /// Forward pass over an explicit line graph; returns the two logits for
    /// its target node. Evaluation mode (no dropout).
    pub fn forward(&self, lg: &LineGraph) -> Result<[f64; 2]> {
        if lg.attr_width() != self.input_dim() {
            return Err(Error::WidthMismatch {
                got: lg.attr_width(),
                expected: self.input_dim(),
            });
        }
        let n = lg.num_nodes();
        let adj: Vec<Vec<usize>> = (0..n).map(|v| lg.graph.neighbors(v).to_vec()).collect();
        let beta: Vec<f64> = (0..n).map(|v| 1.0 / (1.0 + lg.graph.degree(v) as f64)).collect();
        let route = AggregateRoute::Adjacency {
            adj: Arc::new(adj),
            beta: Arc::new(beta),
        };
        let mut tape = Tape::new();
        let x = tape.leaf(lg.node_attrs.clone());
        let (logits, _) = self.forward_on_tape(&mut tape, x, &route, lg.target_index, None)?;
        let row = tape.value(logits).row(0);
        Ok([row[0], row[1]])
    }

    /// Softmax probability that the line graph's target link exists.
    pub fn score(&self, lg: &LineGraph) -> Result<f64> {
        Ok(positive_probability(&self.forward(lg)?))
    }

    /// Evaluation-mode forward for a prepared sample.
    pub fn score_prepared(&self, sample: &PreparedSample) -> Result<f64> {
        let mut tape = Tape::new();
        let x = tape.leaf(sample.input_matrix(self.config.label_cap)?);
        let (logits, _) =
            self.forward_on_tape(&mut tape, x, &sample.route(), sample.target_index, None)?;
        let row = tape.value(logits).row(0);
        Ok(positive_probability(&[row[0], row[1]]))
    }

    /// Evaluation-mode mean cross-entropy over prepared samples.
    pub fn batch_loss(&self, samples: &[PreparedSample]) -> Result<f64> {
        if samples.is_empty() {
            return Err(Error::EmptyBatch);
        }
        let mut total = 0.0;
        for s in samples {
            let (loss, _) = self.sample_pass(s, None)?;
            total += loss;
        }
        Ok(total / samples.len() as f64)
    }

    /// Evaluation-mode mean loss and its analytic parameter gradients over
    /// prepared samples.
    pub fn batch_loss_and_grad(&self, samples: &[PreparedSample]) -> Result<(f64, Vec<Matrix>)> {
        if samples.is_empty() {
            return Err(Error::EmptyBatch);
        }
        let mut grads: Vec<Matrix> = self
            .params
            .iter()
            .map(|p| Matrix::zeros(p.value.rows(), p.value.cols()))
            .collect();
        let mut total = 0.0;
        let scale = 1.0 / samples.len() as f64;
        for s in samples {
            let (loss, sample_grads) = self.sample_pass(s, None)?;
            total += loss * scale;
            for (acc, g) in grads.iter_mut().zip(sample_grads) {
                if let Some(mut g) = g {
                    g.scale_assign(scale);
                    acc.add_assign(&g)?;
                }
            }
        }
        Ok((total, grads))
    }

    /// One forward/backward pass for a single sample. Returns the sample's
    /// cross-entropy loss and the per-parameter gradient contributions
    /// (unscaled; `None` where the loss did not touch a parameter).
    fn sample_pass(
        &self,
        sample: &PreparedSample,
        dropout_mask: Option<Arc<Vec<f64>>>,
    ) -> Result<(f64, Vec<Option<Matrix>>)> {
        let mut tape = Tape::new();
        let x = tape.leaf(sample.input_matrix(self.config.label_cap)?);
        let (logits, param_vars) = self.forward_on_tape(
            &mut tape,
            x,
            &sample.route(),
            sample.target_index,
            dropout_mask,
        )?;
        let (loss, dlogits) = softmax_cross_entropy(tape.value(logits), &[sample.label])?;
        let mut grads = tape.backward(logits, dlogits)?;
        let out = param_vars.iter().map(|&v| grads.take(v)).collect();
        Ok((loss, out))
    }

    /// Scores arbitrary candidate pairs against an observed graph by running
    /// the full pipeline per pair: extract, label, transform, forward.
    /// Scores are symmetric in the pair order by canonicalization.
    pub fn predict(&self, observed: &Graph, pairs: &[(usize, usize)], hops: u32) -> Result<Vec<f64>> {
        for &(u, v) in pairs {
            if u == v {
                return Err(Error::IdenticalEndpoints(u));
            }
        }
        pairs
            .par_iter()
            .map(|&(u, v)| {
                let (a, b) = (u.min(v), u.max(v));
                let sub = crate::subgraph::extract_enclosing(observed, a, b, hops)?;
                let sub = drnl_label(sub, self.config.label_cap);
                let lg = to_line_graph(&sub, self.config.label_cap)?;
                self.score(&lg)
            })
            .collect::<Vec<Result<f64>>>()
            .into_iter()
            .collect()
    }

    /// Writes all parameters and the architecture to a JSON checkpoint.
    /// `f64` values round-trip exactly.
    pub fn save(&self, path: &Path) -> Result<()> {
        let file = Checkpoint {
            format_version: 1,
            config: self.config.clone(),
            attr_dim: self.attr_dim,
            init_seed: self.init_seed,
            params: self
                .params
                .iter()
                .map(|p| SavedParam {
                    name: p.name.clone(),
                    rows: p.value.rows(),
                    cols: p.value.cols(),
                    data: p.value.data().to_vec(),
                })
                .collect(),
        };
        std::fs::write(path, serde_json::to_string(&file)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<LglpModel> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Data {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        let file: Checkpoint = serde_json::from_str(&text).map_err(|e| Error::Data {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        let mut model = LglpModel::new(&file.config, file.attr_dim, file.init_seed)?;
        if file.params.len() != model.params.len() {
            return Err(Error::Data {
                path: path.display().to_string(),
                msg: format!(
                    "checkpoint has {} parameters, architecture needs {}",
                    file.params.len(),
                    model.params.len()
                ),
            });
        }
        for (slot, saved) in model.params.iter_mut().zip(file.params) {
            let value = Matrix::from_vec(saved.rows, saved.cols, saved.data)?;
            if !value.same_shape(&slot.value) {
                return Err(Error::Data {
                    path: path.display().to_string(),
                    msg: format!("parameter {} has wrong shape", saved.name),
                });
            }
            *slot = Param::new(saved.name, value);
        }
        Ok(model)
    }
}

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    format_version: u32,
    config: ModelConfig,
    attr_dim: usize,
    init_seed: u64,
    params: Vec<SavedParam>,
}

#[derive(Serialize, Deserialize)]
struct SavedParam {
    name: String,
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Deterministic per-sample extraction seed from the train seed and pair.
fn extraction_seed(seed: u64, s: LinkSample) -> u64 {
    splitmix64(seed ^ splitmix64((s.u as u64) << 32 | s.v as u64))
}

/// Deterministic per-slot dropout seed: independent of worker count.
fn dropout_seed(seed: u64, epoch: usize, slot: usize) -> u64 {
    splitmix64(seed ^ splitmix64(((epoch as u64) << 40) ^ slot as u64 ^ 0xD12))
}

fn make_dropout_mask(width: usize, rate: f64, seed: u64) -> Arc<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let keep = 1.0 - rate;
    let mask = (0..width)
        .map(|_| if rng.gen::<f64>() < keep { 1.0 / keep } else { 0.0 })
        .collect();
    Arc::new(mask)
}

/// Extracts and prepares every train/test sample (in parallel), then runs
/// mini-batch Adam for the configured number of epochs. Test AUC is recorded
/// after every epoch.
///
/// Deterministic for a fixed `(split, configs)` regardless of worker count:
/// batch gradients reduce in sample order and dropout masks derive from the
/// sample's slot in the shuffled epoch order.
pub fn train(split: &DataSplit, mcfg: &ModelConfig, tcfg: &TrainConfig) -> Result<TrainOutcome> {
    mcfg.validate()?;
    tcfg.validate()?;
    if split.train_pos.is_empty() || split.train_neg.is_empty() {
        return Err(Error::SingleClass);
    }
    if split.test_pos.is_empty() || split.test_neg.is_empty() {
        return Err(Error::EmptyRankingSide {
            n_pos: split.test_pos.len(),
            n_neg: split.test_neg.len(),
        });
    }

    let observed = &split.observed;
    let mut model = LglpModel::new(mcfg, observed.attr_dim(), tcfg.seed)?;

    let train_samples: Vec<LinkSample> = split
        .train_pos
        .iter()
        .chain(&split.train_neg)
        .copied()
        .collect();
    let test_samples: Vec<LinkSample> = split
        .test_pos
        .iter()
        .chain(&split.test_neg)
        .copied()
        .collect();

    let prepare_all = |samples: &[LinkSample]| -> Result<(Vec<PreparedSample>, usize)> {
        let prepared: Vec<Result<(PreparedSample, bool)>> = samples
            .par_iter()
            .map(|&s| {
                prepare_sample(
                    observed,
                    s,
                    tcfg.hops,
                    mcfg.label_cap,
                    tcfg.max_subgraph_nodes,
                    extraction_seed(tcfg.seed, s),
                )
            })
            .collect();
        let mut out = Vec::with_capacity(samples.len());
        let mut cap_hits = 0;
        for r in prepared {
            let (p, hit) = r?;
            cap_hits += usize::from(hit);
            out.push(p);
        }
        Ok((out, cap_hits))
    };
    let (train_prepared, train_cap_hits) = prepare_all(&train_samples)?;
    let (test_prepared, test_cap_hits) = prepare_all(&test_samples)?;

    let n_train = train_prepared.len();
    let n_test_pos = split.test_pos.len();
    let adam = AdamConfig {
        lr: tcfg.lr,
        ..AdamConfig::default()
    };
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(splitmix64(tcfg.seed ^ 0x5EED));
    let mut history = Vec::with_capacity(tcfg.epochs);
    let mut final_scores = Vec::new();

    for epoch in 0..tcfg.epochs {
        let mut order: Vec<usize> = (0..n_train).collect();
        order.shuffle(&mut shuffle_rng);

        let mut epoch_loss_sum = 0.0;
        for (batch_idx, batch) in order.chunks(tcfg.batch_size).enumerate() {
            let batch_base = batch_idx * tcfg.batch_size;
            let passes: Vec<Result<(f64, Vec<Option<Matrix>>)>> = batch
                .par_iter()
                .enumerate()
                .map(|(pos_in_batch, &sample_idx)| {
                    let sample = &train_prepared[sample_idx];
                    let mask = if mcfg.dropout > 0.0 {
                        Some(make_dropout_mask(
                            mcfg.mlp_hidden,
                            mcfg.dropout,
                            dropout_seed(tcfg.seed, epoch, batch_base + pos_in_batch),
                        ))
                    } else {
                        None
                    };
                    model.sample_pass(sample, mask)
                })
                .collect();

            let scale = 1.0 / batch.len() as f64;
            for pass in passes {
                let (loss, grads) = pass?;
                epoch_loss_sum += loss;
                for (param, grad) in model.params.iter_mut().zip(grads) {
                    if let Some(mut g) = grad {
                        g.scale_assign(scale);
                        param.grad.add_assign(&g)?;
                    }
                }
            }
            adam_step(&mut model.params, &adam)?;
        }
        let train_loss = epoch_loss_sum / n_train as f64;

        let scores: Vec<f64> = test_prepared
            .par_iter()
            .map(|s| model.score_prepared(s))
            .collect::<Vec<Result<f64>>>()
            .into_iter()
            .collect::<Result<Vec<f64>>>()?;
        let test_auc = metrics::auc(&scores[..n_test_pos], &scores[n_test_pos..])?;
        history.push(EpochStats {
            epoch: epoch + 1,
            train_loss,
            test_auc,
        });
        final_scores = scores;
    }

    Ok(TrainOutcome {
        model,
        history,
        test_scores: final_scores,
        cap_hits: train_cap_hits + test_cap_hits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::split::split_links;
    use crate::subgraph::extract_labeled;
    use crate::synthetic;

    fn toy_line_graph() -> LineGraph {
        // Path 0-2-3-4-1 around target (0,1): a 5-edge augmented cycle once
        // the target is injected.
        let g = Graph::build(&[(0, 2), (2, 3), (3, 4), (4, 1)], 5, None).unwrap();
        let sub = extract_labeled(&g, 0, 1, 4, 32).unwrap();
        to_line_graph(&sub, 32).unwrap()
    }

    fn tiny_model(lg: &LineGraph) -> LglpModel {
        let cfg = ModelConfig {
            num_layers: 2,
            channels: 3,
            label_cap: 32,
            mlp_hidden: 4,
            dropout: 0.0,
        };
        let _ = lg;
        LglpModel::new(&cfg, 0, 7).unwrap()
    }

    #[test]
    fn forward_is_finite_on_degenerate_single_node_line_graph() {
        let g = Graph::build(&[(2, 3)], 4, None).unwrap();
        let sub = extract_labeled(&g, 0, 1, 2, 32).unwrap();
        let lg = to_line_graph(&sub, 32).unwrap();
        assert_eq!(lg.num_nodes(), 1);
        let model = LglpModel::new(&ModelConfig::default(), 0, 1).unwrap();
        let logits = model.forward(&lg).unwrap();
        assert!(logits.iter().all(|x| x.is_finite()));
        let p = model.score(&lg).unwrap();
        assert!((0.0..1.0).contains(&p));
    }

    #[test]
    fn forward_rejects_width_mismatch() {
        let lg = toy_line_graph();
        let model = LglpModel::new(&ModelConfig { label_cap: 8, ..ModelConfig::default() }, 0, 1).unwrap();
        assert!(matches!(
            model.forward(&lg),
            Err(Error::WidthMismatch { .. })
        ));
    }

    #[test]
    fn forward_is_invariant_to_line_graph_node_permutation() {
        let lg = toy_line_graph();
        let model = tiny_model(&lg);
        let base = model.forward(&lg).unwrap();

        // Reverse the node order.
        let n = lg.num_nodes();
        let perm: Vec<usize> = (0..n).rev().collect(); // new -> old
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let edges: Vec<(usize, usize)> = lg
            .graph
            .edges()
            .map(|(a, b)| (inv[a], inv[b]))
            .collect();
        let graph = Graph::build(&edges, n, None).unwrap();
        let mut node_attrs = Matrix::zeros(n, lg.attr_width());
        for old in 0..n {
            node_attrs
                .row_mut(inv[old])
                .copy_from_slice(lg.node_attrs.row(old));
        }
        let permuted = LineGraph {
            graph,
            node_attrs,
            target_index: inv[lg.target_index],
            edge_endpoints: perm.iter().map(|&old| lg.edge_endpoints[old]).collect(),
        };
        let out = model.forward(&permuted).unwrap();
        assert!((out[0] - base[0]).abs() < 1e-12);
        assert!((out[1] - base[1]).abs() < 1e-12);
    }

    #[test]
    fn forward_matches_dense_hand_oracle() {
        // Independent dense evaluation of the same architecture using plain
        // matrix algebra over the full adjacency matrix.
        let lg = toy_line_graph();
        let model = tiny_model(&lg);
        let got = model.forward(&lg).unwrap();

        let n = lg.num_nodes();
        let k = model.config.num_layers;
        let dense_mat = |m: &Matrix| -> Vec<Vec<f64>> {
            (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
        };
        let mut z: Vec<Vec<f64>> = dense_mat(&lg.node_attrs);
        let mut readout: Vec<f64> = Vec::new();
        for layer in 0..k {
            let w = dense_mat(&model.params[layer].value);
            let mut agg = vec![vec![0.0; z[0].len()]; n];
            for v in 0..n {
                let beta = 1.0 / (1.0 + lg.graph.degree(v) as f64);
                for j in 0..z[0].len() {
                    let mut s = 0.0;
                    for &u in lg.graph.neighbors(v) {
                        s += z[u][j];
                    }
                    agg[v][j] = z[v][j] + beta * s;
                }
            }
            let mut next = vec![vec![0.0; w[0].len()]; n];
            for v in 0..n {
                for (j, col) in next[v].iter_mut().enumerate() {
                    let mut s = 0.0;
                    for (t, wrow) in w.iter().enumerate() {
                        s += agg[v][t] * wrow[j];
                    }
                    *col = s.tanh();
                }
            }
            z = next;
            readout.extend_from_slice(&z[lg.target_index]);
        }
        let w1 = dense_mat(&model.params[k].value);
        let b1 = model.params[k + 1].value.row(0);
        let mut hidden = vec![0.0; w1[0].len()];
        for (j, h) in hidden.iter_mut().enumerate() {
            let mut s = b1[j];
            for (t, wrow) in w1.iter().enumerate() {
                s += readout[t] * wrow[j];
            }
            *h = s.max(0.0);
        }
        let w2 = dense_mat(&model.params[k + 2].value);
        let b2 = model.params[k + 3].value.row(0);
        let mut logits = [b2[0], b2[1]];
        for (t, wrow) in w2.iter().enumerate() {
            logits[0] += hidden[t] * wrow[0];
            logits[1] += hidden[t] * wrow[1];
        }
        assert!((got[0] - logits[0]).abs() < 1e-10, "{got:?} vs {logits:?}");
        assert!((got[1] - logits[1]).abs() < 1e-10);
    }

    #[test]
    fn incidence_and_adjacency_routes_agree() {
        let g = synthetic::erdos_renyi(40, 0.12, 3).unwrap();
        let model = LglpModel::new(&ModelConfig::default(), 0, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10 {
            let u = rng.gen_range(0..40);
            let mut v = rng.gen_range(0..40);
            while v == u {
                v = rng.gen_range(0..40);
            }
            let sub = extract_labeled(&g, u, v, 2, 32).unwrap();
            let lg = to_line_graph(&sub, 32).unwrap();
            let via_lg = model.score(&lg).unwrap();
            let prepared = PreparedSample::from_subgraph(&sub, 1).unwrap();
            let via_prepared = model.score_prepared(&prepared).unwrap();
            assert!(
                (via_lg - via_prepared).abs() < 1e-12,
                "{via_lg} vs {via_prepared}"
            );
        }
    }

    #[test]
    fn checkpoint_roundtrip_is_exact() {
        let dir = std::env::temp_dir().join("lglp_model_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("ckpt.json");
        let model = LglpModel::new(&ModelConfig::default(), 0, 99).unwrap();
        model.save(&path).unwrap();
        let restored = LglpModel::load(&path).unwrap();
        for (a, b) in model.params.iter().zip(restored.params.iter()) {
            assert_eq!(a.name, b.name);
            assert_eq!(a.value, b.value);
        }
        assert_eq!(model.config, restored.config);
    }

    #[test]
    fn train_rejects_single_class() {
        let g = synthetic::planted_partition(60, 3, 0.4, 0.02, 1).unwrap();
        let mut split = split_links(&g, 0.7, 1).unwrap();
        split.train_neg.clear();
        assert!(matches!(
            train(&split, &ModelConfig::default(), &TrainConfig::default()),
            Err(Error::SingleClass)
        ));
    }

    #[test]
    fn predict_rejects_identical_endpoints() {
        let g = synthetic::erdos_renyi(20, 0.2, 2).unwrap();
        let model = LglpModel::new(&ModelConfig::default(), 0, 3).unwrap();
        assert!(matches!(
            model.predict(&g, &[(4, 4)], 2),
            Err(Error::IdenticalEndpoints(4))
        ));
    }

    #[test]
    fn predict_is_symmetric_in_pair_order() {
        let g = synthetic::erdos_renyi(30, 0.15, 4).unwrap();
        let model = LglpModel::new(&ModelConfig::default(), 0, 11).unwrap();
        let a = model.predict(&g, &[(3, 17)], 2).unwrap();
        let b = model.predict(&g, &[(17, 3)], 2).unwrap();
        assert_eq!(a[0], b[0]);
    }

    #[test]
    fn predict_handles_isolated_pair() {
        let g = Graph::build(&[(2, 3), (3, 4)], 6, None).unwrap();
        // Nodes 0 and 5 are isolated; extraction yields only the targets.
        let model = LglpModel::new(&ModelConfig::default(), 0, 1).unwrap();
        let scores = model.predict(&g, &[(0, 5)], 2).unwrap();
        assert!((0.0..1.0).contains(&scores[0]));
    }
}
