//! Deterministic train/test splitting of positive links and uniform negative
//! sampling. The observed graph (train positives only) is what every
//! downstream extraction and heuristic sees.

use std::collections::HashSet;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{fnv1a_init, fnv1a_u64, Graph};

/// A candidate link with its class label, stored in canonical order
/// (`u < v`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LinkSample {
    pub u: usize,
    pub v: usize,
    pub label: u8,
}

impl LinkSample {
    pub fn new(u: usize, v: usize, label: u8) -> LinkSample {
        LinkSample {
            u: u.min(v),
            v: u.max(v),
            label,
        }
    }

    pub fn pair(&self) -> (usize, usize) {
        (self.u, self.v)
    }
}

/// One train/test split: the observed graph holds exactly the training
/// positives; negatives are uniform non-edges of the original graph,
/// disjoint between train and test.
#[derive(Debug, Clone)]
pub struct DataSplit {
    pub observed: Graph,
    pub train_pos: Vec<LinkSample>,
    pub train_neg: Vec<LinkSample>,
    pub test_pos: Vec<LinkSample>,
    pub test_neg: Vec<LinkSample>,
    pub seed: u64,
    pub train_frac: f64,
}

impl DataSplit {
    /// FNV-1a hash over the four sample lists; distinct splits collide with
    /// negligible probability.
    pub fn fingerprint(&self) -> u64 {
        let mut h = fnv1a_init();
        for list in [
            &self.train_pos,
            &self.train_neg,
            &self.test_pos,
            &self.test_neg,
        ] {
            h = fnv1a_u64(h, list.len() as u64);
            for s in list.iter() {
                h = fnv1a_u64(h, s.u as u64);
                h = fnv1a_u64(h, s.v as u64);
            }
        }
        h
    }
}

/// Splits the edge set into train/test positives at `train_frac` (rounded to
/// nearest) and samples an equal number of negatives per side, uniformly
/// without replacement from the non-edges of the full original graph.
///
/// Same `(graph, train_frac, seed)` always produces the same split.
pub fn split_links(g: &Graph, train_frac: f64, seed: u64) -> Result<DataSplit> {
    if !(train_frac > 0.0 && train_frac < 1.0) {
        return Err(Error::BadFraction(train_frac));
    }
    let m = g.num_edges();
    if m < 10 {
        return Err(Error::TooFewEdges { m, min: 10 });
    }
    let n = g.num_nodes();
    let total_pairs = n * (n - 1) / 2;
    let density = m as f64 / total_pairs as f64;
    if density > 0.5 {
        return Err(Error::TooDense(density));
    }
    let available_non_edges = total_pairs - m;
    // One negative per positive across both sides.
    if m > available_non_edges {
        return Err(Error::NegativesExhausted {
            requested: m,
            available: available_non_edges,
        });
    }

    let n_train = (train_frac * m as f64).round() as usize;
    if n_train == 0 || n_train == m {
        return Err(Error::DegenerateSplit { train: n_train, m });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(usize, usize)> = g.edges().collect();
    edges.shuffle(&mut rng);
    let (train_edges, test_edges) = edges.split_at(n_train);

    let mut train_pos: Vec<LinkSample> = train_edges
        .iter()
        .map(|&(u, v)| LinkSample::new(u, v, 1))
        .collect();
    let mut test_pos: Vec<LinkSample> = test_edges
        .iter()
        .map(|&(u, v)| LinkSample::new(u, v, 1))
        .collect();
    train_pos.sort_unstable_by_key(LinkSample::pair);
    test_pos.sort_unstable_by_key(LinkSample::pair);

    // Negatives: rejection sampling over uniform pairs, deduplicated globally
    // and checked against the FULL original edge set so a test positive can
    // never surface as a training negative.
    let needed = m;
    let mut seen: HashSet<(usize, usize)> = HashSet::with_capacity(needed);
    let mut negatives: Vec<(usize, usize)> = Vec::with_capacity(needed);
    while negatives.len() < needed {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v {
            continue;
        }
        let pair = (u.min(v), u.max(v));
        if g.has_edge(pair.0, pair.1) || !seen.insert(pair) {
            continue;
        }
        negatives.push(pair);
    }
    let train_neg: Vec<LinkSample> = negatives[..n_train]
        .iter()
        .map(|&(u, v)| LinkSample::new(u, v, 0))
        .collect();
    let test_neg: Vec<LinkSample> = negatives[n_train..]
        .iter()
        .map(|&(u, v)| LinkSample::new(u, v, 0))
        .collect();

    let observed_edges: Vec<(usize, usize)> = train_pos.iter().map(LinkSample::pair).collect();
    let observed = Graph::build(&observed_edges, n, g.attr_rows())?;

    Ok(DataSplit {
        observed,
        train_pos,
        train_neg,
        test_pos,
        test_neg,
        seed,
        train_frac,
    })
}

/// Generates `repeats` independent splits for every fraction, using derived
/// seeds `base_seed + i` for repeat `i`.
pub fn sweep_fractions(
    g: &Graph,
    fractions: &[f64],
    repeats: usize,
    base_seed: u64,
) -> Result<Vec<DataSplit>> {
    if fractions.is_empty() {
        return Err(Error::EmptyFractions);
    }
    let mut out = Vec::with_capacity(fractions.len() * repeats);
    for &frac in fractions {
        for i in 0..repeats {
            out.push(split_links(g, frac, base_seed + i as u64)?);
        }
    }
    Ok(out)
}

/// On-disk form of a split: seed, fraction, and the four canonical pair
/// arrays. The observed graph is reconstructed from the training positives
/// at load time.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SplitRecord {
    pub seed: u64,
    pub train_frac: f64,
    pub num_nodes: usize,
    pub train_pos: Vec<(usize, usize)>,
    pub train_neg: Vec<(usize, usize)>,
    pub test_pos: Vec<(usize, usize)>,
    pub test_neg: Vec<(usize, usize)>,
}

impl DataSplit {
    pub fn to_record(&self) -> SplitRecord {
        let pairs = |v: &[LinkSample]| v.iter().map(LinkSample::pair).collect();
        SplitRecord {
            seed: self.seed,
            train_frac: self.train_frac,
            num_nodes: self.observed.num_nodes(),
            train_pos: pairs(&self.train_pos),
            train_neg: pairs(&self.train_neg),
            test_pos: pairs(&self.test_pos),
            test_neg: pairs(&self.test_neg),
        }
    }

    /// Rebuilds a split from its record, reattaching node attributes from the
    /// original graph.
    pub fn from_record(record: &SplitRecord, original: &Graph) -> Result<DataSplit> {
        if record.num_nodes != original.num_nodes() {
            return Err(Error::config(format!(
                "split was made for {} nodes, graph has {}",
                record.num_nodes,
                original.num_nodes()
            )));
        }
        let samples = |pairs: &[(usize, usize)], label: u8| {
            pairs
                .iter()
                .map(|&(u, v)| LinkSample::new(u, v, label))
                .collect::<Vec<_>>()
        };
        let train_pos = samples(&record.train_pos, 1);
        let observed = Graph::build(&record.train_pos, record.num_nodes, original.attr_rows())?;
        Ok(DataSplit {
            observed,
            train_pos,
            train_neg: samples(&record.train_neg, 0),
            test_pos: samples(&record.test_pos, 1),
            test_neg: samples(&record.test_neg, 0),
            seed: record.seed,
            train_frac: record.train_frac,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(&self.to_record())?;
        std::fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: &Path, original: &Graph) -> Result<DataSplit> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Data {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        let record: SplitRecord = serde_json::from_str(&text).map_err(|e| Error::Data {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        DataSplit::from_record(&record, original)
    }
}
