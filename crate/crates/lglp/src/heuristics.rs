//! Classical similarity baselines: truncated Katz index, rooted PageRank,
//! and SimRank. All scorers are deterministic, endpoint-symmetric, and read
//! only the observed graph.

use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Baseline hyperparameters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct HeuristicConfig {
    /// Katz damping per walk step.
    pub katz_beta: f64,
    /// Walk length at which the Katz series is truncated.
    pub katz_max_len: usize,
    /// PageRank follow probability (restart probability is 1 - damping).
    pub pr_damping: f64,
    /// L1 convergence tolerance of the power iteration.
    pub pr_tol: f64,
    pub pr_max_iters: usize,
    /// SimRank decay constant.
    pub simrank_c: f64,
    pub simrank_iters: usize,
}

impl Default for HeuristicConfig {
    fn default() -> Self {
        HeuristicConfig {
            katz_beta: 0.001,
            katz_max_len: 6,
            pr_damping: 0.85,
            pr_tol: 1e-8,
            pr_max_iters: 200,
            simrank_c: 0.8,
            simrank_iters: 10,
        }
    }
}

impl HeuristicConfig {
    pub fn validate(&self) -> Result<()> {
        if self.katz_beta <= 0.0 || self.katz_max_len == 0 {
            return Err(Error::config("katz_beta must be positive, katz_max_len >= 1"));
        }
        if !(0.0..1.0).contains(&self.pr_damping) || self.pr_damping == 0.0 {
            return Err(Error::config("pr_damping must lie in (0, 1)"));
        }
        if !(0.0..1.0).contains(&self.simrank_c) || self.simrank_c == 0.0 {
            return Err(Error::config("simrank_c must lie in (0, 1)"));
        }
        if self.simrank_iters == 0 {
            return Err(Error::config("simrank_iters must be at least 1"));
        }
        Ok(())
    }

    /// True when `beta * max_degree >= 1`: the max degree bounds the spectral
    /// radius, so beyond this the untruncated Katz series may diverge and the
    /// truncated score stops approximating it.
    pub fn katz_divergence_risk(&self, g: &Graph) -> bool {
        let d_max = (0..g.num_nodes()).map(|v| g.degree(v)).max().unwrap_or(0);
        self.katz_beta * d_max as f64 >= 1.0
    }
}

fn check_pairs(g: &Graph, pairs: &[(usize, usize)]) -> Result<()> {
    let n = g.num_nodes();
    for &(u, v) in pairs {
        if u >= n {
            return Err(Error::NodeOutOfRange { id: u, n });
        }
        if v >= n {
            return Err(Error::NodeOutOfRange { id: v, n });
        }
    }
    Ok(())
}

/// Truncated Katz index: `score(u,v) = Σ_{l=1..L} beta^l · #walks_l(u,v)`,
/// computed per pair by iterated sparse products of an indicator vector.
pub fn katz_scores(g: &Graph, pairs: &[(usize, usize)], cfg: &HeuristicConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    check_pairs(g, pairs)?;
    let n = g.num_nodes();
    let scores = pairs
        .par_iter()
        .map(|&(u, v)| {
            let mut walks = vec![0.0f64; n];
            walks[u] = 1.0;
            let mut score = 0.0;
            let mut beta_pow = 1.0;
            for _ in 0..cfg.katz_max_len {
                let mut next = vec![0.0f64; n];
                for (w, &count) in walks.iter().enumerate() {
                    if count != 0.0 {
                        for &x in g.neighbors(w) {
                            next[x] += count;
                        }
                    }
                }
                beta_pow *= cfg.katz_beta;
                score += beta_pow * next[v];
                walks = next;
            }
            score
        })
        .collect();
    Ok(scores)
}

/// Stationary distribution of the restart-at-`root` random walk, by power
/// iteration. Returns `None` for an isolated root (the walk is undefined).
fn rooted_pagerank_vector(g: &Graph, root: usize, cfg: &HeuristicConfig) -> Option<Vec<f64>> {
    if g.degree(root) == 0 {
        return None;
    }
    let n = g.num_nodes();
    let restart = 1.0 - cfg.pr_damping;
    let mut pi = vec![0.0f64; n];
    pi[root] = 1.0;
    for _ in 0..cfg.pr_max_iters {
        let mut next = vec![0.0f64; n];
        next[root] = restart;
        for (w, &mass) in pi.iter().enumerate() {
            if mass != 0.0 {
                let deg = g.degree(w);
                if deg > 0 {
                    let share = cfg.pr_damping * mass / deg as f64;
                    for &x in g.neighbors(w) {
                        next[x] += share;
                    }
                }
            }
        }
        let l1: f64 = pi.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        pi = next;
        if l1 < cfg.pr_tol {
            break;
        }
    }
    Some(pi)
}

/// Rooted PageRank score `pi_u[v] + pi_v[u]`; an isolated root contributes 0.
pub fn rooted_pagerank_scores(
    g: &Graph,
    pairs: &[(usize, usize)],
    cfg: &HeuristicConfig,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    check_pairs(g, pairs)?;
    let mut roots: Vec<usize> = pairs.iter().flat_map(|&(u, v)| [u, v]).collect();
    roots.sort_unstable();
    roots.dedup();
    let vectors: HashMap<usize, Option<Vec<f64>>> = roots
        .par_iter()
        .map(|&r| (r, rooted_pagerank_vector(g, r, cfg)))
        .collect();
    Ok(pairs
        .iter()
        .map(|&(u, v)| {
            let uv = vectors[&u].as_ref().map_or(0.0, |pi| pi[v]);
            let vu = vectors[&v].as_ref().map_or(0.0, |pi| pi[u]);
            uv + vu
        })
        .collect())
}

/// SimRank similarity table iterated from the identity:
/// `s(u,v) = C/(|N(u)||N(v)|) · Σ_{a∈N(u)} Σ_{b∈N(v)} s(a,b)`, `s(u,u) = 1`;
/// pairs with an isolated endpoint score 0. Table-based, so graphs are
/// limited to 5000 nodes.
pub fn simrank_scores(
    g: &Graph,
    pairs: &[(usize, usize)],
    cfg: &HeuristicConfig,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    check_pairs(g, pairs)?;
    let n = g.num_nodes();
    if n > 5000 {
        return Err(Error::config(format!(
            "SimRank table needs O(n^2) memory; {n} nodes exceeds the 5000-node limit"
        )));
    }
    let table = simrank_table(g, cfg);
    Ok(pairs.iter().map(|&(u, v)| table[u * n + v]).collect())
}

/// Full SimRank table after `simrank_iters` iterations.
pub(crate) fn simrank_table(g: &Graph, cfg: &HeuristicConfig) -> Vec<f64> {
    let n = g.num_nodes();
    let mut cur = vec![0.0f64; n * n];
    for u in 0..n {
        cur[u * n + u] = 1.0;
    }
    for _ in 0..cfg.simrank_iters {
        let mut next = vec![0.0f64; n * n];
        // Upper triangle in parallel (row-chunked), then mirror, so the
        // result is exactly symmetric.
        next.par_chunks_mut(n).enumerate().for_each(|(u, row)| {
            row[u] = 1.0;
            let nu = g.neighbors(u);
            if nu.is_empty() {
                return;
            }
            for v in (u + 1)..n {
                let nv = g.neighbors(v);
                if nv.is_empty() {
                    continue;
                }
                let mut sum = 0.0;
                for &a in nu {
                    let arow = &cur[a * n..(a + 1) * n];
                    for &b in nv {
                        sum += arow[b];
                    }
                }
                row[v] = cfg.simrank_c * sum / (nu.len() * nv.len()) as f64;
            }
        });
        for u in 0..n {
            for v in (u + 1)..n {
                next[v * n + u] = next[u * n + v];
            }
        }
        cur = next;
    }
    cur
}

/// Rows of `u,v,method,score` for the scores CSV emitted by the runner.
pub fn scores_csv(pairs: &[(usize, usize)], scores: &[f64], method: &str) -> String {
    let mut out = String::from("u,v,method,score\n");
    for (&(u, v), &s) in pairs.iter().zip(scores) {
        let _ = writeln!(out, "{u},{v},{method},{s}");
    }
    out
}
