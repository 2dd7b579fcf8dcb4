//! Small synthetic graph generators so benchmarks and tests run without any
//! dataset downloads.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Erdős–Rényi G(n, p).
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::config(format!("edge probability {p} outside [0,1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::build(&edges, n, None)
}

/// Erdős–Rényi G(n, m): exactly `m` distinct edges.
pub fn erdos_renyi_m(n: usize, m: usize, seed: u64) -> Result<Graph> {
    let total = n * (n - 1) / 2;
    if m > total {
        return Err(Error::config(format!(
            "{m} edges requested but only {total} pairs exist"
        )));
    }
    if m as f64 > 0.5 * total as f64 {
        return Err(Error::TooDense(m as f64 / total as f64));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen: HashSet<(usize, usize)> = HashSet::with_capacity(m);
    let mut edges = Vec::with_capacity(m);
    while edges.len() < m {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v {
            continue;
        }
        let pair = (u.min(v), u.max(v));
        if chosen.insert(pair) {
            edges.push(pair);
        }
    }
    Graph::build(&edges, n, None)
}

/// Barabási–Albert preferential attachment: starts from a small clique and
/// attaches each new node to `m_attach` existing nodes sampled proportionally
/// to degree.
pub fn barabasi_albert(n: usize, m_attach: usize, seed: u64) -> Result<Graph> {
    if m_attach == 0 || n <= m_attach {
        return Err(Error::config(format!(
            "need n > m_attach >= 1 (got n={n}, m_attach={m_attach})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    // Endpoint multiset; sampling from it is degree-proportional.
    let mut endpoints: Vec<usize> = Vec::new();
    for u in 0..=m_attach {
        for v in (u + 1)..=m_attach {
            edges.push((u, v));
            endpoints.push(u);
            endpoints.push(v);
        }
    }
    for new in (m_attach + 1)..n {
        let mut targets = HashSet::with_capacity(m_attach);
        while targets.len() < m_attach {
            let t = endpoints[rng.gen_range(0..endpoints.len())];
            targets.insert(t);
        }
        for &t in &targets {
            edges.push((new, t));
            endpoints.push(new);
            endpoints.push(t);
        }
    }
    Graph::build(&edges, n, None)
}

/// Planted-partition graph: `communities` contiguous blocks, edge probability
/// `p_in` inside a block and `p_out` across blocks. High `p_in` gives test
/// links a strong common-neighbor signal.
pub fn planted_partition(
    n: usize,
    communities: usize,
    p_in: f64,
    p_out: f64,
    seed: u64,
) -> Result<Graph> {
    if communities == 0 || communities > n {
        return Err(Error::config(format!(
            "need 1..=n communities (got {communities} for n={n})"
        )));
    }
    for p in [p_in, p_out] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::config(format!("probability {p} outside [0,1]")));
        }
    }
    let block = n.div_ceil(communities);
    let community = |v: usize| v / block;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let p = if community(u) == community(v) { p_in } else { p_out };
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::build(&edges, n, None)
}

/// Parses a synthetic dataset spec string:
/// `er:<n>:<p>:<seed>`, `gnm:<n>:<m>:<seed>`, `ba:<n>:<m_attach>:<seed>`,
/// or `pp:<n>:<communities>:<p_in>:<p_out>:<seed>`.
pub fn from_spec(spec: &str) -> Result<Graph> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Error::config(format!("unrecognized synthetic spec '{spec}'"));
    let int = |s: &str| s.parse::<usize>().map_err(|_| bad());
    let real = |s: &str| s.parse::<f64>().map_err(|_| bad());
    let seed = |s: &str| s.parse::<u64>().map_err(|_| bad());
    match parts.as_slice() {
        ["er", n, p, s] => erdos_renyi(int(n)?, real(p)?, seed(s)?),
        ["gnm", n, m, s] => erdos_renyi_m(int(n)?, int(m)?, seed(s)?),
        ["ba", n, m, s] => barabasi_albert(int(n)?, int(m)?, seed(s)?),
        ["pp", n, c, pin, pout, s] => {
            planted_partition(int(n)?, int(c)?, real(pin)?, real(pout)?, seed(s)?)
        }
        _ => Err(bad()),
    }
}
