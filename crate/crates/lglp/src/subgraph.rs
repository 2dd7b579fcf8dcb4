//! Enclosing-subgraph extraction around a target pair and double-radius node
//! labeling (DRNL).

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Default cap on DRNL labels; anything at or above it buckets to 0.
pub const DEFAULT_LABEL_CAP: u32 = 32;

/// The h-hop enclosing subgraph around a target pair.
///
/// `nodes` lists original node ids with the two targets first, so the targets
/// always occupy local ids 0 and 1. `local` is the induced adjacency over
/// local ids with the target edge removed (whether or not it existed in the
/// source graph). `labels` is empty until [`drnl_label`] runs.
#[derive(Debug, Clone)]
pub struct EnclosingSubgraph {
    pub nodes: Vec<usize>,
    pub local: Graph,
    pub labels: Vec<u32>,
    pub attrs: Option<Vec<Vec<f64>>>,
}

/// Local ids of the two target nodes.
pub const TARGET_LOCAL: (usize, usize) = (0, 1);

impl EnclosingSubgraph {
    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_labeled(&self) -> bool {
        self.labels.len() == self.nodes.len()
    }

    /// Debug dump: one `u v` line per local edge followed by one
    /// `node label` line per node.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (u, v) in self.local.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
        let _ = writeln!(out, "# node label");
        for (i, orig) in self.nodes.iter().enumerate() {
            let label = self.labels.get(i).copied();
            let _ = writeln!(
                out,
                "{i} {} # orig {orig}",
                label.map_or("-".to_string(), |l| l.to_string())
            );
        }
        out
    }
}

/// Extracts the h-hop enclosing subgraph of `(u, v)`: every node within `h`
/// hops of either target, the induced edges, and the target edge removed.
pub fn extract_enclosing(g: &Graph, u: usize, v: usize, h: u32) -> Result<EnclosingSubgraph> {
    let (sub, _) = extract_enclosing_capped(g, u, v, h, None, 0)?;
    Ok(sub)
}

/// [`extract_enclosing`] with an optional node cap: when the subgraph would
/// exceed `max_nodes`, nodes of the outermost hop are down-sampled uniformly
/// (seeded, so extraction stays deterministic). Returns the subgraph and
/// whether the cap fired.
pub fn extract_enclosing_capped(
    g: &Graph,
    u: usize,
    v: usize,
    h: u32,
    max_nodes: Option<usize>,
    seed: u64,
) -> Result<(EnclosingSubgraph, bool)> {
    if u == v {
        return Err(Error::IdenticalEndpoints(u));
    }
    let n = g.num_nodes();
    if u >= n {
        return Err(Error::NodeOutOfRange { id: u, n });
    }
    if v >= n {
        return Err(Error::NodeOutOfRange { id: v, n });
    }

    // Membership does not depend on whether the target edge is present: with
    // the edge, min(d(w,u), d(w,v)) is unchanged because any shortcut through
    // it detours via the other target.
    let du = g.bfs_up_to(u, h);
    let dv = g.bfs_up_to(v, h);
    let mut min_dist: HashMap<usize, u32> = HashMap::with_capacity(du.len() + dv.len());
    for &(w, d) in du.iter().chain(dv.iter()) {
        min_dist
            .entry(w)
            .and_modify(|cur| *cur = (*cur).min(d))
            .or_insert(d);
    }

    let mut inner: Vec<usize> = Vec::new();
    let mut rim: Vec<usize> = Vec::new();
    for (&w, &d) in &min_dist {
        if w == u || w == v {
            continue;
        }
        if d < h {
            inner.push(w);
        } else {
            rim.push(w);
        }
    }
    inner.sort_unstable();
    rim.sort_unstable();

    let mut cap_hit = false;
    if let Some(cap) = max_nodes {
        let keep_rim = cap.saturating_sub(2 + inner.len());
        if rim.len() > keep_rim {
            cap_hit = true;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rim.shuffle(&mut rng);
            rim.truncate(keep_rim);
        }
    }

    let mut others = inner;
    others.extend(rim);
    others.sort_unstable();
    let mut nodes = Vec::with_capacity(2 + others.len());
    nodes.push(u);
    nodes.push(v);
    nodes.extend(others);

    let mut local_of: HashMap<usize, usize> = HashMap::with_capacity(nodes.len());
    for (i, &orig) in nodes.iter().enumerate() {
        local_of.insert(orig, i);
    }

    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (i, &orig) in nodes.iter().enumerate() {
        for &nbr in g.neighbors(orig) {
            if nbr <= orig {
                continue;
            }
            if let Some(&j) = local_of.get(&nbr) {
                // Drop the target edge before labeling.
                if (i.min(j), i.max(j)) == TARGET_LOCAL {
                    continue;
                }
                edges.push((i, j));
            }
        }
    }
    let local = Graph::build(&edges, nodes.len(), None)?;

    let attrs = if g.attr_dim() > 0 {
        Some(
            nodes
                .iter()
                .map(|&orig| g.attr_row(orig).unwrap().to_vec())
                .collect(),
        )
    } else {
        None
    };

    Ok((
        EnclosingSubgraph {
            nodes,
            local,
            labels: Vec::new(),
            attrs,
        },
        cap_hit,
    ))
}

/// Assigns DRNL labels inside the extracted subgraph (target edge already
/// removed): targets get 1; a node at distances `(d1, d2)` from the targets
/// gets `1 + min(d1,d2) + (q)(q + r - 1)` with `q = (d1+d2)/2`, `r = (d1+d2)
/// mod 2`; a node that cannot reach both targets gets 0, as does any label at
/// or above `label_cap`.
pub fn drnl_label(mut sub: EnclosingSubgraph, label_cap: u32) -> EnclosingSubgraph {
    let d1 = sub
        .local
        .bfs_distances(TARGET_LOCAL.0, None)
        .expect("target 0 exists");
    let d2 = sub
        .local
        .bfs_distances(TARGET_LOCAL.1, None)
        .expect("target 1 exists");
    let mut labels = Vec::with_capacity(sub.num_nodes());
    for i in 0..sub.num_nodes() {
        if i == TARGET_LOCAL.0 || i == TARGET_LOCAL.1 {
            labels.push(1);
            continue;
        }
        let label = match (d1[i], d2[i]) {
            (Some(a), Some(b)) => {
                let f = drnl_value(a, b);
                if f >= u64::from(label_cap) {
                    0
                } else {
                    f as u32
                }
            }
            _ => 0,
        };
        labels.push(label);
    }
    sub.labels = labels;
    sub
}

/// The raw double-radius label for distances `(d1, d2)`, uncapped.
pub fn drnl_value(d1: u32, d2: u32) -> u64 {
    let (d1, d2) = (u64::from(d1), u64::from(d2));
    let ds = d1 + d2;
    let q = ds / 2;
    let r = ds % 2;
    1 + d1.min(d2) + q * (q + r - 1)
}

/// Extraction followed by labeling.
pub fn extract_labeled(
    g: &Graph,
    u: usize,
    v: usize,
    h: u32,
    label_cap: u32,
) -> Result<EnclosingSubgraph> {
    Ok(drnl_label(extract_enclosing(g, u, v, h)?, label_cap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn path_between_targets() {
        // u - w - v with h = 2: three nodes, edges (u,w),(w,v) only.
        let g = Graph::build(&[(0, 2), (2, 1)], 3, None).unwrap();
        let sub = extract_enclosing(&g, 0, 1, 2).unwrap();
        assert_eq!(sub.nodes, vec![0, 1, 2]);
        let edges: Vec<_> = sub.local.edges().collect();
        assert_eq!(edges, vec![(0, 2), (1, 2)]);
    }

    #[test]
    fn target_edge_is_removed_before_labeling() {
        let g = Graph::build(&[(0, 1), (0, 2), (2, 1)], 3, None).unwrap();
        let sub = extract_enclosing(&g, 0, 1, 2).unwrap();
        assert!(!sub.local.has_edge(0, 1));
        assert_eq!(sub.local.num_edges(), 2);
    }

    #[test]
    fn disjoint_components_union_of_balls() {
        // Component A: 0-2-3 path; component B: 1-4. No cross edges.
        let g = Graph::build(&[(0, 2), (2, 3), (1, 4)], 5, None).unwrap();
        let sub = extract_enclosing(&g, 0, 1, 2).unwrap();
        assert_eq!(sub.nodes, vec![0, 1, 2, 3, 4]);
        for (a, b) in sub.local.edges() {
            // Edge endpoints stay within one original component.
            let comp = |local: usize| matches!(sub.nodes[local], 0 | 2 | 3);
            assert_eq!(comp(a), comp(b));
        }
    }

    #[test]
    fn rejects_identical_endpoints() {
        let g = Graph::build(&[(0, 1)], 2, None).unwrap();
        assert!(matches!(
            extract_enclosing(&g, 0, 0, 2),
            Err(Error::IdenticalEndpoints(0))
        ));
    }

    #[test]
    fn extraction_matches_distance_filter_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let n = 200;
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.gen::<f64>() < 0.015 {
                    edges.push((u, v));
                }
            }
        }
        let g = Graph::build(&edges, n, None).unwrap();
        for _ in 0..50 {
            let u = rng.gen_range(0..n);
            let mut v = rng.gen_range(0..n);
            while v == u {
                v = rng.gen_range(0..n);
            }
            let sub = extract_enclosing(&g, u, v, 2).unwrap();
            // Oracle: full BFS from each target, then filter.
            let du = g.bfs_distances(u, None).unwrap();
            let dv = g.bfs_distances(v, None).unwrap();
            let mut expected: Vec<usize> = (0..n)
                .filter(|&w| {
                    let a = du[w].unwrap_or(u32::MAX);
                    let b = dv[w].unwrap_or(u32::MAX);
                    a.min(b) <= 2
                })
                .collect();
            expected.sort_unstable();
            let mut got = sub.nodes.clone();
            got.sort_unstable();
            assert_eq!(got, expected);
        }
    }

    #[test]
    fn drnl_hand_values() {
        assert_eq!(drnl_value(1, 1), 2);
        assert_eq!(drnl_value(1, 2), 3);
        assert_eq!(drnl_value(2, 1), 3);
        assert_eq!(drnl_value(2, 2), 5);
        assert_eq!(drnl_value(2, 3), 7);
    }

    #[test]
    fn targets_get_label_one() {
        let g = Graph::build(&[(0, 2), (2, 1)], 3, None).unwrap();
        let sub = extract_labeled(&g, 0, 1, 2, DEFAULT_LABEL_CAP).unwrap();
        assert_eq!(sub.labels[0], 1);
        assert_eq!(sub.labels[1], 1);
        assert_eq!(sub.labels[2], 2); // (1,1)
    }

    #[test]
    fn one_sided_reachability_gets_zero() {
        // w is adjacent to u but, once the target edge is gone, cannot reach v.
        let g = Graph::build(&[(0, 1), (0, 2)], 3, None).unwrap();
        let sub = extract_labeled(&g, 0, 1, 2, DEFAULT_LABEL_CAP).unwrap();
        assert_eq!(sub.labels, vec![1, 1, 0]);
    }

    #[test]
    fn labels_bucket_to_zero_at_the_cap() {
        // Chain 0-2-3-4-1 with a pendant 5 on node 4: node 5 sits at
        // distances (4,2) -> ds=6, q=3, r=0 -> 1+2+3*2 = 9.
        let g = Graph::build(&[(0, 2), (2, 3), (3, 4), (4, 1), (4, 5)], 6, None).unwrap();
        let sub = extract_labeled(&g, 0, 1, 4, 32).unwrap();
        let far = sub.nodes.iter().position(|&w| w == 5).unwrap();
        assert_eq!(sub.labels[far], 9);
        let capped = extract_labeled(&g, 0, 1, 4, 9).unwrap();
        assert_eq!(capped.labels[far], 0);
    }

    #[test]
    fn swap_symmetry_of_labels() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let n = 60;
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.gen::<f64>() < 0.06 {
                    edges.push((u, v));
                }
            }
        }
        let g = Graph::build(&edges, n, None).unwrap();
        for _ in 0..30 {
            let u = rng.gen_range(0..n);
            let mut v = rng.gen_range(0..n);
            while v == u {
                v = rng.gen_range(0..n);
            }
            let a = extract_labeled(&g, u, v, 2, DEFAULT_LABEL_CAP).unwrap();
            let b = extract_labeled(&g, v, u, 2, DEFAULT_LABEL_CAP).unwrap();
            // Same original node -> same label regardless of target order.
            let map_a: HashMap<usize, u32> = a.nodes.iter().copied().zip(a.labels.clone()).collect();
            let map_b: HashMap<usize, u32> = b.nodes.iter().copied().zip(b.labels.clone()).collect();
            assert_eq!(map_a, map_b);
        }
    }

    #[test]
    fn label_multiset_is_isomorphism_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let n = 40;
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.gen::<f64>() < 0.1 {
                    edges.push((u, v));
                }
            }
        }
        let g = Graph::build(&edges, n, None).unwrap();
        for trial in 0..20 {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut ChaCha8Rng::seed_from_u64(trial));
            let mapped: Vec<(usize, usize)> = edges.iter().map(|&(u, v)| (perm[u], perm[v])).collect();
            let g2 = Graph::build(&mapped, n, None).unwrap();
            let u = rng.gen_range(0..n);
            let mut v = rng.gen_range(0..n);
            while v == u {
                v = rng.gen_range(0..n);
            }
            let a = extract_labeled(&g, u, v, 2, DEFAULT_LABEL_CAP).unwrap();
            let b = extract_labeled(&g2, perm[u], perm[v], 2, DEFAULT_LABEL_CAP).unwrap();
            let mut la = a.labels.clone();
            let mut lb = b.labels.clone();
            la.sort_unstable();
            lb.sort_unstable();
            assert_eq!(la, lb);
        }
    }

    #[test]
    fn h2_min_distance_bound_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let n = 80;
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.gen::<f64>() < 0.05 {
                    edges.push((u, v));
                }
            }
        }
        let g = Graph::build(&edges, n, None).unwrap();
        let du = g.bfs_distances(0, None).unwrap();
        let dv = g.bfs_distances(1, None).unwrap();
        let sub = extract_enclosing(&g, 0, 1, 2).unwrap();
        for &w in &sub.nodes[2..] {
            let d = du[w].unwrap_or(u32::MAX).min(dv[w].unwrap_or(u32::MAX));
            assert!((1..=2).contains(&d), "node {w} at distance {d}");
        }
    }

    #[test]
    fn cap_downsamples_outermost_hop_deterministically() {
        // Star of rim nodes two hops out.
        let mut edges = vec![(0, 2), (1, 2)];
        for w in 3..40 {
            edges.push((2, w));
        }
        let g = Graph::build(&edges, 40, None).unwrap();
        let (full, hit_full) = extract_enclosing_capped(&g, 0, 1, 2, None, 7).unwrap();
        assert!(!hit_full);
        assert_eq!(full.num_nodes(), 40);
        let (capped, hit) = extract_enclosing_capped(&g, 0, 1, 2, Some(10), 7).unwrap();
        assert!(hit);
        assert_eq!(capped.num_nodes(), 10);
        // Targets and the inner hop survive.
        assert_eq!(&capped.nodes[..3], &[0, 1, 2]);
        let (again, _) = extract_enclosing_capped(&g, 0, 1, 2, Some(10), 7).unwrap();
        assert_eq!(capped.nodes, again.nodes);
    }
}
