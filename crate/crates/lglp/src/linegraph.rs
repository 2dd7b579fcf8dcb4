//! Line-graph transformation of a labeled enclosing subgraph and the
//! label/attribute transfer onto line-graph nodes.
//!
//! The candidate edge is always injected before transformation so the target
//! link has a line-graph node to classify: it never exists in the extracted
//! adjacency (positives lose it during extraction, negatives never had it),
//! and both classes are treated identically here.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::subgraph::{EnclosingSubgraph, TARGET_LOCAL};
use crate::tensor::Matrix;

/// Line graph of the augmented subgraph (target edge injected).
///
/// Node `i` of the line graph corresponds to `edge_endpoints[i]`, an edge of
/// the augmented subgraph in canonical `(a,b)` order; two line-graph nodes
/// are adjacent iff their edges share an endpoint. Node ordering is
/// lexicographic by endpoint pair, and `target_index` locates the injected
/// target edge by lookup.
#[derive(Debug, Clone)]
pub struct LineGraph {
    pub graph: Graph,
    pub node_attrs: Matrix,
    pub target_index: usize,
    pub edge_endpoints: Vec<(usize, usize)>,
}

impl LineGraph {
    pub fn num_nodes(&self) -> usize {
        self.graph.num_nodes()
    }

    pub fn attr_width(&self) -> usize {
        self.node_attrs.cols()
    }

    /// Number of nodes in the augmented subgraph this line graph came from.
    /// Every augmented node carries at least one edge, so the maximum
    /// endpoint id determines the count.
    pub fn num_source_nodes(&self) -> usize {
        self.edge_endpoints
            .iter()
            .map(|&(a, b)| a.max(b) + 1)
            .max()
            .unwrap_or(0)
    }

    /// Debug dump: line-graph edge list, then one attribute row per node.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (a, b) in self.graph.edges() {
            let _ = writeln!(out, "{a} {b}");
        }
        let _ = writeln!(out, "# node endpoints attrs");
        for i in 0..self.num_nodes() {
            let (a, b) = self.edge_endpoints[i];
            let attrs: Vec<String> = self
                .node_attrs
                .row(i)
                .iter()
                .map(|x| format!("{x}"))
                .collect();
            let _ = writeln!(out, "{i} ({a},{b}) {}", attrs.join(","));
        }
        out
    }
}

/// Builds the attribute vector for an edge between nodes labeled `f1`, `f2`:
/// the concatenation `one_hot(min) ∥ one_hot(max)`, each of width `label_cap`,
/// followed by the elementwise sum of the endpoint attribute vectors when
/// present. Both pieces are invariant under endpoint swap.
pub fn edge_attribute(
    f1: u32,
    f2: u32,
    x1: Option<&[f64]>,
    x2: Option<&[f64]>,
    label_cap: u32,
) -> Result<Vec<f64>> {
    if f1 >= label_cap {
        return Err(Error::LabelOutOfRange {
            label: f1,
            cap: label_cap,
        });
    }
    if f2 >= label_cap {
        return Err(Error::LabelOutOfRange {
            label: f2,
            cap: label_cap,
        });
    }
    let cap = label_cap as usize;
    let attr_dim = match (x1, x2) {
        (Some(a), Some(b)) => {
            if a.len() != b.len() {
                return Err(Error::AttrWidth {
                    row: 0,
                    got: b.len(),
                    expected: a.len(),
                });
            }
            a.len()
        }
        (None, None) => 0,
        (Some(a), None) | (None, Some(a)) => {
            return Err(Error::AttrWidth {
                row: 0,
                got: 0,
                expected: a.len(),
            })
        }
    };
    let mut out = vec![0.0; 2 * cap + attr_dim];
    let lo = f1.min(f2) as usize;
    let hi = f1.max(f2) as usize;
    out[lo] = 1.0;
    out[cap + hi] = 1.0;
    if let (Some(a), Some(b)) = (x1, x2) {
        for (k, (xa, xb)) in a.iter().zip(b).enumerate() {
            out[2 * cap + k] = xa + xb;
        }
    }
    Ok(out)
}

/// Transforms a labeled enclosing subgraph into its line graph.
///
/// The target edge `(0,1)` is injected into a working copy of the subgraph;
/// every edge of that augmented graph becomes a line-graph node (ordered
/// lexicographically by canonical endpoint pair); two nodes connect iff the
/// edges share an endpoint; attributes come from [`edge_attribute`].
pub fn to_line_graph(sub: &EnclosingSubgraph, label_cap: u32) -> Result<LineGraph> {
    if !sub.is_labeled() {
        return Err(Error::UnlabeledSubgraph);
    }
    if sub.local.has_edge(TARGET_LOCAL.0, TARGET_LOCAL.1) {
        return Err(Error::config(
            "target edge present in subgraph adjacency; extraction must remove it",
        ));
    }
    let k = sub.num_nodes();

    let mut aug_edges: Vec<(usize, usize)> = sub.local.edges().collect();
    aug_edges.push(TARGET_LOCAL);
    aug_edges.sort_unstable();

    let target_index = aug_edges
        .binary_search(&TARGET_LOCAL)
        .expect("injected target edge is present");

    let graph = line_graph_topology(&aug_edges, k)?;

    let attr_dim = sub.attrs.as_ref().map_or(0, |rows| rows[0].len());
    let width = 2 * label_cap as usize + attr_dim;
    let mut node_attrs = Matrix::zeros(aug_edges.len(), width);
    for (eid, &(a, b)) in aug_edges.iter().enumerate() {
        let (xa, xb) = match &sub.attrs {
            Some(rows) => (Some(rows[a].as_slice()), Some(rows[b].as_slice())),
            None => (None, None),
        };
        let attr = edge_attribute(sub.labels[a], sub.labels[b], xa, xb, label_cap)?;
        node_attrs.row_mut(eid).copy_from_slice(&attr);
    }

    Ok(LineGraph {
        graph,
        node_attrs,
        target_index,
        edge_endpoints: aug_edges,
    })
}

/// Line graph of an arbitrary simple graph: one node per edge of `g` (in
/// lexicographic canonical order), two nodes adjacent iff the edges share an
/// endpoint. Returns the topology and the node-to-edge mapping.
pub fn line_graph_of(g: &Graph) -> Result<(Graph, Vec<(usize, usize)>)> {
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let topology = line_graph_topology(&edges, g.num_nodes())?;
    Ok((topology, edges))
}

/// Shared construction: bucket edge ids by endpoint, then connect all pairs
/// within a bucket. Distinct edges of a simple graph share at most one
/// endpoint, so each line-graph edge is emitted exactly once; cost is
/// Θ(Σ d_i²). `edges` must be canonical pairs.
fn line_graph_topology(edges: &[(usize, usize)], num_nodes: usize) -> Result<Graph> {
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); num_nodes];
    for (eid, &(a, b)) in edges.iter().enumerate() {
        incident[a].push(eid);
        incident[b].push(eid);
    }
    let mut lg_edges: Vec<(usize, usize)> = Vec::new();
    for bucket in &incident {
        for i in 0..bucket.len() {
            for j in (i + 1)..bucket.len() {
                lg_edges.push((bucket[i], bucket[j]));
            }
        }
    }
    Graph::build(&lg_edges, edges.len(), None)
}

/// Node and edge counts of the line graph of `g`: `(m, ½·Σ d_i² − m)`.
pub fn line_graph_size(g: &Graph) -> (usize, usize) {
    let m = g.num_edges();
    let sum_sq: usize = (0..g.num_nodes()).map(|v| g.degree(v) * g.degree(v)).sum();
    (m, sum_sq / 2 - m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subgraph::{drnl_label, extract_labeled, DEFAULT_LABEL_CAP};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn edge_attribute_is_order_invariant() {
        let a = edge_attribute(3, 1, None, None, 8).unwrap();
        let b = edge_attribute(1, 3, None, None, 8).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 16);
        assert_eq!(a[1], 1.0); // one_hot(min=1)
        assert_eq!(a[8 + 3], 1.0); // one_hot(max=3)
        assert_eq!(a.iter().sum::<f64>(), 2.0);
    }

    #[test]
    fn target_edge_attribute_uses_label_one_twice() {
        let a = edge_attribute(1, 1, None, None, 8).unwrap();
        assert_eq!(a[1], 1.0);
        assert_eq!(a[8 + 1], 1.0);
    }

    #[test]
    fn attribute_tail_sums_endpoint_vectors() {
        let a = edge_attribute(0, 2, Some(&[1.0, 0.0]), Some(&[0.0, 2.0]), 4).unwrap();
        let b = edge_attribute(2, 0, Some(&[0.0, 2.0]), Some(&[1.0, 0.0]), 4).unwrap();
        assert_eq!(a, b);
        assert_eq!(&a[8..], &[1.0, 2.0]);
    }

    #[test]
    fn edge_attribute_rejects_label_outside_cap() {
        assert!(matches!(
            edge_attribute(8, 1, None, None, 8),
            Err(Error::LabelOutOfRange { label: 8, cap: 8 })
        ));
    }

    #[test]
    fn edge_attribute_symmetry_exhaustive() {
        let cap = 8;
        for f1 in 0..cap {
            for f2 in 0..cap {
                assert_eq!(
                    edge_attribute(f1, f2, None, None, cap).unwrap(),
                    edge_attribute(f2, f1, None, None, cap).unwrap()
                );
            }
        }
    }

    #[test]
    fn four_node_five_edge_graph_gives_five_line_nodes() {
        // K4 minus one edge, with (0,1) as the target pair. The removed
        // target edge is re-injected, so the augmented graph has 5 edges.
        let g = Graph::build(&[(0, 1), (0, 2), (0, 3), (1, 2), (2, 3)], 4, None).unwrap();
        let sub = extract_labeled(&g, 0, 1, 2, DEFAULT_LABEL_CAP).unwrap();
        let lg = to_line_graph(&sub, DEFAULT_LABEL_CAP).unwrap();
        assert_eq!(lg.num_nodes(), 5);
        assert_eq!(lg.edge_endpoints[lg.target_index], (0, 1));
    }

    #[test]
    fn triangle_line_graph_is_a_triangle() {
        let g = Graph::build(&[(0, 1), (1, 2), (0, 2)], 3, None).unwrap();
        let (nodes, edges) = line_graph_size(&g);
        assert_eq!((nodes, edges), (3, 3));
        // Through the pipeline: pick (0,1) as target; the augmented graph is
        // the same triangle.
        let sub = extract_labeled(&g, 0, 1, 2, DEFAULT_LABEL_CAP).unwrap();
        let lg = to_line_graph(&sub, DEFAULT_LABEL_CAP).unwrap();
        assert_eq!(lg.num_nodes(), 3);
        assert_eq!(lg.graph.num_edges(), 3);
    }

    #[test]
    fn two_edge_path_has_one_line_edge() {
        let g = Graph::build(&[(0, 2), (2, 1)], 3, None).unwrap();
        let (nodes, edges) = line_graph_size(&g);
        assert_eq!((nodes, edges), (2, 1));
    }

    #[test]
    fn star_line_graph_size() {
        let g = Graph::build(&[(0, 1), (0, 2), (0, 3)], 4, None).unwrap();
        assert_eq!(line_graph_size(&g), (3, 3));
    }

    #[test]
    fn single_edge_and_empty_sizes() {
        let g = Graph::build(&[(0, 1)], 2, None).unwrap();
        assert_eq!(line_graph_size(&g), (1, 0));
        let empty = Graph::build(&[], 3, None).unwrap();
        assert_eq!(line_graph_size(&empty), (0, 0));
    }

    #[test]
    fn degenerate_subgraph_keeps_isolated_target_node() {
        // Two isolated targets: augmented graph = just the target edge, line
        // graph = one isolated node.
        let g = Graph::build(&[(2, 3)], 4, None).unwrap();
        let sub = extract_labeled(&g, 0, 1, 2, DEFAULT_LABEL_CAP).unwrap();
        let lg = to_line_graph(&sub, DEFAULT_LABEL_CAP).unwrap();
        assert_eq!(lg.num_nodes(), 1);
        assert_eq!(lg.graph.num_edges(), 0);
        assert_eq!(lg.target_index, 0);
    }

    #[test]
    fn rejects_unlabeled_subgraph() {
        let g = Graph::build(&[(0, 2), (2, 1)], 3, None).unwrap();
        let sub = crate::subgraph::extract_enclosing(&g, 0, 1, 2).unwrap();
        assert!(matches!(
            to_line_graph(&sub, DEFAULT_LABEL_CAP),
            Err(Error::UnlabeledSubgraph)
        ));
    }

    fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.gen::<f64>() < p {
                    edges.push((u, v));
                }
            }
        }
        Graph::build(&edges, n, None).unwrap()
    }

    fn assert_counting_identity(g: &Graph) {
        let (expect_nodes, expect_edges) = line_graph_size(g);
        let (lg, edge_map) = line_graph_of(g).unwrap();
        assert_eq!(lg.num_nodes(), expect_nodes);
        assert_eq!(lg.num_edges(), expect_edges);
        assert_eq!(edge_map.len(), expect_nodes);
        // Brute force: compare every pair of original edges.
        let edges: Vec<(usize, usize)> = g.edges().collect();
        let mut brute_edges = 0;
        for i in 0..edges.len() {
            for j in (i + 1)..edges.len() {
                let (a, b) = edges[i];
                let (c, d) = edges[j];
                let share = a == c || a == d || b == c || b == d;
                if share {
                    brute_edges += 1;
                }
                assert_eq!(lg.has_edge(i, j), share);
            }
        }
        assert_eq!(brute_edges, expect_edges);
    }

    #[test]
    fn counting_identity_on_random_graphs() {
        for seed in 0..30 {
            let g = random_graph(25, 0.15, seed);
            assert_counting_identity(&g);
        }
    }

    #[test]
    fn adjacency_iff_shared_endpoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for seed in 0..20 {
            let g = random_graph(30, 0.12, seed + 100);
            if g.num_edges() < 12 {
                continue;
            }
            let u = rng.gen_range(0..30);
            let mut v = rng.gen_range(0..30);
            while v == u {
                v = rng.gen_range(0..30);
            }
            let sub = extract_labeled(&g, u, v, 2, DEFAULT_LABEL_CAP).unwrap();
            let lg = to_line_graph(&sub, DEFAULT_LABEL_CAP).unwrap();
            for i in 0..lg.num_nodes() {
                for j in (i + 1)..lg.num_nodes() {
                    let (a, b) = lg.edge_endpoints[i];
                    let (c, d) = lg.edge_endpoints[j];
                    let share = a == c || a == d || b == c || b == d;
                    assert_eq!(lg.graph.has_edge(i, j), share);
                }
            }
        }
    }

    #[test]
    fn target_neighbors_are_exactly_incident_edges() {
        // Structural two-hop property: the line-graph neighbors of the target
        // node are exactly the augmented edges touching either target.
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for seed in 0..20 {
            let g = random_graph(40, 0.08, seed + 300);
            if g.num_edges() < 20 {
                continue;
            }
            let u = rng.gen_range(0..40);
            let mut v = rng.gen_range(0..40);
            while v == u {
                v = rng.gen_range(0..40);
            }
            let sub = extract_labeled(&g, u, v, 2, DEFAULT_LABEL_CAP).unwrap();
            let lg = to_line_graph(&sub, DEFAULT_LABEL_CAP).unwrap();
            let mut expected: Vec<usize> = lg
                .edge_endpoints
                .iter()
                .enumerate()
                .filter(|&(i, &(a, b))| {
                    i != lg.target_index && (a == 0 || a == 1 || b == 0 || b == 1)
                })
                .map(|(i, _)| i)
                .collect();
            expected.sort_unstable();
            assert_eq!(lg.graph.neighbors(lg.target_index), expected.as_slice());
        }
    }

    #[test]
    fn constructed_counts_match_size_formula_through_pipeline() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for seed in 0..30 {
            let g = random_graph(30, 0.1, seed + 500);
            if g.num_edges() < 10 {
                continue;
            }
            let u = rng.gen_range(0..30);
            let mut v = rng.gen_range(0..30);
            while v == u {
                v = rng.gen_range(0..30);
            }
            let sub = extract_labeled(&g, u, v, 2, DEFAULT_LABEL_CAP).unwrap();
            let lg = to_line_graph(&sub, DEFAULT_LABEL_CAP).unwrap();
            // Rebuild the augmented subgraph and apply the size formula.
            let mut aug: Vec<(usize, usize)> = sub.local.edges().collect();
            aug.push((0, 1));
            let aug_graph = Graph::build(&aug, sub.num_nodes(), None).unwrap();
            let (nodes, edges) = line_graph_size(&aug_graph);
            assert_eq!(lg.num_nodes(), nodes);
            assert_eq!(lg.graph.num_edges(), edges);
        }
    }

    #[test]
    fn attributed_subgraph_appends_summed_attributes() {
        let attrs = vec![vec![1.0, 0.0], vec![0.0, 2.0], vec![0.5, 0.5]];
        let g = Graph::build(&[(0, 2), (2, 1)], 3, Some(attrs)).unwrap();
        let sub = drnl_label(
            crate::subgraph::extract_enclosing(&g, 0, 1, 2).unwrap(),
            DEFAULT_LABEL_CAP,
        );
        let lg = to_line_graph(&sub, DEFAULT_LABEL_CAP).unwrap();
        let cap = DEFAULT_LABEL_CAP as usize;
        assert_eq!(lg.attr_width(), 2 * cap + 2);
        // Target edge (0,1): X_u + X_v = [1,2].
        let trow = lg.node_attrs.row(lg.target_index);
        assert_eq!(&trow[2 * cap..], &[1.0, 2.0]);
    }
}
