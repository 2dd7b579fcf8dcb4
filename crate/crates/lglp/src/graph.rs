//! Undirected simple-graph storage in compressed sparse row form, plus the
//! construction, traversal, and file-ingestion primitives shared by every
//! other module.

use std::collections::{HashSet, VecDeque};
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Undirected simple graph over dense node ids `0..n`.
///
/// Adjacency is stored as sorted compressed neighbor lists and is always
/// symmetric. Self-loops are rejected at construction and duplicate edges are
/// collapsed, so `degree(v)` counts distinct neighbors. A graph may carry one
/// real-valued attribute row per node (`attr_dim == 0` for plain graphs).
///
/// Graphs are immutable after construction and safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    num_nodes: usize,
    offsets: Vec<usize>,
    adj: Vec<usize>,
    node_attrs: Option<Vec<f64>>,
    attr_dim: usize,
}

impl Graph {
    /// Builds a graph from an edge list.
    ///
    /// Edges may appear in any order and orientation; duplicates (including
    /// `(u,v)` next to `(v,u)`) collapse to a single undirected edge. Rejects
    /// self-loops, out-of-range ids, and attribute matrices whose row count
    /// does not match `num_nodes`.
    pub fn build(
        edges: &[(usize, usize)],
        num_nodes: usize,
        attrs: Option<Vec<Vec<f64>>>,
    ) -> Result<Graph> {
        let mut canonical: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            if u >= num_nodes {
                return Err(Error::NodeOutOfRange { id: u, n: num_nodes });
            }
            if v >= num_nodes {
                return Err(Error::NodeOutOfRange { id: v, n: num_nodes });
            }
            canonical.push((u.min(v), u.max(v)));
        }
        canonical.sort_unstable();
        canonical.dedup();

        let mut degrees = vec![0usize; num_nodes];
        for &(u, v) in &canonical {
            degrees[u] += 1;
            degrees[v] += 1;
        }
        let mut offsets = Vec::with_capacity(num_nodes + 1);
        offsets.push(0usize);
        for v in 0..num_nodes {
            offsets.push(offsets[v] + degrees[v]);
        }
        let mut cursor = offsets.clone();
        let mut adj = vec![0usize; 2 * canonical.len()];
        // One pass over the sorted canonical pairs leaves every row sorted:
        // for row r, neighbors < r arrive in ascending order before any
        // neighbor > r does.
        for &(u, v) in &canonical {
            adj[cursor[u]] = v;
            cursor[u] += 1;
            adj[cursor[v]] = u;
            cursor[v] += 1;
        }

        let (node_attrs, attr_dim) = match attrs {
            None => (None, 0),
            Some(rows) => {
                if rows.len() != num_nodes {
                    return Err(Error::AttrRowCount {
                        got: rows.len(),
                        expected: num_nodes,
                    });
                }
                let dim = rows.first().map_or(0, Vec::len);
                let mut flat = Vec::with_capacity(num_nodes * dim);
                for (i, row) in rows.iter().enumerate() {
                    if row.len() != dim {
                        return Err(Error::AttrWidth {
                            row: i,
                            got: row.len(),
                            expected: dim,
                        });
                    }
                    if row.iter().any(|x| !x.is_finite()) {
                        return Err(Error::NonFinite("node attributes"));
                    }
                    flat.extend_from_slice(row);
                }
                (Some(flat), dim)
            }
        };

        Ok(Graph {
            num_nodes,
            offsets,
            adj,
            node_attrs,
            attr_dim,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    /// Number of undirected edges.
    pub fn num_edges(&self) -> usize {
        self.adj.len() / 2
    }

    /// Degree of `v` (distinct neighbors).
    ///
    /// Panics if `v` is out of range.
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Sorted neighbors of `v`.
    ///
    /// Panics if `v` is out of range.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        assert!(v < self.num_nodes, "node {v} out of range");
        &self.adj[self.offsets[v]..self.offsets[v + 1]]
    }

    /// True if the undirected edge `(u,v)` is present.
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        if u >= self.num_nodes || v >= self.num_nodes {
            return false;
        }
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Iterates edges once each, as canonical `(u,v)` pairs with `u < v`, in
    /// ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.num_nodes).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .filter(move |&&v| v > u)
                .map(move |&v| (u, v))
        })
    }

    pub fn attr_dim(&self) -> usize {
        self.attr_dim
    }

    /// Attribute row of `v`, if the graph is attributed.
    pub fn attr_row(&self, v: usize) -> Option<&[f64]> {
        self.node_attrs
            .as_ref()
            .map(|a| &a[v * self.attr_dim..(v + 1) * self.attr_dim])
    }

    /// All attribute rows in node order, if present.
    pub fn attr_rows(&self) -> Option<Vec<Vec<f64>>> {
        self.node_attrs.as_ref().map(|_| {
            (0..self.num_nodes)
                .map(|v| self.attr_row(v).unwrap().to_vec())
                .collect()
        })
    }

    /// Unweighted shortest-path hop distances from `source` to every node,
    /// with `None` marking unreachable nodes.
    ///
    /// With `restrict`, traversal is confined to the given node set (the
    /// source must be a member) and everything outside it is unreachable.
    pub fn bfs_distances(
        &self,
        source: usize,
        restrict: Option<&HashSet<usize>>,
    ) -> Result<Vec<Option<u32>>> {
        if source >= self.num_nodes {
            return Err(Error::NodeOutOfRange {
                id: source,
                n: self.num_nodes,
            });
        }
        if let Some(set) = restrict {
            if !set.contains(&source) {
                return Err(Error::SourceOutsideRestriction(source));
            }
        }
        let mut dist = vec![None; self.num_nodes];
        dist[source] = Some(0);
        let mut queue = VecDeque::new();
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &w in self.neighbors(u) {
                if dist[w].is_none() {
                    if let Some(set) = restrict {
                        if !set.contains(&w) {
                            continue;
                        }
                    }
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        Ok(dist)
    }

    /// BFS truncated at `max_depth` hops; returns `(node, distance)` pairs
    /// for every node reached, in visit order (source first).
    pub(crate) fn bfs_up_to(&self, source: usize, max_depth: u32) -> Vec<(usize, u32)> {
        let mut dist = vec![u32::MAX; self.num_nodes];
        dist[source] = 0;
        let mut out = vec![(source, 0)];
        let mut queue = VecDeque::new();
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let du = dist[u];
            if du == max_depth {
                continue;
            }
            for &w in self.neighbors(u) {
                if dist[w] == u32::MAX {
                    dist[w] = du + 1;
                    out.push((w, du + 1));
                    queue.push_back(w);
                }
            }
        }
        out
    }

    /// FNV-1a hash over node count and canonical edge list; used as a dataset
    /// fingerprint in reports.
    pub fn fingerprint(&self) -> u64 {
        let mut h = fnv1a_init();
        h = fnv1a_u64(h, self.num_nodes as u64);
        for (u, v) in self.edges() {
            h = fnv1a_u64(h, u as u64);
            h = fnv1a_u64(h, v as u64);
        }
        h
    }
}

const FNV_OFFSET: u64 = 0xcbf29ce484222325;
const FNV_PRIME: u64 = 0x100000001b3;

pub(crate) fn fnv1a_init() -> u64 {
    FNV_OFFSET
}

pub(crate) fn fnv1a_u64(mut h: u64, x: u64) -> u64 {
    for byte in x.to_le_bytes() {
        h ^= u64::from(byte);
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// Edge list read from disk, with original node ids remapped to `0..n`.
#[derive(Debug, Clone)]
pub struct EdgeList {
    /// Remapped edges.
    pub edges: Vec<(usize, usize)>,
    /// Number of distinct nodes seen in the file.
    pub num_nodes: usize,
    /// `id_map[new] = original`; original ids sorted ascending, so the
    /// remapping is stable for a given file regardless of line order.
    pub id_map: Vec<u64>,
}

/// Reads a whitespace-separated edge-list text file: one edge per line, two
/// integer tokens; lines starting with `#` or `%` are ignored. Node ids may
/// be arbitrary (1-based, sparse); they are remapped to dense `0..n` ids via
/// the sorted order of the original ids.
pub fn read_edge_list(path: &Path) -> Result<EdgeList> {
    let text = fs::read_to_string(path).map_err(|e| Error::Data {
        path: path.display().to_string(),
        msg: e.to_string(),
    })?;
    let mut raw: Vec<(u64, u64)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('%') {
            continue;
        }
        let mut it = line.split_whitespace();
        let parse = |tok: Option<&str>| -> Result<u64> {
            tok.ok_or(())
                .and_then(|t| t.parse::<u64>().map_err(|_| ()))
                .map_err(|()| Error::Data {
                    path: path.display().to_string(),
                    msg: format!("line {}: expected two integer tokens", lineno + 1),
                })
        };
        let u = parse(it.next())?;
        let v = parse(it.next())?;
        raw.push((u, v));
    }
    let mut ids: Vec<u64> = raw.iter().flat_map(|&(u, v)| [u, v]).collect();
    ids.sort_unstable();
    ids.dedup();
    let index_of = |x: u64| ids.binary_search(&x).unwrap();
    let edges = raw
        .iter()
        .map(|&(u, v)| (index_of(u), index_of(v)))
        .collect();
    Ok(EdgeList {
        edges,
        num_nodes: ids.len(),
        id_map: ids,
    })
}

/// Reads a node-attribute file: one row per node, comma-separated reals, row
/// order matching the remapped node order of the accompanying edge list.
pub fn read_attr_rows(path: &Path, num_nodes: usize) -> Result<Vec<Vec<f64>>> {
    let text = fs::read_to_string(path).map_err(|e| Error::Data {
        path: path.display().to_string(),
        msg: e.to_string(),
    })?;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('%') {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|t| {
                t.trim().parse::<f64>().map_err(|_| Error::Data {
                    path: path.display().to_string(),
                    msg: format!("line {}: bad real number '{}'", lineno + 1, t),
                })
            })
            .collect::<Result<_>>()?;
        rows.push(row);
    }
    if rows.len() != num_nodes {
        return Err(Error::AttrRowCount {
            got: rows.len(),
            expected: num_nodes,
        });
    }
    Ok(rows)
}

/// Loads a graph from an edge-list file plus an optional attribute file.
/// Returns the graph and the stable original-id remapping table.
pub fn load_graph(edge_path: &Path, attr_path: Option<&Path>) -> Result<(Graph, Vec<u64>)> {
    let list = read_edge_list(edge_path)?;
    let attrs = match attr_path {
        Some(p) => Some(read_attr_rows(p, list.num_nodes)?),
        None => None,
    };
    let g = Graph::build(&list.edges, list.num_nodes, attrs)?;
    Ok((g, list.id_map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn path3() -> Graph {
        Graph::build(&[(0, 1), (1, 2)], 3, None).unwrap()
    }

    #[test]
    fn path_graph_degrees() {
        let g = path3();
        assert_eq!(
            (0..3).map(|v| g.degree(v)).collect::<Vec<_>>(),
            vec![1, 2, 1]
        );
        assert_eq!(g.num_edges(), 2);
    }

    #[test]
    fn four_node_five_edge_graph() {
        // K4 minus one edge: 4 nodes, 5 edges.
        let g = Graph::build(&[(0, 1), (0, 2), (0, 3), (1, 2), (2, 3)], 4, None).unwrap();
        assert_eq!(g.num_nodes(), 4);
        assert_eq!(g.num_edges(), 5);
    }

    #[test]
    fn reversed_duplicate_collapses() {
        let g = Graph::build(&[(0, 1), (1, 0)], 2, None).unwrap();
        assert_eq!(g.num_edges(), 1);
        assert_eq!(g.neighbors(0), &[1]);
    }

    #[test]
    fn neighbors_examples() {
        let g = path3();
        assert_eq!(g.neighbors(1), &[0, 2]);
        let lonely = Graph::build(&[(0, 1)], 3, None).unwrap();
        assert_eq!(lonely.neighbors(2), &[] as &[usize]);
        let tri = Graph::build(&[(0, 1), (1, 2), (0, 2)], 3, None).unwrap();
        assert_eq!(tri.neighbors(0), &[1, 2]);
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn neighbors_rejects_out_of_range() {
        path3().neighbors(3);
    }

    #[test]
    fn build_rejects_self_loop() {
        assert!(matches!(
            Graph::build(&[(1, 1)], 3, None),
            Err(Error::SelfLoop(1))
        ));
    }

    #[test]
    fn build_rejects_out_of_range() {
        assert!(matches!(
            Graph::build(&[(0, 7)], 3, None),
            Err(Error::NodeOutOfRange { id: 7, n: 3 })
        ));
    }

    #[test]
    fn build_rejects_attr_row_mismatch() {
        let attrs = vec![vec![1.0], vec![2.0]];
        assert!(matches!(
            Graph::build(&[(0, 1)], 3, Some(attrs)),
            Err(Error::AttrRowCount { got: 2, expected: 3 })
        ));
    }

    #[test]
    fn build_rejects_non_finite_attrs() {
        let attrs = vec![vec![1.0], vec![f64::NAN], vec![0.0]];
        assert!(matches!(
            Graph::build(&[(0, 1)], 3, Some(attrs)),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn bfs_on_path() {
        let g = path3();
        let d = g.bfs_distances(0, None).unwrap();
        assert_eq!(d, vec![Some(0), Some(1), Some(2)]);
    }

    #[test]
    fn bfs_unreachable_is_none() {
        let g = Graph::build(&[(0, 1)], 4, None).unwrap();
        let d = g.bfs_distances(0, None).unwrap();
        assert_eq!(d[2], None);
        assert_eq!(d[3], None);
    }

    #[test]
    fn bfs_rejects_bad_source() {
        let g = path3();
        assert!(g.bfs_distances(9, None).is_err());
    }

    #[test]
    fn bfs_respects_restriction() {
        // 0-1-2 path; restricting to {0,2} disconnects them.
        let g = path3();
        let set: HashSet<usize> = [0, 2].into_iter().collect();
        let d = g.bfs_distances(0, Some(&set)).unwrap();
        assert_eq!(d[0], Some(0));
        assert_eq!(d[1], None);
        assert_eq!(d[2], None);
        assert!(matches!(
            g.bfs_distances(1, Some(&set)),
            Err(Error::SourceOutsideRestriction(1))
        ));
    }

    /// All-pairs Floyd–Warshall oracle on a dense matrix.
    fn floyd_warshall(g: &Graph) -> Vec<Vec<Option<u32>>> {
        let n = g.num_nodes();
        let inf = u32::MAX / 4;
        let mut d = vec![vec![inf; n]; n];
        for v in 0..n {
            d[v][v] = 0;
        }
        for (u, v) in g.edges() {
            d[u][v] = 1;
            d[v][u] = 1;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let via = d[i][k].saturating_add(d[k][j]);
                    if via < d[i][j] {
                        d[i][j] = via;
                    }
                }
            }
        }
        d.into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|x| if x >= inf { None } else { Some(x) })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn bfs_matches_floyd_warshall_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let n = 50;
            let mut edges = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.gen::<f64>() < 0.06 {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::build(&edges, n, None).unwrap();
            let oracle = floyd_warshall(&g);
            for s in 0..n {
                assert_eq!(g.bfs_distances(s, None).unwrap(), oracle[s]);
            }
        }
    }

    #[test]
    fn bfs_up_to_caps_depth() {
        let g = Graph::build(&[(0, 1), (1, 2), (2, 3)], 4, None).unwrap();
        let ball: Vec<usize> = g.bfs_up_to(0, 2).into_iter().map(|(v, _)| v).collect();
        assert_eq!(ball, vec![0, 1, 2]);
    }

    #[test]
    fn edge_list_file_roundtrip() {
        let dir = std::env::temp_dir().join("lglp_graph_test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("edges.txt");
        fs::write(&path, "# comment\n% comment\n10 30\n30 20\n10 30\n").unwrap();
        let list = read_edge_list(&path).unwrap();
        assert_eq!(list.num_nodes, 3);
        assert_eq!(list.id_map, vec![10, 20, 30]);
        // 10->0, 20->1, 30->2
        assert_eq!(list.edges, vec![(0, 2), (2, 1), (0, 2)]);
        let g = Graph::build(&list.edges, list.num_nodes, None).unwrap();
        assert_eq!(g.num_edges(), 2);
    }

    #[test]
    fn edge_list_rejects_garbage() {
        let dir = std::env::temp_dir().join("lglp_graph_test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.txt");
        fs::write(&path, "1 two\n").unwrap();
        assert!(read_edge_list(&path).is_err());
    }

    prop_compose! {
        fn arb_edges()(n in 2usize..40, raw in prop::collection::vec((0usize..40, 0usize..40), 0..120))
            -> (usize, Vec<(usize, usize)>) {
            let edges: Vec<(usize, usize)> = raw
                .into_iter()
                .map(|(u, v)| (u % n, v % n))
                .filter(|(u, v)| u != v)
                .collect();
            (n, edges)
        }
    }

    proptest! {
        #[test]
        fn degree_sum_is_twice_edge_count((n, edges) in arb_edges()) {
            let g = Graph::build(&edges, n, None).unwrap();
            let total: usize = (0..n).map(|v| g.degree(v)).sum();
            prop_assert_eq!(total, 2 * g.num_edges());
        }

        #[test]
        fn build_is_order_and_orientation_invariant(
            (n, edges) in arb_edges(),
            seed in 0u64..1000,
        ) {
            let g1 = Graph::build(&edges, n, None).unwrap();
            let mut shuffled = edges.clone();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            use rand::seq::SliceRandom;
            shuffled.shuffle(&mut rng);
            let flipped: Vec<(usize, usize)> = shuffled
                .into_iter()
                .map(|(u, v)| if rng.gen::<bool>() { (v, u) } else { (u, v) })
                .collect();
            let g2 = Graph::build(&flipped, n, None).unwrap();
            prop_assert_eq!(g1, g2);
        }

        #[test]
        fn bfs_satisfies_hop_triangle_inequality((n, edges) in arb_edges()) {
            let g = Graph::build(&edges, n, None).unwrap();
            let d = g.bfs_distances(0, None).unwrap();
            for (u, v) in g.edges() {
                if let (Some(du), Some(dv)) = (d[u], d[v]) {
                    prop_assert!(dv <= du + 1);
                    prop_assert!(du <= dv + 1);
                }
            }
        }
    }
}
