//! Builds graphs from edge lists: in-memory construction, and the text
//! format with comment lines and sparse 1-based ids remapped to dense ids.
//!
//! ```bash
//! cargo run --example load_graph
//! ```

use lglp::graph::{load_graph, Graph};

fn main() -> lglp::Result<()> {
    // Direct construction; duplicates and reversed orientations collapse.
    let g = Graph::build(&[(0, 1), (1, 0), (1, 2), (2, 3), (0, 2)], 4, None)?;
    println!("built: {} nodes, {} edges", g.num_nodes(), g.num_edges());
    for v in 0..g.num_nodes() {
        println!("  node {v}: degree {}, neighbors {:?}", g.degree(v), g.neighbors(v));
    }

    let d = g.bfs_distances(0, None)?;
    println!("hop distances from 0: {d:?}");

    // File ingestion: '#'/'%' comments, arbitrary ids, stable remapping.
    let dir = std::env::temp_dir().join("lglp_load_graph_example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("edges.txt");
    std::fs::write(
        &path,
        "# an edge list with 1-based, sparse ids\n10 20\n20 30\n% another comment\n30 100\n",
    )?;
    let (from_file, id_map) = load_graph(&path, None)?;
    println!(
        "loaded {}: {} nodes, {} edges",
        path.display(),
        from_file.num_nodes(),
        from_file.num_edges()
    );
    println!("id remapping (dense -> original): {id_map:?}");
    Ok(())
}
