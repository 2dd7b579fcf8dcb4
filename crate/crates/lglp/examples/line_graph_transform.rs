//! Transforms a labeled enclosing subgraph into its line graph: every edge
//! (including the injected candidate edge) becomes a node whose attribute
//! encodes the endpoint labels.
//!
//! ```bash
//! cargo run --example line_graph_transform
//! ```

use lglp::graph::Graph;
use lglp::linegraph::{edge_attribute, line_graph_size, to_line_graph};
use lglp::subgraph::extract_labeled;

fn main() -> lglp::Result<()> {
    // Four nodes, five edges; the line graph has five nodes.
    let g = Graph::build(&[(0, 1), (0, 2), (0, 3), (1, 2), (2, 3)], 4, None)?;
    let (nodes, edges) = line_graph_size(&g);
    println!(
        "size property: {} edges -> line graph with {nodes} nodes, {edges} edges",
        g.num_edges()
    );

    // Through the link-prediction pipeline with (0,1) as the candidate pair.
    let label_cap = 8;
    let sub = extract_labeled(&g, 0, 1, 2, label_cap)?;
    let lg = to_line_graph(&sub, label_cap)?;
    println!(
        "\npipeline line graph: {} nodes, {} edges, attr width {}",
        lg.num_nodes(),
        lg.graph.num_edges(),
        lg.attr_width()
    );
    println!(
        "target edge sits at line-graph node {} = {:?}",
        lg.target_index, lg.edge_endpoints[lg.target_index]
    );
    println!(
        "its neighbors are every other edge touching a target: {:?}",
        lg.graph.neighbors(lg.target_index)
    );

    // Attribute transfer is symmetric in the endpoints.
    let a = edge_attribute(3, 1, None, None, label_cap)?;
    let b = edge_attribute(1, 3, None, None, label_cap)?;
    assert_eq!(a, b);
    println!("\nedge_attribute(3,1) == edge_attribute(1,3): {a:?}");

    println!("\ndebug dump:\n{}", lg.dump());
    Ok(())
}
