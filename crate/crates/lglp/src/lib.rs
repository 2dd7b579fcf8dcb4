//! Link prediction on line graphs.
//!
//! The pipeline scores a candidate link `(u, v)` in four steps: extract the
//! h-hop enclosing subgraph around the pair, assign each node a double-radius
//! structural label, transform the subgraph into its line graph (the
//! candidate edge becomes a line-graph node), and run graph-convolution
//! layers on the line graph to classify that node. Classical heuristic
//! baselines (Katz, rooted PageRank, SimRank), ranking metrics (AUC / AP),
//! deterministic data splitting, and a repeat-and-average benchmark runner
//! round out the toolkit.
//!
//! Each major capability has a runnable example under `examples/`; the thin
//! `lglp` binary exposes the same machinery as `train` / `eval` /
//! `benchmark` / `sweep` / `split` subcommands.

pub mod error;
pub mod experiment;
pub mod graph;
pub mod heuristics;
pub mod linegraph;
pub mod metrics;
pub mod model;
pub mod split;
pub mod subgraph;
pub mod synthetic;
pub mod tensor;

pub use error::{Error, Result};
pub use graph::Graph;
pub use linegraph::LineGraph;
pub use metrics::EvalResult;
pub use model::{LglpModel, ModelConfig, TrainConfig};
pub use split::DataSplit;
pub use subgraph::EnclosingSubgraph;
