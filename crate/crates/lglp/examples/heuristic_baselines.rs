//! Scores test links with the three classical baselines (truncated Katz,
//! rooted PageRank, SimRank) and compares their AUC / AP.
//!
//! ```bash
//! cargo run --example heuristic_baselines
//! ```

use lglp::heuristics::{
    katz_scores, rooted_pagerank_scores, simrank_scores, HeuristicConfig,
};
use lglp::metrics::evaluate;
use lglp::split::{split_links, LinkSample};
use lglp::synthetic::planted_partition;

fn main() -> lglp::Result<()> {
    let graph = planted_partition(150, 6, 0.4, 0.01, 3)?;
    let split = split_links(&graph, 0.8, 9)?;
    let pairs: Vec<(usize, usize)> = split
        .test_pos
        .iter()
        .chain(&split.test_neg)
        .map(LinkSample::pair)
        .collect();
    let n_pos = split.test_pos.len();
    let cfg = HeuristicConfig::default();
    println!(
        "observed graph: {} nodes, {} edges; scoring {} test pairs\n",
        split.observed.num_nodes(),
        split.observed.num_edges(),
        pairs.len()
    );

    let scorers: [(&str, fn(&lglp::Graph, &[(usize, usize)], &HeuristicConfig) -> lglp::Result<Vec<f64>>); 3] = [
        ("katz", katz_scores),
        ("pagerank", rooted_pagerank_scores),
        ("simrank", simrank_scores),
    ];
    for (name, scorer) in scorers {
        let scores = scorer(&split.observed, &pairs, &cfg)?;
        let eval = evaluate(&scores[..n_pos], &scores[n_pos..])?;
        println!("{name:>8}: AUC {:.4}, AP {:.4}", eval.auc, eval.ap);
    }

    if cfg.katz_divergence_risk(&split.observed) {
        println!("warning: katz_beta is too large for this degree distribution");
    }
    Ok(())
}
