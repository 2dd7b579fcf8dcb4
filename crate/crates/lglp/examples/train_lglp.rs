//! Trains the line-graph link predictor on a synthetic planted-partition
//! graph, prints the per-epoch trace, and round-trips the checkpoint.
//!
//! ```bash
//! cargo run --example train_lglp
//! ```

use lglp::metrics::evaluate;
use lglp::model::{train, ModelConfig, TrainConfig};
use lglp::split::split_links;
use lglp::synthetic::planted_partition;
use lglp::LglpModel;

fn main() -> lglp::Result<()> {
    // Ten dense communities: intra-community pairs share many neighbors, so
    // the structural signal is strong.
    let graph = planted_partition(200, 10, 0.5, 0.002, 7)?;
    println!(
        "graph: {} nodes, {} edges",
        graph.num_nodes(),
        graph.num_edges()
    );

    let split = split_links(&graph, 0.8, 1)?;
    println!(
        "split: {} train pos, {} test pos",
        split.train_pos.len(),
        split.test_pos.len()
    );

    let mcfg = ModelConfig::default();
    let tcfg = TrainConfig {
        seed: 11,
        ..TrainConfig::default()
    };
    let started = std::time::Instant::now();
    let outcome = train(&split, &mcfg, &tcfg)?;
    println!("trained in {:.1}s", started.elapsed().as_secs_f64());
    for stats in &outcome.history {
        println!(
            "epoch {:>2}: train loss {:.4}, test AUC {:.4}",
            stats.epoch, stats.train_loss, stats.test_auc
        );
    }

    let n_pos = split.test_pos.len();
    let eval = evaluate(
        &outcome.test_scores[..n_pos],
        &outcome.test_scores[n_pos..],
    )?;
    println!(
        "final: AUC {:.4}, AP {:.4} over {} pos / {} neg",
        eval.auc, eval.ap, eval.n_pos, eval.n_neg
    );

    // Checkpoints round-trip exactly.
    let path = std::env::temp_dir().join("lglp_example_model.json");
    outcome.model.save(&path)?;
    let restored = LglpModel::load(&path)?;
    let pairs = [(0, 1), (0, 199)];
    let before = outcome.model.predict(&split.observed, &pairs, tcfg.hops)?;
    let after = restored.predict(&split.observed, &pairs, tcfg.hops)?;
    assert_eq!(before, after);
    println!("checkpoint round-trip OK: scores {before:?}");
    Ok(())
}
