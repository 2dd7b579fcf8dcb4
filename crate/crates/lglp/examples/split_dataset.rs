//! Deterministic train/test splitting with negative sampling, plus dumping
//! and reloading splits for exact reruns.
//!
//! ```bash
//! cargo run --example split_dataset
//! ```

use lglp::split::{split_links, sweep_fractions, DataSplit};
use lglp::synthetic::barabasi_albert;

fn main() -> lglp::Result<()> {
    let graph = barabasi_albert(300, 3, 42)?;
    println!(
        "graph: {} nodes, {} edges",
        graph.num_nodes(),
        graph.num_edges()
    );

    let split = split_links(&graph, 0.8, 7)?;
    println!(
        "80/20 split (seed 7): {} train pos, {} train neg, {} test pos, {} test neg",
        split.train_pos.len(),
        split.train_neg.len(),
        split.test_pos.len(),
        split.test_neg.len()
    );
    println!(
        "observed graph keeps exactly the training positives: {} edges",
        split.observed.num_edges()
    );
    println!("fingerprint: {:016x}", split.fingerprint());

    // Dump and reload: the reloaded split is the same split.
    let path = std::env::temp_dir().join("lglp_example_split.json");
    split.save(&path)?;
    let reloaded = DataSplit::load(&path, &graph)?;
    assert_eq!(reloaded.fingerprint(), split.fingerprint());
    println!("round-trip through {} OK", path.display());

    // The repeat protocol: several fractions, several derived seeds each.
    let splits = sweep_fractions(&graph, &[0.5, 0.8], 3, 100)?;
    println!("sweep produced {} splits:", splits.len());
    for s in &splits {
        println!(
            "  frac {:.1} seed {}: {} train pos, fingerprint {:016x}",
            s.train_frac,
            s.seed,
            s.train_pos.len(),
            s.fingerprint()
        );
    }
    Ok(())
}
