//! The full benchmark protocol: repeated splits with derived seeds, the
//! model against a heuristic on identical splits, a fraction sweep, and the
//! report / CSV artifacts.
//!
//! ```bash
//! cargo run --example benchmark_protocol
//! ```

use lglp::experiment::{history_csv, run, sweep, sweep_summary_csv, DatasetSpec, ExperimentConfig, Method};

fn main() -> lglp::Result<()> {
    let dataset = DatasetSpec::Synthetic("pp:120:6:0.5:0.01:11".into());

    let mut cfg = ExperimentConfig::new(dataset.clone(), Method::Lglp);
    cfg.repeats = 2;
    cfg.train_frac = 0.8;
    cfg.train.epochs = 10;
    cfg.seed = 5;

    let report = run(&cfg)?;
    println!(
        "lglp:     AUC {:.2} (±{:.2}), AP {:.2} (±{:.2}) over {} repeats",
        100.0 * report.auc_mean,
        100.0 * report.auc_std,
        100.0 * report.ap_mean,
        100.0 * report.ap_std,
        report.repeats.len()
    );

    let mut katz_cfg = cfg.clone();
    katz_cfg.method = Method::Katz;
    let katz_report = run(&katz_cfg)?;
    println!(
        "katz:     AUC {:.2} (±{:.2}) on byte-identical splits",
        100.0 * katz_report.auc_mean,
        100.0 * katz_report.auc_std
    );
    assert_eq!(
        report.repeats[0].split_fingerprint,
        katz_report.repeats[0].split_fingerprint
    );

    let dir = std::env::temp_dir().join("lglp_benchmark_example");
    std::fs::create_dir_all(&dir)?;
    let report_path = dir.join("report.json");
    std::fs::write(&report_path, serde_json::to_string_pretty(&report)?)?;
    let history_path = dir.join("history.csv");
    std::fs::write(&history_path, history_csv(&report)?)?;
    println!("report -> {}", report_path.display());
    println!("history -> {}", history_path.display());

    // Fraction sweep (kept small here; the full protocol is
    // 0.3..0.8 x 10 repeats via `lglp sweep`).
    let reports = sweep(&katz_cfg, &[0.5, 0.8])?;
    let summary = sweep_summary_csv(&reports);
    let summary_path = dir.join("sweep_summary.csv");
    std::fs::write(&summary_path, &summary)?;
    println!("sweep summary -> {}\n{summary}", summary_path.display());
    Ok(())
}
