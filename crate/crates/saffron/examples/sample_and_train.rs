//! Generates desk-scale datasets for the three process oracles, trains a
//! ReLU surrogate on each, and prints the regression metrics.
//!
//! ```bash
//! cargo run --release --example sample_and_train
//! ```

use std::time::Instant;

use saffron::oracles::dataset::{generate_dataset, DatasetConfig, OracleKind};
use saffron::trainer::{desk_config, train};

fn main() {
    let kinds = [
        OracleKind::Gasification,
        OracleKind::ReverseShift,
        OracleKind::FischerTropsch,
    ];
    println!(
        "{:<14} {:>7} {:>7} {:>12} {:>9} {:>9} {:>10} {:>8}",
        "oracle", "rows", "hidden", "mse", "r2", "min r2", "mape", "secs"
    );
    for kind in kinds {
        let started = Instant::now();
        let dataset = generate_dataset(&DatasetConfig {
            kind,
            samples: kind.desk_samples(),
            seed: 2024,
        });
        let config = desk_config(kind);
        let report = train(&dataset, &config).expect("training failed");
        let m = &report.test_metrics;
        let min_r2 = m.per_output_r2.iter().cloned().fold(f64::INFINITY, f64::min);
        println!(
            "{:<14} {:>7} {:>7} {:>12.4e} {:>9.5} {:>9.5} {:>10.6} {:>8.1}",
            kind.name(),
            dataset.len(),
            config.hidden,
            m.mse,
            m.r2,
            min_r2,
            m.mape,
            started.elapsed().as_secs_f64()
        );
        if let Some((j, r2)) = m
            .per_output_r2
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        {
            println!(
                "{:<14} weakest output: {} (r2 = {:.5})",
                "", dataset.output_names[j], r2
            );
        }
    }
}
