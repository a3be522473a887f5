//! Solves the desk-scale Fischer-Tropsch flowsheet once: trains the three
//! surrogates, assembles the full mixed-integer model, minimizes annual
//! cost, and prints the selected design with its kerosene metrics.
//!
//! ```bash
//! cargo run --release --example solve_desk
//! ```
//!
//! The branch-and-bound log streams to stderr.

use std::path::Path;
use std::time::Instant;

use saffron::algebra::VarKind;
use saffron::scenario::{load_scenario, post_kerosene_metrics, prepare};
use saffron::solver::solve_miqcp;

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/ft_saf_desk.toml");
    let cfg = load_scenario(&path).expect("scenario file parses");
    let base = path.parent().unwrap().to_path_buf();

    let started = Instant::now();
    let prep = prepare(&cfg, &base).expect("scenario prepares");
    for (id, m) in &prep.train_metrics {
        let min_r2 = m.per_output_r2.iter().cloned().fold(f64::INFINITY, f64::min);
        println!("network {id}: test r2 {:.5} (weakest output {min_r2:.5})", m.r2);
    }
    let binaries = prep
        .model
        .vars
        .iter()
        .filter(|v| v.kind == VarKind::Binary)
        .count();
    println!(
        "model: {} vars ({} binary), {} rows, {} products; prepared in {:.1}s",
        prep.model.n_vars(),
        binaries,
        prep.model.cons.len(),
        prep.model.bilinears.len(),
        started.elapsed().as_secs_f64()
    );

    let solve_started = Instant::now();
    let mut log = std::io::stderr().lock();
    let sol = solve_miqcp(&prep.model, &prep.options, Some(&mut log));
    println!(
        "status {:?} after {:.1}s, {} nodes: cost {:.4e} $/yr, bound {:.4e}, gap {:.2e}",
        sol.status,
        solve_started.elapsed().as_secs_f64(),
        sol.nodes,
        sol.objective,
        sol.best_bound,
        sol.gap
    );
    if sol.x.is_empty() {
        return;
    }

    println!("emissions {:.4e} kg CO2/yr", sol.x[prep.emissions]);
    print!("selected:");
    for proc in &prep.spec.processes {
        let y = prep.model.var_id(&format!("y[{}]", proc.id)).unwrap();
        if sol.x[y] > 0.5 {
            print!(" {}", proc.id);
        }
    }
    println!();
    if let Some(k) = post_kerosene_metrics(&prep.model, &sol.x, &prep.spec) {
        println!(
            "kerosene: {:.3e} kg/yr at allocation ratio {:.3}",
            k.kerosene_mass,
            k.allocation_ratio.unwrap_or(f64::NAN)
        );
        if let (Some(c), Some(e)) = (k.specific_cost, k.specific_emissions) {
            println!("kerosene: {c:.3} $/kg, {e:.3} kg CO2/kg");
        }
    }
}
