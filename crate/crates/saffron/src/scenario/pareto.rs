//! Epsilon-constraint sweep over the emission axis.
//!
//! Each sweep point minimizes cost under an upper bound on the annual CO2
//! balance. Caps run from loose to tight so every solve can warm-start
//! from the previous incumbent, whose binary pattern usually remains
//! feasible under the next cap. Infeasible caps produce flagged points
//! rather than aborting the sweep, and solver resource limits are recorded
//! per point the same way.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use crate::core_model::ProcessKind;
use crate::solver::{solve_miqcp, Solution, SolveStatus};

use super::kerosene::{post_kerosene_metrics, KeroseneReport};
use super::prepare::{surrogate_input_label, Prepared};
use super::reborrow_log;

/// One solved point of the sweep. Metric fields are absent when the solve
/// produced no incumbent.
#[derive(Debug, Clone, Serialize)]
pub struct ParetoPoint {
    /// Emission cap in kg CO2 per year; absent for the unconstrained point.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cap: Option<f64>,
    pub status: SolveStatus,
    pub feasible: bool,
    /// Annualized cost of the incumbent, $ per year.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cost: Option<f64>,
    pub best_bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
    /// Annual CO2 balance of the incumbent, kg per year.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub emissions: Option<f64>,
    pub active_processes: Vec<String>,
    /// Raw surrogate input values of selected processes, keyed
    /// `Process.index`.
    pub operating: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kerosene: Option<KeroseneReport>,
    pub nodes: usize,
}

/// A full sweep: the cap schedule actually used and one point per cap.
#[derive(Debug, Clone, Serialize)]
pub struct SweepOutcome {
    pub caps: Vec<f64>,
    /// True when the schedule was derived from pre-solves instead of given
    /// explicitly.
    pub auto_grid: bool,
    pub points: Vec<ParetoPoint>,
}

fn solve_with_cap(
    prep: &Prepared,
    cap: Option<f64>,
    warm: Option<Vec<f64>>,
    log: Option<&mut dyn Write>,
) -> Solution {
    let mut model = prep.model.clone();
    if let Some(c) = cap {
        let v = &mut model.vars[prep.emissions];
        v.hi = v.hi.min(c);
    }
    let mut opts = prep.options.clone();
    opts.warm_start = warm;
    solve_miqcp(&model, &opts, log)
}

fn extract_point(prep: &Prepared, cap: Option<f64>, sol: &Solution) -> ParetoPoint {
    let feasible = matches!(sol.status, SolveStatus::Optimal | SolveStatus::Feasible);
    let mut active = Vec::new();
    let mut operating = BTreeMap::new();
    let mut kerosene = None;
    if feasible {
        for proc in &prep.spec.processes {
            let y = prep
                .model
                .var_id(&format!("y[{}]", proc.id))
                .expect("every process has a selection binary");
            if sol.x[y] > 0.5 {
                active.push(proc.id.clone());
                if let ProcessKind::Surrogate(sur) = &proc.kind {
                    for binding in &sur.input_bindings {
                        let label = surrogate_input_label(&proc.id, binding);
                        if let Some(id) = prep.model.var_id(&label) {
                            operating
                                .insert(format!("{}.{}", proc.id, binding.input), sol.x[id]);
                        }
                    }
                }
            }
        }
        kerosene = post_kerosene_metrics(&prep.model, &sol.x, &prep.spec);
    }
    ParetoPoint {
        cap,
        status: sol.status,
        feasible,
        cost: feasible.then_some(sol.objective),
        best_bound: sol.best_bound,
        gap: feasible.then_some(sol.gap),
        emissions: feasible.then(|| sol.x[prep.emissions]),
        active_processes: active,
        operating,
        kerosene,
        nodes: sol.nodes,
    }
}

/// Cap schedule between the unconstrained optimum's emissions and the
/// attainable minimum, loose to tight. Positive endpoints are spaced
/// geometrically, otherwise linearly.
fn cap_grid(e_max: f64, e_min: f64, n: usize) -> Vec<f64> {
    let e_min = e_min.min(e_max);
    if n <= 1 || e_max - e_min < 1e-12 {
        return vec![e_max];
    }
    let steps = (n - 1) as f64;
    (0..n)
        .map(|i| {
            let f = i as f64 / steps;
            if e_min > 0.0 && e_max > 0.0 {
                (e_max.ln() + f * (e_min.ln() - e_max.ln())).exp()
            } else {
                e_max + f * (e_min - e_max)
            }
        })
        .collect()
}

/// Runs the sweep. Explicit caps are used as given (sorted loose to
/// tight); an empty list derives an `n_auto`-point schedule from two
/// pre-solves, one unconstrained and one minimizing emissions.
pub fn pareto_sweep(
    prep: &Prepared,
    explicit_caps: &[f64],
    n_auto: usize,
    mut log: Option<&mut dyn Write>,
) -> SweepOutcome {
    let mut caps: Vec<f64>;
    let auto_grid = explicit_caps.is_empty();
    let mut points = Vec::new();
    let mut warm: Option<Vec<f64>> = None;

    if auto_grid {
        if let Some(w) = reborrow_log(&mut log) {
            let _ = writeln!(w, "sweep: pre-solving the unconstrained problem");
        }
        let base = solve_with_cap(prep, None, None, reborrow_log(&mut log));
        if !matches!(base.status, SolveStatus::Optimal | SolveStatus::Feasible) {
            // Nothing is feasible even without a cap; report that single
            // flagged point.
            let point = extract_point(prep, None, &base);
            return SweepOutcome {
                caps: Vec::new(),
                auto_grid,
                points: vec![point],
            };
        }
        let e_max = base.x[prep.emissions];
        if let Some(w) = reborrow_log(&mut log) {
            let _ = writeln!(w, "sweep: pre-solving for minimum emissions");
        }
        let mut em_model = prep.model.clone();
        em_model.objective = vec![(prep.emissions, 1.0)];
        let min_sol = solve_miqcp(&em_model, &prep.options, reborrow_log(&mut log));
        let e_min = if matches!(min_sol.status, SolveStatus::Optimal | SolveStatus::Feasible) {
            min_sol.x[prep.emissions]
        } else {
            e_max
        };
        caps = cap_grid(e_max, e_min, n_auto);
        // The loosest cap equals the unconstrained optimum's emissions, so
        // that solution stays optimal under it and is reused as-is.
        points.push(extract_point(prep, Some(caps[0]), &base));
        warm = Some(base.x);
    } else {
        caps = explicit_caps.to_vec();
        caps.sort_by(|a, b| b.total_cmp(a));
        caps.dedup();
    }

    for (i, &cap) in caps.iter().enumerate().skip(points.len()) {
        if let Some(w) = reborrow_log(&mut log) {
            let _ = writeln!(w, "sweep: point {}/{} cap {cap:.6e}", i + 1, caps.len());
        }
        let sol = solve_with_cap(prep, Some(cap), warm.take(), reborrow_log(&mut log));
        if matches!(sol.status, SolveStatus::Optimal | SolveStatus::Feasible) {
            warm = Some(sol.x.clone());
        }
        points.push(extract_point(prep, Some(cap), &sol));
    }

    SweepOutcome {
        caps,
        auto_grid,
        points,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::config::ScenarioConfig;
    use crate::scenario::prepare::prepare;
    use std::path::Path;

    fn two_route_prep(rel_gap: f64) -> Prepared {
        let text = format!(
            "name = \"t\"\n[superstructure]\nbuiltin = \"two-route\"\n[solver]\nrel_gap = {rel_gap}\n"
        );
        let cfg = ScenarioConfig::from_toml(&text, Path::new("mem")).unwrap();
        prepare(&cfg, Path::new(".")).unwrap()
    }

    #[test]
    fn grid_endpoints_and_order() {
        let g = cap_grid(1000.0, 10.0, 3);
        assert_eq!(g.len(), 3);
        assert!((g[0] - 1000.0).abs() < 1e-9);
        assert!((g[1] - 100.0).abs() < 1e-9);
        assert!((g[2] - 10.0).abs() < 1e-9);
        assert_eq!(cap_grid(5.0, 5.0, 4), vec![5.0]);
        let lin = cap_grid(1.0, -1.0, 3);
        assert!((lin[1] - 0.0).abs() < 1e-12);
    }

    #[test]
    fn explicit_caps_run_loose_to_tight_and_flag_infeasible() {
        let prep = two_route_prep(1e-4);
        // Unsorted on purpose; the tightest cap is below any attainable
        // emission level.
        let out = pareto_sweep(&prep, &[5.0e4, 2.0e6, 1.5e6], 0, None);
        assert!(!out.auto_grid);
        assert_eq!(out.caps, vec![2.0e6, 1.5e6, 5.0e4]);
        assert_eq!(out.points.len(), 3);
        assert!(out.points[0].feasible);
        assert!(out.points[1].feasible);
        assert!(!out.points[2].feasible);
        assert_eq!(out.points[2].status, SolveStatus::Infeasible);
        assert!(out.points[2].cost.is_none());
        assert!(out.points[2].emissions.is_none());

        // Tightening the cap cannot make the plant cheaper (gap aware).
        let c0 = out.points[0].cost.unwrap();
        let c1 = out.points[1].cost.unwrap();
        let slack = out.points[0].gap.unwrap() * c0.abs() + out.points[1].gap.unwrap() * c1.abs();
        assert!(c0 <= c1 + slack + 1e-6);
        // Each feasible point respects its cap.
        for p in &out.points[..2] {
            assert!(p.emissions.unwrap() <= p.cap.unwrap() + 1e-6);
        }
        assert!(!out.points[0].active_processes.is_empty());
    }

    #[test]
    fn auto_grid_brackets_the_attainable_range() {
        let prep = two_route_prep(1e-4);
        let out = pareto_sweep(&prep, &[], 3, None);
        assert!(out.auto_grid);
        assert_eq!(out.caps.len(), 3);
        assert_eq!(out.points.len(), 3);
        for p in &out.points {
            assert!(p.feasible, "auto caps stay within the attainable range");
            assert!(p.emissions.unwrap() <= p.cap.unwrap() + 1e-6);
        }
        // Loose to tight, and cost grows as the cap tightens.
        assert!(out.caps[0] > out.caps[1] && out.caps[1] > out.caps[2]);
        let costs: Vec<f64> = out.points.iter().map(|p| p.cost.unwrap()).collect();
        for w in costs.windows(2) {
            assert!(w[0] <= w[1] + 1e-4 * (w[0].abs() + w[1].abs()) + 1e-6);
        }
        // The tight end forces the clean route, the loose end the cheap one.
        assert!(costs[2] > 2.0 * costs[0]);
    }

    #[test]
    fn points_serialize_with_kebab_status() {
        let prep = two_route_prep(1e-4);
        let out = pareto_sweep(&prep, &[2.0e6], 0, None);
        let json = serde_json::to_string(&out).unwrap();
        assert!(json.contains("\"status\":\"optimal\""), "{json}");
        assert!(json.contains("\"caps\":[2000000.0]"), "{json}");
    }
}
