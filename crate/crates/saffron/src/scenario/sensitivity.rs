//! Fixed-design versus adaptable-design comparison across electricity
//! prices.
//!
//! The adaptable run leaves every surrogate operating input free, so the
//! optimizer may retune the plant to each price. The fixed run pins those
//! inputs to the scenario's frozen reference point, mimicking a plant
//! designed once and operated as-is. A fixed design is a restriction of
//! the adaptable feasible set, so the adaptable optimum can never be worse
//! by more than the combined optimality gaps.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::solver::{solve_miqcp, Solution, SolveStatus};

use super::config::{ScenarioConfig, ScenarioError};
use super::prepare::{prepare, Prepared};
use super::reborrow_log;

/// Outcome of one solve, trimmed to what the comparison needs.
#[derive(Debug, Clone, Serialize)]
pub struct SolveSummary {
    pub status: SolveStatus,
    pub feasible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cost: Option<f64>,
    pub best_bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub emissions: Option<f64>,
    pub nodes: usize,
}

fn summarize(prep: &Prepared, sol: &Solution) -> SolveSummary {
    let feasible = matches!(sol.status, SolveStatus::Optimal | SolveStatus::Feasible);
    SolveSummary {
        status: sol.status,
        feasible,
        cost: feasible.then_some(sol.objective),
        best_bound: sol.best_bound,
        gap: feasible.then_some(sol.gap),
        emissions: feasible.then(|| sol.x[prep.emissions]),
        nodes: sol.nodes,
    }
}

/// Both design modes solved at one electricity price.
#[derive(Debug, Clone, Serialize)]
pub struct ModeCosts {
    /// $ per kWh.
    pub electricity_price: f64,
    pub adaptable: SolveSummary,
    pub fixed: SolveSummary,
}

impl ModeCosts {
    /// Whether the adaptable design is at least as cheap as the fixed one,
    /// up to the combined optimality gaps. `None` when the runs cannot be
    /// compared because only the fixed mode found an incumbent.
    pub fn adaptable_dominates(&self) -> Option<bool> {
        match (self.adaptable.cost, self.fixed.cost) {
            (_, None) => Some(true),
            (None, Some(_)) => {
                if self.adaptable.status == SolveStatus::Infeasible {
                    // A restriction cannot be feasible while the full
                    // problem is not; flag the contradiction.
                    Some(false)
                } else {
                    None
                }
            }
            (Some(a), Some(f)) => {
                let slack = self.adaptable.gap.unwrap_or(0.0) * a.abs()
                    + self.fixed.gap.unwrap_or(0.0) * f.abs()
                    + 1e-6;
                Some(a <= f + slack)
            }
        }
    }
}

/// Solves the scenario in both design modes for each electricity price.
/// An empty `prices` falls back to the scenario's sweep prices, then to
/// the superstructure's own price. Incumbents warm-start the next price
/// within each mode.
pub fn fixed_vs_adaptable(
    cfg: &ScenarioConfig,
    base: &Path,
    prices: &[f64],
    mut log: Option<&mut dyn Write>,
) -> Result<Vec<ModeCosts>, ScenarioError> {
    let prices: Vec<f64> = if !prices.is_empty() {
        prices.to_vec()
    } else if !cfg.sweep.electricity_prices.is_empty() {
        cfg.sweep.electricity_prices.clone()
    } else {
        vec![cfg.resolve_spec(base)?.globals.electricity_price]
    };

    let mut out = Vec::new();
    let mut warm_adaptable: Option<Vec<f64>> = None;
    let mut warm_fixed: Option<Vec<f64>> = None;
    for &price in &prices {
        let run = |fixed: bool, warm: Option<Vec<f64>>, log: Option<&mut dyn Write>|
         -> Result<(SolveSummary, Option<Vec<f64>>), ScenarioError> {
            let mut variant = cfg.clone();
            variant.model.electricity_price = Some(price);
            variant.model.fixed_design = fixed;
            let mut prep = prepare(&variant, base)?;
            prep.options.warm_start = warm;
            let sol = solve_miqcp(&prep.model, &prep.options, log);
            let summary = summarize(&prep, &sol);
            let x = summary.feasible.then_some(sol.x);
            Ok((summary, x))
        };

        if let Some(w) = reborrow_log(&mut log) {
            let _ = writeln!(w, "price {price}: adaptable design");
        }
        let (adaptable, xa) = run(false, warm_adaptable.take(), reborrow_log(&mut log))?;
        warm_adaptable = xa.clone();

        if let Some(w) = reborrow_log(&mut log) {
            let _ = writeln!(w, "price {price}: fixed design");
        }
        // The fixed mode chains on its own incumbents, seeded from the
        // adaptable one when it has none yet.
        let (fixed, xf) = run(true, warm_fixed.take().or(xa), reborrow_log(&mut log))?;
        warm_fixed = xf;

        out.push(ModeCosts {
            electricity_price: price,
            adaptable,
            fixed,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core_model::fixtures::two_route_spec;
    use crate::core_model::{
        CompSelector, ComponentSpec, Formula, HeatPortMode, HeatPortSpec, InputBinding,
        InputTarget, OutputBinding, OutputTarget, PortSpec, ProcessKind, ProcessSpec,
        ProductionTarget, SourceData, SuperstructureSpec, SurrogateProcess, Tag,
        TemperatureSpec,
    };
    use crate::scenario::config::{
        NetworkSource, SuperstructureSource, TrainRequest,
    };
    use std::collections::BTreeMap;

    fn comp(id: &str, molar: f64) -> ComponentSpec {
        ComponentSpec {
            id: id.to_string(),
            molar_mass: molar,
            lhv: 0.0,
            tags: vec![],
            source: None,
            formula: None,
        }
    }

    fn source(mut c: ComponentSpec, cost: f64, emission: f64) -> ComponentSpec {
        c.tags.push(Tag::Source);
        c.source = Some(SourceData { cost, emission });
        c
    }

    /// One reverse-shift reactor fed purchased CO2 and H2; small enough to
    /// solve in well under a second per point.
    fn shift_spec() -> SuperstructureSpec {
        let sel = |s: &str| s.parse().unwrap();
        let shift = ProcessSpec {
            id: "Shift".to_string(),
            inlet_ports: vec![PortSpec {
                index: 1,
                allowed: Some(vec!["co2".to_string(), "h2".to_string()]),
            }],
            outlet_ports: vec![
                PortSpec {
                    index: 1,
                    allowed: Some(vec![
                        "co".to_string(),
                        "co2".to_string(),
                        "h2".to_string(),
                    ]),
                },
                PortSpec {
                    index: 2,
                    allowed: Some(vec!["h2o".to_string()]),
                },
            ],
            heat_ports: vec![
                HeatPortSpec {
                    index: 1,
                    mode: HeatPortMode::Cold,
                    temperature: TemperatureSpec::FromInput { input: 1 },
                    specific_duty: None,
                },
                HeatPortSpec {
                    index: 2,
                    mode: HeatPortMode::Hot,
                    temperature: TemperatureSpec::Fixed(300.0),
                    specific_duty: None,
                },
            ],
            kind: ProcessKind::Surrogate(SurrogateProcess {
                network_id: "rwgs".to_string(),
                input_bindings: vec![
                    InputBinding {
                        input: 1,
                        target: InputTarget::Temperature { heat_port: 1 },
                    },
                    InputBinding {
                        input: 2,
                        target: InputTarget::MassFraction {
                            port: sel("in1"),
                            component: "h2".to_string(),
                        },
                    },
                ],
                output_bindings: vec![
                    OutputBinding {
                        output: 1,
                        target: OutputTarget::MassFraction {
                            port: 1,
                            component: "co".to_string(),
                        },
                    },
                    OutputBinding {
                        output: 2,
                        target: OutputTarget::MassFraction {
                            port: 1,
                            component: "h2".to_string(),
                        },
                    },
                    OutputBinding {
                        output: 3,
                        target: OutputTarget::PortYield { port: 2 },
                    },
                    OutputBinding {
                        output: 4,
                        target: OutputTarget::SpecificDuty { heat_port: 1 },
                    },
                    OutputBinding {
                        output: 5,
                        target: OutputTarget::SpecificDuty { heat_port: 2 },
                    },
                    OutputBinding {
                        output: 6,
                        target: OutputTarget::SpecificWork,
                    },
                ],
                capex_per_inlet_flow: 1500.0,
                flow_couplings: vec![],
            }),
        };
        let mut spec = SuperstructureSpec {
            components: vec![
                source(comp("co2", 44.009), 0.04, -1.0),
                source(
                    ComponentSpec {
                        formula: Some(Formula { c: 0.0, h: 2.0, o: 0.0 }),
                        ..comp("h2", 2.016)
                    },
                    2.0,
                    0.0,
                ),
                ComponentSpec {
                    formula: Some(Formula { c: 1.0, h: 0.0, o: 1.0 }),
                    tags: vec![Tag::KeyEligible],
                    ..comp("co", 28.010)
                },
                comp("h2o", 18.015),
            ],
            processes: vec![shift],
            connections: vec![],
            globals: two_route_spec().globals,
            rules: Default::default(),
        };
        spec.globals.flow_cap = 500.0;
        spec.rules.production_targets.push(ProductionTarget {
            port: "Shift.out1".parse().unwrap(),
            rate: 50.0,
        });
        // Keep some conversion in the product: CO2 must not crowd out CO.
        spec.rules.dominance.push(crate::core_model::DominanceRule {
            port: "Shift.out1".parse().unwrap(),
            lesser: vec![CompSelector::Id("co2".to_string())],
            greater: vec![
                CompSelector::Id("co".to_string()),
                CompSelector::Id("h2".to_string()),
            ],
        });
        spec
    }

    fn shift_cfg() -> ScenarioConfig {
        ScenarioConfig {
            name: "shift".into(),
            seed: 5,
            superstructure: SuperstructureSource::Inline(Box::new(shift_spec())),
            networks: BTreeMap::from([(
                "rwgs".to_string(),
                NetworkSource::Train(TrainRequest {
                    oracle: "rwgs".into(),
                    samples: Some(800),
                    seed: None,
                    hidden: Some(12),
                    epochs: Some(150),
                }),
            )]),
            solver: Default::default(),
            sweep: Default::default(),
            model: crate::scenario::config::ModelSection {
                frozen: BTreeMap::from([
                    ("Shift.1".to_string(), 950.0),
                    ("Shift.2".to_string(), 0.12),
                ]),
                ..Default::default()
            },
        }
    }

    #[test]
    fn adaptable_design_wins_or_ties_across_prices() {
        let cfg = shift_cfg();
        let runs = fixed_vs_adaptable(&cfg, Path::new("."), &[0.02, 0.3], None).unwrap();
        assert_eq!(runs.len(), 2);
        for run in &runs {
            assert!(run.adaptable.feasible, "price {}", run.electricity_price);
            assert!(run.fixed.feasible, "price {}", run.electricity_price);
            assert_eq!(run.adaptable_dominates(), Some(true));
        }
    }

    #[test]
    fn price_fallback_uses_the_superstructure() {
        let mut cfg = shift_cfg();
        cfg.solver.node_limit = 1;
        let runs = fixed_vs_adaptable(&cfg, Path::new("."), &[], None).unwrap();
        assert_eq!(runs.len(), 1);
        assert_eq!(runs[0].electricity_price, 0.07);

        cfg.sweep.electricity_prices = vec![0.1, 0.2];
        let runs = fixed_vs_adaptable(&cfg, Path::new("."), &[], None).unwrap();
        assert_eq!(runs.len(), 2);
    }

    #[test]
    fn frozen_point_must_sit_inside_the_training_box() {
        let mut cfg = shift_cfg();
        cfg.model.frozen.insert("Shift.1".to_string(), 2000.0);
        let err = fixed_vs_adaptable(&cfg, Path::new("."), &[0.07], None).unwrap_err();
        assert!(matches!(err, ScenarioError::FrozenOutOfBox { .. }));
    }

    #[test]
    fn missing_references_surface_from_the_fixed_run() {
        let mut cfg = shift_cfg();
        cfg.model.frozen.clear();
        let err = fixed_vs_adaptable(&cfg, Path::new("."), &[0.07], None).unwrap_err();
        assert!(matches!(err, ScenarioError::MissingReference));
    }
}
