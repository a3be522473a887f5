//! Runnable case studies on top of the model stack: scenario files,
//! preparation into solvable models, epsilon-constraint Pareto sweeps,
//! kerosene allocation metrics, and design-mode sensitivity runs.
//!
//! A scenario TOML names a superstructure (builtin, file, or inline),
//! network sources, solver settings, sweep axes, and model overrides; see
//! `scenarios/` next to this crate for the shipped ones. [`prepare`] turns
//! it into a [`Prepared`] model, [`pareto_sweep`] traces the cost-emission
//! front, and [`fixed_vs_adaptable`] compares design philosophies across
//! electricity prices.

pub mod config;
pub mod desk;
pub mod kerosene;
pub mod pareto;
pub mod prepare;
pub mod sensitivity;

pub use config::{
    load_scenario, ModelSection, NetworkSource, ScenarioConfig, ScenarioError, SolverSection,
    SuperstructureSource, SweepSection, TrainRequest,
};
pub use desk::{desk_ft_saf_spec, desk_lump_plan};
pub use kerosene::{abatement_cost, post_kerosene_metrics, KeroseneReport};
pub use pareto::{pareto_sweep, ParetoPoint, SweepOutcome};
pub use prepare::{prepare, trained_network, Prepared};
pub use sensitivity::{fixed_vs_adaptable, ModeCosts, SolveSummary};

/// Reborrows an optional log sink so it can be handed to several solves.
pub(crate) fn reborrow_log<'a>(
    log: &'a mut Option<&mut dyn std::io::Write>,
) -> Option<&'a mut dyn std::io::Write> {
    log.as_mut().map(|w| &mut **w as &mut dyn std::io::Write)
}
