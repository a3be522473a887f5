//! Turns a scenario into a ready-to-solve model: materialize the
//! superstructure, obtain every referenced network, assemble the algebraic
//! model, and apply the scenario's shaping overrides.
//!
//! Networks trained from an oracle are cached in-process by their full
//! effective configuration, so repeated preparations of the same scenario
//! (for example across a sweep) train each network once.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;
use std::sync::{Mutex, OnceLock};

use crate::algebra::{assemble_model, EmitOptions, Family, ModelIR, Sense, VarId};
use crate::core_model::{
    validate_with_networks, IndexedSpec, InputBinding, InputTarget, ProcessKind,
    SuperstructureSpec,
};
use crate::oracles::dataset::{generate_dataset, DatasetConfig, OracleKind};
use crate::solver::SolveOptions;
use crate::surrogate::ReluNetwork;
use crate::trainer::{desk_config, train, Metrics};

use super::config::{resolve_path, NetworkSource, ScenarioConfig, ScenarioError, TrainRequest};

/// A scenario lowered to a concrete model plus everything needed to solve
/// and interpret it.
#[derive(Debug)]
pub struct Prepared {
    pub spec: SuperstructureSpec,
    pub networks: BTreeMap<String, ReluNetwork>,
    /// Test-split quality for networks trained on the fly.
    pub train_metrics: BTreeMap<String, Metrics>,
    pub model: ModelIR,
    /// Annualized total cost variable, the objective.
    pub cost: VarId,
    /// Annual CO2 balance variable.
    pub emissions: VarId,
    pub options: SolveOptions,
}

/// Model variable holding the raw value of one surrogate input.
pub(crate) fn surrogate_input_label(pid: &str, binding: &InputBinding) -> String {
    match &binding.target {
        InputTarget::MassFraction { .. } => format!("annin[{pid},{}]", binding.input),
        InputTarget::Temperature { heat_port } => format!("t[{pid}.heat{heat_port}]"),
        InputTarget::Pressure => format!("press[{pid}]"),
        InputTarget::FlowRatio { .. } => format!("ratio[{pid},{}]", binding.input),
        InputTarget::OneHot { component } => format!("pick[{pid},{component}]"),
    }
}

#[derive(PartialEq, Eq, Hash)]
struct TrainKey {
    oracle: String,
    samples: usize,
    seed: u64,
    hidden: usize,
    epochs: usize,
}

fn cache() -> &'static Mutex<HashMap<TrainKey, (ReluNetwork, Metrics)>> {
    static CACHE: OnceLock<Mutex<HashMap<TrainKey, (ReluNetwork, Metrics)>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Trains (or fetches from the in-process cache) the network described by
/// one training request. `id` labels errors; `default_seed` applies when
/// the request pins no seed of its own.
pub fn trained_network(
    id: &str,
    req: &TrainRequest,
    default_seed: u64,
) -> Result<(ReluNetwork, Metrics), ScenarioError> {
    let kind = OracleKind::from_name(&req.oracle)
        .ok_or_else(|| ScenarioError::UnknownOracle(req.oracle.clone()))?;
    let samples = req.samples.unwrap_or_else(|| kind.desk_samples());
    let seed = req.seed.unwrap_or(default_seed);
    let mut config = desk_config(kind);
    config.seed = seed;
    if let Some(h) = req.hidden {
        config.hidden = h;
    }
    if let Some(e) = req.epochs {
        config.epochs = e;
    }
    let key = TrainKey {
        oracle: req.oracle.clone(),
        samples,
        seed,
        hidden: config.hidden,
        epochs: config.epochs,
    };
    if let Some(hit) = cache().lock().unwrap().get(&key) {
        return Ok(hit.clone());
    }
    let dataset = generate_dataset(&DatasetConfig { kind, samples, seed });
    let report = train(&dataset, &config).map_err(|e| ScenarioError::Train {
        id: id.to_string(),
        source: e,
    })?;
    let out = (report.network, report.test_metrics);
    cache().lock().unwrap().insert(key, out.clone());
    Ok(out)
}

/// Loads or trains every network the spec's surrogate processes reference.
fn provide_networks(
    cfg: &ScenarioConfig,
    spec: &SuperstructureSpec,
    base: &Path,
) -> Result<(BTreeMap<String, ReluNetwork>, BTreeMap<String, Metrics>), ScenarioError> {
    let needed: BTreeSet<&str> = spec
        .processes
        .iter()
        .filter_map(|p| match &p.kind {
            ProcessKind::Surrogate(sur) => Some(sur.network_id.as_str()),
            ProcessKind::Linear(_) => None,
        })
        .collect();
    let mut networks = BTreeMap::new();
    let mut metrics = BTreeMap::new();
    for id in needed {
        let source = cfg
            .networks
            .get(id)
            .ok_or_else(|| ScenarioError::MissingNetwork(id.to_string()))?;
        let net = match source {
            NetworkSource::Path { path } => {
                let full = resolve_path(base, path);
                ReluNetwork::load(&full).map_err(|e| ScenarioError::Network {
                    id: id.to_string(),
                    source: e,
                })?
            }
            NetworkSource::Train(req) => {
                let (net, m) = trained_network(id, req, cfg.seed)?;
                metrics.insert(id.to_string(), m);
                net
            }
        };
        networks.insert(id.to_string(), net);
    }
    Ok((networks, metrics))
}

/// Splits a frozen key `Process.index` into its process id and 1-based
/// surrogate input index.
fn parse_frozen_key(key: &str) -> Result<(&str, usize), ScenarioError> {
    let bad = || ScenarioError::BadFrozenKey(key.to_string());
    let (pid, idx) = key.rsplit_once('.').ok_or_else(bad)?;
    let idx: usize = idx.parse().map_err(|_| bad())?;
    if pid.is_empty() || idx == 0 {
        return Err(bad());
    }
    Ok((pid, idx))
}

fn apply_model_section(
    cfg: &ScenarioConfig,
    spec: &SuperstructureSpec,
    model: &mut ModelIR,
) -> Result<(), ScenarioError> {
    for pid in &cfg.model.disabled_processes {
        let id = model
            .var_id(&format!("y[{pid}]"))
            .ok_or_else(|| ScenarioError::UnknownProcess(pid.clone()))?;
        model.vars[id].hi = 0.0;
    }

    if cfg.model.fixed_design && cfg.model.frozen.is_empty() {
        return Err(ScenarioError::MissingReference);
    }
    for (key, &value) in &cfg.model.frozen {
        let (pid, input) = parse_frozen_key(key)?;
        let unknown = || ScenarioError::UnknownFrozenInput(key.clone());
        let proc = spec.process(pid).ok_or_else(unknown)?;
        let ProcessKind::Surrogate(sur) = &proc.kind else {
            return Err(unknown());
        };
        let binding = sur
            .input_bindings
            .iter()
            .find(|b| b.input == input)
            .ok_or_else(unknown)?;
        let var = model
            .var_id(&surrogate_input_label(pid, binding))
            .ok_or_else(unknown)?;
        let (lo, hi) = (model.vars[var].lo, model.vars[var].hi);
        if value < lo - 1e-9 || value > hi + 1e-9 {
            return Err(ScenarioError::FrozenOutOfBox {
                key: key.clone(),
                value,
                lo,
                hi,
            });
        }
        if cfg.model.fixed_design {
            model.vars[var].lo = value;
            model.vars[var].hi = value;
        }
    }

    for (comp, &cap) in &cfg.model.biomass_caps {
        let purchasable = spec
            .component(comp)
            .is_some_and(|c| c.source.is_some());
        let mut feeds = Vec::new();
        if purchasable {
            for proc in &spec.processes {
                for port in &proc.inlet_ports {
                    let label = format!("msrc[{}.in{},{comp}]", proc.id, port.index);
                    if let Some(id) = model.var_id(&label) {
                        feeds.push(id);
                    }
                }
            }
        }
        if feeds.is_empty() {
            return Err(ScenarioError::UnknownSupplyCap(comp.clone()));
        }
        for &id in &feeds {
            model.vars[id].hi = model.vars[id].hi.min(cap);
        }
        if feeds.len() > 1 {
            model.push_con(
                format!("supply_cap[{comp}]"),
                Family::SupplyCap,
                feeds.iter().map(|&id| (id, 1.0)).collect(),
                Sense::Le,
                cap,
            );
        }
    }
    Ok(())
}

/// Runs the whole pipeline from scenario to solvable model. Relative paths
/// in the scenario resolve against `base`.
pub fn prepare(cfg: &ScenarioConfig, base: &Path) -> Result<Prepared, ScenarioError> {
    let spec = cfg.resolve_spec(base)?;
    let (networks, train_metrics) = provide_networks(cfg, &spec, base)?;
    let dims: BTreeMap<String, (usize, usize)> = networks
        .iter()
        .map(|(id, n)| (id.clone(), (n.n_inputs(), n.n_outputs())))
        .collect();
    let report = validate_with_networks(&spec, &dims);
    if !report.is_clean() {
        return Err(ScenarioError::Invalid(report.to_string()));
    }
    let mut model = {
        let idx = IndexedSpec::resolve(&spec).map_err(|r| ScenarioError::Invalid(r.to_string()))?;
        assemble_model(
            &idx,
            &networks,
            EmitOptions {
                heat_integration: cfg.model.heat_integration,
            },
        )?
    };
    apply_model_section(cfg, &spec, &mut model)?;
    let cost = model
        .handles
        .total_cost
        .expect("assembled models carry a total-cost handle");
    let emissions = model
        .handles
        .co2_total
        .expect("assembled models carry an emission handle");
    Ok(Prepared {
        spec,
        networks,
        train_metrics,
        model,
        cost,
        emissions,
        options: cfg.solver.to_options(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    fn two_route_cfg(extra: &str) -> ScenarioConfig {
        let text = format!(
            "name = \"t\"\n[superstructure]\nbuiltin = \"two-route\"\n{extra}"
        );
        ScenarioConfig::from_toml(&text, Path::new("mem")).unwrap()
    }

    #[test]
    fn two_route_prepares_cleanly() {
        let prep = prepare(&two_route_cfg(""), Path::new(".")).unwrap();
        assert!(prep.model.check().is_ok());
        assert_eq!(prep.model.handles.total_cost, Some(prep.cost));
        assert!(prep.networks.is_empty());
        assert_eq!(prep.options.rel_gap, 1e-4);
    }

    #[test]
    fn disabling_pins_the_selection_binary() {
        let cfg = two_route_cfg("[model]\ndisabled_processes = [\"RouteA\"]\n");
        let prep = prepare(&cfg, Path::new(".")).unwrap();
        let y = prep.model.var_id("y[RouteA]").unwrap();
        assert_eq!(prep.model.vars[y].hi, 0.0);

        let cfg = two_route_cfg("[model]\ndisabled_processes = [\"Nope\"]\n");
        let err = prepare(&cfg, Path::new(".")).unwrap_err();
        assert!(matches!(err, ScenarioError::UnknownProcess(ref p) if p == "Nope"));
    }

    #[test]
    fn frozen_keys_are_checked() {
        let cfg = two_route_cfg("[model.frozen]\n\"noDotKey\" = 1.0\n");
        assert!(matches!(
            prepare(&cfg, Path::new(".")).unwrap_err(),
            ScenarioError::BadFrozenKey(_)
        ));

        let cfg = two_route_cfg("[model.frozen]\n\"RouteA.1\" = 1.0\n");
        assert!(matches!(
            prepare(&cfg, Path::new(".")).unwrap_err(),
            ScenarioError::UnknownFrozenInput(_)
        ));
    }

    #[test]
    fn fixed_design_needs_references() {
        let cfg = two_route_cfg("[model]\nfixed_design = true\n");
        assert!(matches!(
            prepare(&cfg, Path::new(".")).unwrap_err(),
            ScenarioError::MissingReference
        ));
    }

    #[test]
    fn supply_caps_tighten_feed_bounds() {
        let cfg = two_route_cfg("[model.biomass_caps]\nfeed_a = 55.0\n");
        let prep = prepare(&cfg, Path::new(".")).unwrap();
        let id = prep.model.var_id("msrc[RouteA.in1,feed_a]").unwrap();
        assert_eq!(prep.model.vars[id].hi, 55.0);
        assert_eq!(prep.model.count_family(Family::SupplyCap), 0);

        let cfg = two_route_cfg("[model.biomass_caps]\nprod = 55.0\n");
        assert!(matches!(
            prepare(&cfg, Path::new(".")).unwrap_err(),
            ScenarioError::UnknownSupplyCap(ref c) if c == "prod"
        ));
    }

    #[test]
    fn training_requests_hit_the_cache() {
        let req = TrainRequest {
            oracle: "rwgs".into(),
            samples: Some(300),
            seed: None,
            hidden: Some(8),
            epochs: Some(30),
        };
        let (a, ma) = trained_network("n", &req, 5).unwrap();
        let (b, mb) = trained_network("n", &req, 5).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        assert_eq!(ma.r2, mb.r2);
        assert!(ma.r2.is_finite());

        let err = trained_network(
            "n",
            &TrainRequest {
                oracle: "nope".into(),
                samples: None,
                seed: None,
                hidden: None,
                epochs: None,
            },
            0,
        )
        .unwrap_err();
        assert!(matches!(err, ScenarioError::UnknownOracle(_)));
    }

    #[test]
    fn missing_network_sources_are_reported() {
        let cfg = ScenarioConfig::from_toml(
            "name = \"t\"\n[superstructure]\nbuiltin = \"ft-saf-desk\"\n",
            Path::new("mem"),
        )
        .unwrap();
        let err = prepare(&cfg, &PathBuf::from(".")).unwrap_err();
        assert!(matches!(err, ScenarioError::MissingNetwork(_)));
    }
}
