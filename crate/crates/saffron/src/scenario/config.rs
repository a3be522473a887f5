//! Scenario files: one TOML document that names a superstructure, the
//! surrogate networks, solver settings, sweep axes, and model-shaping
//! overrides.
//!
//! A scenario is the unit of reproducibility. Every run artifact embeds
//! the digest of the effective configuration together with the seed, and
//! identical configurations produce identical bytes everywhere downstream.
//! Unknown keys are rejected during parsing, so typos surface instead of
//! being silently ignored.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::algebra::AssembleError;
use crate::core_model::fixtures::{full_ft_saf_spec, two_route_spec};
use crate::core_model::SuperstructureSpec;
use crate::solver::SolveOptions;
use crate::surrogate::SurrogateError;
use crate::trainer::TrainError;

use super::desk::desk_ft_saf_spec;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse `{path}`: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: Box<toml::de::Error>,
    },
    #[error("unknown builtin superstructure `{0}`; known: two-route, ft-saf-desk, ft-saf-full")]
    UnknownBuiltin(String),
    #[error("superstructure is not sound:\n{0}")]
    Invalid(String),
    #[error("no [networks.{0}] source is configured")]
    MissingNetwork(String),
    #[error("network `{id}`: {source}")]
    Network {
        id: String,
        #[source]
        source: SurrogateError,
    },
    #[error("training network `{id}`: {source}")]
    Train {
        id: String,
        #[source]
        source: TrainError,
    },
    #[error("unknown oracle `{0}`; known: gasification, rwgs, ft")]
    UnknownOracle(String),
    #[error("disabled process `{0}` does not exist")]
    UnknownProcess(String),
    #[error("frozen key `{0}` must look like `Process.input` with a 1-based input index")]
    BadFrozenKey(String),
    #[error("frozen key `{0}` does not name a surrogate input")]
    UnknownFrozenInput(String),
    #[error("frozen value {value} for `{key}` lies outside its input box [{lo}, {hi}]")]
    FrozenOutOfBox {
        key: String,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("supply cap on `{0}` matches no purchasable feed port")]
    UnknownSupplyCap(String),
    #[error("fixed-design mode needs a non-empty [model.frozen] table of reference values")]
    MissingReference,
    #[error(transparent)]
    Assemble(#[from] AssembleError),
}

/// Where the superstructure comes from: a named builtin, a separate TOML
/// file holding one [`SuperstructureSpec`], or the spec written inline
/// under `[superstructure]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum SuperstructureSource {
    Builtin { builtin: String },
    Path { path: PathBuf },
    Inline(Box<SuperstructureSpec>),
}

/// Where one surrogate network comes from: a weight file on disk, or a
/// deterministic training run against a named oracle.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum NetworkSource {
    Path { path: PathBuf },
    Train(TrainRequest),
}

/// Training request for one network. Absent fields fall back to the
/// desk-scale defaults for the oracle and the scenario seed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainRequest {
    /// Oracle name: `gasification`, `rwgs`, or `ft`.
    pub oracle: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hidden: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epochs: Option<usize>,
}

fn default_rel_gap() -> f64 {
    1e-4
}
fn default_abs_gap() -> f64 {
    1e-9
}
fn default_node_limit() -> usize {
    200_000
}

/// Branch-and-bound termination settings.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub rel_gap: f64,
    pub abs_gap: f64,
    pub node_limit: usize,
    /// Wall-clock limit in seconds; absent means unlimited.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_limit_s: Option<f64>,
}

impl Default for SolverSection {
    fn default() -> Self {
        SolverSection {
            rel_gap: default_rel_gap(),
            abs_gap: default_abs_gap(),
            node_limit: default_node_limit(),
            time_limit_s: None,
        }
    }
}

impl SolverSection {
    pub fn to_options(&self) -> SolveOptions {
        SolveOptions {
            rel_gap: self.rel_gap,
            abs_gap: self.abs_gap,
            node_limit: self.node_limit,
            time_limit: self.time_limit_s,
            ..SolveOptions::default()
        }
    }
}

fn default_n_caps() -> usize {
    8
}

/// Sweep axes: emission caps for the Pareto front and electricity prices
/// for the fixed-versus-adaptable comparison.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    /// Explicit emission caps in kg CO2 per year. Empty means an automatic
    /// grid between the unconstrained optimum and the attainable minimum.
    pub co2_caps: Vec<f64>,
    /// Size of the automatic cap grid.
    pub n_caps: usize,
    /// Grid electricity prices in $ per kWh for sensitivity runs.
    pub electricity_prices: Vec<f64>,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            co2_caps: Vec::new(),
            n_caps: default_n_caps(),
            electricity_prices: Vec::new(),
        }
    }
}

fn default_true() -> bool {
    true
}

/// Overrides that shape the assembled model without editing the
/// superstructure itself.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    /// When false, every duty is served by external utilities.
    pub heat_integration: bool,
    /// Processes forced out of the design (their binary is fixed to zero).
    pub disabled_processes: Vec<String>,
    /// Reference operating point per surrogate input, keyed `Process.index`.
    /// Applied as equalities only in fixed-design mode; always validated
    /// against the input boxes.
    pub frozen: BTreeMap<String, f64>,
    /// When true, surrogate inputs are pinned to the `frozen` references
    /// instead of remaining free decisions.
    pub fixed_design: bool,
    /// Upper bounds on total purchases of single feed components, kg/h.
    pub biomass_caps: BTreeMap<String, f64>,
    /// Replaces the superstructure's electricity price, $ per kWh.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub electricity_price: Option<f64>,
    /// Replaces the superstructure's utility heat price, $ per kWh.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub heat_price: Option<f64>,
}

impl Default for ModelSection {
    fn default() -> Self {
        ModelSection {
            heat_integration: default_true(),
            disabled_processes: Vec::new(),
            frozen: BTreeMap::new(),
            fixed_design: false,
            biomass_caps: BTreeMap::new(),
            electricity_price: None,
            heat_price: None,
        }
    }
}

/// One complete scenario.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    pub superstructure: SuperstructureSource,
    #[serde(default)]
    pub networks: BTreeMap<String, NetworkSource>,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub model: ModelSection,
}

impl ScenarioConfig {
    /// Parses a scenario from TOML text; `origin` only labels errors.
    pub fn from_toml(text: &str, origin: &Path) -> Result<Self, ScenarioError> {
        toml::from_str(text).map_err(|e| ScenarioError::Parse {
            path: origin.to_path_buf(),
            source: Box::new(e),
        })
    }

    /// Canonical serialized form; the basis of the provenance digest.
    pub fn canonical_toml(&self) -> String {
        toml::to_string_pretty(self).expect("scenario configs serialize")
    }

    /// Hex digest of the canonical form plus the seed, embedded in every
    /// artifact for provenance.
    pub fn digest(&self) -> String {
        let bytes = Sha256::digest(self.canonical_toml().as_bytes());
        bytes.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Materializes the superstructure and applies the price overrides.
    /// Relative paths resolve against `base`.
    pub fn resolve_spec(&self, base: &Path) -> Result<SuperstructureSpec, ScenarioError> {
        let mut spec = match &self.superstructure {
            SuperstructureSource::Builtin { builtin } => match builtin.as_str() {
                "two-route" => two_route_spec(),
                "ft-saf-desk" => desk_ft_saf_spec(),
                "ft-saf-full" => full_ft_saf_spec(),
                other => return Err(ScenarioError::UnknownBuiltin(other.to_string())),
            },
            SuperstructureSource::Path { path } => {
                let full = resolve_path(base, path);
                let text = fs::read_to_string(&full).map_err(|e| ScenarioError::Io {
                    path: full.clone(),
                    source: e,
                })?;
                toml::from_str(&text).map_err(|e| ScenarioError::Parse {
                    path: full,
                    source: Box::new(e),
                })?
            }
            SuperstructureSource::Inline(spec) => (**spec).clone(),
        };
        if let Some(price) = self.model.electricity_price {
            spec.globals.electricity_price = price;
        }
        if let Some(price) = self.model.heat_price {
            spec.globals.heat_price = price;
        }
        Ok(spec)
    }
}

/// Reads and parses a scenario file.
pub fn load_scenario(path: &Path) -> Result<ScenarioConfig, ScenarioError> {
    let text = fs::read_to_string(path).map_err(|e| ScenarioError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    ScenarioConfig::from_toml(&text, path)
}

/// Joins a possibly relative path onto the scenario's directory.
pub(crate) fn resolve_path(base: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal(extra: &str) -> String {
        format!(
            "name = \"t\"\n[superstructure]\nbuiltin = \"two-route\"\n{extra}"
        )
    }

    #[test]
    fn builtin_two_route_resolves() {
        let cfg = ScenarioConfig::from_toml(&minimal(""), Path::new("t.toml")).unwrap();
        let spec = cfg.resolve_spec(Path::new(".")).unwrap();
        assert_eq!(spec.processes.len(), 3);
        assert_eq!(cfg.solver.rel_gap, 1e-4);
        assert!(cfg.model.heat_integration);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = ScenarioConfig::from_toml(
            &minimal("[solver]\nrelgap = 0.1\n"),
            Path::new("t.toml"),
        )
        .unwrap_err();
        assert!(err.to_string().contains("t.toml"), "{err}");
    }

    #[test]
    fn unknown_builtin_is_named() {
        let cfg = ScenarioConfig::from_toml(
            "name = \"t\"\n[superstructure]\nbuiltin = \"nope\"\n",
            Path::new("t.toml"),
        )
        .unwrap();
        let err = cfg.resolve_spec(Path::new(".")).unwrap_err();
        assert!(matches!(err, ScenarioError::UnknownBuiltin(ref b) if b == "nope"));
    }

    #[test]
    fn price_overrides_reach_the_globals() {
        let cfg = ScenarioConfig::from_toml(
            &minimal("[model]\nelectricity_price = 0.2\nheat_price = 0.05\n"),
            Path::new("t.toml"),
        )
        .unwrap();
        let spec = cfg.resolve_spec(Path::new(".")).unwrap();
        assert_eq!(spec.globals.electricity_price, 0.2);
        assert_eq!(spec.globals.heat_price, 0.05);
    }

    #[test]
    fn digest_tracks_content() {
        let a = ScenarioConfig::from_toml(&minimal(""), Path::new("a.toml")).unwrap();
        let b = ScenarioConfig::from_toml(&minimal(""), Path::new("b.toml")).unwrap();
        assert_eq!(a.digest(), b.digest());
        let c = ScenarioConfig::from_toml(
            "name = \"t\"\nseed = 7\n[superstructure]\nbuiltin = \"two-route\"\n",
            Path::new("c.toml"),
        )
        .unwrap();
        assert_ne!(a.digest(), c.digest());
        assert_eq!(a.digest().len(), 64);
    }

    #[test]
    fn inline_superstructure_round_trips() {
        let cfg = ScenarioConfig {
            name: "inline".into(),
            seed: 3,
            superstructure: SuperstructureSource::Inline(Box::new(two_route_spec())),
            networks: BTreeMap::new(),
            solver: SolverSection::default(),
            sweep: SweepSection::default(),
            model: ModelSection::default(),
        };
        let text = cfg.canonical_toml();
        let back = ScenarioConfig::from_toml(&text, Path::new("mem")).unwrap();
        let spec = back.resolve_spec(Path::new(".")).unwrap();
        assert_eq!(spec.components.len(), 3);
        assert_eq!(back.digest(), cfg.digest());
    }

    #[test]
    fn train_request_accepts_overrides() {
        let cfg = ScenarioConfig::from_toml(
            &minimal("[networks.ft]\noracle = \"ft\"\nsamples = 500\nepochs = 100\n"),
            Path::new("t.toml"),
        )
        .unwrap();
        match &cfg.networks["ft"] {
            NetworkSource::Train(req) => {
                assert_eq!(req.oracle, "ft");
                assert_eq!(req.samples, Some(500));
                assert_eq!(req.hidden, None);
            }
            other => panic!("expected a training source, got {other:?}"),
        }
    }
}
