//! Solver-independent model intermediate representation: variables with
//! bounds, linear constraints grouped into named families, bilinear product
//! registrations, and a linear objective.
//!
//! Emitters register every product of two variables in the bilinear list
//! instead of linearizing it; the solver chooses the relaxation (exact
//! four-row linearization when a factor is binary, McCormick envelopes for
//! continuous pairs).

use std::collections::BTreeMap;

use thiserror::Error;

pub type VarId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    Binary,
}

/// A decision variable with finite bounds and a structured label.
///
/// Labels are unique, human-readable strings such as `w[FT.in1,h2]` or
/// `q[Gasification.heat2]`; they name variables in exports, solver logs,
/// verification reports, and warm starts.
#[derive(Debug, Clone, PartialEq)]
pub struct Var {
    pub kind: VarKind,
    pub lo: f64,
    pub hi: f64,
    pub label: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl std::fmt::Display for Sense {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Sense::Le => write!(f, "<="),
            Sense::Eq => write!(f, "="),
            Sense::Ge => write!(f, ">="),
        }
    }
}

/// Families group constraints by the balance or rule they express, so tests
/// and reports can count and locate them without string matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Family {
    /// Inlet-port total flow: connections plus fresh feeds.
    InletPortTotal,
    /// Inlet-port component flow.
    InletPortComponent,
    /// Fresh-feed flows of non-purchasable components vanish.
    NonSourceZero,
    /// Process inlet total across its ports.
    ProcessInletTotal,
    /// Process inlet component flow across its ports.
    ProcessInletComponent,
    /// Outlet-port total flow: connections plus discharge.
    OutletPortTotal,
    /// Outlet-port component flow.
    OutletPortComponent,
    /// Connections inherit the composition of their origin port.
    ConnectionComposition,
    /// Discharges inherit the composition of their port.
    SinkComposition,
    /// Process outlet total across its ports.
    ProcessOutletTotal,
    /// Process outlet component flow across its ports.
    ProcessOutletComponent,
    /// Total mass leaving equals total mass entering.
    MassConservation,
    /// Stoichiometric relation between inlet and outlet component flows.
    Conversion,
    /// Process scale equals key-component production.
    ScaleDefinition,
    FractionSumInletPort,
    FractionSumOutletPort,
    FractionSumProcessInlet,
    FractionSumProcessOutlet,
    FractionSumConnection,
    /// Shaft work of one process.
    WorkDefinition,
    /// Site power balance with grid import/export.
    WorkBalance,
    /// Heat-port duty of a linear process.
    DutyDefinition,
    /// Hot-port duty splits into matches and external rejection.
    HotPortBalance,
    /// Cold-port demand is covered by matches and external utility.
    ColdPortBalance,
    /// A heat match carries flow only when selected.
    HeatLinkCap,
    /// A match needs its hot-side process.
    HeatLinkRequiresHot,
    /// A match needs its cold-side process.
    HeatLinkRequiresCold,
    /// Selected matches respect the minimum approach temperature.
    ApproachTemperature,
    /// Dual-port balance while acting as a heat source.
    DualSourceSide,
    /// Dual-port balance while acting as a heat sink.
    DualSinkSide,
    /// Dual-port duty sign follows the side selector (upper bound).
    DualSignUpper,
    /// Dual-port duty sign follows the side selector (lower bound).
    DualSignLower,
    /// A dual port cannot exchange heat with itself.
    DualSelfExclusion,
    /// Annualized capital plus operating cost.
    CostTotal,
    CapitalCost,
    ComponentCost,
    ElectricityCost,
    HeatCost,
    EmissionTotal,
    SourceEmission,
    SinkEmission,
    ProductionTarget,
    Dominance,
    /// Components not admitted downstream cannot ride a connection.
    ConnectionBlocking,
    /// Port flows vanish when the process is not selected.
    ActivationGate,
    /// Fixed ratio between two inlet flows of one process.
    FlowCouplingRow,
    /// Raw surrogate inputs follow the bound model quantity.
    SurrogateInput,
    /// One-hot selector sums to the process binary.
    OneHotSum,
    /// Bound model quantities follow surrogate outputs.
    SurrogateOutput,
    /// Scenario-imposed cap on total purchases of one component.
    SupplyCap,
    /// Big-M encoding of one rectified neuron.
    ReluEncoding,
    /// Affine standardization between raw and scaled network values.
    ScalerRow,
}

/// A single linear constraint `sum(coeff_i x_i) sense rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinCon {
    pub name: String,
    pub family: Family,
    pub coeffs: Vec<(VarId, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// How the product of the two factors can be linearized exactly or relaxed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exactness {
    /// At least one factor is binary: four rows reproduce the product
    /// exactly.
    BinaryFactor,
    /// Both factors continuous: McCormick envelope over the factor boxes.
    McCormick,
}

/// Registration of `product = a * b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bilinear {
    pub product: VarId,
    pub a: VarId,
    pub b: VarId,
    pub exactness: Exactness,
}

/// Metadata handles into the flat model.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ModelHandles {
    /// Annual CO2 balance variable, kg/yr.
    pub co2_total: Option<VarId>,
    /// Annualized total cost variable, $/yr.
    pub total_cost: Option<VarId>,
}

/// The assembled optimization model.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ModelIR {
    pub vars: Vec<Var>,
    pub cons: Vec<LinCon>,
    pub bilinears: Vec<Bilinear>,
    /// Minimized linear objective.
    pub objective: Vec<(VarId, f64)>,
    pub handles: ModelHandles,
    label_index: BTreeMap<String, VarId>,
}

#[derive(Debug, Error)]
pub enum AssembleError {
    #[error("variable `{label}` has unusable bounds [{lo}, {hi}]")]
    BadBounds { label: String, lo: f64, hi: f64 },
    #[error("bilinear factor `{label}` lacks finite bounds and cannot be relaxed")]
    UnboundedBilinearFactor { label: String },
    #[error("duplicate variable label `{label}`")]
    DuplicateLabel { label: String },
    #[error("process `{process}` references network `{network}` which was not supplied")]
    MissingNetwork { process: String, network: String },
    #[error("network `{network}` for `{process}`: {detail}")]
    NetworkShape {
        network: String,
        process: String,
        detail: String,
    },
}

impl ModelIR {
    pub fn n_vars(&self) -> usize {
        self.vars.len()
    }

    /// Adds a variable; labels must be unique.
    pub fn push_var(&mut self, kind: VarKind, lo: f64, hi: f64, label: String) -> VarId {
        let id = self.vars.len();
        if self.label_index.insert(label.clone(), id).is_some() {
            panic!("duplicate variable label `{label}`");
        }
        self.vars.push(Var { kind, lo, hi, label });
        id
    }

    pub fn var_id(&self, label: &str) -> Option<VarId> {
        self.label_index.get(label).copied()
    }

    pub fn label(&self, id: VarId) -> &str {
        &self.vars[id].label
    }

    /// Adds a constraint after merging repeated variable references.
    pub fn push_con(
        &mut self,
        name: String,
        family: Family,
        coeffs: Vec<(VarId, f64)>,
        sense: Sense,
        rhs: f64,
    ) {
        let mut merged: BTreeMap<VarId, f64> = BTreeMap::new();
        for (v, c) in coeffs {
            *merged.entry(v).or_insert(0.0) += c;
        }
        let coeffs: Vec<(VarId, f64)> = merged.into_iter().filter(|(_, c)| *c != 0.0).collect();
        self.cons.push(LinCon {
            name,
            family,
            coeffs,
            sense,
            rhs,
        });
    }

    /// Registers `a * b`, returning the shared product variable. Repeated
    /// registrations of the same unordered pair reuse one variable.
    pub fn product_of(&mut self, a: VarId, b: VarId) -> VarId {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        let label = format!("prod[{}*{}]", self.vars[a].label, self.vars[b].label);
        if let Some(&id) = self.label_index.get(&label) {
            return id;
        }
        let (lo, hi) = product_bounds(
            self.vars[a].lo,
            self.vars[a].hi,
            self.vars[b].lo,
            self.vars[b].hi,
        );
        let exactness = if self.vars[a].kind == VarKind::Binary
            || self.vars[b].kind == VarKind::Binary
        {
            Exactness::BinaryFactor
        } else {
            Exactness::McCormick
        };
        let product = self.push_var(VarKind::Continuous, lo, hi, label);
        self.bilinears.push(Bilinear {
            product,
            a,
            b,
            exactness,
        });
        product
    }

    pub fn count_family(&self, family: Family) -> usize {
        self.cons.iter().filter(|c| c.family == family).count()
    }

    /// Final consistency pass: finite ordered bounds everywhere, unique
    /// labels (guaranteed by construction), and finite boxes for every
    /// bilinear factor.
    pub fn check(&self) -> Result<(), AssembleError> {
        for v in &self.vars {
            if !(v.lo.is_finite() && v.hi.is_finite() && v.lo <= v.hi) {
                return Err(AssembleError::BadBounds {
                    label: v.label.clone(),
                    lo: v.lo,
                    hi: v.hi,
                });
            }
        }
        for bl in &self.bilinears {
            for f in [bl.a, bl.b] {
                let v = &self.vars[f];
                if !(v.lo.is_finite() && v.hi.is_finite()) {
                    return Err(AssembleError::UnboundedBilinearFactor {
                        label: v.label.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Evaluates one constraint's left-hand side at a point.
    pub fn eval_con(&self, con: &LinCon, x: &[f64]) -> f64 {
        con.coeffs.iter().map(|&(v, c)| c * x[v]).sum()
    }

    /// Evaluates the objective at a point.
    pub fn eval_objective(&self, x: &[f64]) -> f64 {
        self.objective.iter().map(|&(v, c)| c * x[v]).sum()
    }
}

/// Interval bounds of a product of two bounded variables.
pub fn product_bounds(alo: f64, ahi: f64, blo: f64, bhi: f64) -> (f64, f64) {
    let corners = [alo * blo, alo * bhi, ahi * blo, ahi * bhi];
    let lo = corners.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = corners.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products_are_shared_and_classified() {
        let mut m = ModelIR::default();
        let x = m.push_var(VarKind::Continuous, 0.0, 2.0, "x".into());
        let y = m.push_var(VarKind::Binary, 0.0, 1.0, "y".into());
        let p1 = m.product_of(x, y);
        let p2 = m.product_of(y, x);
        assert_eq!(p1, p2);
        assert_eq!(m.bilinears.len(), 1);
        assert_eq!(m.bilinears[0].exactness, Exactness::BinaryFactor);
        assert_eq!(m.vars[p1].lo, 0.0);
        assert_eq!(m.vars[p1].hi, 2.0);
    }

    #[test]
    fn product_bounds_cover_sign_changes() {
        let (lo, hi) = product_bounds(-1.0, 2.0, -3.0, 0.5);
        assert_eq!(lo, -6.0);
        assert_eq!(hi, 3.0);
    }
}
