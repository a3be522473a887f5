//! Structural validation of superstructure specs.
//!
//! Validation never fails hard: every problem is collected into a
//! [`ValidationReport`] so a scenario author sees all defects at once.

use std::collections::{BTreeMap, BTreeSet};

use super::{
    HeatPortMode, InputTarget, OutputTarget, PortDirection, PortSel, ProcessKind, ProcessSpec,
    SuperstructureSpec, Tag, TemperatureSpec,
};

/// Lowest and highest admissible fixed heat-port temperatures, Celsius.
pub const MIN_PORT_TEMPERATURE: f64 = -200.0;
pub const MAX_PORT_TEMPERATURE: f64 = 1600.0;

/// Hours in a leap year, the cap on annual operating hours.
pub const MAX_OPERATING_HOURS: f64 = 8784.0;

/// One structural defect of a spec. `where_` strings use the form
/// `process`, `process.in1`, or `component` so messages are greppable.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    DuplicateComponentId { id: String },
    DuplicateProcessId { id: String },
    NonPositiveMolarMass { component: String },
    NegativeHeatingValue { component: String },
    SourceDataMismatch { component: String, has_tag: bool },
    MissingHydrocarbonTag { component: String, tag: Tag },
    BadPortNumbering { process: String, direction: PortDirection },
    UnknownComponentRef { where_: String, component: String },
    EmptyAllowedList { where_: String },
    BadHeatPortNumbering { process: String },
    TemperatureOutOfRange { where_: String, celsius: f64 },
    SpecificDutyOnSurrogate { where_: String },
    MissingSpecificDuty { where_: String },
    DutySignConflictsMode { where_: String },
    DualPortOnLinearProcess { where_: String },
    MultipleDualPorts { count: usize },
    VariableTemperatureOnLinear { where_: String },
    MissingKeyComponent { process: String, component: String },
    KeyCoefficientNotPositive { process: String },
    KeyNotEligible { process: String, component: String },
    DuplicateSurrogateBinding { process: String, is_input: bool, index: usize },
    UnboundSurrogateIndex { process: String, is_input: bool, index: usize },
    BindingTargetMissing { process: String, detail: String },
    UnrestrictedSurrogateOutlet { process: String, port: usize },
    FractionNotAdmitted { process: String, port: usize, component: String },
    AmbiguousOneHotPort { process: String, component: String },
    DanglingConnection { connection: String, end: String },
    ReversedConnection { connection: String },
    BadFlowCoupling { process: String, detail: String },
    UnreachableProcess { process: String },
    GlobalOutOfRange { field: String, value: f64 },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        use Violation::*;
        match self {
            DuplicateComponentId { id } => write!(f, "component id `{id}` appears twice"),
            DuplicateProcessId { id } => write!(f, "process id `{id}` appears twice"),
            NonPositiveMolarMass { component } => {
                write!(f, "component `{component}` needs a positive molar mass")
            }
            NegativeHeatingValue { component } => {
                write!(f, "component `{component}` has a negative heating value")
            }
            SourceDataMismatch { component, has_tag } => {
                if *has_tag {
                    write!(f, "source component `{component}` lacks cost/emission data")
                } else {
                    write!(f, "`{component}` has source data but no source tag")
                }
            }
            MissingHydrocarbonTag { component, tag } => write!(
                f,
                "component `{component}` tagged {tag:?} must also be tagged hydrocarbon"
            ),
            BadPortNumbering { process, direction } => write!(
                f,
                "{direction}let ports of `{process}` must be numbered 1..n without gaps"
            ),
            UnknownComponentRef { where_, component } => {
                write!(f, "{where_} references unknown component `{component}`")
            }
            EmptyAllowedList { where_ } => write!(f, "{where_} admits no components"),
            BadHeatPortNumbering { process } => {
                write!(f, "heat ports of `{process}` must be numbered 1..n without gaps")
            }
            TemperatureOutOfRange { where_, celsius } => write!(
                f,
                "{where_} temperature {celsius} C outside [{MIN_PORT_TEMPERATURE}, {MAX_PORT_TEMPERATURE}]"
            ),
            SpecificDutyOnSurrogate { where_ } => write!(
                f,
                "{where_}: specific duties belong to linear processes; surrogates bind duties to outputs"
            ),
            MissingSpecificDuty { where_ } => {
                write!(f, "{where_} on a linear process needs a specific duty")
            }
            DutySignConflictsMode { where_ } => {
                write!(f, "{where_}: duty sign conflicts with hot/cold mode")
            }
            DualPortOnLinearProcess { where_ } => {
                write!(f, "{where_}: dual heat ports require a surrogate process")
            }
            MultipleDualPorts { count } => {
                write!(f, "{count} dual heat ports present; at most one is supported")
            }
            VariableTemperatureOnLinear { where_ } => {
                write!(f, "{where_}: input-bound temperatures require a surrogate process")
            }
            MissingKeyComponent { process, component } => {
                write!(f, "process `{process}` keys on unknown component `{component}`")
            }
            KeyCoefficientNotPositive { process } => write!(
                f,
                "process `{process}`: key component must carry a positive coefficient"
            ),
            KeyNotEligible { process, component } => write!(
                f,
                "process `{process}` keys on `{component}` which is not tagged key-eligible"
            ),
            DuplicateSurrogateBinding { process, is_input, index } => write!(
                f,
                "process `{process}` binds surrogate {} {index} more than once",
                if *is_input { "input" } else { "output" }
            ),
            UnboundSurrogateIndex { process, is_input, index } => write!(
                f,
                "process `{process}` leaves surrogate {} {index} unbound",
                if *is_input { "input" } else { "output" }
            ),
            BindingTargetMissing { process, detail } => {
                write!(f, "process `{process}`: {detail}")
            }
            UnrestrictedSurrogateOutlet { process, port } => write!(
                f,
                "surrogate outlet `{process}.out{port}` needs an explicit allowed list"
            ),
            FractionNotAdmitted { process, port, component } => write!(
                f,
                "`{process}.out{port}` binds a fraction of `{component}` it does not admit"
            ),
            AmbiguousOneHotPort { process, component } => write!(
                f,
                "one-hot component `{component}` of `{process}` must be admitted by exactly one inlet port"
            ),
            DanglingConnection { connection, end } => {
                write!(f, "connection {connection}: no such port `{end}`")
            }
            ReversedConnection { connection } => write!(
                f,
                "connection {connection} must run from an outlet to an inlet"
            ),
            BadFlowCoupling { process, detail } => {
                write!(f, "process `{process}` flow coupling: {detail}")
            }
            UnreachableProcess { process } => write!(
                f,
                "process `{process}` can never receive material from sources or other processes"
            ),
            GlobalOutOfRange { field, value } => {
                write!(f, "global `{field}` = {value} outside its admissible range")
            }
        }
    }
}

/// Collected validation outcome. An empty report means the spec resolves.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count_of(&self, pred: impl Fn(&Violation) -> bool) -> usize {
        self.violations.iter().filter(|v| pred(v)).count()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_clean() {
            writeln!(f, "spec is structurally sound")
        } else {
            for v in &self.violations {
                writeln!(f, "- {v}")?;
            }
            Ok(())
        }
    }
}

/// Checks everything that can be checked without the trained networks:
/// identifier uniqueness, tag coherence, port numbering, binding
/// multiplicity, connection endpoints, reachability, and global parameter
/// ranges. Problems are reported, never thrown.
pub fn validate_superstructure(spec: &SuperstructureSpec) -> ValidationReport {
    let mut out = ValidationReport::default();
    let v = &mut out.violations;

    // Components.
    let mut comp_ids: BTreeSet<&str> = BTreeSet::new();
    for c in &spec.components {
        if !comp_ids.insert(&c.id) {
            v.push(Violation::DuplicateComponentId { id: c.id.clone() });
        }
        if !(c.molar_mass > 0.0) {
            v.push(Violation::NonPositiveMolarMass {
                component: c.id.clone(),
            });
        }
        if c.lhv < 0.0 {
            v.push(Violation::NegativeHeatingValue {
                component: c.id.clone(),
            });
        }
        let has_tag = c.has_tag(Tag::Source);
        if has_tag != c.source.is_some() {
            v.push(Violation::SourceDataMismatch {
                component: c.id.clone(),
                has_tag,
            });
        }
        for tag in [Tag::Kerosene, Tag::Gasoline, Tag::Diesel] {
            if c.has_tag(tag) && !c.has_tag(Tag::Hydrocarbon) {
                v.push(Violation::MissingHydrocarbonTag {
                    component: c.id.clone(),
                    tag,
                });
            }
        }
    }

    // Processes.
    let mut proc_ids: BTreeSet<&str> = BTreeSet::new();
    let mut dual_ports = 0usize;
    for p in &spec.processes {
        if !proc_ids.insert(&p.id) {
            v.push(Violation::DuplicateProcessId { id: p.id.clone() });
        }
        check_port_numbering(p, PortDirection::Inlet, v);
        check_port_numbering(p, PortDirection::Outlet, v);
        check_allowed_lists(spec, p, v);
        dual_ports += check_heat_ports(p, v);
        match &p.kind {
            ProcessKind::Linear(lin) => check_linear(spec, p, lin, v),
            ProcessKind::Surrogate(sur) => check_surrogate(spec, p, sur, v),
        }
    }
    if dual_ports > 1 {
        v.push(Violation::MultipleDualPorts { count: dual_ports });
    }

    // Connections.
    for (i, conn) in spec.connections.iter().enumerate() {
        let name = format!("#{i} ({} -> {})", conn.from, conn.to);
        if conn.from.sel.direction != PortDirection::Outlet
            || conn.to.sel.direction != PortDirection::Inlet
        {
            v.push(Violation::ReversedConnection { connection: name });
            continue;
        }
        for (r, end) in [(&conn.from, "from"), (&conn.to, "to")] {
            let exists = spec
                .process(&r.process)
                .map(|p| p.port(r.sel).is_some())
                .unwrap_or(false);
            if !exists {
                v.push(Violation::DanglingConnection {
                    connection: name.clone(),
                    end: format!("{end} {r}"),
                });
            }
        }
    }

    check_reachability(spec, v);
    check_globals(spec, v);
    out
}

/// Extends [`validate_superstructure`] with checks that need the network
/// dimensions: ids must resolve and every input/output index must be bound.
pub fn validate_with_networks(
    spec: &SuperstructureSpec,
    dims: &BTreeMap<String, (usize, usize)>,
) -> ValidationReport {
    let mut report = validate_superstructure(spec);
    for p in &spec.processes {
        let ProcessKind::Surrogate(sur) = &p.kind else {
            continue;
        };
        let Some(&(n_in, n_out)) = dims.get(&sur.network_id) else {
            report.violations.push(Violation::BindingTargetMissing {
                process: p.id.clone(),
                detail: format!("network `{}` is not available", sur.network_id),
            });
            continue;
        };
        let bound_in: BTreeSet<usize> = sur.input_bindings.iter().map(|b| b.input).collect();
        let bound_out: BTreeSet<usize> = sur.output_bindings.iter().map(|b| b.output).collect();
        for i in 1..=n_in {
            if !bound_in.contains(&i) {
                report.violations.push(Violation::UnboundSurrogateIndex {
                    process: p.id.clone(),
                    is_input: true,
                    index: i,
                });
            }
        }
        for o in 1..=n_out {
            if !bound_out.contains(&o) {
                report.violations.push(Violation::UnboundSurrogateIndex {
                    process: p.id.clone(),
                    is_input: false,
                    index: o,
                });
            }
        }
        for b in &sur.input_bindings {
            if b.input > n_in {
                report.violations.push(Violation::BindingTargetMissing {
                    process: p.id.clone(),
                    detail: format!("input {} exceeds network width {n_in}", b.input),
                });
            }
        }
        for b in &sur.output_bindings {
            if b.output > n_out {
                report.violations.push(Violation::BindingTargetMissing {
                    process: p.id.clone(),
                    detail: format!("output {} exceeds network width {n_out}", b.output),
                });
            }
        }
    }
    report
}

fn check_port_numbering(p: &ProcessSpec, dir: PortDirection, v: &mut Vec<Violation>) {
    let ports = match dir {
        PortDirection::Inlet => &p.inlet_ports,
        PortDirection::Outlet => &p.outlet_ports,
    };
    let mut seen: Vec<usize> = ports.iter().map(|q| q.index).collect();
    seen.sort_unstable();
    let ok = seen.iter().enumerate().all(|(i, &idx)| idx == i + 1);
    if !ok {
        v.push(Violation::BadPortNumbering {
            process: p.id.clone(),
            direction: dir,
        });
    }
}

fn check_allowed_lists(spec: &SuperstructureSpec, p: &ProcessSpec, v: &mut Vec<Violation>) {
    for (dir, ports) in [
        (PortDirection::Inlet, &p.inlet_ports),
        (PortDirection::Outlet, &p.outlet_ports),
    ] {
        for port in ports {
            let where_ = format!("{}.{}{}", p.id, dir, port.index);
            if let Some(list) = &port.allowed {
                if list.is_empty() {
                    v.push(Violation::EmptyAllowedList {
                        where_: where_.clone(),
                    });
                }
                for id in list {
                    if spec.component(id).is_none() {
                        v.push(Violation::UnknownComponentRef {
                            where_: where_.clone(),
                            component: id.clone(),
                        });
                    }
                }
            }
        }
    }
}

/// Returns the number of dual-mode ports on this process.
fn check_heat_ports(p: &ProcessSpec, v: &mut Vec<Violation>) -> usize {
    let mut seen: Vec<usize> = p.heat_ports.iter().map(|h| h.index).collect();
    seen.sort_unstable();
    if !seen.iter().enumerate().all(|(i, &idx)| idx == i + 1) {
        v.push(Violation::BadHeatPortNumbering {
            process: p.id.clone(),
        });
    }
    let mut duals = 0;
    for h in &p.heat_ports {
        let where_ = format!("{}.heat{}", p.id, h.index);
        match h.temperature {
            TemperatureSpec::Fixed(t) => {
                if !(MIN_PORT_TEMPERATURE..=MAX_PORT_TEMPERATURE).contains(&t) {
                    v.push(Violation::TemperatureOutOfRange {
                        where_: where_.clone(),
                        celsius: t,
                    });
                }
            }
            TemperatureSpec::FromInput { .. } => {
                if !p.is_surrogate() {
                    v.push(Violation::VariableTemperatureOnLinear {
                        where_: where_.clone(),
                    });
                }
            }
        }
        if h.mode == HeatPortMode::Dual {
            duals += 1;
            if !p.is_surrogate() {
                v.push(Violation::DualPortOnLinearProcess {
                    where_: where_.clone(),
                });
            }
        }
        match (&p.kind, h.specific_duty) {
            (ProcessKind::Surrogate(_), Some(_)) => {
                v.push(Violation::SpecificDutyOnSurrogate { where_ });
            }
            (ProcessKind::Linear(_), None) => {
                v.push(Violation::MissingSpecificDuty { where_ });
            }
            (ProcessKind::Linear(_), Some(q)) => {
                let bad = match h.mode {
                    HeatPortMode::Hot => q < 0.0,
                    HeatPortMode::Cold => q > 0.0,
                    HeatPortMode::Dual => false,
                };
                if bad {
                    v.push(Violation::DutySignConflictsMode { where_ });
                }
            }
            (ProcessKind::Surrogate(_), None) => {}
        }
    }
    duals
}

fn check_linear(
    spec: &SuperstructureSpec,
    p: &ProcessSpec,
    lin: &super::LinearProcess,
    v: &mut Vec<Violation>,
) {
    for id in lin.stoich.keys() {
        if spec.component(id).is_none() {
            v.push(Violation::UnknownComponentRef {
                where_: format!("{}.stoich", p.id),
                component: id.clone(),
            });
        }
    }
    match spec.component(&lin.key_component) {
        None => v.push(Violation::MissingKeyComponent {
            process: p.id.clone(),
            component: lin.key_component.clone(),
        }),
        Some(c) => {
            if !c.has_tag(Tag::KeyEligible) {
                v.push(Violation::KeyNotEligible {
                    process: p.id.clone(),
                    component: lin.key_component.clone(),
                });
            }
        }
    }
    // A process with real stoichiometry must produce its key component; a
    // pure separator (all-zero map) keys on a throughput component instead.
    let has_conversion = lin.stoich.values().any(|&nu| nu != 0.0);
    if has_conversion && lin.stoich.get(&lin.key_component).copied().unwrap_or(0.0) <= 0.0 {
        v.push(Violation::KeyCoefficientNotPositive {
            process: p.id.clone(),
        });
    }
}

fn check_surrogate(
    spec: &SuperstructureSpec,
    p: &ProcessSpec,
    sur: &super::SurrogateProcess,
    v: &mut Vec<Violation>,
) {
    // Binding multiplicity: each index at most once, no gaps below the
    // highest bound index. Full coverage is checked against network dims.
    for (is_input, indices) in [
        (true, sur.input_bindings.iter().map(|b| b.input).collect::<Vec<_>>()),
        (false, sur.output_bindings.iter().map(|b| b.output).collect::<Vec<_>>()),
    ] {
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for idx in &indices {
            *counts.entry(*idx).or_insert(0) += 1;
        }
        for (&idx, &n) in &counts {
            if n > 1 {
                v.push(Violation::DuplicateSurrogateBinding {
                    process: p.id.clone(),
                    is_input,
                    index: idx,
                });
            }
        }
        if let Some(&max) = counts.keys().max() {
            for idx in 1..max {
                if !counts.contains_key(&idx) {
                    v.push(Violation::UnboundSurrogateIndex {
                        process: p.id.clone(),
                        is_input,
                        index: idx,
                    });
                }
            }
        }
    }

    let port_exists = |sel: PortSel| p.port(sel).is_some();
    let heat_exists = |idx: usize| p.heat_ports.iter().any(|h| h.index == idx);
    let comp_exists = |id: &str| spec.component(id).is_some();

    for b in &sur.input_bindings {
        match &b.target {
            InputTarget::MassFraction { port, component } => {
                if !port_exists(*port) || !comp_exists(component) {
                    v.push(Violation::BindingTargetMissing {
                        process: p.id.clone(),
                        detail: format!("input {} targets `{port}`/`{component}`", b.input),
                    });
                }
            }
            InputTarget::Temperature { heat_port } => {
                if !heat_exists(*heat_port) {
                    v.push(Violation::BindingTargetMissing {
                        process: p.id.clone(),
                        detail: format!("input {} targets heat port {heat_port}", b.input),
                    });
                }
            }
            InputTarget::Pressure => {}
            InputTarget::FlowRatio { numerator, denominator } => {
                let both_in = numerator.direction == PortDirection::Inlet
                    && denominator.direction == PortDirection::Inlet;
                if !both_in || !port_exists(*numerator) || !port_exists(*denominator) {
                    v.push(Violation::BindingTargetMissing {
                        process: p.id.clone(),
                        detail: format!(
                            "input {} flow ratio {numerator}/{denominator} must pair two inlet ports",
                            b.input
                        ),
                    });
                }
            }
            InputTarget::OneHot { component } => {
                if !comp_exists(component) {
                    v.push(Violation::BindingTargetMissing {
                        process: p.id.clone(),
                        detail: format!("input {} selects unknown `{component}`", b.input),
                    });
                } else {
                    let admitting = p
                        .inlet_ports
                        .iter()
                        .filter(|q| {
                            q.allowed
                                .as_ref()
                                .map(|list| list.iter().any(|c| c == component))
                                .unwrap_or(true)
                        })
                        .count();
                    if admitting != 1 {
                        v.push(Violation::AmbiguousOneHotPort {
                            process: p.id.clone(),
                            component: component.clone(),
                        });
                    }
                }
            }
        }
    }

    for b in &sur.output_bindings {
        match &b.target {
            OutputTarget::MassFraction { port, component } => {
                let sel = PortSel {
                    direction: PortDirection::Outlet,
                    index: *port,
                };
                if !port_exists(sel) || !comp_exists(component) {
                    v.push(Violation::BindingTargetMissing {
                        process: p.id.clone(),
                        detail: format!("output {} targets `out{port}`/`{component}`", b.output),
                    });
                } else if let Some(list) = &p.port(sel).unwrap().allowed {
                    if !list.iter().any(|c| c == component) {
                        v.push(Violation::FractionNotAdmitted {
                            process: p.id.clone(),
                            port: *port,
                            component: component.clone(),
                        });
                    }
                }
            }
            OutputTarget::PortYield { port } => {
                let sel = PortSel {
                    direction: PortDirection::Outlet,
                    index: *port,
                };
                if !port_exists(sel) {
                    v.push(Violation::BindingTargetMissing {
                        process: p.id.clone(),
                        detail: format!("output {} targets yield of `out{port}`", b.output),
                    });
                }
            }
            OutputTarget::SpecificDuty { heat_port } => {
                if !heat_exists(*heat_port) {
                    v.push(Violation::BindingTargetMissing {
                        process: p.id.clone(),
                        detail: format!("output {} targets heat port {heat_port}", b.output),
                    });
                }
            }
            OutputTarget::SpecificWork => {}
        }
    }

    // Surrogate outlets dictate composition; without an explicit admitted
    // list the closure component would be ambiguous.
    for port in &p.outlet_ports {
        if port.allowed.is_none() {
            v.push(Violation::UnrestrictedSurrogateOutlet {
                process: p.id.clone(),
                port: port.index,
            });
        }
    }
}

fn check_reachability(spec: &SuperstructureSpec, v: &mut Vec<Violation>) {
    let n = spec.processes.len();
    let mut reachable = vec![false; n];
    // Seed: processes that can draw a source component through some inlet,
    // or have no inlets at all.
    for (i, p) in spec.processes.iter().enumerate() {
        if p.inlet_ports.is_empty() {
            reachable[i] = true;
            continue;
        }
        'ports: for port in &p.inlet_ports {
            let admits_source = spec.components.iter().any(|c| {
                c.has_tag(Tag::Source)
                    && port
                        .allowed
                        .as_ref()
                        .map(|list| list.iter().any(|id| *id == c.id))
                        .unwrap_or(true)
            });
            if admits_source {
                reachable[i] = true;
                break 'ports;
            }
        }
    }
    // Propagate along connections.
    let index: BTreeMap<&str, usize> = spec
        .processes
        .iter()
        .enumerate()
        .map(|(i, p)| (p.id.as_str(), i))
        .collect();
    let mut changed = true;
    while changed {
        changed = false;
        for conn in &spec.connections {
            let (Some(&a), Some(&b)) = (
                index.get(conn.from.process.as_str()),
                index.get(conn.to.process.as_str()),
            ) else {
                continue;
            };
            if reachable[a] && !reachable[b] {
                reachable[b] = true;
                changed = true;
            }
        }
    }
    for (i, p) in spec.processes.iter().enumerate() {
        if !reachable[i] {
            v.push(Violation::UnreachableProcess {
                process: p.id.clone(),
            });
        }
    }

    // Flow couplings double as structural checks here: both ports must be
    // existing inlets and the ratio must be positive.
    for p in &spec.processes {
        if let ProcessKind::Surrogate(sur) = &p.kind {
            for fc in &sur.flow_couplings {
                let ok = fc.port.direction == PortDirection::Inlet
                    && fc.reference.direction == PortDirection::Inlet
                    && p.port(fc.port).is_some()
                    && p.port(fc.reference).is_some()
                    && fc.port != fc.reference
                    && fc.ratio > 0.0;
                if !ok {
                    v.push(Violation::BadFlowCoupling {
                        process: p.id.clone(),
                        detail: format!(
                            "{} = {} x {}: ports must be distinct inlets and the ratio positive",
                            fc.port, fc.ratio, fc.reference
                        ),
                    });
                }
            }
        }
    }
}

fn check_globals(spec: &SuperstructureSpec, v: &mut Vec<Violation>) {
    let g = &spec.globals;
    let checks: [(&str, f64, bool); 6] = [
        (
            "operating_hours",
            g.operating_hours,
            g.operating_hours > 0.0 && g.operating_hours <= MAX_OPERATING_HOURS,
        ),
        (
            "interest_rate",
            g.interest_rate,
            g.interest_rate > 0.0 && g.interest_rate < 1.0,
        ),
        ("lifetime_years", g.lifetime_years, g.lifetime_years >= 1.0),
        ("delta_t_min", g.delta_t_min, g.delta_t_min >= 0.0),
        ("flow_cap", g.flow_cap, g.flow_cap > 0.0),
        (
            "big_m_heat",
            g.big_m_heat.unwrap_or(1.0),
            g.big_m_heat.map(|m| m > 0.0).unwrap_or(true),
        ),
    ];
    for (field, value, ok) in checks {
        if !ok {
            v.push(Violation::GlobalOutOfRange {
                field: field.to_string(),
                value,
            });
        }
    }
}
