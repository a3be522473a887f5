//! Emission passes that turn an [`IndexedSpec`] into a flat [`ModelIR`].
//!
//! [`Builder::new`] declares every structural variable and embeds the
//! surrogate networks; the `emit_*` passes then append constraint families.
//! [`assemble_model`] runs all passes in a fixed order, so variable and
//! constraint ordering is fully deterministic for a given spec.
//!
//! Mixture fractions multiply port flows throughout, so component balances
//! register bilinear products instead of linear rows; the solver relaxes or
//! linearizes them. Every fraction sum equals the process binary rather than
//! one, which forces all fractions (and with the port gates, all flows) to
//! zero for deselected processes.

use std::collections::BTreeMap;

use crate::consts::molar_mass;
use crate::core_model::{
    CapexBasis, ComponentSpec, HeatPortMode, IndexedSpec, InputTarget, OutputTarget,
    PortDirection, PortSel, ProcessKind, TemperatureSpec,
};
use crate::surrogate::{encode_relu_milp, EncodedNetwork, ReluNetwork};

use super::ir::{product_bounds, AssembleError, Family, ModelIR, Sense, VarId, VarKind};

/// Placeholder magnitude for bounds that a later pass tightens.
const LOOSE: f64 = 1e8;

#[derive(Debug, Clone)]
pub struct EmitOptions {
    /// When false, all inter-process heat links are forced to zero and every
    /// duty is served by external utilities.
    pub heat_integration: bool,
}

impl Default for EmitOptions {
    fn default() -> Self {
        EmitOptions {
            heat_integration: true,
        }
    }
}

/// (process index, 1-based heat port index).
type HeatRef = (usize, usize);

fn in_sel(index: usize) -> PortSel {
    PortSel {
        direction: PortDirection::Inlet,
        index,
    }
}

fn out_sel(index: usize) -> PortSel {
    PortSel {
        direction: PortDirection::Outlet,
        index,
    }
}

/// kg of CO2 released by fully oxidizing one kg of the component; zero for
/// carbon-free or formula-less components.
pub fn oxidation_factor(c: &ComponentSpec) -> f64 {
    c.formula
        .as_ref()
        .map(|f| f.c * molar_mass::CO2 / c.molar_mass)
        .unwrap_or(0.0)
}

/// Surrogate handles kept for the energy and heat passes.
struct AnnHandles {
    enc: EncodedNetwork,
    /// Raw output variable bound to specific work, if any.
    work: Vec<VarId>,
    /// Raw output variables bound to each heat port's specific duty.
    duties: BTreeMap<usize, Vec<VarId>>,
}

/// Incremental model builder over a resolved spec.
pub struct Builder<'a> {
    idx: &'a IndexedSpec<'a>,
    opts: EmitOptions,
    pub model: ModelIR,
    /// `[process][inlet port - 1]` -> admitted component indices, ascending.
    in_allowed: Vec<Vec<Vec<usize>>>,
    out_allowed: Vec<Vec<Vec<usize>>>,
    /// Components crossing each process boundary on the inlet side.
    p_in: Vec<Vec<usize>>,
    p_out: Vec<Vec<usize>>,
    /// Heat ports by role; duals appear in `dual` only.
    hot_ports: Vec<HeatRef>,
    cold_ports: Vec<HeatRef>,
    dual_port: Option<HeatRef>,
    anns: BTreeMap<usize, AnnHandles>,
}

impl<'a> Builder<'a> {
    pub fn new(
        idx: &'a IndexedSpec<'a>,
        nets: &BTreeMap<String, ReluNetwork>,
        opts: EmitOptions,
    ) -> Result<Self, AssembleError> {
        let spec = idx.spec;
        let np = idx.n_processes();

        let mut in_allowed = Vec::with_capacity(np);
        let mut out_allowed = Vec::with_capacity(np);
        let mut p_in = Vec::with_capacity(np);
        let mut p_out = Vec::with_capacity(np);
        for (p, proc) in spec.processes.iter().enumerate() {
            let ins: Vec<Vec<usize>> = proc
                .inlet_ports
                .iter()
                .map(|port| idx.allowed_set(p, in_sel(port.index)).into_iter().collect())
                .collect();
            let outs: Vec<Vec<usize>> = proc
                .outlet_ports
                .iter()
                .map(|port| idx.allowed_set(p, out_sel(port.index)).into_iter().collect())
                .collect();
            let mut union_in: Vec<usize> = ins.iter().flatten().copied().collect();
            union_in.sort_unstable();
            union_in.dedup();
            let mut union_out: Vec<usize> = outs.iter().flatten().copied().collect();
            union_out.sort_unstable();
            union_out.dedup();
            in_allowed.push(ins);
            out_allowed.push(outs);
            p_in.push(union_in);
            p_out.push(union_out);
        }

        let mut hot_ports = Vec::new();
        let mut cold_ports = Vec::new();
        let mut dual_port = None;
        for (p, proc) in spec.processes.iter().enumerate() {
            for h in &proc.heat_ports {
                match h.mode {
                    HeatPortMode::Hot => hot_ports.push((p, h.index)),
                    HeatPortMode::Cold => cold_ports.push((p, h.index)),
                    HeatPortMode::Dual => dual_port = Some((p, h.index)),
                }
            }
        }

        for proc in &spec.processes {
            if let ProcessKind::Surrogate(sur) = &proc.kind {
                if !nets.contains_key(&sur.network_id) {
                    return Err(AssembleError::MissingNetwork {
                        process: proc.id.clone(),
                        network: sur.network_id.clone(),
                    });
                }
            }
        }

        let mut b = Builder {
            idx,
            opts,
            model: ModelIR::default(),
            in_allowed,
            out_allowed,
            p_in,
            p_out,
            hot_ports,
            cold_ports,
            dual_port,
            anns: BTreeMap::new(),
        };
        b.declare_structural();
        b.embed_networks(nets)?;
        Ok(b)
    }

    fn spec(&self) -> &'a crate::core_model::SuperstructureSpec {
        self.idx.spec
    }

    fn cap(&self) -> f64 {
        self.spec().globals.flow_cap
    }

    fn tau(&self) -> f64 {
        self.spec().globals.operating_hours
    }

    fn comp_id(&self, c: usize) -> &'a str {
        &self.spec().components[c].id
    }

    fn proc_id(&self, p: usize) -> &'a str {
        &self.spec().processes[p].id
    }

    /// Looks up a variable declared earlier; absence is a construction bug.
    fn v(&self, label: &str) -> VarId {
        self.model
            .var_id(label)
            .unwrap_or_else(|| panic!("variable `{label}` was never declared"))
    }

    fn set_bounds(&mut self, id: VarId, lo: f64, hi: f64) {
        self.model.vars[id].lo = lo;
        self.model.vars[id].hi = hi;
    }

    fn heat_label(&self, hr: HeatRef) -> String {
        format!("{}.heat{}", self.proc_id(hr.0), hr.1)
    }

    /// Temperature of a heat port as either a constant or a variable.
    fn port_temperature(&self, hr: HeatRef) -> Result<f64, VarId> {
        let proc = &self.spec().processes[hr.0];
        let port = proc
            .heat_ports
            .iter()
            .find(|h| h.index == hr.1)
            .expect("heat refs are collected from the spec");
        match port.temperature {
            TemperatureSpec::Fixed(t) => Ok(t),
            TemperatureSpec::FromInput { .. } => Err(self.v(&format!("t[{}]", self.heat_label(hr)))),
        }
    }

    /// Declares every structural variable in spec order.
    fn declare_structural(&mut self) {
        let spec = self.spec();
        let cap = self.cap();
        let tau = self.tau();

        for proc in &spec.processes {
            self.model
                .push_var(VarKind::Binary, 0.0, 1.0, format!("y[{}]", proc.id));
        }

        for (p, proc) in spec.processes.iter().enumerate() {
            let pid = proc.id.clone();
            for (k, port) in proc.inlet_ports.iter().enumerate() {
                let tag = format!("{pid}.in{}", port.index);
                self.model
                    .push_var(VarKind::Continuous, 0.0, cap, format!("m[{tag}]"));
                for &c in &self.in_allowed[p][k].clone() {
                    let cid = self.comp_id(c);
                    self.model
                        .push_var(VarKind::Continuous, 0.0, 1.0, format!("w[{tag},{cid}]"));
                }
                for &c in &self.in_allowed[p][k].clone() {
                    let cid = self.comp_id(c);
                    self.model
                        .push_var(VarKind::Continuous, 0.0, cap, format!("msrc[{tag},{cid}]"));
                }
            }
            for (k, port) in proc.outlet_ports.iter().enumerate() {
                let tag = format!("{pid}.out{}", port.index);
                self.model
                    .push_var(VarKind::Continuous, 0.0, cap, format!("m[{tag}]"));
                for &c in &self.out_allowed[p][k].clone() {
                    let cid = self.comp_id(c);
                    self.model
                        .push_var(VarKind::Continuous, 0.0, 1.0, format!("w[{tag},{cid}]"));
                }
                self.model
                    .push_var(VarKind::Continuous, 0.0, cap, format!("msink[{tag}]"));
                for &c in &self.out_allowed[p][k].clone() {
                    let cid = self.comp_id(c);
                    self.model
                        .push_var(VarKind::Continuous, 0.0, 1.0, format!("wsink[{tag},{cid}]"));
                }
            }
            let in_cap = cap * proc.inlet_ports.len() as f64;
            let out_cap = cap * proc.outlet_ports.len() as f64;
            self.model
                .push_var(VarKind::Continuous, 0.0, in_cap, format!("mintot[{pid}]"));
            for &c in &self.p_in[p].clone() {
                let cid = self.comp_id(c);
                self.model
                    .push_var(VarKind::Continuous, 0.0, 1.0, format!("wintot[{pid},{cid}]"));
            }
            self.model
                .push_var(VarKind::Continuous, 0.0, out_cap, format!("mouttot[{pid}]"));
            for &c in &self.p_out[p].clone() {
                let cid = self.comp_id(c);
                self.model.push_var(
                    VarKind::Continuous,
                    0.0,
                    1.0,
                    format!("wouttot[{pid},{cid}]"),
                );
            }
            match &proc.kind {
                ProcessKind::Linear(lin) => {
                    let scale_cap = cap * proc.inlet_ports.len().max(proc.outlet_ports.len()) as f64;
                    self.model
                        .push_var(VarKind::Continuous, 0.0, scale_cap, format!("scale[{pid}]"));
                    let w = lin.specific_work * scale_cap;
                    self.model.push_var(
                        VarKind::Continuous,
                        w.min(0.0),
                        w.max(0.0),
                        format!("work[{pid}]"),
                    );
                }
                ProcessKind::Surrogate(_) => {
                    self.model.push_var(
                        VarKind::Continuous,
                        -LOOSE,
                        LOOSE,
                        format!("work[{pid}]"),
                    );
                }
            }
            for h in &proc.heat_ports {
                let tag = format!("{pid}.heat{}", h.index);
                let (qlo, qhi) = match (&proc.kind, h.specific_duty) {
                    (ProcessKind::Linear(_), Some(duty)) => {
                        let scale_hi = self.model.vars[self.v(&format!("scale[{pid}]"))].hi;
                        let q = duty * scale_hi;
                        (q.min(0.0), q.max(0.0))
                    }
                    _ => (-LOOSE, LOOSE),
                };
                self.model
                    .push_var(VarKind::Continuous, qlo, qhi, format!("q[{tag}]"));
                if let TemperatureSpec::FromInput { .. } = h.temperature {
                    // Bounds are tightened from the network box once the
                    // surrogate is embedded.
                    self.model
                        .push_var(VarKind::Continuous, -LOOSE, LOOSE, format!("t[{tag}]"));
                }
                match h.mode {
                    HeatPortMode::Hot => {
                        self.model
                            .push_var(VarKind::Continuous, 0.0, LOOSE, format!("qsink[{tag}]"));
                    }
                    HeatPortMode::Cold => {
                        self.model
                            .push_var(VarKind::Continuous, 0.0, LOOSE, format!("qsrc[{tag}]"));
                    }
                    HeatPortMode::Dual => {
                        self.model
                            .push_var(VarKind::Continuous, 0.0, LOOSE, format!("qsink[{tag}]"));
                        self.model
                            .push_var(VarKind::Continuous, 0.0, LOOSE, format!("qsrc[{tag}]"));
                    }
                }
            }
        }

        for conn in &self.idx.connections {
            self.model
                .push_var(VarKind::Continuous, 0.0, cap, format!("mconn[{}]", conn.id));
            for &c in &self.out_allowed[conn.from_proc][conn.from_port - 1].clone() {
                let cid = self.comp_id(c);
                self.model.push_var(
                    VarKind::Continuous,
                    0.0,
                    1.0,
                    format!("wconn[{},{cid}]", conn.id),
                );
            }
        }

        self.model
            .push_var(VarKind::Continuous, 0.0, LOOSE, "grid_import".into());
        self.model
            .push_var(VarKind::Continuous, 0.0, LOOSE, "grid_export".into());

        // Every hot-capable against every cold-capable interface, duals on
        // both sides; infeasible pairs are cut by the approach-temperature
        // rows and removed in presolve.
        for &h in self.hot_caps().iter() {
            for &c in self.cold_caps().iter() {
                let tag = format!("{}>{}", self.heat_label(h), self.heat_label(c));
                self.model
                    .push_var(VarKind::Continuous, 0.0, LOOSE, format!("qflow[{tag}]"));
                self.model
                    .push_var(VarKind::Binary, 0.0, 1.0, format!("z[{tag}]"));
            }
        }
        if let Some(d) = self.dual_port {
            self.model
                .push_var(VarKind::Binary, 0.0, 1.0, format!("zside[{}]", self.heat_label(d)));
        }

        for proc in &spec.processes {
            if let ProcessKind::Surrogate(sur) = &proc.kind {
                let pid = &proc.id;
                let mut has_onehot = false;
                for binding in &sur.input_bindings {
                    match &binding.target {
                        InputTarget::OneHot { component } => {
                            has_onehot = true;
                            self.model.push_var(
                                VarKind::Binary,
                                0.0,
                                1.0,
                                format!("pick[{pid},{component}]"),
                            );
                        }
                        InputTarget::Pressure => {
                            self.model.push_var(
                                VarKind::Continuous,
                                -LOOSE,
                                LOOSE,
                                format!("press[{pid}]"),
                            );
                        }
                        InputTarget::FlowRatio { .. } => {
                            self.model.push_var(
                                VarKind::Continuous,
                                -LOOSE,
                                LOOSE,
                                format!("ratio[{pid},{}]", binding.input),
                            );
                        }
                        InputTarget::MassFraction { .. } => {
                            self.model.push_var(
                                VarKind::Continuous,
                                -LOOSE,
                                LOOSE,
                                format!("annin[{pid},{}]", binding.input),
                            );
                        }
                        InputTarget::Temperature { .. } => {}
                    }
                }
                let _ = has_onehot;
            }
        }

        for proc in &spec.processes {
            self.model
                .push_var(VarKind::Continuous, 0.0, LOOSE, format!("capex[{}]", proc.id));
        }
        for &c in &self.idx.sources.clone() {
            let data = self.spec().components[c].source.unwrap();
            let ports = self.source_port_count(c) as f64;
            let hi = tau * data.cost.max(0.0) * cap * ports;
            self.model.push_var(
                VarKind::Continuous,
                0.0,
                hi.max(0.0),
                format!("opex_comp[{}]", self.comp_id(c)),
            );
        }
        self.model
            .push_var(VarKind::Continuous, 0.0, LOOSE, "opex_el".into());
        self.model
            .push_var(VarKind::Continuous, 0.0, LOOSE, "opex_heat".into());
        self.model
            .push_var(VarKind::Continuous, 0.0, 1e12, "cost_total".into());

        for &c in &self.idx.sources.clone() {
            let data = self.spec().components[c].source.unwrap();
            let reach = tau * data.emission * cap * self.source_port_count(c) as f64;
            self.model.push_var(
                VarKind::Continuous,
                reach.min(0.0),
                reach.max(0.0),
                format!("em_src[{}]", self.comp_id(c)),
            );
        }
        let sink_hi = {
            let mut hi = 0.0;
            for (p, proc) in spec.processes.iter().enumerate() {
                for (k, _) in proc.outlet_ports.iter().enumerate() {
                    let worst = self.out_allowed[p][k]
                        .iter()
                        .map(|&c| oxidation_factor(&spec.components[c]))
                        .fold(0.0, f64::max);
                    hi += tau * worst * cap;
                }
            }
            hi
        };
        self.model
            .push_var(VarKind::Continuous, 0.0, sink_hi, "em_sink".into());
        self.model
            .push_var(VarKind::Continuous, -1e12, 1e12, "em_total".into());
    }

    /// Number of inlet ports where a component can be purchased.
    fn source_port_count(&self, c: usize) -> usize {
        self.in_allowed
            .iter()
            .flatten()
            .filter(|list| list.binary_search(&c).is_ok())
            .count()
    }

    fn hot_caps(&self) -> Vec<HeatRef> {
        let mut v = self.hot_ports.clone();
        if let Some(d) = self.dual_port {
            v.push(d);
        }
        v
    }

    fn cold_caps(&self) -> Vec<HeatRef> {
        let mut v = self.cold_ports.clone();
        if let Some(d) = self.dual_port {
            v.push(d);
        }
        v
    }

    /// Embeds every surrogate network: encodes the layers, wires the input
    /// variables, and tightens placeholder bounds from the network's ranges.
    fn embed_networks(&mut self, nets: &BTreeMap<String, ReluNetwork>) -> Result<(), AssembleError> {
        let spec = self.spec();
        for (p, proc) in spec.processes.iter().enumerate() {
            let ProcessKind::Surrogate(sur) = &proc.kind else {
                continue;
            };
            let pid = proc.id.clone();
            let net = &nets[&sur.network_id];
            net.validate().map_err(|e| AssembleError::NetworkShape {
                network: sur.network_id.clone(),
                process: pid.clone(),
                detail: e.to_string(),
            })?;
            let max_in = sur.input_bindings.iter().map(|b| b.input).max().unwrap_or(0);
            let max_out = sur
                .output_bindings
                .iter()
                .map(|b| b.output)
                .max()
                .unwrap_or(0);
            if max_in != net.n_inputs() || sur.input_bindings.len() != net.n_inputs() {
                return Err(AssembleError::NetworkShape {
                    network: sur.network_id.clone(),
                    process: pid.clone(),
                    detail: format!(
                        "{} input bindings for {} network inputs",
                        sur.input_bindings.len(),
                        net.n_inputs()
                    ),
                });
            }
            if max_out > net.n_outputs() {
                return Err(AssembleError::NetworkShape {
                    network: sur.network_id.clone(),
                    process: pid.clone(),
                    detail: format!(
                        "binding references output {max_out} of {}",
                        net.n_outputs()
                    ),
                });
            }

            // Resolve one raw model variable per network input, tightening
            // its bounds to the training box.
            let mut inputs: Vec<VarId> = Vec::with_capacity(net.n_inputs());
            let mut ordered = sur.input_bindings.clone();
            ordered.sort_by_key(|b| b.input);
            for binding in &ordered {
                let (lo, hi) = net.input_box[binding.input - 1];
                let var = match &binding.target {
                    InputTarget::MassFraction { .. } => {
                        let id = self.v(&format!("annin[{pid},{}]", binding.input));
                        self.set_bounds(id, lo, hi);
                        id
                    }
                    InputTarget::Temperature { heat_port } => {
                        let tag = format!("t[{pid}.heat{heat_port}]");
                        match self.model.var_id(&tag) {
                            Some(id) => {
                                self.set_bounds(id, lo, hi);
                                id
                            }
                            None => {
                                // Fixed-temperature port: the input is a
                                // constant.
                                let t = spec.processes[p]
                                    .heat_ports
                                    .iter()
                                    .find(|h| h.index == *heat_port)
                                    .and_then(|h| match h.temperature {
                                        TemperatureSpec::Fixed(t) => Some(t),
                                        _ => None,
                                    })
                                    .expect("validated heat port");
                                self.model.push_var(
                                    VarKind::Continuous,
                                    t,
                                    t,
                                    format!("tfix[{pid}.heat{heat_port}]"),
                                )
                            }
                        }
                    }
                    InputTarget::Pressure => {
                        let id = self.v(&format!("press[{pid}]"));
                        self.set_bounds(id, lo, hi);
                        id
                    }
                    InputTarget::FlowRatio { .. } => {
                        let id = self.v(&format!("ratio[{pid},{}]", binding.input));
                        self.set_bounds(id, lo, hi);
                        id
                    }
                    InputTarget::OneHot { component } => self.v(&format!("pick[{pid},{component}]")),
                };
                inputs.push(var);
            }

            let enc = encode_relu_milp(&mut self.model, net, &format!("ann[{pid}]"), &inputs);

            // Collect work and duty outputs and tighten the placeholder
            // bounds of the linked flow-scaled variables.
            let mintot_hi = self.model.vars[self.v(&format!("mintot[{pid}]"))].hi;
            let mut work = Vec::new();
            let mut duties: BTreeMap<usize, Vec<VarId>> = BTreeMap::new();
            for binding in &sur.output_bindings {
                let out = enc.outputs[binding.output - 1];
                match &binding.target {
                    OutputTarget::SpecificWork => work.push(out),
                    OutputTarget::SpecificDuty { heat_port } => {
                        duties.entry(*heat_port).or_default().push(out)
                    }
                    _ => {}
                }
            }
            let sum_range = |outs: &[VarId], model: &ModelIR| {
                let mut lo = 0.0;
                let mut hi = 0.0;
                for &o in outs {
                    let (plo, phi) =
                        product_bounds(model.vars[o].lo, model.vars[o].hi, 0.0, mintot_hi);
                    lo += plo;
                    hi += phi;
                }
                (lo, hi)
            };
            let (wlo, whi) = sum_range(&work, &self.model);
            let wid = self.v(&format!("work[{pid}]"));
            if work.is_empty() {
                self.set_bounds(wid, 0.0, 0.0);
            } else {
                self.set_bounds(wid, wlo, whi);
            }
            for h in &spec.processes[p].heat_ports {
                let qid = self.v(&format!("q[{pid}.heat{}]", h.index));
                match duties.get(&h.index) {
                    Some(outs) => {
                        let (qlo, qhi) = sum_range(outs, &self.model);
                        self.set_bounds(qid, qlo, qhi);
                    }
                    None => self.set_bounds(qid, 0.0, 0.0),
                }
            }

            self.anns.insert(p, AnnHandles { enc, work, duties });
        }
        Ok(())
    }

    /// Material structure: port totals, component balances, source and sink
    /// terms, process totals, overall conservation, activation gates,
    /// connection blocking, and flow couplings.
    pub fn emit_mass_balances(&mut self) {
        let spec = self.spec();
        let cap = self.cap();
        for (p, proc) in spec.processes.iter().enumerate() {
            let pid = proc.id.clone();
            let y = self.v(&format!("y[{pid}]"));
            for (k, port) in proc.inlet_ports.iter().enumerate() {
                let tag = format!("{pid}.in{}", port.index);
                let m = self.v(&format!("m[{tag}]"));
                // Total inflow assembles from connections and fresh feeds.
                let mut coeffs = vec![(m, 1.0)];
                for &cid in &self.idx.conns_in[p][k] {
                    coeffs.push((self.v(&format!("mconn[{cid}]")), -1.0));
                }
                for &c in &self.in_allowed[p][k].clone() {
                    coeffs.push((self.v(&format!("msrc[{tag},{}]", self.comp_id(c))), -1.0));
                }
                self.model.push_con(
                    format!("in_total[{tag}]"),
                    Family::InletPortTotal,
                    coeffs,
                    Sense::Eq,
                    0.0,
                );
                for &c in &self.in_allowed[p][k].clone() {
                    let cid = self.comp_id(c);
                    let w = self.v(&format!("w[{tag},{cid}]"));
                    let wm = self.model.product_of(w, m);
                    let mut coeffs = vec![(wm, 1.0)];
                    for &conn_id in &self.idx.conns_in[p][k].clone() {
                        let conn = self.idx.connections[conn_id];
                        if self.out_allowed[conn.from_proc][conn.from_port - 1]
                            .binary_search(&c)
                            .is_ok()
                        {
                            let wc = self.v(&format!("wconn[{conn_id},{cid}]"));
                            let mc = self.v(&format!("mconn[{conn_id}]"));
                            let prod = self.model.product_of(wc, mc);
                            coeffs.push((prod, -1.0));
                        }
                    }
                    coeffs.push((self.v(&format!("msrc[{tag},{cid}]")), -1.0));
                    self.model.push_con(
                        format!("in_comp[{tag},{cid}]"),
                        Family::InletPortComponent,
                        coeffs,
                        Sense::Eq,
                        0.0,
                    );
                }
                for &c in &self.in_allowed[p][k].clone() {
                    if self.spec().components[c].source.is_none() {
                        let cid = self.comp_id(c);
                        let msrc = self.v(&format!("msrc[{tag},{cid}]"));
                        self.model.push_con(
                            format!("no_src[{tag},{cid}]"),
                            Family::NonSourceZero,
                            vec![(msrc, 1.0)],
                            Sense::Eq,
                            0.0,
                        );
                    }
                }
                self.model.push_con(
                    format!("gate[{tag}]"),
                    Family::ActivationGate,
                    vec![(m, 1.0), (y, -cap)],
                    Sense::Le,
                    0.0,
                );
            }
            for (k, port) in proc.outlet_ports.iter().enumerate() {
                let tag = format!("{pid}.out{}", port.index);
                let m = self.v(&format!("m[{tag}]"));
                let msink = self.v(&format!("msink[{tag}]"));
                let mut coeffs = vec![(m, 1.0), (msink, -1.0)];
                for &cid in &self.idx.conns_out[p][k] {
                    coeffs.push((self.v(&format!("mconn[{cid}]")), -1.0));
                }
                self.model.push_con(
                    format!("out_total[{tag}]"),
                    Family::OutletPortTotal,
                    coeffs,
                    Sense::Eq,
                    0.0,
                );
                for &c in &self.out_allowed[p][k].clone() {
                    let cid = self.comp_id(c);
                    let w = self.v(&format!("w[{tag},{cid}]"));
                    let wm = self.model.product_of(w, m);
                    let wsink = self.v(&format!("wsink[{tag},{cid}]"));
                    let sink_prod = self.model.product_of(wsink, msink);
                    let mut coeffs = vec![(wm, 1.0), (sink_prod, -1.0)];
                    for &conn_id in &self.idx.conns_out[p][k].clone() {
                        let wc = self.v(&format!("wconn[{conn_id},{cid}]"));
                        let mc = self.v(&format!("mconn[{conn_id}]"));
                        let prod = self.model.product_of(wc, mc);
                        coeffs.push((prod, -1.0));
                    }
                    self.model.push_con(
                        format!("out_comp[{tag},{cid}]"),
                        Family::OutletPortComponent,
                        coeffs,
                        Sense::Eq,
                        0.0,
                    );
                    self.model.push_con(
                        format!("sink_comp[{tag},{cid}]"),
                        Family::SinkComposition,
                        vec![(wsink, 1.0), (w, -1.0)],
                        Sense::Eq,
                        0.0,
                    );
                }
                self.model.push_con(
                    format!("gate[{tag}]"),
                    Family::ActivationGate,
                    vec![(m, 1.0), (y, -cap)],
                    Sense::Le,
                    0.0,
                );
            }

            let mintot = self.v(&format!("mintot[{pid}]"));
            let mut coeffs = vec![(mintot, 1.0)];
            for port in &proc.inlet_ports {
                coeffs.push((self.v(&format!("m[{pid}.in{}]", port.index)), -1.0));
            }
            self.model.push_con(
                format!("proc_in_total[{pid}]"),
                Family::ProcessInletTotal,
                coeffs,
                Sense::Eq,
                0.0,
            );
            for &c in &self.p_in[p].clone() {
                let cid = self.comp_id(c);
                let wt = self.v(&format!("wintot[{pid},{cid}]"));
                let tot_prod = self.model.product_of(wt, mintot);
                let mut coeffs = vec![(tot_prod, 1.0)];
                for (k, port) in proc.inlet_ports.iter().enumerate() {
                    if self.in_allowed[p][k].binary_search(&c).is_ok() {
                        let tag = format!("{pid}.in{}", port.index);
                        let w = self.v(&format!("w[{tag},{cid}]"));
                        let m = self.v(&format!("m[{tag}]"));
                        let prod = self.model.product_of(w, m);
                        coeffs.push((prod, -1.0));
                    }
                }
                self.model.push_con(
                    format!("proc_in_comp[{pid},{cid}]"),
                    Family::ProcessInletComponent,
                    coeffs,
                    Sense::Eq,
                    0.0,
                );
            }
            let mouttot = self.v(&format!("mouttot[{pid}]"));
            let mut coeffs = vec![(mouttot, 1.0)];
            for port in &proc.outlet_ports {
                coeffs.push((self.v(&format!("m[{pid}.out{}]", port.index)), -1.0));
            }
            self.model.push_con(
                format!("proc_out_total[{pid}]"),
                Family::ProcessOutletTotal,
                coeffs,
                Sense::Eq,
                0.0,
            );
            for &c in &self.p_out[p].clone() {
                let cid = self.comp_id(c);
                let wt = self.v(&format!("wouttot[{pid},{cid}]"));
                let tot_prod = self.model.product_of(wt, mouttot);
                let mut coeffs = vec![(tot_prod, 1.0)];
                for (k, port) in proc.outlet_ports.iter().enumerate() {
                    if self.out_allowed[p][k].binary_search(&c).is_ok() {
                        let tag = format!("{pid}.out{}", port.index);
                        let w = self.v(&format!("w[{tag},{cid}]"));
                        let m = self.v(&format!("m[{tag}]"));
                        let prod = self.model.product_of(w, m);
                        coeffs.push((prod, -1.0));
                    }
                }
                self.model.push_con(
                    format!("proc_out_comp[{pid},{cid}]"),
                    Family::ProcessOutletComponent,
                    coeffs,
                    Sense::Eq,
                    0.0,
                );
            }
            self.model.push_con(
                format!("conserve[{pid}]"),
                Family::MassConservation,
                vec![(mouttot, 1.0), (mintot, -1.0)],
                Sense::Eq,
                0.0,
            );

            if let ProcessKind::Surrogate(sur) = &proc.kind {
                for coupling in &sur.flow_couplings {
                    let m = self.v(&format!("m[{pid}.{}]", coupling.port));
                    let mref = self.v(&format!("m[{pid}.{}]", coupling.reference));
                    self.model.push_con(
                        format!("couple[{pid}.{}]", coupling.port),
                        Family::FlowCouplingRow,
                        vec![(m, 1.0), (mref, -coupling.ratio)],
                        Sense::Eq,
                        0.0,
                    );
                }
            }
        }

        for conn in &self.idx.connections.clone() {
            let from_tag = format!(
                "{}.out{}",
                self.proc_id(conn.from_proc),
                conn.from_port
            );
            let to_allowed = &self.in_allowed[conn.to_proc][conn.to_port - 1];
            for &c in &self.out_allowed[conn.from_proc][conn.from_port - 1].clone() {
                let cid = self.comp_id(c);
                let wc = self.v(&format!("wconn[{},{cid}]", conn.id));
                let w_from = self.v(&format!("w[{from_tag},{cid}]"));
                self.model.push_con(
                    format!("conn_comp[{},{cid}]", conn.id),
                    Family::ConnectionComposition,
                    vec![(wc, 1.0), (w_from, -1.0)],
                    Sense::Eq,
                    0.0,
                );
                if to_allowed.binary_search(&c).is_err() {
                    // The downstream port rejects this component entirely.
                    let mc = self.v(&format!("mconn[{}]", conn.id));
                    let prod = self.model.product_of(wc, mc);
                    self.model.push_con(
                        format!("blocked[{},{cid}]", conn.id),
                        Family::ConnectionBlocking,
                        vec![(prod, 1.0)],
                        Sense::Eq,
                        0.0,
                    );
                }
            }
        }
    }

    /// Stoichiometric conversion, process scale, and all fraction closure
    /// sums.
    pub fn emit_conversion_and_scale(&mut self) {
        let spec = self.spec();
        for (p, proc) in spec.processes.iter().enumerate() {
            let pid = proc.id.clone();
            let y = self.v(&format!("y[{pid}]"));
            if let ProcessKind::Linear(lin) = &proc.kind {
                let scale = self.v(&format!("scale[{pid}]"));
                let mintot = self.v(&format!("mintot[{pid}]"));
                let mouttot = self.v(&format!("mouttot[{pid}]"));
                let nu_key = lin.stoich.get(&lin.key_component).copied().unwrap_or(0.0);
                let mut domain: Vec<usize> = self.p_in[p]
                    .iter()
                    .chain(self.p_out[p].iter())
                    .copied()
                    .collect();
                for id in lin.stoich.keys() {
                    domain.push(self.idx.comp_index[id]);
                }
                domain.sort_unstable();
                domain.dedup();
                for &c in &domain {
                    let cid = self.comp_id(c).to_string();
                    let mut coeffs = Vec::new();
                    if self.p_out[p].binary_search(&c).is_ok() {
                        let wt = self.v(&format!("wouttot[{pid},{cid}]"));
                        let prod = self.model.product_of(wt, mouttot);
                        coeffs.push((prod, 1.0));
                    }
                    if self.p_in[p].binary_search(&c).is_ok() {
                        let wt = self.v(&format!("wintot[{pid},{cid}]"));
                        let prod = self.model.product_of(wt, mintot);
                        coeffs.push((prod, -1.0));
                    }
                    let ratio = if nu_key != 0.0 {
                        lin.stoich.get(&cid).copied().unwrap_or(0.0) / nu_key
                    } else {
                        0.0
                    };
                    coeffs.push((scale, -ratio));
                    self.model.push_con(
                        format!("convert[{pid},{cid}]"),
                        Family::Conversion,
                        coeffs,
                        Sense::Eq,
                        0.0,
                    );
                }
                // Scale: net key production, or key throughput for a pure
                // separator.
                let key = lin.key_component.clone();
                let kc = self.idx.comp_index[&key];
                let mut coeffs = vec![(scale, 1.0)];
                if nu_key != 0.0 {
                    if self.p_out[p].binary_search(&kc).is_ok() {
                        let wt = self.v(&format!("wouttot[{pid},{key}]"));
                        let prod = self.model.product_of(wt, mouttot);
                        coeffs.push((prod, -1.0));
                    }
                    if self.p_in[p].binary_search(&kc).is_ok() {
                        let wt = self.v(&format!("wintot[{pid},{key}]"));
                        let prod = self.model.product_of(wt, mintot);
                        coeffs.push((prod, 1.0));
                    }
                } else if self.p_in[p].binary_search(&kc).is_ok() {
                    let wt = self.v(&format!("wintot[{pid},{key}]"));
                    let prod = self.model.product_of(wt, mintot);
                    coeffs.push((prod, -1.0));
                }
                self.model.push_con(
                    format!("scale_def[{pid}]"),
                    Family::ScaleDefinition,
                    coeffs,
                    Sense::Eq,
                    0.0,
                );
            }

            for (k, port) in proc.inlet_ports.iter().enumerate() {
                let tag = format!("{pid}.in{}", port.index);
                let mut coeffs: Vec<(VarId, f64)> = self.in_allowed[p][k]
                    .iter()
                    .map(|&c| (self.v(&format!("w[{tag},{}]", self.comp_id(c))), 1.0))
                    .collect();
                coeffs.push((y, -1.0));
                self.model.push_con(
                    format!("wsum[{tag}]"),
                    Family::FractionSumInletPort,
                    coeffs,
                    Sense::Eq,
                    0.0,
                );
            }
            for (k, port) in proc.outlet_ports.iter().enumerate() {
                let tag = format!("{pid}.out{}", port.index);
                let mut coeffs: Vec<(VarId, f64)> = self.out_allowed[p][k]
                    .iter()
                    .map(|&c| (self.v(&format!("w[{tag},{}]", self.comp_id(c))), 1.0))
                    .collect();
                coeffs.push((y, -1.0));
                self.model.push_con(
                    format!("wsum[{tag}]"),
                    Family::FractionSumOutletPort,
                    coeffs,
                    Sense::Eq,
                    0.0,
                );
            }
            let mut coeffs: Vec<(VarId, f64)> = self.p_in[p]
                .iter()
                .map(|&c| (self.v(&format!("wintot[{pid},{}]", self.comp_id(c))), 1.0))
                .collect();
            coeffs.push((y, -1.0));
            self.model.push_con(
                format!("wsum_in[{pid}]"),
                Family::FractionSumProcessInlet,
                coeffs,
                Sense::Eq,
                0.0,
            );
            let mut coeffs: Vec<(VarId, f64)> = self.p_out[p]
                .iter()
                .map(|&c| (self.v(&format!("wouttot[{pid},{}]", self.comp_id(c))), 1.0))
                .collect();
            coeffs.push((y, -1.0));
            self.model.push_con(
                format!("wsum_out[{pid}]"),
                Family::FractionSumProcessOutlet,
                coeffs,
                Sense::Eq,
                0.0,
            );
        }
        for conn in &self.idx.connections.clone() {
            let y_from = self.v(&format!("y[{}]", self.proc_id(conn.from_proc)));
            let mut coeffs: Vec<(VarId, f64)> = self.out_allowed[conn.from_proc]
                [conn.from_port - 1]
                .iter()
                .map(|&c| {
                    (
                        self.v(&format!("wconn[{},{}]", conn.id, self.comp_id(c))),
                        1.0,
                    )
                })
                .collect();
            coeffs.push((y_from, -1.0));
            self.model.push_con(
                format!("wsum_conn[{}]", conn.id),
                Family::FractionSumConnection,
                coeffs,
                Sense::Eq,
                0.0,
            );
        }
    }

    /// Shaft work definitions and the site power balance.
    pub fn emit_energy_balance(&mut self) {
        let spec = self.spec();
        let mut works = Vec::new();
        for (p, proc) in spec.processes.iter().enumerate() {
            let pid = proc.id.clone();
            let work = self.v(&format!("work[{pid}]"));
            works.push(work);
            match &proc.kind {
                ProcessKind::Linear(lin) => {
                    let scale = self.v(&format!("scale[{pid}]"));
                    self.model.push_con(
                        format!("work_def[{pid}]"),
                        Family::WorkDefinition,
                        vec![(work, 1.0), (scale, -lin.specific_work)],
                        Sense::Eq,
                        0.0,
                    );
                }
                ProcessKind::Surrogate(_) => {
                    let mintot = self.v(&format!("mintot[{pid}]"));
                    let outs = self.anns[&p].work.clone();
                    let mut coeffs = vec![(work, 1.0)];
                    for o in outs {
                        let prod = self.model.product_of(o, mintot);
                        coeffs.push((prod, -1.0));
                    }
                    self.model.push_con(
                        format!("work_def[{pid}]"),
                        Family::WorkDefinition,
                        coeffs,
                        Sense::Eq,
                        0.0,
                    );
                }
            }
        }
        let imp = self.v("grid_import");
        let exp = self.v("grid_export");
        let mut imp_hi = 0.0;
        let mut exp_hi = 0.0;
        for &w in &works {
            imp_hi += (-self.model.vars[w].lo).max(0.0);
            exp_hi += self.model.vars[w].hi.max(0.0);
        }
        self.set_bounds(imp, 0.0, imp_hi);
        self.set_bounds(exp, 0.0, exp_hi);
        let mut coeffs: Vec<(VarId, f64)> = works.into_iter().map(|w| (w, 1.0)).collect();
        coeffs.push((imp, 1.0));
        coeffs.push((exp, -1.0));
        self.model.push_con(
            "power_balance".into(),
            Family::WorkBalance,
            coeffs,
            Sense::Eq,
            0.0,
        );
    }

    /// Duty definitions, port heat balances, gated matches with approach
    /// temperature rules, and the dual-port side logic.
    pub fn emit_heat_integration(&mut self) {
        let spec = self.spec();
        let dt_min = spec.globals.delta_t_min;
        let hot_caps = self.hot_caps();
        let cold_caps = self.cold_caps();

        for (p, proc) in spec.processes.iter().enumerate() {
            let pid = proc.id.clone();
            for h in &proc.heat_ports {
                let q = self.v(&format!("q[{pid}.heat{}]", h.index));
                match &proc.kind {
                    ProcessKind::Linear(lin) => {
                        let scale = self.v(&format!("scale[{pid}]"));
                        let duty = h.specific_duty.unwrap_or(0.0);
                        let _ = lin;
                        self.model.push_con(
                            format!("duty_def[{pid}.heat{}]", h.index),
                            Family::DutyDefinition,
                            vec![(q, 1.0), (scale, -duty)],
                            Sense::Eq,
                            0.0,
                        );
                    }
                    ProcessKind::Surrogate(_) => {
                        let mintot = self.v(&format!("mintot[{pid}]"));
                        let outs = self.anns[&p]
                            .duties
                            .get(&h.index)
                            .cloned()
                            .unwrap_or_default();
                        let mut coeffs = vec![(q, 1.0)];
                        for o in outs {
                            let prod = self.model.product_of(o, mintot);
                            coeffs.push((prod, -1.0));
                        }
                        self.model.push_con(
                            format!("duty_def[{pid}.heat{}]", h.index),
                            Family::DutyDefinition,
                            coeffs,
                            Sense::Eq,
                            0.0,
                        );
                    }
                }
            }
        }

        let hot_cap_of = |b: &Builder, hr: HeatRef| -> f64 {
            b.model.vars[b.v(&format!("q[{}]", b.heat_label(hr)))].hi.max(0.0)
        };
        let cold_cap_of = |b: &Builder, hr: HeatRef| -> f64 {
            (-b.model.vars[b.v(&format!("q[{}]", b.heat_label(hr)))].lo).max(0.0)
        };

        // Gated matches with approach-temperature feasibility.
        for &h in &hot_caps {
            for &c in &cold_caps {
                let tag = format!("{}>{}", self.heat_label(h), self.heat_label(c));
                let qflow = self.v(&format!("qflow[{tag}]"));
                let z = self.v(&format!("z[{tag}]"));
                let m = spec
                    .globals
                    .big_m_heat
                    .unwrap_or_else(|| hot_cap_of(self, h).min(cold_cap_of(self, c)));
                let m = if self.opts.heat_integration { m } else { 0.0 };
                self.set_bounds(qflow, 0.0, m.max(0.0));
                if !self.opts.heat_integration {
                    self.set_bounds(z, 0.0, 0.0);
                }
                self.model.push_con(
                    format!("link_cap[{tag}]"),
                    Family::HeatLinkCap,
                    vec![(qflow, 1.0), (z, -m)],
                    Sense::Le,
                    0.0,
                );
                let y_hot = self.v(&format!("y[{}]", self.proc_id(h.0)));
                self.model.push_con(
                    format!("link_hot[{tag}]"),
                    Family::HeatLinkRequiresHot,
                    vec![(z, 1.0), (y_hot, -1.0)],
                    Sense::Le,
                    0.0,
                );
                let y_cold = self.v(&format!("y[{}]", self.proc_id(c.0)));
                self.model.push_con(
                    format!("link_cold[{tag}]"),
                    Family::HeatLinkRequiresCold,
                    vec![(z, 1.0), (y_cold, -1.0)],
                    Sense::Le,
                    0.0,
                );
                // (T_cold + dT - T_hot) z <= 0, with variable temperatures
                // entering through exact binary products.
                let mut coeffs: Vec<(VarId, f64)> = Vec::new();
                let mut zcoef = dt_min;
                match self.port_temperature(c) {
                    Ok(tc) => zcoef += tc,
                    Err(tv) => {
                        let prod = self.model.product_of(z, tv);
                        coeffs.push((prod, 1.0));
                    }
                }
                match self.port_temperature(h) {
                    Ok(th) => zcoef -= th,
                    Err(tv) => {
                        let prod = self.model.product_of(z, tv);
                        coeffs.push((prod, -1.0));
                    }
                }
                coeffs.push((z, zcoef));
                self.model.push_con(
                    format!("approach[{tag}]"),
                    Family::ApproachTemperature,
                    coeffs,
                    Sense::Le,
                    0.0,
                );
            }
        }

        // Hot ports split their duty into matches plus external rejection.
        for &h in &self.hot_ports.clone() {
            let label = self.heat_label(h);
            let q = self.v(&format!("q[{label}]"));
            let qsink = self.v(&format!("qsink[{label}]"));
            self.set_bounds(qsink, 0.0, hot_cap_of(self, h));
            let mut coeffs = vec![(qsink, 1.0), (q, -1.0)];
            for &c in &cold_caps {
                let tag = format!("{label}>{}", self.heat_label(c));
                coeffs.push((self.v(&format!("qflow[{tag}]")), 1.0));
            }
            self.model.push_con(
                format!("hot_balance[{label}]"),
                Family::HotPortBalance,
                coeffs,
                Sense::Eq,
                0.0,
            );
        }
        // Cold ports cover their demand from matches plus external utility.
        for &c in &self.cold_ports.clone() {
            let label = self.heat_label(c);
            let q = self.v(&format!("q[{label}]"));
            let qsrc = self.v(&format!("qsrc[{label}]"));
            self.set_bounds(qsrc, 0.0, cold_cap_of(self, c));
            let mut coeffs = vec![(qsrc, 1.0), (q, 1.0)];
            for &h in &hot_caps {
                let tag = format!("{}>{label}", self.heat_label(h));
                coeffs.push((self.v(&format!("qflow[{tag}]")), 1.0));
            }
            self.model.push_con(
                format!("cold_balance[{label}]"),
                Family::ColdPortBalance,
                coeffs,
                Sense::Eq,
                0.0,
            );
        }

        if let Some(d) = self.dual_port {
            let label = self.heat_label(d);
            let q = self.v(&format!("q[{label}]"));
            let (qlo, qhi) = (self.model.vars[q].lo, self.model.vars[q].hi);
            let zside = self.v(&format!("zside[{label}]"));
            let gated = self.model.product_of(zside, q);
            let qsink = self.v(&format!("qsink[{label}]"));
            let qsrc = self.v(&format!("qsrc[{label}]"));
            self.set_bounds(qsink, 0.0, qhi.max(0.0));
            self.set_bounds(qsrc, 0.0, (-qlo).max(0.0));
            // Source side: outgoing matches plus rejection equal the duty
            // when the selector is up, zero otherwise.
            let mut coeffs = vec![(qsink, 1.0), (gated, -1.0)];
            for &c in &cold_caps {
                let tag = format!("{label}>{}", self.heat_label(c));
                coeffs.push((self.v(&format!("qflow[{tag}]")), 1.0));
            }
            self.model.push_con(
                format!("dual_src[{label}]"),
                Family::DualSourceSide,
                coeffs,
                Sense::Eq,
                0.0,
            );
            // Sink side: incoming matches plus utility equal the demand
            // when the selector is down.
            let mut coeffs = vec![(qsrc, 1.0), (q, 1.0), (gated, -1.0)];
            for &h in &hot_caps {
                let tag = format!("{}>{label}", self.heat_label(h));
                coeffs.push((self.v(&format!("qflow[{tag}]")), 1.0));
            }
            self.model.push_con(
                format!("dual_sink[{label}]"),
                Family::DualSinkSide,
                coeffs,
                Sense::Eq,
                0.0,
            );
            self.model.push_con(
                format!("dual_sign_up[{label}]"),
                Family::DualSignUpper,
                vec![(q, 1.0), (zside, -qhi.max(0.0))],
                Sense::Le,
                0.0,
            );
            self.model.push_con(
                format!("dual_sign_dn[{label}]"),
                Family::DualSignLower,
                vec![(q, 1.0), (zside, qlo.min(0.0))],
                Sense::Ge,
                qlo.min(0.0),
            );
            let self_tag = format!("{label}>{label}");
            let z_self = self.v(&format!("z[{self_tag}]"));
            self.model.push_con(
                format!("dual_self[{label}]"),
                Family::DualSelfExclusion,
                vec![(z_self, 1.0)],
                Sense::Eq,
                0.0,
            );
        }
    }

    /// Capital and operating costs and the annualized total.
    pub fn emit_economics(&mut self) {
        let spec = self.spec();
        let tau = self.tau();
        let cr = spec.capital_recovery_factor();

        let mut capex_ids = Vec::new();
        for proc in &spec.processes {
            let pid = proc.id.clone();
            let capex = self.v(&format!("capex[{pid}]"));
            let (basis, beta) = match &proc.kind {
                ProcessKind::Linear(lin) => match lin.capex {
                    CapexBasis::PerScale(b) => (self.v(&format!("scale[{pid}]")), b),
                    CapexBasis::PerInletFlow(b) => (self.v(&format!("mintot[{pid}]")), b),
                },
                ProcessKind::Surrogate(sur) => {
                    (self.v(&format!("mintot[{pid}]")), sur.capex_per_inlet_flow)
                }
            };
            let hi = beta * self.model.vars[basis].hi;
            self.set_bounds(capex, 0.0, hi.max(0.0));
            self.model.push_con(
                format!("capex_def[{pid}]"),
                Family::CapitalCost,
                vec![(capex, 1.0), (basis, -beta)],
                Sense::Eq,
                0.0,
            );
            capex_ids.push(capex);
        }

        let mut opex_ids = Vec::new();
        for &c in &self.idx.sources.clone() {
            let cid = self.comp_id(c).to_string();
            let cost = spec.components[c].source.unwrap().cost;
            let opex = self.v(&format!("opex_comp[{cid}]"));
            let mut coeffs = vec![(opex, 1.0)];
            for (p, proc) in spec.processes.iter().enumerate() {
                for (k, port) in proc.inlet_ports.iter().enumerate() {
                    if self.in_allowed[p][k].binary_search(&c).is_ok() {
                        let msrc =
                            self.v(&format!("msrc[{}.in{},{cid}]", proc.id, port.index));
                        coeffs.push((msrc, -tau * cost));
                    }
                }
            }
            self.model.push_con(
                format!("opex_comp_def[{cid}]"),
                Family::ComponentCost,
                coeffs,
                Sense::Eq,
                0.0,
            );
            opex_ids.push(opex);
        }

        let imp = self.v("grid_import");
        let opex_el = self.v("opex_el");
        let el_hi = tau * spec.globals.electricity_price * self.model.vars[imp].hi;
        self.set_bounds(opex_el, 0.0, el_hi.max(0.0));
        self.model.push_con(
            "opex_el_def".into(),
            Family::ElectricityCost,
            vec![(opex_el, 1.0), (imp, -tau * spec.globals.electricity_price)],
            Sense::Eq,
            0.0,
        );

        let opex_heat = self.v("opex_heat");
        let mut coeffs = vec![(opex_heat, 1.0)];
        let mut heat_hi = 0.0;
        for &c in &self.cold_caps() {
            let qsrc = self.v(&format!("qsrc[{}]", self.heat_label(c)));
            coeffs.push((qsrc, -tau * spec.globals.heat_price));
            heat_hi += tau * spec.globals.heat_price * self.model.vars[qsrc].hi;
        }
        self.set_bounds(opex_heat, 0.0, heat_hi.max(0.0));
        self.model.push_con(
            "opex_heat_def".into(),
            Family::HeatCost,
            coeffs,
            Sense::Eq,
            0.0,
        );

        let total = self.v("cost_total");
        let mut hi = 0.0;
        let mut coeffs = vec![(total, 1.0)];
        for capex in capex_ids {
            coeffs.push((capex, -cr));
            hi += cr * self.model.vars[capex].hi;
        }
        for opex in opex_ids {
            coeffs.push((opex, -1.0));
            hi += self.model.vars[opex].hi;
        }
        coeffs.push((opex_el, -1.0));
        hi += self.model.vars[opex_el].hi;
        coeffs.push((opex_heat, -1.0));
        hi += self.model.vars[opex_heat].hi;
        self.set_bounds(total, 0.0, hi);
        self.model.push_con(
            "cost_total_def".into(),
            Family::CostTotal,
            coeffs,
            Sense::Eq,
            0.0,
        );
        self.model.handles.total_cost = Some(total);
    }

    /// Annual CO2 balance: upstream source factors, eventual oxidation of
    /// discharged carbon, and utility footprints.
    pub fn emit_co2_accounting(&mut self) {
        let spec = self.spec();
        let tau = self.tau();

        let mut src_ids = Vec::new();
        for &c in &self.idx.sources.clone() {
            let cid = self.comp_id(c).to_string();
            let factor = spec.components[c].source.unwrap().emission;
            let em = self.v(&format!("em_src[{cid}]"));
            let mut coeffs = vec![(em, 1.0)];
            for (p, proc) in spec.processes.iter().enumerate() {
                for (k, port) in proc.inlet_ports.iter().enumerate() {
                    if self.in_allowed[p][k].binary_search(&c).is_ok() {
                        let msrc =
                            self.v(&format!("msrc[{}.in{},{cid}]", proc.id, port.index));
                        coeffs.push((msrc, -tau * factor));
                    }
                }
            }
            self.model.push_con(
                format!("em_src_def[{cid}]"),
                Family::SourceEmission,
                coeffs,
                Sense::Eq,
                0.0,
            );
            src_ids.push(em);
        }

        // Ports whose discharge is not booked as oxidized: the fuel product
        // itself plus explicitly exempt outlets.
        let mut exempt: Vec<(usize, usize)> = Vec::new();
        for pr in spec
            .rules
            .production_targets
            .iter()
            .map(|t| &t.port)
            .chain(spec.rules.combustion_exempt.iter())
        {
            if pr.sel.direction == PortDirection::Outlet {
                exempt.push((self.idx.proc_index[&pr.process], pr.sel.index));
            }
        }
        let purge = spec.rules.purge.as_ref().map(|p| {
            (
                self.idx.proc_index[&p.port.process],
                p.port.sel.index,
                self.idx.comp_index[&p.component],
            )
        });

        let em_sink = self.v("em_sink");
        let mut coeffs = vec![(em_sink, 1.0)];
        for (p, proc) in spec.processes.iter().enumerate() {
            for (k, port) in proc.outlet_ports.iter().enumerate() {
                if exempt.contains(&(p, port.index)) {
                    continue;
                }
                let tag = format!("{}.out{}", proc.id, port.index);
                for &c in &self.out_allowed[p][k].clone() {
                    if purge == Some((p, port.index, c)) {
                        continue;
                    }
                    let lambda = oxidation_factor(&spec.components[c]);
                    if lambda == 0.0 {
                        continue;
                    }
                    let cid = self.comp_id(c);
                    let wsink = self.v(&format!("wsink[{tag},{cid}]"));
                    let msink = self.v(&format!("msink[{tag}]"));
                    let prod = self.model.product_of(wsink, msink);
                    coeffs.push((prod, -tau * lambda));
                }
            }
        }
        self.model.push_con(
            "em_sink_def".into(),
            Family::SinkEmission,
            coeffs,
            Sense::Eq,
            0.0,
        );

        let em_total = self.v("em_total");
        let imp = self.v("grid_import");
        let mut coeffs = vec![(em_total, 1.0)];
        let mut lo = 0.0;
        let mut hi = self.model.vars[em_sink].hi;
        for em in src_ids {
            coeffs.push((em, -1.0));
            lo += self.model.vars[em].lo;
            hi += self.model.vars[em].hi;
        }
        coeffs.push((em_sink, -1.0));
        coeffs.push((imp, -tau * spec.globals.electricity_emission));
        hi += tau * spec.globals.electricity_emission * self.model.vars[imp].hi;
        for &c in &self.cold_caps() {
            let qsrc = self.v(&format!("qsrc[{}]", self.heat_label(c)));
            coeffs.push((qsrc, -tau * spec.globals.heat_emission));
            hi += tau * spec.globals.heat_emission * self.model.vars[qsrc].hi;
        }
        self.set_bounds(em_total, lo, hi);
        self.model.push_con(
            "em_total_def".into(),
            Family::EmissionTotal,
            coeffs,
            Sense::Eq,
            0.0,
        );
        self.model.handles.co2_total = Some(em_total);
    }

    /// Production targets and product-slate dominance rules.
    pub fn emit_process_rules(&mut self) {
        let spec = self.spec();
        for target in &spec.rules.production_targets.clone() {
            let m = self.v(&format!("m[{}]", target.port));
            self.model.push_con(
                format!("target[{}]", target.port),
                Family::ProductionTarget,
                vec![(m, 1.0)],
                Sense::Eq,
                target.rate,
            );
        }
        for (r, rule) in spec.rules.dominance.iter().enumerate() {
            let p = self.idx.proc_index[&rule.port.process];
            let k = rule.port.sel.index - 1;
            let allowed = match rule.port.sel.direction {
                PortDirection::Outlet => &self.out_allowed[p][k],
                PortDirection::Inlet => &self.in_allowed[p][k],
            };
            let mut coeffs: Vec<(VarId, f64)> = Vec::new();
            for &c in allowed {
                let comp = &spec.components[c];
                let lesser = rule.lesser.iter().any(|s| s.matches(comp));
                let greater = rule.greater.iter().any(|s| s.matches(comp));
                let coef = (lesser as i8 - greater as i8) as f64;
                if coef != 0.0 {
                    let w = self.v(&format!("w[{},{}]", rule.port, comp.id));
                    coeffs.push((w, coef));
                }
            }
            self.model.push_con(
                format!("dominance[{r}]"),
                Family::Dominance,
                coeffs,
                Sense::Le,
                0.0,
            );
        }
    }

    /// Constraints tying surrogate inputs and outputs to the flowsheet.
    pub fn emit_surrogate_links(&mut self) {
        let spec = self.spec();
        for (p, proc) in spec.processes.iter().enumerate() {
            let ProcessKind::Surrogate(sur) = &proc.kind else {
                continue;
            };
            let pid = proc.id.clone();
            let y = self.v(&format!("y[{pid}]"));
            let mintot = self.v(&format!("mintot[{pid}]"));

            let mut onehots = Vec::new();
            for binding in &sur.input_bindings {
                match &binding.target {
                    InputTarget::MassFraction { port, component } => {
                        let u = self.v(&format!("annin[{pid},{}]", binding.input));
                        let w = self.v(&format!("w[{pid}.{port},{component}]"));
                        let (ulo, uhi) = (self.model.vars[u].lo, self.model.vars[u].hi);
                        // Two-sided gate: u tracks w while selected, floats
                        // inside the training box otherwise.
                        let ma = uhi.max(0.0);
                        self.model.push_con(
                            format!("in_gate_hi[{pid},{}]", binding.input),
                            Family::SurrogateInput,
                            vec![(u, 1.0), (w, -1.0), (y, ma)],
                            Sense::Le,
                            ma,
                        );
                        let mb = 1.0 - ulo.min(0.0);
                        self.model.push_con(
                            format!("in_gate_lo[{pid},{}]", binding.input),
                            Family::SurrogateInput,
                            vec![(w, 1.0), (u, -1.0), (y, mb)],
                            Sense::Le,
                            mb,
                        );
                    }
                    InputTarget::FlowRatio {
                        numerator,
                        denominator,
                    } => {
                        let r = self.v(&format!("ratio[{pid},{}]", binding.input));
                        let m_den = self.v(&format!("m[{pid}.{denominator}]"));
                        let m_num = self.v(&format!("m[{pid}.{numerator}]"));
                        let prod = self.model.product_of(r, m_den);
                        self.model.push_con(
                            format!("ratio_def[{pid},{}]", binding.input),
                            Family::SurrogateInput,
                            vec![(prod, 1.0), (m_num, -1.0)],
                            Sense::Eq,
                            0.0,
                        );
                    }
                    InputTarget::OneHot { component } => {
                        let x = self.v(&format!("pick[{pid},{component}]"));
                        onehots.push(x);
                        // The selected feed arrives pure at its port.
                        let port = proc
                            .inlet_ports
                            .iter()
                            .find(|port| {
                                self.in_allowed[p][port.index - 1]
                                    .binary_search(&self.idx.comp_index[component])
                                    .is_ok()
                            })
                            .expect("validated one-hot component");
                        let w = self.v(&format!("w[{pid}.in{},{component}]", port.index));
                        self.model.push_con(
                            format!("onehot_frac[{pid},{component}]"),
                            Family::SurrogateInput,
                            vec![(w, 1.0), (x, -1.0)],
                            Sense::Eq,
                            0.0,
                        );
                    }
                    InputTarget::Temperature { .. } | InputTarget::Pressure => {}
                }
            }
            if !onehots.is_empty() {
                let mut coeffs: Vec<(VarId, f64)> =
                    onehots.into_iter().map(|x| (x, 1.0)).collect();
                coeffs.push((y, -1.0));
                self.model.push_con(
                    format!("onehot_sum[{pid}]"),
                    Family::OneHotSum,
                    coeffs,
                    Sense::Eq,
                    0.0,
                );
            }

            // Fraction outputs grouped by target, yield outputs by port.
            let enc_outputs: Vec<VarId> = self.anns[&p].enc.outputs.clone();
            let mut fraction_groups: BTreeMap<(usize, String), Vec<VarId>> = BTreeMap::new();
            let mut yield_groups: BTreeMap<usize, Vec<VarId>> = BTreeMap::new();
            for binding in &sur.output_bindings {
                let out = enc_outputs[binding.output - 1];
                match &binding.target {
                    OutputTarget::MassFraction { port, component } => fraction_groups
                        .entry((*port, component.clone()))
                        .or_default()
                        .push(out),
                    OutputTarget::PortYield { port } => {
                        yield_groups.entry(*port).or_default().push(out)
                    }
                    _ => {}
                }
            }
            for ((port, component), outs) in fraction_groups {
                let w = self.v(&format!("w[{pid}.out{port},{component}]"));
                let mut coeffs = vec![(w, 1.0)];
                for o in outs {
                    let prod = self.model.product_of(y, o);
                    coeffs.push((prod, -1.0));
                }
                self.model.push_con(
                    format!("out_frac[{pid}.out{port},{component}]"),
                    Family::SurrogateOutput,
                    coeffs,
                    Sense::Eq,
                    0.0,
                );
            }
            for (port, outs) in yield_groups {
                let m = self.v(&format!("m[{pid}.out{port}]"));
                let mut coeffs = vec![(m, 1.0)];
                for o in outs {
                    let prod = self.model.product_of(o, mintot);
                    coeffs.push((prod, -1.0));
                }
                self.model.push_con(
                    format!("out_yield[{pid}.out{port}]"),
                    Family::SurrogateOutput,
                    coeffs,
                    Sense::Eq,
                    0.0,
                );
            }
        }
    }

    /// Sets the objective and runs the final consistency pass.
    pub fn finish(mut self) -> Result<ModelIR, AssembleError> {
        if let Some(total) = self.model.handles.total_cost {
            self.model.objective = vec![(total, 1.0)];
        }
        self.model.check()?;
        Ok(self.model)
    }
}

/// Runs every emission pass in the canonical order.
pub fn assemble_model(
    idx: &IndexedSpec,
    nets: &BTreeMap<String, ReluNetwork>,
    opts: EmitOptions,
) -> Result<ModelIR, AssembleError> {
    let mut b = Builder::new(idx, nets, opts)?;
    b.emit_surrogate_links();
    b.emit_mass_balances();
    b.emit_conversion_and_scale();
    b.emit_energy_balance();
    b.emit_heat_integration();
    b.emit_economics();
    b.emit_co2_accounting();
    b.emit_process_rules();
    b.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core_model::fixtures::{
        chain_spec, electrolysis_unit_spec, single_converter_spec, two_route_spec,
    };
    use crate::core_model::IndexedSpec;

    fn build(spec: &crate::core_model::SuperstructureSpec) -> ModelIR {
        let idx = IndexedSpec::resolve(spec).unwrap();
        assemble_model(&idx, &BTreeMap::new(), EmitOptions::default()).unwrap()
    }

    #[test]
    fn single_converter_counts() {
        let spec = single_converter_spec();
        let m = build(&spec);
        // One inlet port, two admitted components, one process.
        assert_eq!(m.count_family(Family::InletPortTotal), 1);
        assert_eq!(m.count_family(Family::InletPortComponent), 2);
        assert_eq!(m.count_family(Family::MassConservation), 1);
        assert_eq!(m.count_family(Family::OutletPortTotal), 1);
        assert_eq!(m.count_family(Family::OutletPortComponent), 2);
        // Feed is the only source: one zero row for the product component.
        assert_eq!(m.count_family(Family::NonSourceZero), 1);
        assert_eq!(m.count_family(Family::WorkBalance), 1);
        assert_eq!(m.count_family(Family::ActivationGate), 2);
    }

    #[test]
    fn chain_counts_follow_connection() {
        let spec = chain_spec();
        let m = build(&spec);
        // One connection, three components admitted everywhere.
        assert_eq!(m.count_family(Family::ConnectionComposition), 3);
        assert_eq!(m.count_family(Family::FractionSumConnection), 1);
        assert_eq!(m.count_family(Family::MassConservation), 2);
        assert_eq!(m.count_family(Family::FractionSumInletPort), 2);
        assert_eq!(m.count_family(Family::FractionSumOutletPort), 2);
    }

    #[test]
    fn electrolysis_stoichiometry_is_normalized() {
        let spec = electrolysis_unit_spec();
        let m = build(&spec);
        // Water, hydrogen, and oxygen each get a conversion row.
        assert_eq!(m.count_family(Family::Conversion), 3);
        assert_eq!(m.count_family(Family::ScaleDefinition), 1);
        // The water row carries the mass ratio against the scale.
        let water_row = m
            .cons
            .iter()
            .find(|c| c.name.contains("convert") && c.name.contains("h2o"))
            .unwrap();
        let scale_id = m.var_id("scale[Electrolysis]").unwrap();
        let coef = water_row
            .coeffs
            .iter()
            .find(|(v, _)| *v == scale_id)
            .unwrap()
            .1;
        // Mass-basis stoichiometry: nine units of water per unit of
        // hydrogen scale.
        assert!((coef - 9.0).abs() < 1e-12, "coef = {coef}");
    }

    #[test]
    fn two_route_model_is_fully_bounded() {
        let spec = two_route_spec();
        let m = build(&spec);
        m.check().unwrap();
        assert!(m.handles.total_cost.is_some());
        assert!(m.handles.co2_total.is_some());
        assert_eq!(m.count_family(Family::ProductionTarget), 1);
        // All binaries are process selectors here.
        let binaries = m.vars.iter().filter(|v| v.kind == VarKind::Binary).count();
        assert_eq!(binaries, spec.processes.len());
    }
}
