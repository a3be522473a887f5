//! Index resolution: string identifiers to dense indices, connection
//! adjacency, and the fixpoint computation of which components can actually
//! appear at each port.

use std::collections::{BTreeMap, BTreeSet};

use super::{
    OutputTarget, PortDirection, PortSel, ProcessKind, SuperstructureSpec, Tag, ValidationReport,
};

/// A connection with both endpoints resolved to (process index, port index).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResolvedConnection {
    pub id: usize,
    pub from_proc: usize,
    /// 1-based outlet port index.
    pub from_port: usize,
    pub to_proc: usize,
    /// 1-based inlet port index.
    pub to_port: usize,
}

/// Per-port sets of component indices that can be present with nonzero
/// fraction in some feasible solution, derived by propagating admissibility
/// through sources, stoichiometry, surrogate bindings, and connections.
#[derive(Debug, Clone, Default)]
pub struct ActiveSets {
    /// `[process][inlet port index - 1]` -> component indices.
    pub inlet: Vec<Vec<BTreeSet<usize>>>,
    /// `[process][outlet port index - 1]` -> component indices.
    pub outlet: Vec<Vec<BTreeSet<usize>>>,
    /// Components that can cross the process boundary of each process
    /// (union of its port sets plus produced or consumed species).
    pub process: Vec<BTreeSet<usize>>,
}

/// A [`SuperstructureSpec`] with every string reference resolved to a dense
/// index, plus derived adjacency and reachability information. Construction
/// fails with the same report that [`super::validate_superstructure`] would
/// produce, so downstream stages can assume a well-formed structure.
#[derive(Debug)]
pub struct IndexedSpec<'a> {
    pub spec: &'a SuperstructureSpec,
    pub comp_index: BTreeMap<String, usize>,
    pub proc_index: BTreeMap<String, usize>,
    pub connections: Vec<ResolvedConnection>,
    /// `[process][inlet port - 1]` -> connection ids arriving there.
    pub conns_in: Vec<Vec<Vec<usize>>>,
    /// `[process][outlet port - 1]` -> connection ids leaving there.
    pub conns_out: Vec<Vec<Vec<usize>>>,
    /// Component indices tagged as sources.
    pub sources: Vec<usize>,
    pub active: ActiveSets,
}

impl<'a> IndexedSpec<'a> {
    /// Resolves a spec, returning the validation report on failure.
    pub fn resolve(spec: &'a SuperstructureSpec) -> Result<Self, ValidationReport> {
        let report = super::validate_superstructure(spec);
        if !report.is_clean() {
            return Err(report);
        }

        let comp_index: BTreeMap<String, usize> = spec
            .components
            .iter()
            .enumerate()
            .map(|(i, c)| (c.id.clone(), i))
            .collect();
        let proc_index: BTreeMap<String, usize> = spec
            .processes
            .iter()
            .enumerate()
            .map(|(i, p)| (p.id.clone(), i))
            .collect();

        let mut connections = Vec::new();
        let mut conns_in: Vec<Vec<Vec<usize>>> = spec
            .processes
            .iter()
            .map(|p| vec![Vec::new(); p.inlet_ports.len()])
            .collect();
        let mut conns_out: Vec<Vec<Vec<usize>>> = spec
            .processes
            .iter()
            .map(|p| vec![Vec::new(); p.outlet_ports.len()])
            .collect();
        for (id, conn) in spec.connections.iter().enumerate() {
            let from_proc = proc_index[&conn.from.process];
            let to_proc = proc_index[&conn.to.process];
            let rc = ResolvedConnection {
                id,
                from_proc,
                from_port: conn.from.sel.index,
                to_proc,
                to_port: conn.to.sel.index,
            };
            conns_out[from_proc][rc.from_port - 1].push(id);
            conns_in[to_proc][rc.to_port - 1].push(id);
            connections.push(rc);
        }

        let sources: Vec<usize> = spec
            .components
            .iter()
            .enumerate()
            .filter(|(_, c)| c.has_tag(Tag::Source))
            .map(|(i, _)| i)
            .collect();

        let mut indexed = IndexedSpec {
            spec,
            comp_index,
            proc_index,
            connections,
            conns_in,
            conns_out,
            sources,
            active: ActiveSets::default(),
        };
        indexed.active = indexed.compute_active_sets();
        Ok(indexed)
    }

    pub fn n_components(&self) -> usize {
        self.spec.components.len()
    }

    pub fn n_processes(&self) -> usize {
        self.spec.processes.len()
    }

    /// Component indices admitted by a port's `allowed` list (all components
    /// when the list is absent).
    pub fn allowed_set(&self, proc: usize, sel: PortSel) -> BTreeSet<usize> {
        let port = self.spec.processes[proc]
            .port(sel)
            .expect("resolved specs have consistent port references");
        match &port.allowed {
            None => (0..self.n_components()).collect(),
            Some(list) => list.iter().map(|id| self.comp_index[id]).collect(),
        }
    }

    /// Components a process can create from nothing at its outlets:
    /// positive stoichiometric coefficients for linear processes, all
    /// fraction-bound components for surrogate processes.
    fn produced_set(&self, proc: usize) -> BTreeSet<usize> {
        match &self.spec.processes[proc].kind {
            ProcessKind::Linear(lin) => lin
                .stoich
                .iter()
                .filter(|(_, &nu)| nu > 0.0)
                .map(|(id, _)| self.comp_index[id])
                .collect(),
            ProcessKind::Surrogate(sur) => sur
                .output_bindings
                .iter()
                .filter_map(|b| match &b.target {
                    OutputTarget::MassFraction { component, .. } => {
                        Some(self.comp_index[component])
                    }
                    _ => None,
                })
                .collect(),
        }
    }

    /// Components consumed by a linear process (negative coefficients).
    fn consumed_set(&self, proc: usize) -> BTreeSet<usize> {
        match &self.spec.processes[proc].kind {
            ProcessKind::Linear(lin) => lin
                .stoich
                .iter()
                .filter(|(_, &nu)| nu < 0.0)
                .map(|(id, _)| self.comp_index[id])
                .collect(),
            ProcessKind::Surrogate(_) => BTreeSet::new(),
        }
    }

    /// Kleene iteration: grow inlet sets from sources and upstream outlet
    /// sets, and outlet sets from inlet material plus produced components,
    /// until nothing changes. Surrogate outlet compositions are fixed by
    /// their bindings and do not pass inlet material through.
    fn compute_active_sets(&self) -> ActiveSets {
        let np = self.n_processes();
        let mut inlet: Vec<Vec<BTreeSet<usize>>> = (0..np)
            .map(|p| vec![BTreeSet::new(); self.spec.processes[p].inlet_ports.len()])
            .collect();
        let mut outlet: Vec<Vec<BTreeSet<usize>>> = Vec::with_capacity(np);

        // Surrogate outlets are static: their composition is dictated by the
        // network, so the admitted set is the active set (bound components
        // plus the unbound ones that close the fraction sum).
        for (p, proc) in self.spec.processes.iter().enumerate() {
            let mut ports = vec![BTreeSet::new(); proc.outlet_ports.len()];
            if proc.is_surrogate() {
                for (k, port) in proc.outlet_ports.iter().enumerate() {
                    let sel = PortSel {
                        direction: PortDirection::Outlet,
                        index: port.index,
                    };
                    ports[k] = self.allowed_set(p, sel);
                }
            }
            outlet.push(ports);
        }

        loop {
            let mut changed = false;
            for (p, proc) in self.spec.processes.iter().enumerate() {
                // Inlets: sources plus upstream outlets, filtered by `allowed`.
                for (k, port) in proc.inlet_ports.iter().enumerate() {
                    let sel = PortSel {
                        direction: PortDirection::Inlet,
                        index: port.index,
                    };
                    let allowed = self.allowed_set(p, sel);
                    let mut next: BTreeSet<usize> = self
                        .sources
                        .iter()
                        .copied()
                        .filter(|c| allowed.contains(c))
                        .collect();
                    for &cid in &self.conns_in[p][k] {
                        let conn = self.connections[cid];
                        for &c in &outlet[conn.from_proc][conn.from_port - 1] {
                            if allowed.contains(&c) {
                                next.insert(c);
                            }
                        }
                    }
                    if next != inlet[p][k] {
                        inlet[p][k] = next;
                        changed = true;
                    }
                }
                // Linear outlets: anything entering plus produced species,
                // minus nothing (consumed species may still leave partially).
                if let ProcessKind::Linear(_) = &proc.kind {
                    let mut through: BTreeSet<usize> = BTreeSet::new();
                    for set in &inlet[p] {
                        through.extend(set.iter().copied());
                    }
                    through.extend(self.produced_set(p));
                    for (k, port) in proc.outlet_ports.iter().enumerate() {
                        let sel = PortSel {
                            direction: PortDirection::Outlet,
                            index: port.index,
                        };
                        let allowed = self.allowed_set(p, sel);
                        let next: BTreeSet<usize> =
                            through.intersection(&allowed).copied().collect();
                        if next != outlet[p][k] {
                            outlet[p][k] = next;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }

        let mut process = Vec::with_capacity(np);
        for p in 0..np {
            let mut set: BTreeSet<usize> = BTreeSet::new();
            for s in &inlet[p] {
                set.extend(s.iter().copied());
            }
            for s in &outlet[p] {
                set.extend(s.iter().copied());
            }
            set.extend(self.produced_set(p));
            set.extend(self.consumed_set(p));
            process.push(set);
        }

        ActiveSets {
            inlet,
            outlet,
            process,
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::core_model::fixtures::single_converter_spec;

    use super::*;

    #[test]
    fn active_sets_follow_connections() {
        let spec = single_converter_spec();
        let idx = IndexedSpec::resolve(&spec).unwrap();
        let a = idx.comp_index["feed"];
        let b = idx.comp_index["prod"];
        // Inlet admits only the source-tagged feed.
        assert_eq!(idx.active.inlet[0][0], BTreeSet::from([a]));
        // Outlet carries pass-through feed and the produced component.
        assert_eq!(idx.active.outlet[0][0], BTreeSet::from([a, b]));
    }
}
