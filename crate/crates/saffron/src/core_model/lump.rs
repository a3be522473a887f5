//! Component lumping: merge sets of components (typically neighboring
//! hydrocarbon chain lengths) into single pseudo-components, rewriting every
//! reference in the spec.
//!
//! Surrogate output bindings that pointed at merged components are
//! re-pointed at the group component; several bindings then share one
//! target, and the model emitter sums them. The lumped model therefore
//! constrains the group fraction to the sum of the network's member
//! outputs, with no retraining required.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::{
    CompSelector, ComponentSpec, Formula, OutputTarget, ProcessKind, SuperstructureSpec, Tag,
};

/// Definition of one lumped pseudo-component.
#[derive(Debug, Clone)]
pub struct GroupDef {
    /// Component ids to merge; at least one, all hydrocarbons or none.
    pub members: Vec<String>,
    /// Lower heating value of the group, kWh/kg. Lumping destroys the
    /// member-resolved distribution, so the group value is supplied rather
    /// than derived.
    pub lhv: f64,
    /// kg/kmol; arithmetic mean of the members when absent.
    pub molar_mass: Option<f64>,
    /// Elemental formula of the group, when a meaningful average exists.
    pub formula: Option<Formula>,
}

/// A set of named groups to merge simultaneously.
#[derive(Debug, Clone, Default)]
pub struct LumpPlan {
    pub groups: BTreeMap<String, GroupDef>,
}

impl LumpPlan {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn group(
        mut self,
        id: &str,
        members: impl IntoIterator<Item = impl Into<String>>,
        lhv: f64,
    ) -> Self {
        self.groups.insert(
            id.to_string(),
            GroupDef {
                members: members.into_iter().map(Into::into).collect(),
                lhv,
                molar_mass: None,
                formula: None,
            },
        );
        self
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum LumpError {
    #[error("group `{group}` references unknown component `{member}`")]
    UnknownMember { group: String, member: String },
    #[error("group `{group}` is empty")]
    EmptyGroup { group: String },
    #[error("component `{member}` appears in more than one group")]
    OverlappingGroups { member: String },
    #[error("group `{group}` mixes hydrocarbons with non-hydrocarbons")]
    MixedHydrocarbonMerge { group: String },
    #[error("group `{group}` would merge source component `{member}`; sources keep their own prices and emission factors")]
    SourceMember { group: String, member: String },
    #[error("group id `{group}` collides with a component that is not one of its members")]
    GroupIdCollision { group: String },
}

/// Applies a [`LumpPlan`] to a spec, producing a new spec in which each
/// group's members are replaced by a single component located at the first
/// member's position. All stoichiometry, admitted-component lists, key
/// components, and surrogate bindings are rewritten.
pub fn lump_components(
    spec: &SuperstructureSpec,
    plan: &LumpPlan,
) -> Result<SuperstructureSpec, LumpError> {
    // Map member id -> group id, with consistency checks.
    let mut member_of: BTreeMap<&str, &str> = BTreeMap::new();
    for (gid, def) in &plan.groups {
        if def.members.is_empty() {
            return Err(LumpError::EmptyGroup { group: gid.clone() });
        }
        if spec.component(gid).is_some() && !def.members.iter().any(|m| m == gid) {
            return Err(LumpError::GroupIdCollision { group: gid.clone() });
        }
        let mut hydro = BTreeSet::new();
        for m in &def.members {
            let comp = spec.component(m).ok_or_else(|| LumpError::UnknownMember {
                group: gid.clone(),
                member: m.clone(),
            })?;
            if comp.has_tag(Tag::Source) {
                return Err(LumpError::SourceMember {
                    group: gid.clone(),
                    member: m.clone(),
                });
            }
            hydro.insert(comp.has_tag(Tag::Hydrocarbon));
            if member_of.insert(m.as_str(), gid.as_str()).is_some() {
                return Err(LumpError::OverlappingGroups { member: m.clone() });
            }
        }
        if hydro.len() > 1 {
            return Err(LumpError::MixedHydrocarbonMerge { group: gid.clone() });
        }
    }

    let rename = |id: &str| -> String {
        member_of
            .get(id)
            .map(|g| g.to_string())
            .unwrap_or_else(|| id.to_string())
    };

    // Rebuild the component list: each group appears once, at the position
    // of its first-encountered member, with the union of member tags.
    let mut components: Vec<ComponentSpec> = Vec::new();
    let mut emitted_groups: BTreeSet<&str> = BTreeSet::new();
    for c in &spec.components {
        match member_of.get(c.id.as_str()) {
            None => components.push(c.clone()),
            Some(&gid) => {
                if emitted_groups.insert(gid) {
                    let def = &plan.groups[gid];
                    let members: Vec<&ComponentSpec> = def
                        .members
                        .iter()
                        .map(|m| spec.component(m).expect("members checked above"))
                        .collect();
                    let mut tags: Vec<Tag> = Vec::new();
                    for m in &members {
                        for t in &m.tags {
                            if !tags.contains(t) {
                                tags.push(*t);
                            }
                        }
                    }
                    tags.sort();
                    let molar_mass = def.molar_mass.unwrap_or_else(|| {
                        members.iter().map(|m| m.molar_mass).sum::<f64>() / members.len() as f64
                    });
                    components.push(ComponentSpec {
                        id: gid.to_string(),
                        molar_mass,
                        lhv: def.lhv,
                        tags,
                        source: None,
                        formula: def.formula.clone(),
                    });
                }
            }
        }
    }

    // Rewrite processes.
    let mut processes = spec.processes.clone();
    for p in &mut processes {
        for ports in [&mut p.inlet_ports, &mut p.outlet_ports] {
            for port in ports {
                if let Some(list) = &mut port.allowed {
                    let mut seen = BTreeSet::new();
                    let mut next = Vec::new();
                    for id in list.iter() {
                        let new = rename(id);
                        if seen.insert(new.clone()) {
                            next.push(new);
                        }
                    }
                    *list = next;
                }
            }
        }
        match &mut p.kind {
            ProcessKind::Linear(lin) => {
                let mut stoich: BTreeMap<String, f64> = BTreeMap::new();
                for (id, nu) in &lin.stoich {
                    *stoich.entry(rename(id)).or_insert(0.0) += nu;
                }
                lin.stoich = stoich;
                lin.key_component = rename(&lin.key_component);
            }
            ProcessKind::Surrogate(sur) => {
                for b in &mut sur.input_bindings {
                    match &mut b.target {
                        super::InputTarget::MassFraction { component, .. }
                        | super::InputTarget::OneHot { component } => {
                            *component = rename(component);
                        }
                        _ => {}
                    }
                }
                for b in &mut sur.output_bindings {
                    if let OutputTarget::MassFraction { component, .. } = &mut b.target {
                        *component = rename(component);
                    }
                }
            }
        }
    }

    // Rewrite rules that name components; tag selectors survive as-is
    // because groups inherit the tags of their members.
    let mut rules = spec.rules.clone();
    for rule in &mut rules.dominance {
        for side in [&mut rule.lesser, &mut rule.greater] {
            let mut seen = BTreeSet::new();
            let mut next = Vec::new();
            for sel in side.iter() {
                let new = match sel {
                    CompSelector::Id(id) => CompSelector::Id(rename(id)),
                    tagged => tagged.clone(),
                };
                let key = format!("{new:?}");
                if seen.insert(key) {
                    next.push(new);
                }
            }
            *side = next;
        }
    }
    if let Some(purge) = &mut rules.purge {
        purge.component = rename(&purge.component);
    }

    Ok(SuperstructureSpec {
        components,
        processes,
        connections: spec.connections.clone(),
        globals: spec.globals.clone(),
        rules,
    })
}
