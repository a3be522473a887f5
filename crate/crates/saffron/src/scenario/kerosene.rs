//! Fuel-product allocation of plant-level totals.
//!
//! The optimizer minimizes plant cost and accounts plant CO2; downstream
//! comparisons need the share attributable to the kerosene cut of the fuel
//! product. The allocation key is the heating-value share of kerosene in
//! the hydrocarbon slate at the production-target port. On top of the
//! allocated plant total, the kerosene product inherits its own combustion
//! CO2 and the kerosene share of the oxidized recycle purge, which the
//! plant balance deliberately leaves out.

use serde::Serialize;

use crate::algebra::{oxidation_factor, ModelIR};
use crate::core_model::{SuperstructureSpec, Tag};

/// Below this hydrocarbon heating-value density the allocation ratio is
/// undefined and reported as absent.
const RATIO_FLOOR: f64 = 1e-12;
/// Below this annual kerosene mass (kg/yr) the specific metrics are
/// undefined and reported as absent.
const MASS_FLOOR: f64 = 1e-9;

/// Kerosene-allocated cost and emission metrics of one solution. Absent
/// fields mark divisions whose denominator vanished, not failures.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KeroseneReport {
    /// Heating-value density of the kerosene cut at the target port,
    /// kWh per kg of port flow.
    pub delta_kerosene: f64,
    /// Heating-value density of all hydrocarbons at the target port.
    pub delta_hc: f64,
    /// Allocation key `delta_kerosene / delta_hc`; absent when the port
    /// carries no hydrocarbon heating value.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub allocation_ratio: Option<f64>,
    /// kg CO2 from fully burning one kg of port flow's kerosene cut.
    pub lambda_kerosene: f64,
    /// Discharged kerosene product, kg per year.
    pub kerosene_mass: f64,
    /// Plant totals for reference, kg CO2 per year and $ per year.
    pub co2_total: f64,
    pub cost_total: f64,
    /// Kerosene-allocated annual CO2 including its own combustion and the
    /// kerosene share of the oxidized purge.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub co2_kerosene: Option<f64>,
    /// Kerosene-allocated annual cost.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cost_kerosene: Option<f64>,
    /// $ per kg of kerosene.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub specific_cost: Option<f64>,
    /// kg CO2 per kg of kerosene.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub specific_emissions: Option<f64>,
}

/// Computes the kerosene allocation for one solution point `x` of `model`.
/// Returns `None` when the spec has no production target or `x` carries no
/// incumbent.
pub fn post_kerosene_metrics(
    model: &ModelIR,
    x: &[f64],
    spec: &SuperstructureSpec,
) -> Option<KeroseneReport> {
    let target = spec.rules.production_targets.first()?;
    if x.len() != model.n_vars() {
        return None;
    }
    let tau = spec.globals.operating_hours;
    let value = |label: &str| model.var_id(label).map(|id| x[id]);
    let port = target.port.to_string();

    let mut delta_kerosene = 0.0;
    let mut delta_hc = 0.0;
    let mut lambda_kerosene = 0.0;
    // Kerosene share of the port's discharge, by mass.
    let mut wsink_kerosene = 0.0;
    for c in &spec.components {
        let Some(w) = value(&format!("w[{port},{}]", c.id)) else {
            continue;
        };
        if c.has_tag(Tag::Hydrocarbon) {
            delta_hc += w * c.lhv;
        }
        if c.has_tag(Tag::Kerosene) {
            delta_kerosene += w * c.lhv;
            lambda_kerosene += w * oxidation_factor(c);
            if let Some(ws) = value(&format!("wsink[{port},{}]", c.id)) {
                wsink_kerosene += ws;
            }
        }
    }
    let m_out = value(&format!("m[{port}]")).unwrap_or(0.0);
    let co2_total = x[model.handles.co2_total?];
    let cost_total = x[model.handles.total_cost?];

    // Hourly CO2 from oxidizing the purged component, kg/h; zero without a
    // purge rule.
    let purge_co2 = spec
        .rules
        .purge
        .as_ref()
        .and_then(|p| {
            let comp = spec.component(&p.component)?;
            let ws = value(&format!("wsink[{},{}]", p.port, p.component))?;
            let ms = value(&format!("msink[{}]", p.port))?;
            Some(oxidation_factor(comp) * ws * ms)
        })
        .unwrap_or(0.0);

    let allocation_ratio = if delta_hc > RATIO_FLOOR {
        Some(delta_kerosene / delta_hc)
    } else {
        None
    };
    let kerosene_mass = tau * wsink_kerosene * m_out;
    let co2_kerosene = allocation_ratio
        .map(|r| r * co2_total + tau * lambda_kerosene * m_out + tau * wsink_kerosene * purge_co2);
    let cost_kerosene = allocation_ratio.map(|r| r * cost_total);
    let specific = |total: Option<f64>| {
        total.and_then(|t| (kerosene_mass > MASS_FLOOR).then(|| t / kerosene_mass))
    };
    Some(KeroseneReport {
        delta_kerosene,
        delta_hc,
        allocation_ratio,
        lambda_kerosene,
        kerosene_mass,
        co2_total,
        cost_total,
        specific_cost: specific(cost_kerosene),
        specific_emissions: specific(co2_kerosene),
        co2_kerosene,
        cost_kerosene,
    })
}

/// Cost of avoided CO2: the specific-cost premium of the green fuel over
/// its fossil reference, divided by the CO2 avoided per kg of fuel. Units
/// follow the inputs ($/kg over kg/kg gives $ per kg CO2). Absent when
/// nothing is avoided.
pub fn abatement_cost(
    specific_cost_green: f64,
    specific_cost_ref: f64,
    avoided_per_kg: f64,
) -> Option<f64> {
    (avoided_per_kg > 0.0).then(|| (specific_cost_green - specific_cost_ref) / avoided_per_kg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core_model::fixtures::two_route_spec;
    use crate::core_model::{Formula, IndexedSpec};
    use crate::solver::{solve_miqcp, SolveOptions, SolveStatus};
    use std::collections::BTreeMap;

    fn solve(spec: &SuperstructureSpec) -> (ModelIR, Vec<f64>) {
        let idx = IndexedSpec::resolve(spec).unwrap();
        let model =
            crate::algebra::assemble_model(&idx, &BTreeMap::new(), Default::default()).unwrap();
        let sol = solve_miqcp(&model, &SolveOptions::default(), None);
        assert_eq!(sol.status, SolveStatus::Optimal);
        (model, sol.x)
    }

    #[test]
    fn pure_kerosene_product_takes_the_whole_allocation() {
        let mut spec = two_route_spec();
        let prod = spec
            .components
            .iter_mut()
            .find(|c| c.id == "prod")
            .unwrap();
        prod.tags.extend([Tag::Kerosene, Tag::Hydrocarbon]);
        prod.formula = Some(Formula { c: 2.0, h: 4.0, o: 0.0 });
        let lambda = oxidation_factor(prod);
        let (model, x) = solve(&spec);
        let r = post_kerosene_metrics(&model, &x, &spec).unwrap();

        assert!((r.allocation_ratio.unwrap() - 1.0).abs() < 1e-9);
        assert!((r.cost_kerosene.unwrap() - r.cost_total).abs() < 1e-6 * r.cost_total.abs());
        let tau = spec.globals.operating_hours;
        assert!((r.kerosene_mass - tau * 100.0).abs() < 1e-3);
        // The product's own combustion is charged on top of the plant total.
        let extra = r.co2_kerosene.unwrap() - r.co2_total;
        assert!((extra - tau * lambda * 100.0).abs() < 1e-3);
        let k = r.specific_cost.unwrap();
        assert!((k * r.kerosene_mass - r.cost_total).abs() < 1e-6 * r.cost_total.abs());
    }

    #[test]
    fn hydrocarbon_free_products_leave_the_ratio_absent() {
        let spec = two_route_spec();
        let (model, x) = solve(&spec);
        let r = post_kerosene_metrics(&model, &x, &spec).unwrap();
        assert_eq!(r.allocation_ratio, None);
        assert_eq!(r.co2_kerosene, None);
        assert_eq!(r.specific_cost, None);
        assert_eq!(r.delta_hc, 0.0);
    }

    #[test]
    fn specs_without_targets_yield_nothing() {
        let mut spec = two_route_spec();
        spec.rules.production_targets.clear();
        let idx = IndexedSpec::resolve(&spec).unwrap();
        let model =
            crate::algebra::assemble_model(&idx, &BTreeMap::new(), Default::default()).unwrap();
        assert!(post_kerosene_metrics(&model, &[], &spec).is_none());
    }

    #[test]
    fn abatement_cost_matches_hand_calculation() {
        // 4.04 vs 0.79 $/kg fuel at 6.69 kg CO2 avoided per kg fuel:
        // 485.8 $ per tonne of avoided CO2.
        let per_kg = abatement_cost(4.04, 0.79, 6.69).unwrap();
        assert!((per_kg * 1000.0 - 485.80).abs() < 0.05);
        assert_eq!(abatement_cost(4.04, 0.79, 0.0), None);
        assert_eq!(abatement_cost(4.04, 0.79, -1.0), None);
        assert_eq!(abatement_cost(0.79, 0.79, 1.0), Some(0.0));
    }
}
