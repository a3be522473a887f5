//! Desk-scale Fischer-Tropsch flowsheet: the component-resolved
//! superstructure with C2..C30 folded into four boiling-range lumps.
//!
//! Methane stays a standalone component because it is purchasable (and
//! sources keep their own prices and emission factors); the remaining
//! alkanes merge into `gas`, `naphtha`, `kero`, and `heavy`. Lump heating
//! values, molar masses, and formulas are chain-growth-weighted means of
//! the members, evaluated at a fixed reference growth probability, so the
//! lumped spec is deterministic and carries physically consistent
//! oxidation factors.

use std::ops::RangeInclusive;

use crate::consts::molar_mass;
use crate::core_model::fixtures::{alkane_id, full_ft_saf_spec};
use crate::core_model::{lump_components, Formula, GroupDef, LumpPlan, SuperstructureSpec};
use crate::oracles::asf_weight_fractions;

/// Chain growth probability at which member properties are averaged.
const REFERENCE_ALPHA: f64 = 0.85;

/// Heating value of the n-alkane as declared by the full flowsheet.
fn alkane_lhv(n: usize) -> f64 {
    11.3 + 2.6 / n as f64
}

/// Lump definition covering one carbon-number range, with properties
/// averaged under the reference chain-growth distribution.
fn boiling_range_group(range: RangeInclusive<usize>) -> GroupDef {
    let w = asf_weight_fractions(REFERENCE_ALPHA);
    let mut mass = 0.0;
    let mut lhv = 0.0;
    let mut moles = 0.0;
    let mut carbon = 0.0;
    let mut hydrogen = 0.0;
    for n in range.clone() {
        let share = w[n - 1];
        let m = molar_mass::alkane(n);
        mass += share;
        lhv += share * alkane_lhv(n);
        moles += share / m;
        carbon += share * n as f64 / m;
        hydrogen += share * (2.0 * n as f64 + 2.0) / m;
    }
    // Mass-weighted LHV; molar mass as total mass over total moles, so the
    // per-kilogram carbon content of the lump is exact.
    let molar = mass / moles;
    GroupDef {
        members: range.map(alkane_id).collect(),
        lhv: lhv / mass,
        molar_mass: Some(molar),
        formula: Some(Formula {
            c: carbon / mass * molar,
            h: hydrogen / mass * molar,
            o: 0.0,
        }),
    }
}

/// The four-lump plan: C2..C4 gas, C5..C7 naphtha, C8..C16 kerosene cut,
/// C17..C30 heavies (including the aggregated tail).
pub fn desk_lump_plan() -> LumpPlan {
    let mut plan = LumpPlan::new();
    plan.groups.insert("gas".to_string(), boiling_range_group(2..=4));
    plan.groups.insert("naphtha".to_string(), boiling_range_group(5..=7));
    plan.groups.insert("kero".to_string(), boiling_range_group(8..=16));
    plan.groups.insert("heavy".to_string(), boiling_range_group(17..=30));
    plan
}

/// The full flowsheet with hydrocarbons lumped for desk-scale solves.
pub fn desk_ft_saf_spec() -> SuperstructureSpec {
    lump_components(&full_ft_saf_spec(), &desk_lump_plan())
        .expect("the desk lump plan matches the full flowsheet fixture")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core_model::{validate_superstructure, ProcessKind, Tag};

    #[test]
    fn desk_spec_merges_29_alkanes_into_4_lumps() {
        let spec = desk_ft_saf_spec();
        assert_eq!(spec.components.len(), 47 - 29 + 4);
        for id in ["gas", "naphtha", "kero", "heavy"] {
            assert!(spec.component(id).is_some(), "missing lump `{id}`");
        }
        // Methane survives as the purchasable C1 feed.
        assert!(spec.component("c1").is_some());
        assert!(spec.component("c2").is_none());
    }

    #[test]
    fn desk_spec_validates_cleanly() {
        let report = validate_superstructure(&desk_ft_saf_spec());
        assert!(report.is_clean(), "{report}");
    }

    #[test]
    fn lumps_carry_member_tags() {
        let spec = desk_ft_saf_spec();
        let kero = spec.component("kero").unwrap();
        assert!(kero.has_tag(Tag::Kerosene) && kero.has_tag(Tag::Hydrocarbon));
        let naphtha = spec.component("naphtha").unwrap();
        assert!(naphtha.has_tag(Tag::Gasoline));
        let heavy = spec.component("heavy").unwrap();
        assert!(heavy.has_tag(Tag::Diesel));
        assert!(!spec.component("gas").unwrap().has_tag(Tag::Kerosene));
    }

    #[test]
    fn lump_properties_sit_between_member_extremes() {
        let plan = desk_lump_plan();
        let kero = &plan.groups["kero"];
        assert!(kero.lhv > alkane_lhv(16) && kero.lhv < alkane_lhv(8));
        let m = kero.molar_mass.unwrap();
        assert!(m > molar_mass::alkane(8) && m < molar_mass::alkane(16));
        let f = kero.formula.as_ref().unwrap();
        assert!(f.c > 8.0 && f.c < 16.0);
        // Alkane composition: H = 2 C + 2 moles per mole.
        assert!((f.h - (2.0 * f.c + 2.0)).abs() < 1e-9);
    }

    #[test]
    fn product_bindings_regroup_by_lump() {
        use crate::core_model::OutputTarget;
        let spec = desk_ft_saf_spec();
        let ProcessKind::Surrogate(sur) = &spec.process("FT").unwrap().kind else {
            panic!("FT is a surrogate");
        };
        let count = |comp: &str| {
            sur.output_bindings
                .iter()
                .filter(|b| {
                    matches!(
                        &b.target,
                        OutputTarget::MassFraction { port: 1, component } if component == comp
                    )
                })
                .count()
        };
        assert_eq!(count("gas"), 3);
        assert_eq!(count("naphtha"), 3);
        assert_eq!(count("kero"), 9);
        assert_eq!(count("heavy"), 14);
        assert_eq!(count("h2o_waste"), 1);
    }
}
