//! Independent feasibility check of a candidate point.
//!
//! Walks the original model, never the relaxation: every linear row, every
//! registered product equality z = a b, every variable box, and integrality
//! of the binaries. Violations are scaled by the row's coefficient norm so
//! the pass threshold means the same thing for small and large rows.

use crate::algebra::{ModelIR, Sense, VarKind};

/// Scaled violation accepted as feasible.
pub const VERIFY_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct VerifierReport {
    pub pass: bool,
    pub max_row_violation: f64,
    pub worst_row: String,
    pub max_product_violation: f64,
    pub worst_product: String,
    pub max_bound_violation: f64,
    pub worst_bound: String,
    pub max_integrality_violation: f64,
}

/// Checks `x` against every constraint of `model` at tolerance
/// [`VERIFY_TOL`].
pub fn verify_solution(model: &ModelIR, x: &[f64]) -> VerifierReport {
    let mut report = VerifierReport {
        pass: true,
        max_row_violation: 0.0,
        worst_row: String::new(),
        max_product_violation: 0.0,
        worst_product: String::new(),
        max_bound_violation: 0.0,
        worst_bound: String::new(),
        max_integrality_violation: 0.0,
    };

    for con in &model.cons {
        let lhs: f64 = con.coeffs.iter().map(|&(j, c)| c * x[j]).sum();
        let raw = match con.sense {
            Sense::Le => (lhs - con.rhs).max(0.0),
            Sense::Ge => (con.rhs - lhs).max(0.0),
            Sense::Eq => (lhs - con.rhs).abs(),
        };
        let norm: f64 = con
            .coeffs
            .iter()
            .map(|&(_, c)| c * c)
            .sum::<f64>()
            .sqrt();
        let scaled = raw / (1.0 + norm + con.rhs.abs());
        if scaled > report.max_row_violation {
            report.max_row_violation = scaled;
            report.worst_row = con.name.clone();
        }
    }

    for bl in &model.bilinears {
        let z = x[bl.product];
        let truth = x[bl.a] * x[bl.b];
        let scale = 1.0 + x[bl.a].abs() + x[bl.b].abs() + z.abs();
        let scaled = (z - truth).abs() / scale;
        if scaled > report.max_product_violation {
            report.max_product_violation = scaled;
            report.worst_product = model.label(bl.product).to_string();
        }
    }

    for (j, v) in model.vars.iter().enumerate() {
        let below = (v.lo - x[j]).max(0.0);
        let above = (x[j] - v.hi).max(0.0);
        let scaled = below.max(above) / (1.0 + v.lo.abs().max(v.hi.abs()));
        if scaled > report.max_bound_violation {
            report.max_bound_violation = scaled;
            report.worst_bound = v.label.clone();
        }
        if v.kind == VarKind::Binary {
            let frac = (x[j] - x[j].round()).abs();
            report.max_integrality_violation = report.max_integrality_violation.max(frac);
        }
    }

    report.pass = report.max_row_violation <= VERIFY_TOL
        && report.max_product_violation <= VERIFY_TOL
        && report.max_bound_violation <= VERIFY_TOL
        && report.max_integrality_violation <= VERIFY_TOL;
    report
}
