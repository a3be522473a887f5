//! Linear relaxation of the registered products over a variable box.
//!
//! Every product z = a b contributes the four envelope rows
//!
//! ```text
//! z >= aL b + bL a - aL bL        z >= aU b + bU a - aU bU
//! z <= aU b + bL a - aU bL        z <= aL b + bU a - aL bU
//! ```
//!
//! which over the box [aL,aU] x [bL,bU] contain every true product point.
//! When a factor is binary (or fixed by branching, so aL = aU) the same four
//! rows become an exact linearization, so one construction serves both
//! product classes. Rows are regenerated from the node box at every node;
//! their count and order never change, which keeps a parent's simplex basis
//! shape-compatible with its children.

use crate::algebra::{ModelIR, Sense};

use super::bounds::BoundBox;

/// One owned relaxation row.
#[derive(Debug, Clone)]
pub struct OwnedRow {
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// The product rows appended after the model's own constraints.
#[derive(Debug, Clone)]
pub struct RelaxedLp {
    pub rows: Vec<OwnedRow>,
    /// Index of the first of the four rows per registered product.
    pub first_row: Vec<usize>,
}

/// Builds the envelope rows for every registered product over `bx`.
pub fn relax_bilinear(model: &ModelIR, bx: &BoundBox) -> RelaxedLp {
    let mut rows = Vec::with_capacity(model.bilinears.len() * 4);
    let mut first_row = Vec::with_capacity(model.bilinears.len());
    for bl in &model.bilinears {
        let (al, au) = bx[bl.a];
        let (bl_, bu) = bx[bl.b];
        first_row.push(rows.len());
        if bl.a == bl.b {
            // Square term z = a^2: secant above, tangents at both ends
            // below, plus the apex tangent when the box crosses zero.
            let z = bl.product;
            let a = bl.a;
            rows.push(OwnedRow {
                coeffs: vec![(z, 1.0), (a, -(al + au))],
                sense: Sense::Le,
                rhs: -al * au,
            });
            rows.push(OwnedRow {
                coeffs: vec![(z, 1.0), (a, -2.0 * al)],
                sense: Sense::Ge,
                rhs: -al * al,
            });
            rows.push(OwnedRow {
                coeffs: vec![(z, 1.0), (a, -2.0 * au)],
                sense: Sense::Ge,
                rhs: -au * au,
            });
            rows.push(OwnedRow {
                coeffs: vec![(z, 1.0)],
                sense: Sense::Ge,
                rhs: if al <= 0.0 && au >= 0.0 {
                    0.0
                } else {
                    (al * al).min(au * au)
                },
            });
            continue;
        }
        let z = bl.product;
        let (a, b) = (bl.a, bl.b);
        rows.push(OwnedRow {
            coeffs: vec![(z, 1.0), (b, -al), (a, -bl_)],
            sense: Sense::Ge,
            rhs: -al * bl_,
        });
        rows.push(OwnedRow {
            coeffs: vec![(z, 1.0), (b, -au), (a, -bu)],
            sense: Sense::Ge,
            rhs: -au * bu,
        });
        rows.push(OwnedRow {
            coeffs: vec![(z, 1.0), (b, -au), (a, -bl_)],
            sense: Sense::Le,
            rhs: -au * bl_,
        });
        rows.push(OwnedRow {
            coeffs: vec![(z, 1.0), (b, -al), (a, -bu)],
            sense: Sense::Le,
            rhs: -al * bu,
        });
    }
    RelaxedLp { rows, first_row }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{ModelIR, VarKind};

    fn envelope_z_range(rows: &[OwnedRow], z: usize, a_val: f64, b_val: f64, a: usize, b: usize) -> (f64, f64) {
        // Evaluate each row at fixed factor values; intersect the z ranges.
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for row in rows {
            let mut zc = 0.0;
            let mut rest = 0.0;
            for &(j, c) in &row.coeffs {
                if j == z {
                    zc += c;
                } else if j == a {
                    rest += c * a_val;
                } else if j == b {
                    rest += c * b_val;
                }
            }
            let bound = (row.rhs - rest) / zc;
            match row.sense {
                Sense::Ge => lo = lo.max(bound),
                Sense::Le => hi = hi.min(bound),
                Sense::Eq => {
                    lo = lo.max(bound);
                    hi = hi.min(bound);
                }
            }
        }
        (lo, hi)
    }

    #[test]
    fn envelope_contains_the_true_product() {
        let mut m = ModelIR::default();
        let a = m.push_var(VarKind::Continuous, 0.0, 1.0, "a".into());
        let b = m.push_var(VarKind::Continuous, 0.0, 1.0, "b".into());
        let z = m.product_of(a, b);
        let bx: BoundBox = m.vars.iter().map(|v| (v.lo, v.hi)).collect();
        let r = relax_bilinear(&m, &bx);
        assert_eq!(r.rows.len(), 4);
        let (lo, hi) = envelope_z_range(&r.rows, z, 0.5, 0.5, a, b);
        assert!((lo - 0.0).abs() < 1e-12 && (hi - 0.5).abs() < 1e-12);
        assert!(lo <= 0.25 && 0.25 <= hi);
    }

    #[test]
    fn binary_factor_collapses_to_exactness() {
        let mut m = ModelIR::default();
        let y = m.push_var(VarKind::Binary, 0.0, 1.0, "y".into());
        let f = m.push_var(VarKind::Continuous, 0.0, 2.0, "f".into());
        let z = m.product_of(y, f);
        let bx: BoundBox = m.vars.iter().map(|v| (v.lo, v.hi)).collect();
        let r = relax_bilinear(&m, &bx);
        // Selector off: z pinned to zero regardless of f.
        let (lo, hi) = envelope_z_range(&r.rows, z, 0.0, 1.37, y, f);
        assert!(lo.abs() < 1e-12 && hi.abs() < 1e-12);
        // Selector on: z pinned to f.
        let (lo, hi) = envelope_z_range(&r.rows, z, 1.0, 1.37, y, f);
        assert!((lo - 1.37).abs() < 1e-12 && (hi - 1.37).abs() < 1e-12);
    }

    #[test]
    fn shrinking_a_factor_box_tightens_monotonically() {
        let mut m = ModelIR::default();
        let a = m.push_var(VarKind::Continuous, 0.0, 1.0, "a".into());
        let b = m.push_var(VarKind::Continuous, 0.0, 1.0, "b".into());
        let z = m.product_of(a, b);
        let wide: BoundBox = m.vars.iter().map(|v| (v.lo, v.hi)).collect();
        let mut narrow = wide.clone();
        narrow[a] = (0.4, 0.6);
        let rw = relax_bilinear(&m, &wide);
        let rn = relax_bilinear(&m, &narrow);
        let (wl, wh) = envelope_z_range(&rw.rows, z, 0.5, 0.5, a, b);
        let (nl, nh) = envelope_z_range(&rn.rows, z, 0.5, 0.5, a, b);
        assert!(nl >= wl - 1e-12 && nh <= wh + 1e-12);
        assert!(nh - nl < wh - wl, "narrow {:?} wide {:?}", (nl, nh), (wl, wh));
        assert!(nl <= 0.25 && 0.25 <= nh);
    }

    #[test]
    fn square_terms_use_secant_and_tangents() {
        let mut m = ModelIR::default();
        let a = m.push_var(VarKind::Continuous, -1.0, 2.0, "a".into());
        let z = m.product_of(a, a);
        let bx: BoundBox = m.vars.iter().map(|v| (v.lo, v.hi)).collect();
        let r = relax_bilinear(&m, &bx);
        for &av in &[-1.0, -0.3, 0.0, 0.7, 1.5, 2.0] {
            let (lo, hi) = envelope_z_range(&r.rows, z, av, av, a, a);
            let truth = av * av;
            assert!(
                lo <= truth + 1e-12 && truth <= hi + 1e-12,
                "a = {av}: [{lo}, {hi}] vs {truth}"
            );
        }
    }
}
