//! Interval bound tightening over the linear rows and registered products.
//!
//! Each pass walks every constraint, computes the attainable activity range
//! of all terms but one, and shrinks that variable's box where the row
//! forces it. Binary variables round: a lower bound pushed above zero pins
//! the binary to one, an upper bound below one pins it to zero. Product
//! registrations propagate both ways, from factor boxes to the product and
//! back through interval division when the divisor excludes zero.
//!
//! Tightening is conservative interval arithmetic, so no feasible point of
//! the model restricted to the incoming box is ever cut off.

use crate::algebra::{product_bounds, ModelIR, Sense, VarKind};

/// Minimum absolute improvement worth recording; guards against endless
/// fixpoint loops fed by rounding noise.
const MIN_GAIN: f64 = 1e-9;
/// Bounds within this distance collapse a binary to a fixed value.
const INT_TOL: f64 = 1e-6;
/// Boxes may invert by at most this much before the node is infeasible.
const EMPTY_TOL: f64 = 1e-7;

/// Mutable per-node variable box.
pub type BoundBox = Vec<(f64, f64)>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropagationOutcome {
    /// Fixpoint (or pass limit) reached with a nonempty box.
    Tightened,
    /// Some variable's box emptied: the node region is infeasible.
    Empty,
}

fn tighten(
    bx: &mut BoundBox,
    kind: VarKind,
    j: usize,
    lo: Option<f64>,
    hi: Option<f64>,
    changed: &mut bool,
) -> bool {
    let (mut l, mut h) = bx[j];
    if let Some(v) = lo {
        if v > l + MIN_GAIN {
            l = v;
            *changed = true;
        }
    }
    if let Some(v) = hi {
        if v < h - MIN_GAIN {
            h = v;
            *changed = true;
        }
    }
    if kind == VarKind::Binary {
        if l > INT_TOL && l < 1.0 {
            l = 1.0;
            *changed = true;
        }
        if h < 1.0 - INT_TOL && h > 0.0 {
            h = 0.0;
            *changed = true;
        }
    }
    if l > h + EMPTY_TOL {
        return false;
    }
    // Keep the stored box ordered even after a benign crossing.
    bx[j] = (l.min(h), h.max(l));
    true
}

/// Runs up to `max_passes` sweeps; returns `Empty` as soon as any box
/// inverts beyond tolerance.
pub fn propagate_bounds(
    model: &ModelIR,
    bx: &mut BoundBox,
    max_passes: usize,
) -> PropagationOutcome {
    debug_assert_eq!(bx.len(), model.vars.len());
    for _ in 0..max_passes {
        let mut changed = false;
        for con in &model.cons {
            // Activity range of the full row.
            let mut act_lo = 0.0;
            let mut act_hi = 0.0;
            let mut unbounded = false;
            for &(j, c) in &con.coeffs {
                let (l, h) = bx[j];
                let (a, b) = if c >= 0.0 { (c * l, c * h) } else { (c * h, c * l) };
                if !a.is_finite() || !b.is_finite() {
                    unbounded = true;
                    break;
                }
                act_lo += a;
                act_hi += b;
            }
            if unbounded {
                continue;
            }
            for &(j, c) in &con.coeffs {
                let (l, h) = bx[j];
                let (term_lo, term_hi) = if c >= 0.0 { (c * l, c * h) } else { (c * h, c * l) };
                let rest_lo = act_lo - term_lo;
                let rest_hi = act_hi - term_hi;
                // The row caps this single term's range.
                let cap_hi = match con.sense {
                    Sense::Le | Sense::Eq => Some(con.rhs - rest_lo),
                    Sense::Ge => None,
                };
                let cap_lo = match con.sense {
                    Sense::Ge | Sense::Eq => Some(con.rhs - rest_hi),
                    Sense::Le => None,
                };
                let (new_lo, new_hi) = if c > 0.0 {
                    (cap_lo.map(|v| v / c), cap_hi.map(|v| v / c))
                } else if c < 0.0 {
                    (cap_hi.map(|v| v / c), cap_lo.map(|v| v / c))
                } else {
                    (None, None)
                };
                if !tighten(bx, model.vars[j].kind, j, new_lo, new_hi, &mut changed) {
                    return PropagationOutcome::Empty;
                }
            }
        }

        for bl in &model.bilinears {
            let (alo, ahi) = bx[bl.a];
            let (blo, bhi) = bx[bl.b];
            if bl.a == bl.b {
                // Square term: z = a^2 over the box.
                let lo = if alo <= 0.0 && ahi >= 0.0 {
                    0.0
                } else {
                    (alo * alo).min(ahi * ahi)
                };
                let hi = (alo * alo).max(ahi * ahi);
                if !tighten(
                    bx,
                    model.vars[bl.product].kind,
                    bl.product,
                    Some(lo),
                    Some(hi),
                    &mut changed,
                ) {
                    return PropagationOutcome::Empty;
                }
                continue;
            }
            let (plo, phi) = product_bounds(alo, ahi, blo, bhi);
            if !tighten(
                bx,
                model.vars[bl.product].kind,
                bl.product,
                Some(plo),
                Some(phi),
                &mut changed,
            ) {
                return PropagationOutcome::Empty;
            }
            // Back-propagation through division, sound only when the
            // divisor's box excludes zero.
            let (zlo, zhi) = bx[bl.product];
            for (target, dlo, dhi) in [(bl.a, blo, bhi), (bl.b, alo, ahi)] {
                if dlo > MIN_GAIN || dhi < -MIN_GAIN {
                    let corners = [zlo / dlo, zlo / dhi, zhi / dlo, zhi / dhi];
                    let lo = corners.iter().copied().fold(f64::INFINITY, f64::min);
                    let hi = corners.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    if !tighten(
                        bx,
                        model.vars[target].kind,
                        target,
                        Some(lo),
                        Some(hi),
                        &mut changed,
                    ) {
                        return PropagationOutcome::Empty;
                    }
                }
            }
        }

        if !changed {
            break;
        }
    }
    PropagationOutcome::Tightened
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Family, ModelIR, Sense, VarKind};

    fn boxes(m: &ModelIR) -> BoundBox {
        m.vars.iter().map(|v| (v.lo, v.hi)).collect()
    }

    #[test]
    fn equality_row_pins_a_variable() {
        let mut m = ModelIR::default();
        let x = m.push_var(VarKind::Continuous, 0.0, 10.0, "x".into());
        let y = m.push_var(VarKind::Continuous, 2.0, 2.0, "y".into());
        m.push_con(
            "link".into(),
            Family::ScalerRow,
            vec![(x, 1.0), (y, -3.0)],
            Sense::Eq,
            0.0,
        );
        let mut bx = boxes(&m);
        assert_eq!(propagate_bounds(&m, &mut bx, 10), PropagationOutcome::Tightened);
        assert!((bx[x].0 - 6.0).abs() < 1e-9 && (bx[x].1 - 6.0).abs() < 1e-9);
    }

    #[test]
    fn binary_rounding_fixes_selectors() {
        let mut m = ModelIR::default();
        let e = m.push_var(VarKind::Binary, 0.0, 1.0, "e".into());
        let h = m.push_var(VarKind::Continuous, 0.5, 3.0, "h".into());
        // h <= 3 e forces e >= h/3 >= 1/6, so the binary rounds to one.
        m.push_con(
            "gate".into(),
            Family::ActivationGate,
            vec![(h, 1.0), (e, -3.0)],
            Sense::Le,
            0.0,
        );
        let mut bx = boxes(&m);
        assert_eq!(propagate_bounds(&m, &mut bx, 10), PropagationOutcome::Tightened);
        assert_eq!(bx[e], (1.0, 1.0));
    }

    #[test]
    fn contradictory_rows_empty_the_box() {
        let mut m = ModelIR::default();
        let x = m.push_var(VarKind::Continuous, 0.0, 1.0, "x".into());
        m.push_con(
            "lo".into(),
            Family::ActivationGate,
            vec![(x, 1.0)],
            Sense::Ge,
            0.8,
        );
        m.push_con(
            "hi".into(),
            Family::ActivationGate,
            vec![(x, 1.0)],
            Sense::Le,
            0.2,
        );
        let mut bx = boxes(&m);
        assert_eq!(propagate_bounds(&m, &mut bx, 10), PropagationOutcome::Empty);
    }

    #[test]
    fn products_tighten_in_both_directions() {
        let mut m = ModelIR::default();
        let a = m.push_var(VarKind::Continuous, 1.0, 2.0, "a".into());
        let b = m.push_var(VarKind::Continuous, 1.0, 4.0, "b".into());
        let z = m.product_of(a, b);
        // Narrow the product from outside; the factors must follow.
        let mut bx = boxes(&m);
        bx[z] = (6.0, 7.0);
        assert_eq!(propagate_bounds(&m, &mut bx, 20), PropagationOutcome::Tightened);
        // a >= z_lo / b_hi = 1.5, b >= z_lo / a_hi = 3.
        assert!(bx[a].0 >= 1.5 - 1e-9, "a = {:?}", bx[a]);
        assert!(bx[b].0 >= 3.0 - 1e-9, "b = {:?}", bx[b]);
    }

    #[test]
    fn fixed_inputs_collapse_a_rectifier_encoding() {
        use crate::surrogate::{encode_relu_milp, Activation, Layer, ReluNetwork, Scaler};

        let net = ReluNetwork {
            format_version: crate::surrogate::FORMAT_VERSION,
            input_names: vec!["a".into(), "b".into()],
            output_names: vec!["y".into()],
            input_scaler: Scaler {
                mean: vec![0.5, 0.5],
                spread: vec![0.5, 0.5],
            },
            output_scaler: Scaler {
                mean: vec![0.0],
                spread: vec![1.0],
            },
            layers: vec![
                Layer {
                    weights: vec![vec![1.0, -1.0], vec![-1.0, 1.0]],
                    bias: vec![0.1, -0.1],
                    activation: Activation::Relu,
                },
                Layer {
                    weights: vec![vec![1.0, 1.0]],
                    bias: vec![0.0],
                    activation: Activation::Identity,
                },
            ],
            input_box: vec![(0.0, 1.0), (0.0, 1.0)],
        };
        net.validate().unwrap();
        let mut m = ModelIR::default();
        let a = m.push_var(VarKind::Continuous, 0.0, 1.0, "a".into());
        let b = m.push_var(VarKind::Continuous, 0.0, 1.0, "b".into());
        let enc = encode_relu_milp(&mut m, &net, "net", &[a, b]);
        assert!(enc.n_unstable > 0, "fixture must keep an unstable neuron");

        // Pin the inputs after encoding; propagation must rediscover the
        // forward pass through the big-M rows.
        let point = [0.8, 0.25];
        let mut bx = boxes(&m);
        bx[a] = (point[0], point[0]);
        bx[b] = (point[1], point[1]);
        assert_eq!(propagate_bounds(&m, &mut bx, 30), PropagationOutcome::Tightened);
        let want = net.forward(&point)[0];
        let (ylo, yhi) = bx[enc.outputs[0]];
        assert!(
            (ylo - want).abs() < 1e-7 && (yhi - want).abs() < 1e-7,
            "output box {:?} vs forward {}",
            (ylo, yhi),
            want
        );
    }
}
