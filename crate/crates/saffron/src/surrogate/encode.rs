//! Exact mixed-integer encoding of a trained rectifier network.
//!
//! Hidden neurons whose pre-activation interval crosses zero get one binary
//! selector and four big-M inequalities; the interval bounds themselves are
//! the big-M constants. Neurons that are provably active or inactive over
//! the input region are eliminated: inactive ones collapse to a fixed zero
//! variable, active ones to a plain affine equality. With every selector
//! fixed, the remaining system is linear in the inputs.

use crate::algebra::{Family, ModelIR, Sense, VarId, VarKind};

use super::network::{Activation, NeuronBounds, ReluNetwork};

/// Handles into the variables created for one embedded network.
#[derive(Debug, Clone)]
pub struct EncodedNetwork {
    /// Scaled input variables, one per network input.
    pub scaled_inputs: Vec<VarId>,
    /// Post-activation variables per hidden layer.
    pub hidden: Vec<Vec<VarId>>,
    /// Activation selectors per hidden layer; `None` for stable neurons.
    pub selectors: Vec<Vec<Option<VarId>>>,
    /// Scaled output variables.
    pub scaled_outputs: Vec<VarId>,
    /// Raw-unit output variables.
    pub outputs: Vec<VarId>,
    /// Interval bounds used for the big-M constants.
    pub bounds: NeuronBounds,
    pub n_unstable: usize,
    pub n_stable_active: usize,
    pub n_stable_inactive: usize,
}

/// Encodes `net` into `model`, wiring the given raw-unit input variables.
///
/// The current bounds of `input_vars` define the region the encoding must
/// cover; interval propagation from those bounds sizes every big-M constant,
/// so tighter input bounds yield tighter encodings and more eliminated
/// neurons. Variable labels are prefixed with `prefix`.
pub fn encode_relu_milp(
    model: &mut ModelIR,
    net: &ReluNetwork,
    prefix: &str,
    input_vars: &[VarId],
) -> EncodedNetwork {
    assert_eq!(
        input_vars.len(),
        net.n_inputs(),
        "input variable count must match the network"
    );
    let region: Vec<(f64, f64)> = input_vars
        .iter()
        .map(|&v| (model.vars[v].lo, model.vars[v].hi))
        .collect();
    let bounds = net.propagate_bounds_from(&region);

    // Scaled inputs tied to the raw variables by the standardizer.
    let mut scaled_inputs = Vec::with_capacity(net.n_inputs());
    for (k, &raw) in input_vars.iter().enumerate() {
        let m = net.input_scaler.mean[k];
        let s = net.input_scaler.spread[k];
        let (lo, hi) = region[k];
        let sv = model.push_var(
            VarKind::Continuous,
            (lo - m) / s,
            (hi - m) / s,
            format!("{prefix}.s[{k}]"),
        );
        model.push_con(
            format!("{prefix}.scale_in[{k}]"),
            Family::ScalerRow,
            vec![(raw, 1.0), (sv, -s)],
            Sense::Eq,
            m,
        );
        scaled_inputs.push(sv);
    }

    let mut prev = scaled_inputs.clone();
    let mut hidden = Vec::new();
    let mut selectors = Vec::new();
    let mut scaled_outputs = Vec::new();
    let mut n_unstable = 0;
    let mut n_stable_active = 0;
    let mut n_stable_inactive = 0;

    for (l, layer) in net.layers.iter().enumerate() {
        let mut outs = Vec::with_capacity(layer.n_out());
        let mut sels = Vec::with_capacity(layer.n_out());
        for i in 0..layer.n_out() {
            let (plo, phi) = bounds.pre[l][i];
            let row = &layer.weights[i];
            let b = layer.bias[i];
            // Coefficients of `h - (b + sum w prev)` terms, reused per row.
            let affine = |h: VarId, extra: Option<(VarId, f64)>| {
                let mut c: Vec<(VarId, f64)> = vec![(h, 1.0)];
                for (&w, &p) in row.iter().zip(&prev) {
                    c.push((p, -w));
                }
                if let Some(e) = extra {
                    c.push(e);
                }
                c
            };
            match layer.activation {
                Activation::Identity => {
                    let h = model.push_var(
                        VarKind::Continuous,
                        plo,
                        phi,
                        format!("{prefix}.o[{i}]"),
                    );
                    model.push_con(
                        format!("{prefix}.head[{i}]"),
                        Family::ReluEncoding,
                        affine(h, None),
                        Sense::Eq,
                        b,
                    );
                    outs.push(h);
                    sels.push(None);
                }
                Activation::Relu if phi <= 0.0 => {
                    // Provably inactive: pin the post-activation to zero.
                    n_stable_inactive += 1;
                    let h = model.push_var(
                        VarKind::Continuous,
                        0.0,
                        0.0,
                        format!("{prefix}.h[{l},{i}]"),
                    );
                    outs.push(h);
                    sels.push(None);
                }
                Activation::Relu if plo >= 0.0 => {
                    // Provably active: the rectifier is the identity here.
                    n_stable_active += 1;
                    let h = model.push_var(
                        VarKind::Continuous,
                        plo,
                        phi,
                        format!("{prefix}.h[{l},{i}]"),
                    );
                    model.push_con(
                        format!("{prefix}.act[{l},{i}]"),
                        Family::ReluEncoding,
                        affine(h, None),
                        Sense::Eq,
                        b,
                    );
                    outs.push(h);
                    sels.push(None);
                }
                Activation::Relu => {
                    n_unstable += 1;
                    let h = model.push_var(
                        VarKind::Continuous,
                        0.0,
                        phi.max(0.0),
                        format!("{prefix}.h[{l},{i}]"),
                    );
                    let e = model.push_var(
                        VarKind::Binary,
                        0.0,
                        1.0,
                        format!("{prefix}.e[{l},{i}]"),
                    );
                    // h >= 0.
                    model.push_con(
                        format!("{prefix}.relu_nn[{l},{i}]"),
                        Family::ReluEncoding,
                        vec![(h, 1.0)],
                        Sense::Ge,
                        0.0,
                    );
                    // h >= pre.
                    model.push_con(
                        format!("{prefix}.relu_lb[{l},{i}]"),
                        Family::ReluEncoding,
                        affine(h, None),
                        Sense::Ge,
                        b,
                    );
                    // h <= pre - lo (1 - e).
                    model.push_con(
                        format!("{prefix}.relu_ub[{l},{i}]"),
                        Family::ReluEncoding,
                        affine(h, Some((e, -plo))),
                        Sense::Le,
                        b - plo,
                    );
                    // h <= hi e.
                    model.push_con(
                        format!("{prefix}.relu_off[{l},{i}]"),
                        Family::ReluEncoding,
                        vec![(h, 1.0), (e, -phi)],
                        Sense::Le,
                        0.0,
                    );
                    outs.push(h);
                    sels.push(Some(e));
                }
            }
        }
        if layer.activation == Activation::Identity && l == net.layers.len() - 1 {
            scaled_outputs = outs.clone();
        }
        hidden.push(outs.clone());
        selectors.push(sels);
        prev = outs;
    }

    // Raw outputs descaled from the head.
    let mut outputs = Vec::with_capacity(net.n_outputs());
    for (o, &sv) in scaled_outputs.iter().enumerate() {
        let m = net.output_scaler.mean[o];
        let s = net.output_scaler.spread[o];
        let (lo, hi) = bounds.output[o];
        let raw = model.push_var(
            VarKind::Continuous,
            lo,
            hi,
            format!("{prefix}.y[{o}]"),
        );
        model.push_con(
            format!("{prefix}.scale_out[{o}]"),
            Family::ScalerRow,
            vec![(raw, 1.0), (sv, -s)],
            Sense::Eq,
            m,
        );
        outputs.push(raw);
    }

    let hidden_only: Vec<Vec<VarId>> = hidden[..hidden.len() - 1].to_vec();
    let selectors_only: Vec<Vec<Option<VarId>>> = selectors[..selectors.len() - 1].to_vec();
    EncodedNetwork {
        scaled_inputs,
        hidden: hidden_only,
        selectors: selectors_only,
        scaled_outputs,
        outputs,
        bounds,
        n_unstable,
        n_stable_active,
        n_stable_inactive,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surrogate::network::{Layer, Scaler, FORMAT_VERSION};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn toy_net() -> ReluNetwork {
        ReluNetwork {
            format_version: FORMAT_VERSION,
            input_names: vec!["a".into(), "b".into()],
            output_names: vec!["y".into()],
            input_scaler: Scaler {
                mean: vec![0.5, 0.5],
                spread: vec![0.5, 0.5],
            },
            output_scaler: Scaler {
                mean: vec![1.0],
                spread: vec![2.0],
            },
            layers: vec![
                Layer {
                    // First neuron unstable, second always active, third
                    // never active over the unit box.
                    weights: vec![vec![1.0, -1.0], vec![0.5, 0.5], vec![-1.0, -1.0]],
                    bias: vec![0.0, 3.0, -3.0],
                    activation: super::Activation::Relu,
                },
                Layer {
                    weights: vec![vec![1.0, 1.0, 1.0]],
                    bias: vec![-0.5],
                    activation: super::Activation::Identity,
                },
            ],
            input_box: vec![(0.0, 1.0), (0.0, 1.0)],
        }
    }

    fn encode_toy() -> (ModelIR, EncodedNetwork, ReluNetwork) {
        let net = toy_net();
        net.validate().unwrap();
        let mut model = ModelIR::default();
        let a = model.push_var(VarKind::Continuous, 0.0, 1.0, "a".into());
        let b = model.push_var(VarKind::Continuous, 0.0, 1.0, "b".into());
        let enc = encode_relu_milp(&mut model, &net, "net", &[a, b]);
        (model, enc, net)
    }

    #[test]
    fn stability_analysis_prunes_neurons() {
        let (model, enc, _) = encode_toy();
        assert_eq!(enc.n_unstable, 1);
        assert_eq!(enc.n_stable_active, 1);
        assert_eq!(enc.n_stable_inactive, 1);
        // One selector binary for the single unstable neuron.
        let binaries = model
            .vars
            .iter()
            .filter(|v| v.kind == VarKind::Binary)
            .count();
        assert_eq!(binaries, 1);
        // Four big-M rows, one stable-active equality, one head equality.
        assert_eq!(model.count_family(Family::ReluEncoding), 6);
        // Two input and one output standardization rows.
        assert_eq!(model.count_family(Family::ScalerRow), 3);
    }

    #[test]
    fn natural_assignment_satisfies_every_row() {
        let (model, enc, net) = encode_toy();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let x: Vec<f64> = net
                .input_box
                .iter()
                .map(|&(lo, hi)| rng.random_range(lo..=hi))
                .collect();
            let mut point = vec![0.0; model.n_vars()];
            point[0] = x[0];
            point[1] = x[1];
            let mut v = net.input_scaler.scale(&x);
            for (k, &sv) in enc.scaled_inputs.iter().enumerate() {
                point[sv] = v[k];
            }
            for (l, layer) in net.layers.iter().enumerate() {
                let pre: Vec<f64> = layer
                    .weights
                    .iter()
                    .zip(&layer.bias)
                    .map(|(row, bias)| {
                        bias + row.iter().zip(&v).map(|(w, p)| w * p).sum::<f64>()
                    })
                    .collect();
                if l + 1 == net.layers.len() {
                    for (o, &sv) in enc.scaled_outputs.iter().enumerate() {
                        point[sv] = pre[o];
                    }
                    v = pre.clone();
                } else {
                    for (i, &p) in pre.iter().enumerate() {
                        let h = p.max(0.0);
                        point[enc.hidden[l][i]] = h;
                        if let Some(e) = enc.selectors[l][i] {
                            point[e] = if p > 0.0 { 1.0 } else { 0.0 };
                        }
                    }
                    v = pre.iter().map(|p| p.max(0.0)).collect();
                }
            }
            let y = net.output_scaler.descale(&v);
            for (o, &rv) in enc.outputs.iter().enumerate() {
                point[rv] = y[o];
            }
            for con in &model.cons {
                let lhs = model.eval_con(con, &point);
                match con.sense {
                    Sense::Eq => assert!(
                        (lhs - con.rhs).abs() < 1e-9,
                        "{}: {} != {}",
                        con.name,
                        lhs,
                        con.rhs
                    ),
                    Sense::Le => assert!(lhs <= con.rhs + 1e-9, "{}", con.name),
                    Sense::Ge => assert!(lhs >= con.rhs - 1e-9, "{}", con.name),
                }
            }
            // Forward pass agrees with the encoded output variables.
            let direct = net.forward(&x);
            assert!((direct[0] - y[0]).abs() < 1e-9);
        }
    }

    #[test]
    fn point_inputs_collapse_to_equalities() {
        let net = toy_net();
        let mut model = ModelIR::default();
        let a = model.push_var(VarKind::Continuous, 0.3, 0.3, "a".into());
        let b = model.push_var(VarKind::Continuous, 0.7, 0.7, "b".into());
        let enc = encode_relu_milp(&mut model, &net, "net", &[a, b]);
        // Every neuron is stable at a point, so no binaries remain.
        assert_eq!(enc.n_unstable, 0);
        let binaries = model
            .vars
            .iter()
            .filter(|v| v.kind == VarKind::Binary)
            .count();
        assert_eq!(binaries, 0);
        // The output interval pins the forward value.
        let y = net.forward(&[0.3, 0.7]);
        let (lo, hi) = enc.bounds.output[0];
        assert!((lo - y[0]).abs() < 1e-9 && (hi - y[0]).abs() < 1e-9);
    }
}
