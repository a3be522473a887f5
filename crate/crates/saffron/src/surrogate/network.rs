//! Network data model, forward evaluation, interval bound propagation, and
//! JSON persistence.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Bumped whenever the serialized layout changes incompatibly.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SurrogateError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format version {found} (expected {expected})")]
    FormatVersion { found: u32, expected: u32 },
    #[error("standardizer dimension {found} does not match {expected} values")]
    ScalerDim { found: usize, expected: usize },
    #[error("standardizer spread must be positive, got {0}")]
    ZeroSpread(f64),
    #[error("layer {layer} expects {expected} inputs, got {found}")]
    LayerDim {
        layer: usize,
        expected: usize,
        found: usize,
    },
    #[error("input box dimension {found} does not match {expected} inputs")]
    BoxDim { found: usize, expected: usize },
    #[error("input box [{lo}, {hi}] at position {index} is empty")]
    EmptyBox { index: usize, lo: f64, hi: f64 },
    #[error("network must end with an identity layer")]
    MissingLinearHead,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Activation {
    Relu,
    Identity,
}

/// Affine standardization `s = (x - mean) / spread` applied elementwise.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scaler {
    pub mean: Vec<f64>,
    pub spread: Vec<f64>,
}

impl Scaler {
    pub fn identity(dim: usize) -> Self {
        Scaler {
            mean: vec![0.0; dim],
            spread: vec![1.0; dim],
        }
    }

    pub fn scale(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.mean.iter().zip(&self.spread))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }

    pub fn descale(&self, s: &[f64]) -> Vec<f64> {
        s.iter()
            .zip(self.mean.iter().zip(&self.spread))
            .map(|(v, (m, sd))| v * sd + m)
            .collect()
    }

    fn validate(&self, expected: usize) -> Result<(), SurrogateError> {
        if self.mean.len() != expected || self.spread.len() != expected {
            return Err(SurrogateError::ScalerDim {
                found: self.mean.len().min(self.spread.len()),
                expected,
            });
        }
        for &s in &self.spread {
            if !(s > 0.0) || !s.is_finite() {
                return Err(SurrogateError::ZeroSpread(s));
            }
        }
        Ok(())
    }
}

/// One dense layer: `out_i = act(bias_i + sum_j weights[i][j] in_j)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Layer {
    /// Row-major: one row of input weights per output neuron.
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
    pub activation: Activation,
}

impl Layer {
    pub fn n_out(&self) -> usize {
        self.bias.len()
    }

    pub fn n_in(&self) -> usize {
        self.weights.first().map_or(0, Vec::len)
    }

    fn affine(&self, x: &[f64]) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.bias)
            .map(|(row, b)| b + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>())
            .collect()
    }
}

/// A trained surrogate: standardizers, dense layers, and the rectangular
/// input region the training data covered.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReluNetwork {
    pub format_version: u32,
    pub input_names: Vec<String>,
    pub output_names: Vec<String>,
    pub input_scaler: Scaler,
    pub output_scaler: Scaler,
    pub layers: Vec<Layer>,
    /// Per-input closed interval in raw units; predictions outside it are
    /// extrapolations.
    pub input_box: Vec<(f64, f64)>,
}

/// Pre-activation intervals per layer in scaled space, plus the descaled
/// output intervals.
#[derive(Debug, Clone)]
pub struct NeuronBounds {
    /// `pre[l][i]` bounds the affine value of neuron `i` in layer `l`.
    pub pre: Vec<Vec<(f64, f64)>>,
    /// Raw-unit bounds of each network output.
    pub output: Vec<(f64, f64)>,
}

impl ReluNetwork {
    pub fn n_inputs(&self) -> usize {
        self.input_names.len()
    }

    pub fn n_outputs(&self) -> usize {
        self.output_names.len()
    }

    /// A network of the given shape with zero weights and unit scalers.
    /// Useful as a placeholder when only dimensions and the input box
    /// matter.
    pub fn zeros(n_in: usize, hidden: &[usize], n_out: usize, input_box: Vec<(f64, f64)>) -> Self {
        let mut layers = Vec::new();
        let mut prev = n_in;
        for &width in hidden {
            layers.push(Layer {
                weights: vec![vec![0.0; prev]; width],
                bias: vec![0.0; width],
                activation: Activation::Relu,
            });
            prev = width;
        }
        layers.push(Layer {
            weights: vec![vec![0.0; prev]; n_out],
            bias: vec![0.0; n_out],
            activation: Activation::Identity,
        });
        ReluNetwork {
            format_version: FORMAT_VERSION,
            input_names: (0..n_in).map(|i| format!("in{}", i + 1)).collect(),
            output_names: (0..n_out).map(|o| format!("out{}", o + 1)).collect(),
            input_scaler: Scaler::identity(n_in),
            output_scaler: Scaler::identity(n_out),
            layers,
            input_box,
        }
    }

    /// Structural consistency: scaler dimensions, chained layer shapes, a
    /// final identity layer, and a non-empty input box.
    pub fn validate(&self) -> Result<(), SurrogateError> {
        if self.format_version != FORMAT_VERSION {
            return Err(SurrogateError::FormatVersion {
                found: self.format_version,
                expected: FORMAT_VERSION,
            });
        }
        self.input_scaler.validate(self.n_inputs())?;
        self.output_scaler.validate(self.n_outputs())?;
        let mut prev = self.n_inputs();
        for (l, layer) in self.layers.iter().enumerate() {
            for row in &layer.weights {
                if row.len() != prev {
                    return Err(SurrogateError::LayerDim {
                        layer: l,
                        expected: prev,
                        found: row.len(),
                    });
                }
            }
            if layer.weights.len() != layer.bias.len() {
                return Err(SurrogateError::LayerDim {
                    layer: l,
                    expected: layer.weights.len(),
                    found: layer.bias.len(),
                });
            }
            prev = layer.n_out();
        }
        if prev != self.n_outputs()
            || self.layers.last().map(|l| l.activation) != Some(Activation::Identity)
        {
            return Err(SurrogateError::MissingLinearHead);
        }
        if self.input_box.len() != self.n_inputs() {
            return Err(SurrogateError::BoxDim {
                found: self.input_box.len(),
                expected: self.n_inputs(),
            });
        }
        for (i, &(lo, hi)) in self.input_box.iter().enumerate() {
            if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(SurrogateError::EmptyBox { index: i, lo, hi });
            }
        }
        Ok(())
    }

    /// Evaluates the network at a raw-unit input point.
    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        let mut v = self.input_scaler.scale(x);
        for layer in &self.layers {
            v = layer.affine(&v);
            if layer.activation == Activation::Relu {
                for h in &mut v {
                    *h = h.max(0.0);
                }
            }
        }
        self.output_scaler.descale(&v)
    }

    /// True when every coordinate lies inside the training box.
    pub fn inside_box(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(&self.input_box)
            .all(|(v, &(lo, hi))| *v >= lo && *v <= hi)
    }

    /// Forward evaluation plus the indices of inputs outside the training
    /// box, so callers can warn about extrapolation without failing.
    pub fn forward_checked(&self, x: &[f64]) -> (Vec<f64>, Vec<usize>) {
        let outside = x
            .iter()
            .zip(&self.input_box)
            .enumerate()
            .filter(|(_, (v, (lo, hi)))| **v < *lo || **v > *hi)
            .map(|(i, _)| i)
            .collect();
        (self.forward(x), outside)
    }

    /// Interval propagation of the training box through every layer.
    pub fn propagate_bounds(&self) -> NeuronBounds {
        self.propagate_bounds_from(&self.input_box)
    }

    /// Interval propagation of an arbitrary input region through every
    /// layer.
    ///
    /// For each neuron the affine image of the incoming interval vector is
    /// bounded coordinatewise; rectification clamps the interval at zero
    /// before the next layer. The result soundly encloses every reachable
    /// pre-activation value over the region.
    pub fn propagate_bounds_from(&self, region: &[(f64, f64)]) -> NeuronBounds {
        assert_eq!(region.len(), self.n_inputs());
        let mut lo: Vec<f64> = Vec::with_capacity(self.n_inputs());
        let mut hi: Vec<f64> = Vec::with_capacity(self.n_inputs());
        for (i, &(blo, bhi)) in region.iter().enumerate() {
            let m = self.input_scaler.mean[i];
            let s = self.input_scaler.spread[i];
            lo.push((blo - m) / s);
            hi.push((bhi - m) / s);
        }
        let mut pre = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            let mut layer_pre = Vec::with_capacity(layer.n_out());
            let mut next_lo = Vec::with_capacity(layer.n_out());
            let mut next_hi = Vec::with_capacity(layer.n_out());
            for (row, &b) in layer.weights.iter().zip(&layer.bias) {
                let mut plo = b;
                let mut phi = b;
                for (&w, (&l, &h)) in row.iter().zip(lo.iter().zip(&hi)) {
                    if w >= 0.0 {
                        plo += w * l;
                        phi += w * h;
                    } else {
                        plo += w * h;
                        phi += w * l;
                    }
                }
                layer_pre.push((plo, phi));
                if layer.activation == Activation::Relu {
                    next_lo.push(plo.max(0.0));
                    next_hi.push(phi.max(0.0));
                } else {
                    next_lo.push(plo);
                    next_hi.push(phi);
                }
            }
            pre.push(layer_pre);
            lo = next_lo;
            hi = next_hi;
        }
        let output = lo
            .iter()
            .zip(&hi)
            .enumerate()
            .map(|(o, (&l, &h))| {
                let m = self.output_scaler.mean[o];
                let s = self.output_scaler.spread[o];
                (l * s + m, h * s + m)
            })
            .collect();
        NeuronBounds { pre, output }
    }

    pub fn save(&self, path: &Path) -> Result<(), SurrogateError> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, SurrogateError> {
        let text = std::fs::read_to_string(path)?;
        let net: ReluNetwork = serde_json::from_str(&text)?;
        net.validate()?;
        Ok(net)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Two inputs, two hidden rectifier neurons, one output, unit scalers.
    fn small_net() -> ReluNetwork {
        ReluNetwork {
            format_version: FORMAT_VERSION,
            input_names: vec!["a".into(), "b".into()],
            output_names: vec!["y".into()],
            input_scaler: Scaler::identity(2),
            output_scaler: Scaler::identity(1),
            layers: vec![
                Layer {
                    weights: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
                    bias: vec![-0.5, 0.0],
                    activation: Activation::Relu,
                },
                Layer {
                    weights: vec![vec![1.0, 1.0]],
                    bias: vec![0.0],
                    activation: Activation::Identity,
                },
            ],
            input_box: vec![(0.0, 1.0), (0.0, 1.0)],
        }
    }

    #[test]
    fn forward_matches_hand_computation() {
        let net = small_net();
        net.validate().unwrap();
        // First neuron rectifies 0.25 - 0.5 to zero, second passes 0.3.
        let y = net.forward(&[0.25, 0.3]);
        assert!((y[0] - 0.3).abs() < 1e-12);
        let y = net.forward(&[0.9, 0.1]);
        assert!((y[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn forward_respects_scalers() {
        let mut net = small_net();
        net.input_scaler = Scaler {
            mean: vec![0.5, 0.5],
            spread: vec![0.25, 0.5],
        };
        net.output_scaler = Scaler {
            mean: vec![10.0],
            spread: vec![2.0],
        };
        // Scaled input (1.0, -0.4): hidden (0.5, 0.0), output 0.5 -> 11.0.
        let y = net.forward(&[0.75, 0.3]);
        assert!((y[0] - 11.0).abs() < 1e-12);
    }

    #[test]
    fn bounds_enclose_sampled_activations() {
        let mut net = small_net();
        net.input_scaler = Scaler {
            mean: vec![0.4, 0.6],
            spread: vec![0.3, 0.2],
        };
        net.layers[0].weights = vec![vec![1.3, -0.7], vec![-0.4, 2.1]];
        net.layers[0].bias = vec![0.2, -0.9];
        net.layers[1].weights = vec![vec![0.8, -1.5]];
        net.layers[1].bias = vec![0.3];
        let bounds = net.propagate_bounds();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let x: Vec<f64> = net
                .input_box
                .iter()
                .map(|&(lo, hi)| rng.random_range(lo..=hi))
                .collect();
            let mut v = net.input_scaler.scale(&x);
            for (l, layer) in net.layers.iter().enumerate() {
                let pre = layer.affine(&v);
                for (i, &p) in pre.iter().enumerate() {
                    let (lo, hi) = bounds.pre[l][i];
                    assert!(p >= lo - 1e-9 && p <= hi + 1e-9, "neuron {l}/{i}");
                }
                v = pre;
                if layer.activation == Activation::Relu {
                    for h in &mut v {
                        *h = h.max(0.0);
                    }
                }
            }
            let y = net.output_scaler.descale(&v);
            for (o, &yo) in y.iter().enumerate() {
                let (lo, hi) = bounds.output[o];
                assert!(yo >= lo - 1e-9 && yo <= hi + 1e-9);
            }
        }
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let mut net = small_net();
        net.layers[0].weights[0][0] = 0.1 + 0.2; // not representable exactly
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("net.json");
        net.save(&path).unwrap();
        let loaded = ReluNetwork::load(&path).unwrap();
        assert_eq!(
            net.layers[0].weights[0][0].to_bits(),
            loaded.layers[0].weights[0][0].to_bits()
        );
        let second = dir.path().join("net2.json");
        loaded.save(&second).unwrap();
        assert_eq!(
            std::fs::read(&path).unwrap(),
            std::fs::read(&second).unwrap()
        );
    }

    #[test]
    fn zero_spread_is_rejected() {
        let mut net = small_net();
        net.input_scaler.spread[1] = 0.0;
        assert!(matches!(
            net.validate(),
            Err(SurrogateError::ZeroSpread(_))
        ));
    }

    #[test]
    fn extrapolation_is_reported() {
        let net = small_net();
        let (_, outside) = net.forward_checked(&[1.5, 0.5]);
        assert_eq!(outside, vec![0]);
        assert!(net.inside_box(&[0.5, 0.5]));
    }
}
