//! Feedforward rectifier networks used as process surrogates: dense layout,
//! standardization of inputs and outputs, interval bound propagation, JSON
//! persistence, and an exact mixed-integer encoding of the trained network.

mod encode;
mod network;

pub use encode::{encode_relu_milp, EncodedNetwork};
pub use network::{
    Activation, Layer, NeuronBounds, ReluNetwork, Scaler, SurrogateError, FORMAT_VERSION,
};
