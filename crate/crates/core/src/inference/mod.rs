//! Integer network inference, evaluated either with plain `i64` arithmetic
//! (the reference) or entirely in residue form.
//!
//! Nothing rescales activations between layers, so values grow with depth.
//! [`check_overflow_bound`] is the contract that keeps every accumulator
//! inside the signed residue range; when it holds, the residue path returns
//! exactly what the reference returns.

mod bound;
mod eval;
mod macs;
mod network;
mod quantize;
mod tensor;

pub use bound::{check_overflow_bound, BoundReport, BoundViolation, LayerBound};
pub use eval::{infer_int, infer_rns, Output, RnsModel};
pub use macs::{count_macs, layer_macs, mac_breakdown};
pub use network::{signed_limit, Conv2d, FullyConnected, LayerSpec, MaxPool, NetworkSpec};
pub use quantize::{quantize, QuantizationSpec};
pub use tensor::{IntTensor, RnsTensor};

use thiserror::Error;

use crate::rns::RnsError;

#[derive(Debug, Error)]
pub enum InferenceError {
    #[error("parse error: {0}")]
    Format(serde_json::Error),
    #[error("invalid tensor: {0}")]
    Tensor(String),
    #[error("layer {layer}: {msg}")]
    Shape { layer: usize, msg: String },
    #[error("layer {layer}: {msg}")]
    Weights { layer: usize, msg: String },
    #[error("layer {layer} ({kind}) has no weights; shape-only networks support MAC and energy accounting only")]
    MissingWeights { layer: usize, kind: &'static str },
    #[error("invalid network: {0}")]
    Config(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("{0}")]
    Overflow(BoundViolation),
    #[error("quantization: {0}")]
    Quantize(String),
    #[error(transparent)]
    Rns(#[from] RnsError),
}
