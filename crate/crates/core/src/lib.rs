//! Residue number system arithmetic over `{2^n - 1, 2^n + 1, 2^(n+1) - 1, 2^(n+1) + 1}`
//! and integer network inference carried out entirely in residue form.
//!
//! - [`rns`]: word-level number system (encode/decode, ring ops, parity,
//!   comparison, ReLU, argmax).
//! - [`hw`]: bit-level models of the adders, multipliers, residue generators
//!   and parity network.
//! - [`inference`]: integer tensors, conv/FC/ReLU/max-pool/argmax layers in a
//!   plain-integer path and a residue path, quantization and MAC counting.
//! - [`energy`]: per-operation energy from block synthesis data and the
//!   RNS-versus-binary break-even analysis.
//! - [`selftest`]: the cross-module property suites shared by tests and the CLI.

pub mod energy;
pub mod hw;
pub mod inference;
pub mod rns;
pub mod selftest;

pub use rns::{ModuliSet, RnsError, RnsInt};
