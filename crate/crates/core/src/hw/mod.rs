//! Bit-level models of the residue datapath: residue generators, prefix
//! adders with end-around carry, diminished-1 adders, carry-save multipliers
//! and the parity network.
//!
//! Every block is purely combinational. Inputs violating a block's width or
//! canonical-residue contract panic, the software analogue of a wiring error.
//!
//! All blocks use normal (non-diminished) representation at their
//! boundaries, and mod `2^w - 1` outputs never use the all-ones alias of zero.

mod adder;
mod bits;
mod multiplier;
mod parity;
mod prefix;
mod residue_gen;

pub use adder::{add_p1, diminished_one_add, neg_p1, ppa_add_m1};
pub use bits::BitVec;
pub use multiplier::{
    finalize_m1, finalize_p1, mul_m1, mul_m1_with_stats, mul_p1, mul_p1_with_stats, partial_product_p1,
    partial_products_m1, CsaStats, RedundantProduct, P1_CORRECTION,
};
pub use parity::{parity_circuit, parity_circuit_rns, ResidueBits};
pub use prefix::{prefix_depth, CarryIn, GpPair, PrefixAdder};
pub use residue_gen::{residue_gen, ModulusKind};

use crate::rns::{ModuliSet, RnsInt};

/// Residue add for one channel, routed to the matching adder.
pub fn channel_add(kind: ModulusKind, a: u64, b: u64, ms: &ModuliSet) -> u64 {
    let k = kind.exponent(ms);
    let w = kind.residue_width(ms);
    let (a, b) = (BitVec::new(a, w), BitVec::new(b, w));
    if kind.is_plus_one() {
        add_p1(&a, &b, k).value()
    } else {
        ppa_add_m1(&a, &b, k).value()
    }
}

/// Residue multiply for one channel, through the CSA tree and final adder.
pub fn channel_mul(kind: ModulusKind, a: u64, b: u64, ms: &ModuliSet) -> u64 {
    let k = kind.exponent(ms);
    let w = kind.residue_width(ms);
    let (a, b) = (BitVec::new(a, w), BitVec::new(b, w));
    if kind.is_plus_one() {
        finalize_p1(&mul_p1(&a, &b, k), k).value()
    } else {
        finalize_m1(&mul_m1(&a, &b, k)).value()
    }
}

/// Binary to residue form through the four residue generators.
pub fn forward_convert(x: u64, ms: &ModuliSet) -> RnsInt {
    let bits = BitVec::new(x, ms.value_bits());
    let [r1, r1s, r2, r2s] = ModulusKind::ALL.map(|k| residue_gen(&bits, k, ms).value() as u32);
    RnsInt { r1, r1s, r2, r2s }
}

/// Four-channel RNS addition through the bit-level adders.
pub fn rns_add(a: &RnsInt, b: &RnsInt, ms: &ModuliSet) -> RnsInt {
    lanes(a, b, ms, channel_add)
}

/// Four-channel RNS multiplication through the bit-level multipliers.
pub fn rns_mul(a: &RnsInt, b: &RnsInt, ms: &ModuliSet) -> RnsInt {
    lanes(a, b, ms, channel_mul)
}

fn lanes(a: &RnsInt, b: &RnsInt, ms: &ModuliSet, f: fn(ModulusKind, u64, u64, &ModuliSet) -> u64) -> RnsInt {
    let (a, b) = (a.to_array(), b.to_array());
    let [r1, r1s, r2, r2s] = std::array::from_fn(|i| f(ModulusKind::ALL[i], a[i].into(), b[i].into(), ms) as u32);
    RnsInt { r1, r1s, r2, r2s }
}
