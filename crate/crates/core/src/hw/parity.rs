//! Combinational parity network for a residue tuple `(x1, x1*, x2, x2*)`.
//!
//! ```text
//! X1 = x1* + (2^n + 1)     * (2^(n-1) * (x1 - x1*) mod 2^n - 1)
//! X2 = x2* + (2^(n+1) + 1) * (2^n     * (x2 - x2*) mod 2^(n+1) - 1)
//! P  = lsb(X2) ^ lsb((X1 - X2) mod 2^2n - 1)
//! ```
//!
//! Hardware shortcuts: negation mod `2^k - 1` is an inverter; multiplying by
//! `2^(k-1)` mod `2^k - 1` is a right rotate by one; `(2^k + 1) * v` is `v`
//! wired next to itself; and a word a few bits wider than `2^k - 1` is
//! reduced by one end-around-carry addition of its high bits.

use super::bits::BitVec;
use super::prefix::{binary_add, eac_add};
use crate::rns::{ModuliSet, RnsInt};

/// Residues laid out as circuit inputs, widths `(n, n+1, n+1, n+2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResidueBits {
    pub x1: BitVec,
    pub x1s: BitVec,
    pub x2: BitVec,
    pub x2s: BitVec,
}

impl ResidueBits {
    pub fn from_rns(x: &RnsInt, ms: &ModuliSet) -> Self {
        let [b1, b1s, b2, b2s] = ms.residue_bits();
        ResidueBits {
            x1: BitVec::new(x.r1.into(), b1),
            x1s: BitVec::new(x.r1s.into(), b1s),
            x2: BitVec::new(x.r2.into(), b2),
            x2s: BitVec::new(x.r2s.into(), b2s),
        }
    }
}

/// Folds a word of width `> k` into a canonical residue mod `2^k - 1`.
fn fold_m1(x: &BitVec, k: u32) -> BitVec {
    let low = x.slice(0, k);
    let high = x.slice(k, x.width() - k).resize(k);
    eac_add(&low, &high)
}

/// Reconstructs the value mod `(2^k - 1)(2^k + 1)` from its two residues.
/// `minus` is `k` bits, `plus` is `k + 1` bits.
fn pair_value(minus: &BitVec, plus: &BitVec, k: u32) -> BitVec {
    let plus_reduced = fold_m1(plus, k);
    let diff = eac_add(minus, &plus_reduced.not());
    let scaled = diff.rotr(1);
    let times_conjugate = scaled.concat(&scaled);
    binary_add(&times_conjugate, &plus.resize(2 * k))
}

pub fn parity_circuit(x: &ResidueBits, ms: &ModuliSet) -> bool {
    let n = ms.n();
    let [b1, b1s, b2, b2s] = ms.residue_bits();
    assert_eq!(
        [x.x1.width(), x.x1s.width(), x.x2.width(), x.x2s.width()],
        [b1, b1s, b2, b2s],
        "parity circuit residue widths"
    );
    let low = pair_value(&x.x1, &x.x1s, n);
    let high = pair_value(&x.x2, &x.x2s, n + 1);
    let high_reduced = fold_m1(&high, 2 * n);
    let diff = eac_add(&low, &high_reduced.not());
    high.bit(0) ^ diff.bit(0)
}

pub fn parity_circuit_rns(x: &RnsInt, ms: &ModuliSet) -> bool {
    parity_circuit(&ResidueBits::from_rns(x, ms), ms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_is_even() {
        let ms = ModuliSet::new(7).unwrap();
        assert!(!parity_circuit_rns(&RnsInt::ZERO, &ms));
    }

    #[test]
    fn pair_values_match_word_level() {
        let ms = ModuliSet::new(7).unwrap();
        for v in [0u64, 1, 300, 16_382, 99_999, ms.range() - 1] {
            let x = ms.encode(v).unwrap();
            let bits = ResidueBits::from_rns(&x, &ms);
            assert_eq!(pair_value(&bits.x1, &bits.x1s, 7).value(), v % 16_383);
            assert_eq!(pair_value(&bits.x2, &bits.x2s, 8).value(), v % 65_535);
        }
    }

    #[test]
    fn matches_word_level_exhaustive_small_n() {
        for n in 2..=4 {
            let ms = ModuliSet::new(n).unwrap();
            for v in 0..ms.range() {
                let x = ms.encode(v).unwrap();
                assert_eq!(parity_circuit_rns(&x, &ms), v & 1 == 1, "n={n} v={v}");
                assert_eq!(parity_circuit_rns(&x, &ms), ms.parity(&x));
            }
        }
    }
}
