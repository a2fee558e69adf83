//! Kogge-Stone parallel prefix adder with selectable carry-in wiring.
//!
//! Operands are preprocessed into generate/propagate pairs, combined over
//! `ceil(log2 w)` levels of dot operators, and the resulting group signals
//! `G[i:0]`, `P[i:0]` produce every carry at once. End-around variants feed
//! the carry out (or its complement) back in through one extra correction
//! level: `c[i+1] = G[i:0] | P[i:0] & cin`. That needs no second pass because
//! a re-injected carry can never generate another carry out.

use std::fmt::Write as _;

use super::bits::BitVec;

/// Carry generate / propagate signals of one bit position or group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GpPair {
    pub g: bool,
    pub p: bool,
}

impl GpPair {
    pub fn preprocess(a: bool, b: bool) -> Self {
        GpPair { g: a & b, p: a ^ b }
    }

    /// The prefix dot operator; `self` is the more significant group.
    pub fn dot(self, low: GpPair) -> GpPair {
        GpPair {
            g: self.g | (self.p & low.g),
            p: self.p & low.p,
        }
    }
}

/// How the carry into bit 0 is wired.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CarryIn {
    /// Plain binary addition.
    Zero,
    /// `cin = cout`, for mod `2^w - 1`.
    EndAround,
    /// `cin = !cout`, for diminished-1 mod `2^w + 1`.
    InvertedEndAround,
}

/// All internal signals of one evaluation of the prefix adder.
#[derive(Debug, Clone)]
pub struct PrefixAdder {
    /// `levels[0]` holds the preprocessed pairs; `levels[k]` the pairs after
    /// the k-th dot level. The last level holds `G[i:0]`, `P[i:0]`.
    pub levels: Vec<Vec<GpPair>>,
    pub carry_out: bool,
    pub carry_in: bool,
    pub sum: BitVec,
}

/// Number of dot-operator levels for a `w`-bit Kogge-Stone network.
pub fn prefix_depth(width: u32) -> u32 {
    width.next_power_of_two().trailing_zeros()
}

impl PrefixAdder {
    pub fn evaluate(a: &BitVec, b: &BitVec, carry_in: CarryIn) -> Self {
        assert_eq!(a.width(), b.width(), "prefix adder operand widths differ");
        let w = a.width() as usize;
        let mut levels = vec![(0..w as u32)
            .map(|i| GpPair::preprocess(a.bit(i), b.bit(i)))
            .collect::<Vec<_>>()];
        let mut distance = 1;
        while distance < w {
            let prev = levels.last().unwrap();
            let next = (0..w)
                .map(|i| {
                    if i >= distance {
                        prev[i].dot(prev[i - distance])
                    } else {
                        prev[i]
                    }
                })
                .collect();
            levels.push(next);
            distance *= 2;
        }
        let group = levels.last().unwrap();
        let carry_out = group[w - 1].g;
        let cin = match carry_in {
            CarryIn::Zero => false,
            CarryIn::EndAround => carry_out,
            CarryIn::InvertedEndAround => !carry_out,
        };
        // correction level: carry into bit i
        let carries = std::iter::once(cin).chain(group[..w - 1].iter().map(|gp| gp.g | (gp.p & cin)));
        let sum: Vec<bool> = levels[0].iter().zip(carries).map(|(gp, c)| gp.p ^ c).collect();
        PrefixAdder {
            levels,
            carry_out,
            carry_in: cin,
            sum: BitVec::from_bits(&sum),
        }
    }

    /// Dot-operator levels, excluding preprocessing and the carry-in correction.
    pub fn depth(&self) -> u32 {
        self.levels.len() as u32 - 1
    }

    /// `P[w-1:0]`: every bit propagates, i.e. `a + b = 2^w - 1`.
    pub fn all_propagate(&self) -> bool {
        self.levels.last().unwrap().last().unwrap().p
    }

    /// One line per signal, `level.index g=<bit> p=<bit>`.
    pub fn trace(&self) -> String {
        let mut out = String::new();
        for (level, pairs) in self.levels.iter().enumerate() {
            for (index, gp) in pairs.iter().enumerate() {
                writeln!(out, "{level}.{index} g={} p={}", u8::from(gp.g), u8::from(gp.p)).unwrap();
            }
        }
        out
    }
}

/// `(a + b) mod (2^w - 1)` for any `w`-bit operands; may return the all-ones
/// alias of zero.
pub(crate) fn eac_add_raw(a: &BitVec, b: &BitVec) -> BitVec {
    PrefixAdder::evaluate(a, b, CarryIn::EndAround).sum
}

/// `(a + b) mod (2^w - 1)` in canonical form for any `w`-bit operands
/// (all-ones inputs are treated as zero).
pub(crate) fn eac_add(a: &BitVec, b: &BitVec) -> BitVec {
    canonicalize_m1(eac_add_raw(a, b))
}

/// Maps the all-ones alias of zero to all zeros (AND-tree detector + mux).
pub(crate) fn canonicalize_m1(x: BitVec) -> BitVec {
    if x.is_all_ones() {
        BitVec::zero(x.width())
    } else {
        x
    }
}

/// Plain binary addition; panics on carry out.
pub(crate) fn binary_add(a: &BitVec, b: &BitVec) -> BitVec {
    let adder = PrefixAdder::evaluate(a, b, CarryIn::Zero);
    assert!(!adder.carry_out, "binary adder overflow");
    adder.sum
}
