//! Modulo multipliers: partial-product generation, a modulo carry-save tree
//! down to a redundant `(P_C, P_S)` pair, and a final modulo adder.

use super::adder::{add_p1, check_m1_operand, check_p1_operand, neg_p1};
use super::bits::BitVec;
use super::prefix::eac_add;

/// Carry and sum words whose modular sum is the product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RedundantProduct {
    pub pc: BitVec,
    pub ps: BitVec,
}

/// Shape of the reduction tree for one multiplication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CsaStats {
    pub compressors: u32,
    pub depth: u32,
}

/// Wraps the carry word's MSB back into bit 0 of the shifted carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Wrap {
    /// `2^w = 1 (mod 2^w - 1)`: plain rotation.
    Direct,
    /// `2^w = -1 (mod 2^w + 1)`: the MSB enters inverted, adding a constant 1.
    Inverted,
}

/// 3:2 compressor across `w` bit columns with modular carry wiring.
fn csa(a: &BitVec, b: &BitVec, c: &BitVec, wrap: Wrap) -> (BitVec, BitVec) {
    let w = a.width();
    let mut sum = Vec::with_capacity(w as usize);
    let mut carry = Vec::with_capacity(w as usize);
    for i in 0..w {
        let (x, y, z) = (a.bit(i), b.bit(i), c.bit(i));
        sum.push(x ^ y ^ z);
        carry.push((x & y) | (x & z) | (y & z));
    }
    let top = carry[w as usize - 1];
    let wrapped = match wrap {
        Wrap::Direct => top,
        Wrap::Inverted => !top,
    };
    let shifted: Vec<bool> = std::iter::once(wrapped)
        .chain(carry[..w as usize - 1].iter().copied())
        .collect();
    (BitVec::from_bits(&shifted), BitVec::from_bits(&sum))
}

/// Balanced (Wallace-style) reduction: each level compresses every full
/// group of three words into two, passing leftovers through.
fn csa_tree(mut words: Vec<BitVec>, wrap: Wrap) -> (RedundantProduct, CsaStats) {
    assert!(words.len() >= 2);
    let mut stats = CsaStats::default();
    while words.len() > 2 {
        let mut next = Vec::with_capacity(words.len() * 2 / 3 + 2);
        let mut chunks = words.chunks_exact(3);
        for t in &mut chunks {
            let (c, s) = csa(&t[0], &t[1], &t[2], wrap);
            next.push(c);
            next.push(s);
            stats.compressors += 1;
        }
        next.extend_from_slice(chunks.remainder());
        words = next;
        stats.depth += 1;
    }
    (
        RedundantProduct {
            pc: words[0],
            ps: words[1],
        },
        stats,
    )
}

/// Partial products mod `2^w - 1`: `x_i ? (y <<< i) : 0`.
pub fn partial_products_m1(x: &BitVec, y: &BitVec) -> Vec<BitVec> {
    let w = x.width();
    (0..w)
        .map(|i| if x.bit(i) { y.rotl(i) } else { BitVec::zero(w) })
        .collect()
}

/// Multiplies mod `2^w - 1` into redundant form.
pub fn mul_m1(x: &BitVec, y: &BitVec, w: u32) -> RedundantProduct {
    mul_m1_with_stats(x, y, w).0
}

pub fn mul_m1_with_stats(x: &BitVec, y: &BitVec, w: u32) -> (RedundantProduct, CsaStats) {
    check_m1_operand(x, w);
    check_m1_operand(y, w);
    csa_tree(partial_products_m1(x, y), Wrap::Direct)
}

/// Final end-around-carry addition of the redundant pair, canonical output.
pub fn finalize_m1(p: &RedundantProduct) -> BitVec {
    eac_add(&p.pc, &p.ps)
}

/// Partial product `i` mod `2^w + 1` for `y < 2^w`:
/// `x_i = 1` gives `y_{w-i-1}..y_0` followed by `!y_{w-1}..!y_{w-i}` (the
/// low `i` bits), `x_i = 0` gives `2^i - 1`. Either way the word exceeds the
/// true contribution `x_i * 2^i * y` by `2^i - 1`.
pub fn partial_product_p1(x_bit: bool, y: &BitVec, i: u32) -> BitVec {
    let w = y.width();
    let bits: Vec<bool> = (0..w)
        .map(|j| {
            if x_bit {
                if j < i {
                    !y.bit(w - i + j)
                } else {
                    y.bit(j - i)
                }
            } else {
                j < i
            }
        })
        .collect();
    BitVec::from_bits(&bits)
}

/// Constant word fed into the mod `2^w + 1` tree. The `w` partial products
/// carry a surplus of `sum(2^i - 1) = 2^w - 1 - w` and each of the `w - 1`
/// compressors one more from its inverted wrap; `3` brings the total to
/// `2^w + 2 = 0 (mod 2^w + 1)`.
pub const P1_CORRECTION: u64 = 3;

/// Multiplies mod `2^w + 1` into redundant form. Operands are `(w+1)`-bit
/// normal-representation residues; the output words are `(w+1)` bits wide so
/// that [`add_p1`] can finalize them.
///
/// An operand equal to `2^w` (i.e. `-1`) does not fit the `w`-bit partial
/// product generator and is bypassed through a negation.
pub fn mul_p1(x: &BitVec, y: &BitVec, w: u32) -> RedundantProduct {
    mul_p1_with_stats(x, y, w).0
}

pub fn mul_p1_with_stats(x: &BitVec, y: &BitVec, w: u32) -> (RedundantProduct, CsaStats) {
    check_p1_operand(x, w);
    check_p1_operand(y, w);
    let minus_one = 1u64 << w;
    let bypass = match (x.value() == minus_one, y.value() == minus_one) {
        (true, true) => Some(BitVec::new(1, w + 1)),
        (true, false) => Some(neg_p1(y, w)),
        (false, true) => Some(neg_p1(x, w)),
        (false, false) => None,
    };
    if let Some(p) = bypass {
        let rp = RedundantProduct {
            pc: p,
            ps: BitVec::zero(w + 1),
        };
        return (rp, CsaStats::default());
    }
    let (x, y) = (x.slice(0, w), y.slice(0, w));
    let mut words: Vec<BitVec> = (0..w).map(|i| partial_product_p1(x.bit(i), &y, i)).collect();
    words.push(BitVec::new(P1_CORRECTION, w));
    let (rp, stats) = csa_tree(words, Wrap::Inverted);
    debug_assert_eq!(stats.compressors, w - 1);
    let rp = RedundantProduct {
        pc: rp.pc.resize(w + 1),
        ps: rp.ps.resize(w + 1),
    };
    (rp, stats)
}

pub fn finalize_p1(p: &RedundantProduct, w: u32) -> BitVec {
    add_p1(&p.pc, &p.ps, w)
}
