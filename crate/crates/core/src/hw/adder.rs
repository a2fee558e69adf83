//! Modulo `2^w - 1` and `2^w + 1` adders built on the prefix network.

use super::bits::{mask, BitVec};
use super::prefix::{canonicalize_m1, CarryIn, PrefixAdder};

/// `(a + b) mod (2^w - 1)` with end-around carry.
///
/// Operands are `w`-bit canonical residues (below `2^w - 1`); the output is
/// canonical too.
pub fn ppa_add_m1(a: &BitVec, b: &BitVec, w: u32) -> BitVec {
    check_m1_operand(a, w);
    check_m1_operand(b, w);
    canonicalize_m1(PrefixAdder::evaluate(a, b, CarryIn::EndAround).sum)
}

pub(crate) fn check_m1_operand(x: &BitVec, w: u32) {
    assert_eq!(x.width(), w, "mod 2^{w}-1 operand width");
    assert!(x.value() < mask(w), "non-canonical residue {} mod 2^{w}-1", x.value());
}

pub(crate) fn check_p1_operand(x: &BitVec, w: u32) {
    assert_eq!(x.width(), w + 1, "mod 2^{w}+1 operand width");
    assert!(x.value() <= 1 << w, "non-canonical residue {} mod 2^{w}+1", x.value());
}

/// Diminished-1 core: given `a - 1` and `b - 1` as `w`-bit words, returns
/// `(a + b) mod (2^w + 1) - 1` and a flag set when that sum is zero (which
/// the diminished-1 form cannot express).
///
/// `(a' + b' + 1) mod (2^w + 1) = (a' + b' + !cout) mod 2^w`.
pub fn diminished_one_add(a: &BitVec, b: &BitVec) -> (BitVec, bool) {
    let adder = PrefixAdder::evaluate(a, b, CarryIn::InvertedEndAround);
    let zero = adder.all_propagate();
    (adder.sum, zero)
}

/// `(a + b) mod (2^w + 1)` on normal-representation residues.
///
/// Operands are `(w+1)`-bit words with value at most `2^w`. A zero operand
/// bypasses the core; otherwise both are decremented into diminished-1 form,
/// added, and incremented back.
pub fn add_p1(a: &BitVec, b: &BitVec, w: u32) -> BitVec {
    check_p1_operand(a, w);
    check_p1_operand(b, w);
    if a.is_zero() {
        return *b;
    }
    if b.is_zero() {
        return *a;
    }
    let to_dim = |x: &BitVec| x.decrement().0.slice(0, w);
    let (sum, zero) = diminished_one_add(&to_dim(a), &to_dim(b));
    if zero {
        BitVec::zero(w + 1)
    } else {
        sum.resize(w + 1).increment().0
    }
}

/// `-x mod (2^w + 1)` for a normal-representation residue: the inverter gives
/// `2^w - 1 - x`, and adding 2 completes the negation.
pub fn neg_p1(x: &BitVec, w: u32) -> BitVec {
    check_p1_operand(x, w);
    if x.value() == 1 << w {
        return BitVec::new(1, w + 1);
    }
    let inverted = x.slice(0, w).not().resize(w + 1);
    add_p1(&inverted, &BitVec::new(2, w + 1), w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m1_examples() {
        let v = |x| BitVec::new(x, 7);
        assert_eq!(ppa_add_m1(&v(0), &v(0), 7).value(), 0);
        assert_eq!(ppa_add_m1(&v(126), &v(1), 7).value(), 0);
        assert_eq!(ppa_add_m1(&v(126), &v(126), 7).value(), 125);
        assert_eq!(ppa_add_m1(&v(100), &v(27), 7).value(), 0);
        assert_eq!(ppa_add_m1(&v(100), &v(28), 7).value(), 1);
    }

    #[test]
    fn m1_exhaustive_small_widths() {
        for w in 2..=8 {
            let m = (1 << w) - 1;
            for a in 0..m {
                for b in 0..m {
                    let s = ppa_add_m1(&BitVec::new(a, w), &BitVec::new(b, w), w);
                    assert_eq!(s.value(), (a + b) % m, "w={w} {a}+{b}");
                }
            }
        }
    }

    #[test]
    fn p1_examples() {
        let v = |x| BitVec::new(x, 8);
        for x in [0, 1, 64, 128] {
            assert_eq!(add_p1(&v(0), &v(x), 7).value(), x);
        }
        assert_eq!(add_p1(&v(128), &v(128), 7).value(), 127);
        assert_eq!(add_p1(&v(128), &v(1), 7).value(), 0);
        assert_eq!(add_p1(&v(100), &v(29), 7).value(), 0);
        assert_eq!(add_p1(&v(100), &v(28), 7).value(), 128);
    }

    #[test]
    fn p1_exhaustive_small_widths() {
        for w in 2..=7 {
            let m = (1 << w) + 1;
            for a in 0..m {
                for b in 0..m {
                    let s = add_p1(&BitVec::new(a, w + 1), &BitVec::new(b, w + 1), w);
                    assert_eq!(s.value(), (a + b) % m, "w={w} {a}+{b}");
                }
            }
        }
    }

    #[test]
    fn neg_p1_all_residues() {
        for w in 2..=8 {
            let m = (1u64 << w) + 1;
            for x in 0..m {
                assert_eq!(neg_p1(&BitVec::new(x, w + 1), w).value(), (m - x) % m);
            }
        }
    }

    #[test]
    #[should_panic(expected = "non-canonical")]
    fn m1_rejects_all_ones() {
        ppa_add_m1(&BitVec::new(127, 7), &BitVec::zero(7), 7);
    }

    #[test]
    #[should_panic(expected = "non-canonical")]
    fn p1_rejects_out_of_range() {
        add_p1(&BitVec::new(130, 8), &BitVec::zero(8), 7);
    }
}
