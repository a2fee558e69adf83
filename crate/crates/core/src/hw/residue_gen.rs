//! Forward conversion by periodic folding.
//!
//! Modulo `2^k - 1` the binary weights repeat every `k` bits, so the input is
//! cut into `k`-bit chunks that are summed by a tree of end-around-carry
//! adders. Modulo `2^k + 1` the weight of every other chunk is `-1`; those
//! chunks enter inverted (`-c = !c + 2`) and a constant word absorbs the `+2`s.

use super::adder::add_p1;
use super::bits::BitVec;
use super::prefix::eac_add;
use crate::rns::ModuliSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModulusKind {
    /// `2^n - 1`
    M1,
    /// `2^n + 1`
    M1s,
    /// `2^(n+1) - 1`
    M2,
    /// `2^(n+1) + 1`
    M2s,
}

impl ModulusKind {
    pub const ALL: [ModulusKind; 4] = [Self::M1, Self::M1s, Self::M2, Self::M2s];

    /// The `k` in `2^k -/+ 1`.
    pub fn exponent(self, ms: &ModuliSet) -> u32 {
        match self {
            Self::M1 | Self::M1s => ms.n(),
            Self::M2 | Self::M2s => ms.n() + 1,
        }
    }

    pub fn is_plus_one(self) -> bool {
        matches!(self, Self::M1s | Self::M2s)
    }

    pub fn modulus(self, ms: &ModuliSet) -> u64 {
        let k = self.exponent(ms);
        if self.is_plus_one() {
            (1 << k) + 1
        } else {
            (1 << k) - 1
        }
    }

    /// Width of a canonical residue.
    pub fn residue_width(self, ms: &ModuliSet) -> u32 {
        self.exponent(ms) + u32::from(self.is_plus_one())
    }
}

/// Reduces words pairwise with `op` until one remains.
fn adder_tree(mut words: Vec<BitVec>, op: impl Fn(&BitVec, &BitVec) -> BitVec) -> BitVec {
    while words.len() > 1 {
        words = words
            .chunks(2)
            .map(|pair| match pair {
                [a, b] => op(a, b),
                [a] => *a,
                _ => unreachable!(),
            })
            .collect();
    }
    words[0]
}

/// `x mod m` for a `bits(M)`-wide binary input.
pub fn residue_gen(x: &BitVec, kind: ModulusKind, ms: &ModuliSet) -> BitVec {
    assert_eq!(
        x.width(),
        ms.value_bits(),
        "residue generator input must be {} bits",
        ms.value_bits()
    );
    let k = kind.exponent(ms);
    let chunks: Vec<BitVec> = (0..x.width())
        .step_by(k as usize)
        .map(|lo| x.slice(lo, k.min(x.width() - lo)).resize(k))
        .collect();
    if !kind.is_plus_one() {
        return adder_tree(chunks, eac_add);
    }
    let mut negated = 0u64;
    let mut words: Vec<BitVec> = chunks
        .iter()
        .enumerate()
        .map(|(j, c)| {
            if j % 2 == 1 {
                negated += 1;
                c.not().resize(k + 1)
            } else {
                c.resize(k + 1)
            }
        })
        .collect();
    let m = kind.modulus(ms);
    let correction = 2 * negated % m;
    if correction != 0 {
        words.push(BitVec::new(correction, k + 1));
    }
    adder_tree(words, |a, b| add_p1(a, b, k))
}
