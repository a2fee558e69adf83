//! Parity-based comparison.
//!
//! With `M` odd, `A - B mod M` is `A - B` when `A >= B` and `M + A - B`
//! otherwise, and those two have opposite parities. So `A >= B` exactly when
//! `parity(A - B mod M) == parity(A) ^ parity(B)`, and parity itself can be
//! read off the two pair reconstructions without a full decode.

use super::{ModuliSet, RnsError, RnsInt};

impl ModuliSet {
    /// `x mod 2`, for consistent tuples. The result for a tuple with no
    /// preimage is unspecified (detecting that needs a full decode).
    pub fn parity(&self, x: &RnsInt) -> bool {
        let (diff, high) = self.pair_difference(x);
        ((high ^ diff) & 1) == 1
    }

    /// Unsigned `decode(a) >= decode(b)`.
    pub fn compare_ge(&self, a: &RnsInt, b: &RnsInt) -> bool {
        let c = self.sub(a, b);
        self.parity(&c) == (self.parity(a) ^ self.parity(b))
    }

    /// Signed `a >= b` under the wrap-around interpretation: both operands
    /// are shifted by `(M-1)/2` into `[0, M)` and compared unsigned.
    pub fn compare_signed_ge(&self, a: &RnsInt, b: &RnsInt) -> bool {
        let offset = self.relu_constants().0;
        self.compare_ge(&self.add(a, &offset), &self.add(b, &offset))
    }

    /// Returns `x` when it reads as non-negative (`x <= (M-1)/2`), else zero.
    ///
    /// Half comparator against the fixed threshold `T = (M+1)/2`: only
    /// `x + (-T)` and `parity(x)` are computed at runtime; `-T` and
    /// `parity(T)` are constants of the moduli set.
    pub fn relu(&self, x: &RnsInt) -> RnsInt {
        let (neg_threshold, threshold_parity) = self.relu_constants();
        let c = self.add(x, &neg_threshold);
        let negative = self.parity(&c) == (self.parity(x) ^ threshold_parity);
        if negative {
            RnsInt::ZERO
        } else {
            *x
        }
    }

    /// Index of the largest signed value; ties go to the lowest index.
    pub fn argmax(&self, xs: &[RnsInt]) -> Result<usize, RnsError> {
        let (first, rest) = xs.split_first().ok_or(RnsError::EmptyArgmax)?;
        let mut best = (0, first);
        for (i, x) in rest.iter().enumerate() {
            if !self.compare_signed_ge(best.1, x) {
                best = (i + 1, x);
            }
        }
        Ok(best.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(n: u32) -> ModuliSet {
        ModuliSet::new(n).unwrap()
    }

    #[test]
    fn parity_examples() {
        let ms7 = ms(7);
        assert!(!ms7.parity(&RnsInt::ZERO));
        let top = ms7.encode(357_886_634).unwrap();
        assert!(!ms7.parity(&top));
        assert!(ms7.parity(&ms7.encode(357_886_633).unwrap()));
    }

    #[test]
    fn parity_exhaustive_small_n() {
        for n in 2..=4 {
            let ms = ms(n);
            for x in 0..ms.range() {
                assert_eq!(ms.parity(&ms.encode(x).unwrap()), x & 1 == 1, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn compare_examples() {
        let ms7 = ms(7);
        let (a, b) = (ms7.encode(7).unwrap(), ms7.encode(3).unwrap());
        assert!(ms7.compare_ge(&a, &b));
        assert!(!ms7.compare_ge(&b, &a));
        assert!(ms7.compare_ge(&a, &a));
        let top = ms7.encode(ms7.range() - 1).unwrap();
        assert!(ms7.compare_ge(&top, &RnsInt::ZERO));
        assert!(!ms7.compare_ge(&RnsInt::ZERO, &top));
    }

    #[test]
    fn compare_exhaustive_n2() {
        let ms2 = ms(2);
        let enc: Vec<_> = (0..315).map(|x| ms2.encode(x).unwrap()).collect();
        for a in 0..315 {
            for b in 0..315 {
                assert_eq!(ms2.compare_ge(&enc[a], &enc[b]), a >= b, "{a} >= {b}");
            }
        }
    }

    #[test]
    fn relu_examples() {
        let ms7 = ms(7);
        assert_eq!(ms7.relu(&RnsInt::ZERO), RnsInt::ZERO);
        assert_eq!(ms7.relu(&ms7.encode_signed(-3).unwrap()), RnsInt::ZERO);
        let p = ms7.encode(ms7.pos_max()).unwrap();
        assert_eq!(ms7.relu(&p), p);
        assert_eq!(ms7.relu(&ms7.encode(ms7.pos_max() + 1).unwrap()), RnsInt::ZERO);
    }

    #[test]
    fn relu_exhaustive_signed_small_n() {
        for n in 2..=3 {
            let ms = ms(n);
            let p = ms.pos_max() as i64;
            for v in -p..=p {
                let r = ms.relu(&ms.encode_signed(v).unwrap());
                assert_eq!(ms.decode_signed(&r).unwrap(), v.max(0), "n={n} v={v}");
            }
        }
    }

    #[test]
    fn argmax_examples() {
        let ms7 = ms(7);
        let e = |v: i64| ms7.encode_signed(v).unwrap();
        assert_eq!(ms7.argmax(&[e(5)]).unwrap(), 0);
        assert_eq!(ms7.argmax(&[e(3), e(3)]).unwrap(), 0);
        assert_eq!(ms7.argmax(&[e(-4), e(-2), e(-9)]).unwrap(), 1);
        assert_eq!(ms7.argmax(&[e(1), e(-100), e(7), e(7)]).unwrap(), 2);
        assert_eq!(ms7.argmax(&[]), Err(RnsError::EmptyArgmax));
    }

    #[test]
    fn signed_compare_exhaustive_n2() {
        let ms2 = ms(2);
        for a in -157..=157i64 {
            for b in -157..=157i64 {
                let (x, y) = (ms2.encode_signed(a).unwrap(), ms2.encode_signed(b).unwrap());
                assert_eq!(ms2.compare_signed_ge(&x, &y), a >= b);
            }
        }
    }
}
