use super::{ModuliSet, RnsError, RnsInt};

impl ModuliSet {
    pub fn encode(&self, x: u64) -> Result<RnsInt, RnsError> {
        if x >= self.range() {
            return Err(RnsError::OutOfRange {
                value: x,
                range: self.range(),
                n: self.n(),
            });
        }
        Ok(self.encode_unchecked(x))
    }

    pub(crate) fn encode_unchecked(&self, x: u64) -> RnsInt {
        let [m1, m1s, m2, m2s] = self.moduli();
        RnsInt {
            r1: (x % m1) as u32,
            r1s: (x % m1s) as u32,
            r2: (x % m2) as u32,
            r2s: (x % m2s) as u32,
        }
    }

    /// Reconstructs `x mod (2^2n - 1)` from `(r1, r1s)`.
    ///
    /// `2^n + 1 = 2 (mod 2^n - 1)`, whose inverse is `2^(n-1)`.
    pub(crate) fn low_pair_value(&self, x: &RnsInt) -> u64 {
        let [m1, m1s, _, _] = self.moduli();
        let r1s = u64::from(x.r1s);
        let diff = (u64::from(x.r1) + m1 - r1s % m1) % m1;
        let k = (diff << (self.n() - 1)) % m1;
        r1s + m1s * k
    }

    /// Reconstructs `x mod (2^(2n+2) - 1)` from `(r2, r2s)`; the inverse of
    /// `2^(n+1) + 1` mod `2^(n+1) - 1` is `2^n`.
    pub(crate) fn high_pair_value(&self, x: &RnsInt) -> u64 {
        let [_, _, m2, m2s] = self.moduli();
        let r2s = u64::from(x.r2s);
        let diff = (u64::from(x.r2) + m2 - r2s % m2) % m2;
        let k = (diff << self.n()) % m2;
        r2s + m2s * k
    }

    /// `(X1 - X2) mod (2^2n - 1)`; a multiple of 3 exactly when the tuple is consistent.
    pub(crate) fn pair_difference(&self, x: &RnsInt) -> (u64, u64) {
        let a = self.low_pair();
        let low = self.low_pair_value(x);
        let high = self.high_pair_value(x);
        ((low + a - high % a) % a, high)
    }

    /// Converts back to binary. Used as a test oracle and by the CLI; the
    /// inference path never decodes intermediate values.
    ///
    /// `x = X2 + (2^(2n+2) - 1) * t` with `3t = (X1 - X2) mod (2^2n - 1)`.
    pub fn decode(&self, x: &RnsInt) -> Result<u64, RnsError> {
        self.check_canonical(x)?;
        let (diff, high) = self.pair_difference(x);
        if diff % 3 != 0 {
            return Err(RnsError::Inconsistent(*x));
        }
        Ok(high + self.high_pair() * (diff / 3))
    }

    pub fn encode_signed(&self, v: i64) -> Result<RnsInt, RnsError> {
        if v.unsigned_abs() > self.pos_max() {
            return Err(RnsError::SignedOutOfRange {
                value: v,
                pos_max: self.pos_max(),
                n: self.n(),
            });
        }
        let x = if v < 0 {
            self.range() - v.unsigned_abs()
        } else {
            v as u64
        };
        Ok(self.encode_unchecked(x))
    }

    pub fn decode_signed(&self, x: &RnsInt) -> Result<i64, RnsError> {
        let u = self.decode(x)?;
        Ok(if u > self.pos_max() {
            u as i64 - self.range() as i64
        } else {
            u as i64
        })
    }

    fn zip_with(&self, a: &RnsInt, b: &RnsInt, f: impl Fn(u64, u64, u64) -> u64) -> RnsInt {
        let [m1, m1s, m2, m2s] = self.moduli();
        let g = |x: u32, y: u32, m: u64| f(u64::from(x), u64::from(y), m) as u32;
        RnsInt {
            r1: g(a.r1, b.r1, m1),
            r1s: g(a.r1s, b.r1s, m1s),
            r2: g(a.r2, b.r2, m2),
            r2s: g(a.r2s, b.r2s, m2s),
        }
    }

    pub fn add(&self, a: &RnsInt, b: &RnsInt) -> RnsInt {
        self.zip_with(a, b, |x, y, m| (x + y) % m)
    }

    pub fn sub(&self, a: &RnsInt, b: &RnsInt) -> RnsInt {
        self.zip_with(a, b, |x, y, m| (x + m - y) % m)
    }

    pub fn neg(&self, a: &RnsInt) -> RnsInt {
        self.sub(&RnsInt::ZERO, a)
    }

    pub fn mul(&self, a: &RnsInt, b: &RnsInt) -> RnsInt {
        self.zip_with(a, b, |x, y, m| x * y % m)
    }

    /// `acc + a * b`, the MAC step.
    pub fn mac(&self, acc: &RnsInt, a: &RnsInt, b: &RnsInt) -> RnsInt {
        self.zip_with(acc, &self.mul(a, b), |x, y, m| (x + y) % m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(n: u32) -> ModuliSet {
        ModuliSet::new(n).unwrap()
    }

    /// Linear scan of `[0, M)` for the preimage of a residue tuple.
    fn brute_force_decode(ms: &ModuliSet, r: [u32; 4]) -> Option<u64> {
        let m = ms.moduli();
        (0..ms.range()).find(|x| (0..4).all(|i| x % m[i] == u64::from(r[i])))
    }

    #[test]
    fn encode_examples() {
        let ms7 = ms(7);
        assert_eq!(ms7.encode(0).unwrap(), RnsInt::ZERO);
        assert_eq!(ms7.encode(100).unwrap().to_array(), [100; 4]);
        assert_eq!(ms7.encode(300).unwrap().to_array(), [46, 42, 45, 43]);
        assert!(matches!(ms7.encode(357_886_635), Err(RnsError::OutOfRange { .. })));
    }

    #[test]
    fn decode_examples() {
        let ms7 = ms(7);
        assert_eq!(ms7.decode(&RnsInt::ZERO).unwrap(), 0);
        let top = ms7.encode(357_886_634).unwrap();
        assert_eq!(ms7.decode(&top).unwrap(), 357_886_634);

        let ms2 = ms(2);
        let oracle = brute_force_decode(&ms2, [1, 2, 3, 4]).unwrap();
        assert_eq!(oracle, 157);
        let r = ms2.residues(1, 2, 3, 4).unwrap();
        assert_eq!(ms2.decode(&r).unwrap(), oracle);
    }

    #[test]
    fn decode_rejects_every_inconsistent_tuple_at_n2() {
        let ms2 = ms(2);
        let mut consistent = 0;
        for a in 0..3 {
            for b in 0..5 {
                for c in 0..7 {
                    for d in 0..9 {
                        let r = ms2.residues(a, b, c, d).unwrap();
                        match (ms2.decode(&r), brute_force_decode(&ms2, [a, b, c, d])) {
                            (Ok(x), Some(y)) => {
                                assert_eq!(x, y);
                                consistent += 1;
                            }
                            (Err(RnsError::Inconsistent(_)), None) => {}
                            other => panic!("{:?} -> {:?}", r, other),
                        }
                    }
                }
            }
        }
        assert_eq!(consistent, 315);
    }

    #[test]
    fn decode_rejects_non_canonical() {
        let ms7 = ms(7);
        let bad = RnsInt {
            r1: 127,
            r1s: 0,
            r2: 0,
            r2s: 0,
        };
        assert!(matches!(ms7.decode(&bad), Err(RnsError::NonCanonical { .. })));
        assert!(ms7.residues(0, 129, 0, 0).is_err());
    }

    #[test]
    fn signed_examples() {
        let ms7 = ms(7);
        let m = ms7.range();
        assert_eq!(ms7.encode_signed(-1).unwrap(), ms7.encode(m - 1).unwrap());
        assert_eq!(ms7.decode_signed(&ms7.encode(m - 5).unwrap()).unwrap(), -5);

        let ms2 = ms(2);
        assert_eq!(ms2.decode_signed(&ms2.encode(157).unwrap()).unwrap(), 157);
        assert_eq!(ms2.decode_signed(&ms2.encode(158).unwrap()).unwrap(), -157);
        assert!(ms2.encode_signed(158).is_err());
        assert!(ms2.encode_signed(-158).is_err());
        for v in -157..=157 {
            assert_eq!(ms2.decode_signed(&ms2.encode_signed(v).unwrap()).unwrap(), v);
        }
    }

    #[test]
    fn ring_examples() {
        let ms2 = ms(2);
        let p = ms2.mul(&ms2.encode(20).unwrap(), &ms2.encode(30).unwrap());
        assert_eq!(p, ms2.encode(600 % 315).unwrap());
        assert_eq!(ms2.decode(&p).unwrap(), 285);

        let ms7 = ms(7);
        let x = ms7.encode(12345).unwrap();
        assert_eq!(ms7.add(&x, &RnsInt::ZERO), x);
        let p = ms7.mul(&ms7.encode(50_000).unwrap(), &ms7.encode(40_000).unwrap());
        let expected = 50_000u64 * 40_000 % 357_886_635;
        assert_eq!(expected, 210_566_825);
        assert_eq!(ms7.decode(&p).unwrap(), expected);
        assert_eq!(ms7.decode(&ms7.neg(&x)).unwrap(), 357_886_635 - 12345);
        assert_eq!(ms7.neg(&RnsInt::ZERO), RnsInt::ZERO);
    }

    #[test]
    fn mac_matches_add_mul() {
        let ms7 = ms(7);
        let (a, b, c) = (ms7.encode(9).unwrap(), ms7.encode(11).unwrap(), ms7.encode(5).unwrap());
        assert_eq!(ms7.mac(&c, &a, &b), ms7.add(&c, &ms7.mul(&a, &b)));
        assert_eq!(ms7.decode(&ms7.mac(&c, &a, &b)).unwrap(), 104);
    }
}
