use super::{RnsError, RnsInt};

/// Smallest supported `n`; `n = 1` would make `2^n - 1 = 1`.
pub const MIN_N: u32 = 2;
/// Largest supported `n`. Keeps `M < 2^62` and every intermediate inside `u64`.
pub const MAX_N: u32 = 15;

/// The conjugate moduli set for a given `n`, with its derived constants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuliSet {
    n: u32,
    m1: u64,
    m1s: u64,
    m2: u64,
    m2s: u64,
    /// `2^2n - 1 = m1 * m1s`
    low_pair: u64,
    /// `2^(2n+2) - 1 = m2 * m2s`
    high_pair: u64,
    range: u64,
    pos_max: u64,
    /// Half-comparator constants: `-(M+1)/2` in residue form and the parity of `(M+1)/2`.
    relu_neg_threshold: RnsInt,
    relu_threshold_parity: bool,
}

impl ModuliSet {
    pub fn new(n: u32) -> Result<Self, RnsError> {
        if !(MIN_N..=MAX_N).contains(&n) {
            return Err(RnsError::InvalidParameter { n });
        }
        let p = 1u64 << n;
        let low_pair = (1u64 << (2 * n)) - 1;
        let high_pair = (1u64 << (2 * n + 2)) - 1;
        // gcd(2^2n - 1, 2^(2n+2) - 1) = 2^gcd(2n, 2n+2) - 1 = 3
        let range = low_pair * (high_pair / 3);
        let pos_max = (range - 1) / 2;
        let mut ms = ModuliSet {
            n,
            m1: p - 1,
            m1s: p + 1,
            m2: 2 * p - 1,
            m2s: 2 * p + 1,
            low_pair,
            high_pair,
            range,
            pos_max,
            relu_neg_threshold: RnsInt::ZERO,
            relu_threshold_parity: false,
        };
        // M - (M+1)/2 = (M-1)/2
        ms.relu_neg_threshold = ms.encode_unchecked(pos_max);
        ms.relu_threshold_parity = (pos_max + 1) & 1 == 1;
        Ok(ms)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// `(2^n - 1, 2^n + 1, 2^(n+1) - 1, 2^(n+1) + 1)`
    pub fn moduli(&self) -> [u64; 4] {
        [self.m1, self.m1s, self.m2, self.m2s]
    }

    /// Dynamic range `M`; representable values are `[0, M)`.
    pub fn range(&self) -> u64 {
        self.range
    }

    /// `(M - 1) / 2`, the largest value read as non-negative.
    pub fn pos_max(&self) -> u64 {
        self.pos_max
    }

    /// Bits needed per residue: `(n, n+1, n+1, n+2)`.
    pub fn residue_bits(&self) -> [u32; 4] {
        [self.n, self.n + 1, self.n + 1, self.n + 2]
    }

    pub fn packed_bits(&self) -> u32 {
        self.residue_bits().iter().sum()
    }

    /// Bit width of a binary value in `[0, M)`.
    pub fn value_bits(&self) -> u32 {
        64 - (self.range - 1).leading_zeros()
    }

    pub(crate) fn low_pair(&self) -> u64 {
        self.low_pair
    }

    pub(crate) fn high_pair(&self) -> u64 {
        self.high_pair
    }

    pub(crate) fn relu_constants(&self) -> (RnsInt, bool) {
        (self.relu_neg_threshold, self.relu_threshold_parity)
    }

    /// Builds a residue tuple, checking canonical form.
    pub fn residues(&self, r1: u32, r1s: u32, r2: u32, r2s: u32) -> Result<RnsInt, RnsError> {
        let x = RnsInt { r1, r1s, r2, r2s };
        self.check_canonical(&x)?;
        Ok(x)
    }

    pub fn check_canonical(&self, x: &RnsInt) -> Result<(), RnsError> {
        for (r, m) in x.to_array().into_iter().zip(self.moduli()) {
            if u64::from(r) >= m {
                return Err(RnsError::NonCanonical {
                    residue: r,
                    modulus: m as u32,
                });
            }
        }
        Ok(())
    }
}
