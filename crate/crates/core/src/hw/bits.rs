/// Fixed-width bit vector, bit 0 = LSB. Widths up to 63 bits.
///
/// Circuit code reads and writes individual bits through [`BitVec::bit`] and
/// [`BitVec::from_bits`]; the packed word is only a storage detail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitVec {
    width: u32,
    word: u64,
}

impl BitVec {
    pub const MAX_WIDTH: u32 = 63;

    /// Panics if `value` does not fit in `width` bits.
    pub fn new(value: u64, width: u32) -> Self {
        assert!(
            (1..=Self::MAX_WIDTH).contains(&width),
            "bit width {width} outside 1..={}",
            Self::MAX_WIDTH
        );
        assert!(value >> width == 0, "value {value} does not fit in {width} bits");
        BitVec { width, word: value }
    }

    pub fn zero(width: u32) -> Self {
        Self::new(0, width)
    }

    pub fn ones(width: u32) -> Self {
        Self::new(mask(width), width)
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let word = bits
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &b)| acc | (u64::from(b) << i));
        Self::new(word, bits.len() as u32)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn value(&self) -> u64 {
        self.word
    }

    pub fn bit(&self, i: u32) -> bool {
        assert!(i < self.width, "bit {i} out of width {}", self.width);
        (self.word >> i) & 1 == 1
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.width).map(move |i| self.bit(i))
    }

    pub fn is_all_ones(&self) -> bool {
        self.bits().all(|b| b)
    }

    pub fn is_zero(&self) -> bool {
        self.bits().all(|b| !b)
    }

    /// Bitwise inverter.
    pub fn not(&self) -> Self {
        Self::from_bits(&self.bits().map(|b| !b).collect::<Vec<_>>())
    }

    /// Circular left rotation (wiring only).
    pub fn rotl(&self, k: u32) -> Self {
        let w = self.width;
        let k = k % w;
        let bits: Vec<bool> = (0..w).map(|i| self.bit((i + w - k) % w)).collect();
        Self::from_bits(&bits)
    }

    pub fn rotr(&self, k: u32) -> Self {
        self.rotl(self.width - k % self.width)
    }

    /// Bits `[lo, lo + len)` as a new vector.
    pub fn slice(&self, lo: u32, len: u32) -> Self {
        let bits: Vec<bool> = (lo..lo + len).map(|i| self.bit(i)).collect();
        Self::from_bits(&bits)
    }

    /// Zero-extends (or truncates high zero bits) to `width`.
    pub fn resize(&self, width: u32) -> Self {
        let bits: Vec<bool> = (0..width).map(|i| i < self.width && self.bit(i)).collect();
        let out = Self::from_bits(&bits);
        assert_eq!(out.value(), self.word, "resize to {width} bits drops set bits");
        out
    }

    /// `high` placed above `self`.
    pub fn concat(&self, high: &BitVec) -> Self {
        let bits: Vec<bool> = self.bits().chain(high.bits()).collect();
        Self::from_bits(&bits)
    }

    /// Ripple incrementer; returns the sum and the carry out.
    pub fn increment(&self) -> (Self, bool) {
        let mut carry = true;
        let bits: Vec<bool> = self
            .bits()
            .map(|b| {
                let s = b ^ carry;
                carry &= b;
                s
            })
            .collect();
        (Self::from_bits(&bits), carry)
    }

    /// Ripple decrementer; returns the difference and the borrow out.
    pub fn decrement(&self) -> (Self, bool) {
        let mut borrow = true;
        let bits: Vec<bool> = self
            .bits()
            .map(|b| {
                let d = b ^ borrow;
                borrow &= !b;
                d
            })
            .collect();
        (Self::from_bits(&bits), borrow)
    }
}

impl std::fmt::Display for BitVec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in (0..self.width).rev() {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

pub(crate) fn mask(width: u32) -> u64 {
    (1u64 << width) - 1
}
