//! Word-level residue number system over the conjugate moduli set
//! `{2^n - 1, 2^n + 1, 2^(n+1) - 1, 2^(n+1) + 1}`.
//!
//! The four moduli are not pairwise coprime: `2^2n - 1` and `2^(2n+2) - 1`
//! share exactly the factor 3, so the dynamic range is
//! `M = (2^2n - 1)(2^(2n+2) - 1) / 3`. Everything here works on the two
//! "pair" moduli `2^2n - 1 = m1 * m1s` and `2^(2n+2) - 1 = m2 * m2s`, which
//! is also what the parity network does in hardware.
//!
//! Values are unsigned in `[0, M)`. The signed view treats
//! `[0, (M-1)/2]` as non-negative and `[(M+1)/2, M)` as `v - M`.

mod arith;
mod compare;
mod moduli;

pub use moduli::{ModuliSet, MAX_N, MIN_N};

use thiserror::Error;

/// One integer in residue form: `(x mod m1, x mod m1s, x mod m2, x mod m2s)`.
///
/// Canonical form (each residue strictly below its modulus) is a
/// precondition of every operation; use [`ModuliSet::residues`] to build a
/// checked value from raw residues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct RnsInt {
    /// Residue mod `2^n - 1`.
    pub r1: u32,
    /// Residue mod `2^n + 1`.
    pub r1s: u32,
    /// Residue mod `2^(n+1) - 1`.
    pub r2: u32,
    /// Residue mod `2^(n+1) + 1`.
    pub r2s: u32,
}

impl RnsInt {
    pub const ZERO: RnsInt = RnsInt {
        r1: 0,
        r1s: 0,
        r2: 0,
        r2s: 0,
    };

    pub fn to_array(self) -> [u32; 4] {
        [self.r1, self.r1s, self.r2, self.r2s]
    }
}

impl std::fmt::Display for RnsInt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {}, {})", self.r1, self.r1s, self.r2, self.r2s)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RnsError {
    #[error("invalid moduli parameter n = {n}: must be in [{MIN_N}, {MAX_N}]")]
    InvalidParameter { n: u32 },
    #[error("value {value} out of range [0, {range}) for n = {n}")]
    OutOfRange { value: u64, range: u64, n: u32 },
    #[error("signed value {value} out of range [-{pos_max}, {pos_max}] for n = {n}")]
    SignedOutOfRange { value: i64, pos_max: u64, n: u32 },
    #[error("residue {residue} is not below its modulus {modulus}")]
    NonCanonical { residue: u32, modulus: u32 },
    #[error("inconsistent residues {0}: no integer has this residue tuple")]
    Inconsistent(RnsInt),
    #[error("argmax of an empty sequence")]
    EmptyArgmax,
}
