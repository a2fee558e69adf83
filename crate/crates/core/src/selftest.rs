//! Cross-module property suites, each checked against a plain integer oracle.
//!
//! A suite either sweeps its whole input domain or draws seeded random
//! cases. Random runs are reproducible: case generation is sequential from a
//! per-suite ChaCha stream, and checking (which may run in parallel) always
//! reports the first failing case in generation order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::hw::{self, ModulusKind};
use crate::rns::ModuliSet;

/// Largest `n` for which whole-domain sweeps are permitted.
pub const MAX_EXHAUSTIVE_N: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exhaustive,
    Random { count: u64, seed: u64 },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SelftestError {
    #[error("exhaustive mode is limited to n <= {MAX_EXHAUSTIVE_N} (got n = {0})")]
    TooLargeForExhaustive(u32),
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub exhaustive: bool,
    pub cases: u64,
    pub counterexample: Option<String>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }

    pub fn line(&self) -> String {
        let how = if self.exhaustive { "exhaustive" } else { "random" };
        match &self.counterexample {
            None => format!("PASS {} ({how}, {} cases)", self.name, self.cases),
            Some(c) => format!("FAIL {} ({how}, {} cases): {c}", self.name, self.cases),
        }
    }
}

type SuiteFn = fn(&ModuliSet, Mode, &mut ChaCha8Rng) -> SuiteResult;

/// Suite names in run order.
pub const SUITES: [&str; 13] = [
    "round-trip",
    "ring-add",
    "ring-sub",
    "ring-mul",
    "parity",
    "compare",
    "relu",
    "argmax",
    "hw-adders",
    "hw-multipliers",
    "hw-parity-circuit",
    "hw-residue-gen",
    "hw-prefix-depth",
];

fn suite_fn(name: &str) -> Option<SuiteFn> {
    Some(match name {
        "round-trip" => round_trip,
        "ring-add" => ring_add,
        "ring-sub" => ring_sub,
        "ring-mul" => ring_mul,
        "parity" => parity,
        "compare" => compare,
        "relu" => relu,
        "argmax" => argmax,
        "hw-adders" => hw_adders,
        "hw-multipliers" => hw_multipliers,
        "hw-parity-circuit" => hw_parity_circuit,
        "hw-residue-gen" => hw_residue_gen,
        "hw-prefix-depth" => hw_prefix_depth,
        _ => return None,
    })
}

fn check_mode(ms: &ModuliSet, mode: Mode) -> Result<(), SelftestError> {
    if mode == Mode::Exhaustive && ms.n() > MAX_EXHAUSTIVE_N {
        return Err(SelftestError::TooLargeForExhaustive(ms.n()));
    }
    Ok(())
}

fn suite_rng(mode: Mode, index: usize) -> ChaCha8Rng {
    let seed = match mode {
        Mode::Exhaustive => 0,
        Mode::Random { seed, .. } => seed,
    };
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(index as u64))
}

pub fn run_suite(name: &str, ms: &ModuliSet, mode: Mode) -> Result<SuiteResult, SelftestError> {
    check_mode(ms, mode)?;
    let index = SUITES
        .iter()
        .position(|s| *s == name)
        .ok_or_else(|| SelftestError::UnknownSuite(name.to_string()))?;
    let f = suite_fn(name).unwrap();
    Ok(f(ms, mode, &mut suite_rng(mode, index)))
}

pub fn run_all(ms: &ModuliSet, mode: Mode) -> Result<Vec<SuiteResult>, SelftestError> {
    SUITES.iter().map(|name| run_suite(name, ms, mode)).collect()
}

// ---- case drivers ----

/// Checks `f` on every value of `[0, domain)` or on random draws.
fn check_values<F>(name: &'static str, domain: u64, mode: Mode, rng: &mut ChaCha8Rng, f: F) -> SuiteResult
where
    F: Fn(u64) -> Option<String> + Sync + Send,
{
    match mode {
        Mode::Random { count, .. } if domain > count => {
            let cases: Vec<u64> = (0..count).map(|_| rng.gen_range(0..domain)).collect();
            SuiteResult {
                name,
                exhaustive: false,
                cases: count,
                counterexample: cases.par_iter().find_map_first(|&x| f(x)),
            }
        }
        _ => SuiteResult {
            name,
            exhaustive: true,
            cases: domain,
            counterexample: (0..domain).into_par_iter().find_map_first(f),
        },
    }
}

/// Checks `f` on every ordered pair of `[0, domain)` or on random pairs.
fn check_pairs<F>(name: &'static str, domain: u64, mode: Mode, rng: &mut ChaCha8Rng, f: F) -> SuiteResult
where
    F: Fn(u64, u64) -> Option<String> + Sync + Send,
{
    match mode {
        Mode::Random { count, .. } if domain.saturating_mul(domain) > count => {
            let cases: Vec<(u64, u64)> = (0..count)
                .map(|_| (rng.gen_range(0..domain), rng.gen_range(0..domain)))
                .collect();
            SuiteResult {
                name,
                exhaustive: false,
                cases: count,
                counterexample: cases.par_iter().find_map_first(|&(a, b)| f(a, b)),
            }
        }
        _ => SuiteResult {
            name,
            exhaustive: true,
            cases: domain * domain,
            counterexample: (0..domain)
                .into_par_iter()
                .find_map_first(|a| (0..domain).find_map(|b| f(a, b))),
        },
    }
}

fn merge(name: &'static str, parts: Vec<SuiteResult>) -> SuiteResult {
    SuiteResult {
        name,
        exhaustive: parts.iter().all(|p| p.exhaustive),
        cases: parts.iter().map(|p| p.cases).sum(),
        counterexample: parts.into_iter().find_map(|p| p.counterexample),
    }
}

// ---- word-level suites ----

fn round_trip(ms: &ModuliSet, mode: Mode, rng: &mut ChaCha8Rng) -> SuiteResult {
    check_values("round-trip", ms.range(), mode, rng, |x| {
        let got = ms.encode(x).and_then(|r| ms.decode(&r));
        (got != Ok(x)).then(|| format!("decode(encode({x})) = {got:?}"))
    })
}

fn ring_op(
    name: &'static str,
    ms: &ModuliSet,
    mode: Mode,
    rng: &mut ChaCha8Rng,
    op: fn(&ModuliSet, &crate::RnsInt, &crate::RnsInt) -> crate::RnsInt,
    oracle: fn(u64, u64, u64) -> u64,
) -> SuiteResult {
    let m = ms.range();
    check_pairs(name, m, mode, rng, |a, b| {
        let r = op(ms, &ms.encode(a).unwrap(), &ms.encode(b).unwrap());
        let got = ms.decode(&r);
        let want = oracle(a, b, m);
        (got != Ok(want)).then(|| format!("a={a} b={b}: got {got:?}, want {want}"))
    })
}

fn ring_add(ms: &ModuliSet, mode: Mode, rng: &mut ChaCha8Rng) -> SuiteResult {
    ring_op("ring-add", ms, mode, rng, ModuliSet::add, |a, b, m| (a + b) % m)
}

fn ring_sub(ms: &ModuliSet, mode: Mode, rng: &mut ChaCha8Rng) -> SuiteResult {
    ring_op("ring-sub", ms, mode, rng, ModuliSet::sub, |a, b, m| (a + m - b) % m)
}

fn ring_mul(ms: &ModuliSet, mode: Mode, rng: &mut ChaCha8Rng) -> SuiteResult {
    ring_op("ring-mul", ms, mode, rng, ModuliSet::mul, |a, b, m| {
        (u128::from(a) * u128::from(b) % u128::from(m)) as u64
    })
}

fn parity(ms: &ModuliSet, mode: Mode, rng: &mut ChaCha8Rng) -> SuiteResult {
    check_values("parity", ms.range(), mode, rng, |x| {
        let p = ms.parity(&ms.encode(x).unwrap());
        (p != (x & 1 == 1)).then(|| format!("parity({x}) = {}", u8::from(p)))
    })
}

fn compare(ms: &ModuliSet, mode: Mode, rng: &mut ChaCha8Rng) -> SuiteResult {
    check_pairs("compare", ms.range(), mode, rng, |a, b| {
        let got = ms.compare_ge(&ms.encode(a).unwrap(), &ms.encode(b).unwrap());
        (got != (a >= b)).then(|| format!("compare_ge({a}, {b}) = {got}"))
    })
}

fn signed_of(ms: &ModuliSet, x: u64) -> i64 {
    if x > ms.pos_max() {
        x as i64 - ms.range() as i64
    } else {
        x as i64
    }
}

fn relu(ms: &ModuliSet, mode: Mode, rng: &mut ChaCha8Rng) -> SuiteResult {
    check_values("relu", ms.range(), mode, rng, |x| {
        let v = signed_of(ms, x);
        let got = ms.decode_signed(&ms.relu(&ms.encode_signed(v).unwrap()));
        (got != Ok(v.max(0))).then(|| format!("relu({v}) = {got:?}"))
    })
}

fn argmax(ms: &ModuliSet, mode: Mode, rng: &mut ChaCha8Rng) -> SuiteResult {
    const LEN: usize = 8;
    let trials = match mode {
        Mode::Exhaustive => 10_000,
        Mode::Random { count, .. } => count,
    };
    let p = ms.pos_max() as i64;
    // narrow draws make ties common
    let vectors: Vec<Vec<i64>> = (0..trials)
        .map(|t| {
            let span = if t % 2 == 0 { p } else { 3.min(p) };
            (0..LEN).map(|_| rng.gen_range(-span..=span)).collect()
        })
        .collect();
    let counterexample = vectors.par_iter().find_map_first(|v| {
        let enc: Vec<_> = v.iter().map(|&x| ms.encode_signed(x).unwrap()).collect();
        let want = v
            .iter()
            .enumerate()
            .fold(0, |best, (i, &x)| if x > v[best] { i } else { best });
        let got = ms.argmax(&enc);
        (got != Ok(want)).then(|| format!("argmax({v:?}) = {got:?}, want {want}"))
    });
    SuiteResult {
        name: "argmax",
        exhaustive: false,
        cases: trials,
        counterexample,
    }
}

// ---- bit-level suites ----

fn per_channel(
    name: &'static str,
    ms: &ModuliSet,
    mode: Mode,
    rng: &mut ChaCha8Rng,
    block: fn(ModulusKind, u64, u64, &ModuliSet) -> u64,
    oracle: fn(u64, u64, u64) -> u64,
) -> SuiteResult {
    let parts = ModulusKind::ALL
        .iter()
        .map(|&kind| {
            let m = kind.modulus(ms);
            check_pairs(name, m, mode, rng, |a, b| {
                let got = block(kind, a, b, ms);
                let want = oracle(a, b, m);
                (got != want).then(|| format!("mod {m}: a={a} b={b}: got {got}, want {want}"))
            })
        })
        .collect();
    merge(name, parts)
}

fn hw_adders(ms: &ModuliSet, mode: Mode, rng: &mut ChaCha8Rng) -> SuiteResult {
    per_channel("hw-adders", ms, mode, rng, hw::channel_add, |a, b, m| (a + b) % m)
}

fn hw_multipliers(ms: &ModuliSet, mode: Mode, rng: &mut ChaCha8Rng) -> SuiteResult {
    per_channel("hw-multipliers", ms, mode, rng, hw::channel_mul, |a, b, m| a * b % m)
}

fn hw_parity_circuit(ms: &ModuliSet, mode: Mode, rng: &mut ChaCha8Rng) -> SuiteResult {
    check_values("hw-parity-circuit", ms.range(), mode, rng, |x| {
        let r = ms.encode(x).unwrap();
        let got = hw::parity_circuit_rns(&r, ms);
        let want = ms.parity(&r);
        (got != want || got != (x & 1 == 1)).then(|| format!("x={x}: circuit {got}, word-level {want}"))
    })
}

fn hw_residue_gen(ms: &ModuliSet, mode: Mode, rng: &mut ChaCha8Rng) -> SuiteResult {
    check_values("hw-residue-gen", ms.range(), mode, rng, |x| {
        let got = hw::forward_convert(x, ms);
        let want = ms.encode(x).unwrap();
        (got != want).then(|| format!("x={x}: generated {got}, want {want}"))
    })
}

fn hw_prefix_depth(ms: &ModuliSet, _mode: Mode, _rng: &mut ChaCha8Rng) -> SuiteResult {
    let widths = [ms.n(), ms.n() + 1, 2 * ms.n(), 2 * ms.n() + 2];
    let counterexample = widths.iter().find_map(|&w| {
        let z = hw::BitVec::zero(w);
        let depth = hw::PrefixAdder::evaluate(&z, &z, hw::CarryIn::EndAround).depth();
        let want = hw::prefix_depth(w);
        let ceil_log2 = 64 - u64::from(w - 1).leading_zeros();
        (depth != want || want != ceil_log2).then(|| format!("width {w}: depth {depth}, want {ceil_log2}"))
    });
    SuiteResult {
        name: "hw-prefix-depth",
        exhaustive: true,
        cases: widths.len() as u64,
        counterexample,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exhaustive_n2_passes() {
        let ms = ModuliSet::new(2).unwrap();
        for r in run_all(&ms, Mode::Exhaustive).unwrap() {
            assert!(r.passed(), "{}", r.line());
        }
        let r = run_suite("compare", &ms, Mode::Exhaustive).unwrap();
        assert_eq!(r.cases, 315 * 315);
        assert!(r.exhaustive);
    }

    #[test]
    fn exhaustive_refused_for_large_n() {
        let ms = ModuliSet::new(5).unwrap();
        assert_eq!(
            run_all(&ms, Mode::Exhaustive),
            Err(SelftestError::TooLargeForExhaustive(5))
        );
    }

    #[test]
    fn random_is_deterministic() {
        let ms = ModuliSet::new(7).unwrap();
        let mode = Mode::Random { count: 2000, seed: 1 };
        let a = run_all(&ms, mode).unwrap();
        let b = run_all(&ms, mode).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(SuiteResult::passed));
    }

    #[test]
    fn failing_check_reports_first_case() {
        let mut rng = suite_rng(Mode::Exhaustive, 0);
        let r = check_values("probe", 100, Mode::Exhaustive, &mut rng, |x| {
            (x >= 37).then(|| x.to_string())
        });
        assert_eq!(r.counterexample.as_deref(), Some("37"));
        assert!(r.line().starts_with("FAIL probe"));
        let r = check_pairs("probe", 10, Mode::Exhaustive, &mut rng, |a, b| {
            (a * b == 12).then(|| format!("{a},{b}"))
        });
        assert_eq!(r.counterexample.as_deref(), Some("2,6"));
    }

    #[test]
    fn unknown_suite() {
        let ms = ModuliSet::new(2).unwrap();
        assert!(matches!(
            run_suite("nope", &ms, Mode::Exhaustive),
            Err(SelftestError::UnknownSuite(_))
        ));
    }
}
