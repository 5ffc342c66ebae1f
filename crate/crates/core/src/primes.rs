//! Prime enumeration over intervals `(lo, hi]` and certified reductions.
//!
//! Interval endpoints may be given as `e^t` for a small rational `t`; the
//! cutoff `floor(e^t)` is computed in exact integer arithmetic from a
//! 38-decimal-digit bracket of `e`, with a guard proving that the true
//! value of `e^t` is not within `10^-6` of an integer. Membership in an
//! interval is therefore exact: `p` belongs to `(lo, hi]` iff
//! `floor(lo) < p <= floor(hi)`.

use crate::certified::{CertifiedValue, Direction};
use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// 38 decimal digits bracketing Euler's number: `E_LO/10^38 < e < E_HI/10^38`.
const E_LO_DIGITS: &str = "271828182845904523536028747135266249775";
const E_HI_DIGITS: &str = "271828182845904523536028747135266249776";
const E_SCALE_POW10: u32 = 38;

/// Largest exponent the threshold guard is proven for.
const MAX_EXP: u32 = 20;
/// Largest reduced denominator accepted for fractional exponents.
const MAX_EXP_DEN: u32 = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ThresholdError {
    #[error("exponent {0} out of supported range (0, {MAX_EXP}]")]
    ExponentOutOfRange(String),
    #[error("exponent `{0}` is not exactly representable with denominator <= {MAX_EXP_DEN}")]
    ExponentTooFine(String),
    #[error("cannot parse `{0}` as an exponent")]
    BadExponent(String),
    #[error("e^{0} is within 10^-6 of an integer; cutoff would be ambiguous")]
    AmbiguousCutoff(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SieveError {
    #[error("interval upper bound {hi} exceeds the configured sieve capacity {capacity}")]
    CapacityExceeded { hi: u64, capacity: u64 },
    #[error(transparent)]
    Threshold(#[from] ThresholdError),
}

/// A small exact rational exponent `num/den` for `e^t` thresholds.
///
/// Parsed from `"6"`, `"11.5"`, or `"23/2"`; stored reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpArg {
    num: u32,
    den: u32,
}

impl ExpArg {
    pub fn new(num: u32, den: u32) -> Result<Self, ThresholdError> {
        if den == 0 {
            return Err(ThresholdError::BadExponent(format!("{num}/{den}")));
        }
        let g = gcd_u32(num, den);
        let (num, den) = (num / g, den / g);
        if den > MAX_EXP_DEN {
            return Err(ThresholdError::ExponentTooFine(format!("{num}/{den}")));
        }
        if num == 0 || num > MAX_EXP * den {
            return Err(ThresholdError::ExponentOutOfRange(format!("{num}/{den}")));
        }
        Ok(ExpArg { num, den })
    }

    pub fn from_integer(t: u32) -> Result<Self, ThresholdError> {
        Self::new(t, 1)
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// The reduced `(numerator, denominator)` pair.
    pub fn parts(&self) -> (u32, u32) {
        (self.num, self.den)
    }
}

fn gcd_u32(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

impl fmt::Display for ExpArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for ExpArg {
    type Err = ThresholdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ThresholdError::BadExponent(s.to_string());
        if let Some((n, d)) = s.split_once('/') {
            let num: u32 = n.trim().parse().map_err(|_| bad())?;
            let den: u32 = d.trim().parse().map_err(|_| bad())?;
            return ExpArg::new(num, den);
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || frac.len() > 9 || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let int: u32 = if int.is_empty() {
                0
            } else {
                int.parse().map_err(|_| bad())?
            };
            let frac_val: u32 = frac.parse().map_err(|_| bad())?;
            let den = 10u64.pow(frac.len() as u32);
            let num = int as u64 * den + frac_val as u64;
            if num > u32::MAX as u64 || den > u32::MAX as u64 {
                return Err(bad());
            }
            return ExpArg::new(num as u32, den as u32);
        }
        let t: u32 = s.trim().parse().map_err(|_| bad())?;
        ExpArg::new(t, 1)
    }
}

impl Serialize for ExpArg {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExpArg {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// An interval endpoint: either an explicit integer or `e^t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Threshold {
    Value(u64),
    Exp(ExpArg),
}

impl Threshold {
    /// The realized integer cutoff: thresholds `T` select primes by
    /// `p <= floor(T)` (inclusive side) or `p > floor(T)` (exclusive side).
    pub fn realize(&self) -> Result<u64, ThresholdError> {
        match self {
            Threshold::Value(v) => Ok(*v),
            Threshold::Exp(t) => exp_floor(t),
        }
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::Value(v) => write!(f, "{v}"),
            Threshold::Exp(t) => write!(f, "e^{t}"),
        }
    }
}

fn pow10(n: u32) -> BigUint {
    BigUint::from(10u32).pow(n)
}

/// `floor(e^(num/den))` with an exactness guard.
///
/// Both endpoints of the `e` bracket are raised to the power `num`, giving
/// exact rational bounds `lo <= e^t <= hi` (after the `den`-th root). The
/// guard demands a single integer `f` with `f + 10^-6 <= lo` and
/// `hi <= f + 1 - 10^-6`; otherwise the cutoff is reported ambiguous.
pub fn exp_floor(t: &ExpArg) -> Result<u64, ThresholdError> {
    let e_lo = BigUint::from_str(E_LO_DIGITS).unwrap().pow(t.num);
    let e_hi = BigUint::from_str(E_HI_DIGITS).unwrap().pow(t.num);
    let scale = pow10(E_SCALE_POW10 * t.num);
    // lo = (e_lo/scale)^(1/den), hi likewise; find f = floor(lo) by binary
    // search on f^den * scale <= e_lo.
    let mut lo_f = 0u64;
    let mut hi_f = 1u64 << 34; // e^20 < 2^29, ample
    while lo_f < hi_f {
        let mid = (lo_f + hi_f).div_ceil(2);
        if BigUint::from(mid).pow(t.den) * &scale <= e_lo {
            lo_f = mid;
        } else {
            hi_f = mid - 1;
        }
    }
    let f = lo_f;
    // Same floor must come out of the upper bracket.
    let next = BigUint::from(f + 1).pow(t.den) * &scale;
    if next <= e_hi {
        return Err(ThresholdError::AmbiguousCutoff(t.to_string()));
    }
    // Distance guard: f + 10^-6 <= e^t <= f + 1 - 10^-6, checked against the
    // exact rational brackets (clear denominators before comparing).
    let f_plus = BigUint::from(f) * pow10(6) + BigUint::one();
    let lo_ok = f_plus.pow(t.den) * &scale <= &e_lo * pow10(6 * t.den);
    let f1_minus = BigUint::from(f + 1) * pow10(6) - BigUint::one();
    let hi_ok = &e_hi * pow10(6 * t.den) <= f1_minus.pow(t.den) * &scale;
    if !(lo_ok && hi_ok) {
        return Err(ThresholdError::AmbiguousCutoff(t.to_string()));
    }
    Ok(f)
}

/// Primes `p` with `lo < p <= hi` (integer-realized bounds).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeInterval {
    pub lo: u64,
    pub hi: u64,
}

impl PrimeInterval {
    pub fn new(lo: u64, hi: u64) -> Self {
        PrimeInterval { lo, hi }
    }

    pub fn from_thresholds(lo: &Threshold, hi: &Threshold) -> Result<Self, ThresholdError> {
        Ok(PrimeInterval::new(lo.realize()?, hi.realize()?))
    }

    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }

    pub fn contains(&self, p: u64) -> bool {
        self.lo < p && p <= self.hi
    }

    /// Raise the exclusive lower bound.
    pub fn clip_lo(self, lo: u64) -> Self {
        PrimeInterval::new(self.lo.max(lo), self.hi)
    }

    /// Lower the inclusive upper bound.
    pub fn clip_hi(self, hi: u64) -> Self {
        PrimeInterval::new(self.lo, self.hi.min(hi))
    }
}

impl fmt::Display for PrimeInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}]", self.lo, self.hi)
    }
}

/// Sieve capacity and segment geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SieveConfig {
    /// Largest admissible interval endpoint.
    pub capacity: u64,
    /// Odd numbers per segment; the default keeps a segment inside L1/L2.
    pub segment_odds: usize,
}

pub const ENV_SIEVE_CAPACITY: &str = "COVERSYS_SIEVE_CAPACITY";
pub const ENV_SIEVE_SEGMENT: &str = "COVERSYS_SIEVE_SEGMENT";

impl Default for SieveConfig {
    fn default() -> Self {
        SieveConfig {
            capacity: 1_000_000_000,
            segment_odds: 1 << 16,
        }
    }
}

impl SieveConfig {
    /// Defaults overridden by `COVERSYS_SIEVE_CAPACITY` /
    /// `COVERSYS_SIEVE_SEGMENT` when present and parseable.
    pub fn from_env() -> Self {
        let mut cfg = SieveConfig::default();
        if let Ok(v) = std::env::var(ENV_SIEVE_CAPACITY) {
            if let Ok(n) = v.trim().parse::<u64>() {
                cfg.capacity = n;
            }
        }
        if let Ok(v) = std::env::var(ENV_SIEVE_SEGMENT) {
            if let Ok(n) = v.trim().parse::<usize>() {
                cfg.segment_odds = n.max(64);
            }
        }
        cfg
    }
}

/// Ascending stream of the primes in an interval.
#[derive(Debug)]
pub struct PrimeStream {
    next_odd: u64,
    hi: u64,
    base: Vec<u64>, // odd primes <= isqrt(hi)
    segment_odds: usize,
    buf: Vec<u64>,
    buf_pos: usize,
    two_pending: bool,
    done: bool,
}

/// Odd primes up to `limit` by a plain sieve; used for base primes only.
fn odd_primes_to(limit: u64) -> Vec<u64> {
    if limit < 3 {
        return Vec::new();
    }
    let n = limit as usize;
    let max_i = (n - 1) / 2; // index i <-> odd 2i+1
    let mut composite = vec![false; max_i + 1];
    let mut primes = Vec::new();
    for i in 1..=max_i {
        if !composite[i] {
            let p = 2 * i + 1;
            primes.push(p as u64);
            let mut j = (p * p) / 2;
            while j <= max_i {
                composite[j] = true;
                j += p;
            }
        }
    }
    primes
}

/// Enumerate the primes in `interval`, ascending. Deterministic for fixed
/// inputs: segments are sieved and drained in ascending order.
pub fn primes_in(cfg: &SieveConfig, interval: PrimeInterval) -> Result<PrimeStream, SieveError> {
    if interval.hi > cfg.capacity {
        return Err(SieveError::CapacityExceeded {
            hi: interval.hi,
            capacity: cfg.capacity,
        });
    }
    if interval.is_empty() {
        return Ok(PrimeStream {
            next_odd: 3,
            hi: 0,
            base: Vec::new(),
            segment_odds: cfg.segment_odds,
            buf: Vec::new(),
            buf_pos: 0,
            two_pending: false,
            done: true,
        });
    }
    let two_pending = interval.lo < 2 && 2 <= interval.hi;
    let mut next_odd = interval.lo + 1;
    if next_odd < 3 {
        next_odd = 3;
    }
    if next_odd.is_multiple_of(2) {
        next_odd += 1;
    }
    Ok(PrimeStream {
        next_odd,
        hi: interval.hi,
        base: odd_primes_to(interval.hi.isqrt()),
        segment_odds: cfg.segment_odds.max(64),
        buf: Vec::new(),
        buf_pos: 0,
        two_pending,
        done: false,
    })
}

impl PrimeStream {
    fn refill(&mut self) {
        self.buf.clear();
        self.buf_pos = 0;
        while self.buf.is_empty() {
            if self.next_odd > self.hi {
                self.done = true;
                return;
            }
            let start = self.next_odd;
            let count = self.segment_odds.min(((self.hi - start) / 2 + 1) as usize);
            let end = start + 2 * (count as u64 - 1); // last odd in segment
            let mut mark = vec![false; count];
            for &p in &self.base {
                if p * p > end {
                    break;
                }
                // First odd multiple of p in [max(p*p, start), end].
                let mut m = p * p;
                if m < start {
                    m = start.div_ceil(p) * p;
                    if m % 2 == 0 {
                        m += p;
                    }
                }
                while m <= end {
                    mark[((m - start) / 2) as usize] = true;
                    m += 2 * p;
                }
            }
            for (i, &composite) in mark.iter().enumerate() {
                if !composite {
                    let n = start + 2 * i as u64;
                    if n >= 3 {
                        self.buf.push(n);
                    }
                }
            }
            self.next_odd = end + 2;
        }
    }
}

impl Iterator for PrimeStream {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.two_pending {
            self.two_pending = false;
            return Some(2);
        }
        loop {
            if self.buf_pos < self.buf.len() {
                let p = self.buf[self.buf_pos];
                self.buf_pos += 1;
                return Some(p);
            }
            if self.done {
                return None;
            }
            self.refill();
            if self.done && self.buf.is_empty() {
                return None;
            }
        }
    }
}

/// Certified bound of direction `dir` on `sum over primes p in interval of
/// term(p)`. The per-prime terms must carry the same direction. An empty
/// interval yields an exact 0.
pub fn certified_prime_sum(
    cfg: &SieveConfig,
    interval: PrimeInterval,
    dir: Direction,
    mut term: impl FnMut(u64) -> CertifiedValue,
) -> Result<CertifiedValue, SieveError> {
    let mut acc = CertifiedValue::exact(0.0, dir);
    for p in primes_in(cfg, interval)? {
        acc = acc.add(&term(p));
    }
    Ok(acc)
}

/// Certified bound on `product over primes p in interval of factor(p)`.
/// An empty interval yields an exact 1.
pub fn certified_prime_product(
    cfg: &SieveConfig,
    interval: PrimeInterval,
    dir: Direction,
    mut factor: impl FnMut(u64) -> CertifiedValue,
) -> Result<CertifiedValue, SieveError> {
    let mut acc = CertifiedValue::exact(1.0, dir);
    for p in primes_in(cfg, interval)? {
        acc = acc.mul(&factor(p));
    }
    Ok(acc)
}

/// Exact count of primes in the interval (handy for tests and reports).
pub fn count_primes(cfg: &SieveConfig, interval: PrimeInterval) -> Result<u64, SieveError> {
    Ok(primes_in(cfg, interval)?.count() as u64)
}
