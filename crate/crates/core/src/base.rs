//! Multiplicative bases and the arithmetic functions restricted to them.
//!
//! A base is a collection of pairwise coprime integers greater than 1 —
//! either an explicit list or "all primes in `(q0, bound]`" — optionally
//! with a cap `v` on the exponent a base element may carry. An integer `m`
//! is *factorized* by the base when it is a product of admissible powers of
//! base elements; the factorization is unique because the elements are
//! pairwise coprime.

use crate::certified::{inflate_down, inflate_up, rational_to_f64_up, CertifiedValue, Direction};
use crate::factor::{factor_u64, is_prime_u64};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BaseError {
    #[error("base element {0} must exceed 1")]
    ElementTooSmall(u64),
    #[error("base elements {0} and {1} are not coprime")]
    NotCoprime(u64, u64),
    #[error("exponent cap must be at least 1")]
    ZeroCap,
    #[error("tail sums require q >= 2, got {0}")]
    TailBaseTooSmall(u64),
    #[error("tail sums require k >= 1")]
    ZeroMoment,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum BaseKind {
    Explicit(Vec<u64>),
    PrimesAbove { q0: u64, upto: Option<u64> },
}

/// A multiplicative base with an optional uniform exponent cap.
///
/// `cap = None` means unbounded exponents, the default for the main
/// certificates. A uniform cap is what the wire format carries; the tail
/// sums accept a per-call cap for anything finer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseDescriptor {
    kind: BaseKind,
    cap: Option<u32>,
}

impl BaseDescriptor {
    /// Explicit base; elements are validated (each > 1, pairwise coprime)
    /// and stored sorted.
    pub fn explicit(elements: Vec<u64>, cap: Option<u32>) -> Result<Self, BaseError> {
        if cap == Some(0) {
            return Err(BaseError::ZeroCap);
        }
        let mut sorted = elements;
        sorted.sort_unstable();
        for &q in &sorted {
            if q < 2 {
                return Err(BaseError::ElementTooSmall(q));
            }
        }
        for i in 0..sorted.len() {
            for j in i + 1..sorted.len() {
                if gcd(sorted[i], sorted[j]) != 1 {
                    return Err(BaseError::NotCoprime(sorted[i], sorted[j]));
                }
            }
        }
        Ok(BaseDescriptor {
            kind: BaseKind::Explicit(sorted),
            cap,
        })
    }

    /// All primes `p` with `q0 < p <= upto` (`upto = None` for no bound).
    pub fn primes_above(q0: u64, upto: Option<u64>, cap: Option<u32>) -> Result<Self, BaseError> {
        if cap == Some(0) {
            return Err(BaseError::ZeroCap);
        }
        Ok(BaseDescriptor {
            kind: BaseKind::PrimesAbove { q0, upto },
            cap,
        })
    }

    pub fn cap(&self) -> Option<u32> {
        self.cap
    }

    /// For prime-interval bases, the exclusive lower threshold.
    pub fn prime_floor(&self) -> Option<u64> {
        match &self.kind {
            BaseKind::PrimesAbove { q0, .. } => Some(*q0),
            BaseKind::Explicit(_) => None,
        }
    }

    pub fn prime_ceiling(&self) -> Option<u64> {
        match &self.kind {
            BaseKind::PrimesAbove { upto, .. } => *upto,
            BaseKind::Explicit(_) => None,
        }
    }

    pub fn is_prime_interval(&self) -> bool {
        matches!(self.kind, BaseKind::PrimesAbove { .. })
    }

    /// Does the base contain `q` as an element?
    pub fn contains(&self, q: u64) -> bool {
        match &self.kind {
            BaseKind::Explicit(elems) => elems.binary_search(&q).is_ok(),
            BaseKind::PrimesAbove { q0, upto } => {
                *q0 < q && upto.is_none_or(|b| q <= b) && is_prime_u64(q)
            }
        }
    }

    /// Factor `m >= 1` over the base, distinguishing a foreign factor from
    /// an exceeded exponent cap.
    pub fn factorize(&self, m: u64) -> FactorOutcome {
        assert!(m >= 1, "factorize_over_base requires m >= 1");
        match &self.kind {
            BaseKind::Explicit(elems) => {
                let mut rest = m;
                let mut factors = Vec::new();
                for &q in elems {
                    if rest == 1 {
                        break;
                    }
                    let mut e = 0u32;
                    while rest.is_multiple_of(q) {
                        rest /= q;
                        e += 1;
                    }
                    if e > 0 {
                        if let Some(v) = self.cap {
                            if e > v {
                                return FactorOutcome::CapExceeded {
                                    element: q,
                                    exponent: e,
                                };
                            }
                        }
                        factors.push((q, e));
                    }
                }
                if rest != 1 {
                    return FactorOutcome::ForeignFactor(rest);
                }
                FactorOutcome::Factorized(Factorization { factors })
            }
            BaseKind::PrimesAbove { q0, upto } => {
                let mut factors = Vec::new();
                for (p, e) in factor_u64(m) {
                    if p <= *q0 || upto.is_some_and(|b| p > b) {
                        return FactorOutcome::ForeignFactor(p);
                    }
                    if let Some(v) = self.cap {
                        if e > v {
                            return FactorOutcome::CapExceeded {
                                element: p,
                                exponent: e,
                            };
                        }
                    }
                    factors.push((p, e));
                }
                FactorOutcome::Factorized(Factorization { factors })
            }
        }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Exponent map of a factorized integer: ascending `(element, exponent)`
/// pairs with positive exponents; empty for `m = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn reconstruct(&self) -> BigUint {
        let mut m = BigUint::one();
        for &(q, e) in &self.factors {
            m *= BigUint::from(q).pow(e);
        }
        m
    }
}

/// Result of factoring over a base. `NotFactorized` splits into the two
/// distinguishable causes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FactorOutcome {
    Factorized(Factorization),
    /// A factor of `m` coprime to every base element (or a prime outside
    /// the interval).
    ForeignFactor(u64),
    /// A base element divides `m` more often than the cap allows.
    CapExceeded {
        element: u64,
        exponent: u32,
    },
}

impl FactorOutcome {
    pub fn factorization(&self) -> Option<&Factorization> {
        match self {
            FactorOutcome::Factorized(f) => Some(f),
            _ => None,
        }
    }

    pub fn is_factorized(&self) -> bool {
        matches!(self, FactorOutcome::Factorized(_))
    }
}

/// Free-function spelling of [`BaseDescriptor::factorize`].
pub fn factorize_over_base(m: u64, base: &BaseDescriptor) -> FactorOutcome {
    base.factorize(m)
}

/// `lambda_k(m)`: the number of `k`-tuples of base-factorized naturals with
/// lcm exactly `m`. Multiplicative over the base with prime-power value
/// `(j+1)^k - j^k`; zero when `m` is not factorized, one when `m = 1`.
pub fn lambda_k(m: u64, k: u32, base: &BaseDescriptor) -> BigUint {
    assert!(m >= 1 && k >= 1, "lambda_k requires m >= 1 and k >= 1");
    match base.factorize(m) {
        FactorOutcome::Factorized(f) => {
            let mut acc = BigUint::one();
            for &(_, e) in f.factors() {
                let hi = BigUint::from(e as u64 + 1).pow(k);
                let lo = BigUint::from(e as u64).pow(k);
                acc *= hi - lo;
            }
            acc
        }
        _ => BigUint::zero(),
    }
}

/// Number of distinct base elements dividing `m`; `None` when `m` is not
/// factorized by the base (the function is undefined there).
pub fn omega_prime(m: u64, base: &BaseDescriptor) -> Option<u32> {
    assert!(m >= 1, "omega_prime requires m >= 1");
    base.factorize(m)
        .factorization()
        .map(|f| f.factors().len() as u32)
}

/// Certified upper bound and exact value of `S(q, v) = sum_{j=1..v} q^-j`.
///
/// For `v = None` (unbounded) the exact value is the geometric limit
/// `1/(q-1)`. The certified bound is computed in directed floating point,
/// independently of the rational route.
pub fn tail_sum_s(q: u64, v: Option<u32>) -> Result<(CertifiedValue, BigRational), BaseError> {
    if q < 2 {
        return Err(BaseError::TailBaseTooSmall(q));
    }
    match v {
        None => {
            let exact = BigRational::new(BigUint::one().into(), BigUint::from(q - 1).into());
            let upper = CertifiedValue::lower(inflate_down((q - 1) as f64)).recip();
            Ok((upper, exact))
        }
        Some(0) => Err(BaseError::ZeroCap),
        Some(v) => {
            let mut upper = CertifiedValue::exact(0.0, Direction::Upper);
            let mut q_pow_lo = 1.0f64;
            for _ in 0..v {
                q_pow_lo = inflate_down(q_pow_lo * q as f64);
                upper = upper.add(&CertifiedValue::lower(q_pow_lo).recip());
                if q_pow_lo > 1e300 {
                    // Remaining terms sum below their geometric closure,
                    // which a blanket 1e-290 dominates.
                    upper = upper.add_exact(1e-290);
                    break;
                }
            }
            // Closed form for the exact route: S(q, v) = (q^v - 1)/(q^v (q-1)).
            let qv = BigUint::from(q).pow(v);
            let exact = BigRational::new(
                (&qv - BigUint::one()).into(),
                (qv * BigUint::from(q - 1)).into(),
            );
            Ok((upper, exact))
        }
    }
}

/// Certified lower bound on `S(q, v)`; the mirror of the upper route in
/// [`tail_sum_s`], used where a quantity built from `S` must be bounded
/// from above overall (reciprocals flip the direction).
pub fn tail_sum_s_lower(q: u64, v: Option<u32>) -> Result<CertifiedValue, BaseError> {
    if q < 2 {
        return Err(BaseError::TailBaseTooSmall(q));
    }
    match v {
        None => Ok(CertifiedValue::upper(inflate_up((q - 1) as f64)).recip()),
        Some(0) => Err(BaseError::ZeroCap),
        Some(v) => {
            let mut acc = CertifiedValue::exact(0.0, Direction::Lower);
            let mut q_pow_hi = 1.0f64;
            for _ in 0..v {
                q_pow_hi = inflate_up(q_pow_hi * q as f64);
                if !q_pow_hi.is_finite() {
                    break; // remaining terms only add; dropping them is sound
                }
                acc = acc.add(&CertifiedValue::upper(q_pow_hi).recip());
            }
            Ok(acc)
        }
    }
}

/// Certified upper bound on `T(q, v, k) = sum_{j=1..v} ((j+1)^k - j^k)/q^j`.
///
/// Unbounded `v` with `k <= 3` uses the rational generating identities
/// evaluated in directed floating point (for `k = 3`:
/// `sum_{j>=0} ((j+1)^3 - j^3) x^j = (1 + 4x + x^2)/(1-x)^3` at `x = 1/q`).
/// Unbounded `v` with `k > 3` falls back to partial summation plus an
/// explicit geometric majorant of the tail.
pub fn tail_sum_t(q: u64, v: Option<u32>, k: u32) -> Result<CertifiedValue, BaseError> {
    if q < 2 {
        return Err(BaseError::TailBaseTooSmall(q));
    }
    if k == 0 {
        return Err(BaseError::ZeroMoment);
    }
    match v {
        Some(0) => Err(BaseError::ZeroCap),
        Some(v) => Ok(t_partial_upper(q, 1, v, k)),
        None => match k {
            // sum_{j>=1} x^j = x/(1-x) = 1/(q-1)
            1 => Ok(CertifiedValue::lower(inflate_down((q - 1) as f64)).recip()),
            // sum_{j>=0} (2j+1) x^j = (1+x)/(1-x)^2, minus 1: (3q-1)/(q-1)^2
            2 => {
                let num = CertifiedValue::upper(inflate_up(3.0 * q as f64 - 1.0));
                let den = CertifiedValue::lower(inflate_down((q - 1) as f64)).pow(2);
                Ok(num.div(&den))
            }
            // q (q^2 + 4q + 1) / (q-1)^3, minus 1
            3 => {
                let qq = q as u128;
                let num_int = qq * (qq * qq + 4 * qq + 1);
                let num = CertifiedValue::upper(inflate_up(num_int as f64));
                let den = CertifiedValue::lower(inflate_down((q - 1) as f64)).pow(3);
                Ok(num.div(&den).add_exact(-1.0))
            }
            k => {
                // Partial sum to J, then tail <= sum_{j>J} k (j+1)^(k-1) q^-j
                // dominated by a geometric series with ratio
                // rho = ((J+2)/(J+1))^(k-1) / q < 1 for J >= 4k.
                let j_cut = (4 * k).max(64);
                let partial = t_partial_upper(q, 1, j_cut, k);
                let lead = CertifiedValue::upper(inflate_up(j_cut as f64 + 2.0))
                    .pow(k - 1)
                    .scale(k as f64);
                let q_low = CertifiedValue::lower(inflate_down(q as f64));
                let q_pow = q_low.pow(j_cut + 1);
                let head = lead.div(&q_pow);
                let ratio_num =
                    CertifiedValue::upper(inflate_up((j_cut as f64 + 2.0) / (j_cut as f64 + 1.0)))
                        .pow(k - 1);
                let rho = ratio_num.div(&q_low);
                let one_minus_rho = rho.sub_from(1.0);
                let tail = head.div(&one_minus_rho);
                Ok(partial.add(&tail))
            }
        },
    }
}

/// Directed-upper partial sum of `((j+1)^k - j^k)/q^j` for `j = from..=to`.
fn t_partial_upper(q: u64, from: u32, to: u32, k: u32) -> CertifiedValue {
    let mut acc = CertifiedValue::exact(0.0, Direction::Upper);
    let mut q_pow_lo = 1.0f64;
    for _ in 1..from {
        q_pow_lo = inflate_down(q_pow_lo * q as f64);
    }
    for j in from..=to {
        q_pow_lo = inflate_down(q_pow_lo * q as f64);
        let num = BigUint::from(j as u64 + 1).pow(k) - BigUint::from(j as u64).pow(k);
        let num_up = rational_to_f64_up(&BigRational::from_integer(num.into()));
        let term = CertifiedValue::upper(num_up).div(&CertifiedValue::lower(q_pow_lo));
        acc = acc.add(&term);
        if q_pow_lo > 1e300 {
            acc = acc.add_exact(1e-280);
            break;
        }
    }
    acc
}

/// Exact rational value of `T(q, v, k)` where a closed form exists:
/// any finite `v`, or unbounded `v` with `k <= 3`. `None` otherwise.
pub fn tail_sum_t_exact(q: u64, v: Option<u32>, k: u32) -> Option<BigRational> {
    if q < 2 || k == 0 {
        return None;
    }
    let q_rat = BigRational::from_integer(BigUint::from(q).into());
    match v {
        Some(0) => None,
        Some(v) => {
            let mut acc = BigRational::zero();
            let mut q_pow = BigRational::one();
            for j in 1..=v {
                q_pow = &q_pow * &q_rat;
                let num = BigUint::from(j as u64 + 1).pow(k) - BigUint::from(j as u64).pow(k);
                acc += BigRational::from_integer(num.into()) / &q_pow;
            }
            Some(acc)
        }
        None => {
            let one = BigRational::one();
            let qm1 = &q_rat - &one;
            match k {
                1 => Some(&one / &qm1),
                2 => {
                    // (3q - 1)/(q - 1)^2
                    let den = &qm1 * &qm1;
                    Some((BigRational::from_integer(3.into()) * &q_rat - &one) / den)
                }
                3 => {
                    // q (q^2 + 4q + 1)/(q - 1)^3 - 1
                    let num = &q_rat
                        * (&q_rat * &q_rat + BigRational::from_integer(4.into()) * &q_rat + &one);
                    let den = &qm1 * &qm1 * &qm1;
                    Some(num / den - one)
                }
                _ => None,
            }
        }
    }
}

// Wire format: {"primes_above": q0, "upto": bound|null, "v": cap|null}
// or {"elements": [...], "v": cap|null}.
impl Serialize for BaseDescriptor {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct PrimesRepr<'a> {
            primes_above: u64,
            upto: &'a Option<u64>,
            v: &'a Option<u32>,
        }
        #[derive(Serialize)]
        struct ExplicitRepr<'a> {
            elements: &'a [u64],
            v: &'a Option<u32>,
        }
        match &self.kind {
            BaseKind::PrimesAbove { q0, upto } => PrimesRepr {
                primes_above: *q0,
                upto,
                v: &self.cap,
            }
            .serialize(serializer),
            BaseKind::Explicit(elements) => ExplicitRepr {
                elements,
                v: &self.cap,
            }
            .serialize(serializer),
        }
    }
}

impl<'de> Deserialize<'de> for BaseDescriptor {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            primes_above: Option<u64>,
            upto: Option<u64>,
            elements: Option<Vec<u64>>,
            v: Option<u32>,
        }
        let repr = Repr::deserialize(deserializer)?;
        match (repr.primes_above, repr.elements) {
            (Some(q0), None) => {
                BaseDescriptor::primes_above(q0, repr.upto, repr.v).map_err(D::Error::custom)
            }
            (None, Some(elements)) => {
                BaseDescriptor::explicit(elements, repr.v).map_err(D::Error::custom)
            }
            _ => Err(D::Error::custom(
                "base descriptor needs exactly one of `primes_above` or `elements`",
            )),
        }
    }
}
