//! Machine-checkable certificates that a prime base factorizes no covering.
//!
//! The certificate walks steps `i = 0..=i_max`. Step `i` works with the
//! primes of the base lying in `(P_i, P_{i+1}]` and checks the per-step
//! condition: the certified upper bound on the bias statistic `beta_k(i)`
//! must not exceed a certified lower bound on the step threshold `B_k(i)`.
//! When the check passes, the growth bound
//! `beta_k(i+1) <= beta_k(i) * (pi_good^-1 * prod(1 + e_lambda * T(q)))^(1/k)`
//! carries the bias to the next step. The base case bounds `beta_k(0)`
//! through the harmonic-sum bound `delta` over the primes in `(q0, P_0]`.
//!
//! Every comparison pairs an upper bound with a lower bound, so a reported
//! pass is sound regardless of rounding. Failures and an invalid base case
//! are verdicts, not errors.

use crate::base::{tail_sum_s, tail_sum_s_lower, tail_sum_t, BaseDescriptor};
use crate::certified::{CertifiedValue, Direction};
use crate::primes::{
    certified_prime_product, certified_prime_sum, ExpArg, PrimeInterval, SieveConfig, SieveError,
    Threshold,
};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CertifyError {
    #[error("invalid certificate parameters: {0}")]
    InvalidParams(String),
    #[error("step {step} needs threshold P_{index}, but the explicit list has only {available}")]
    MissingThreshold {
        step: usize,
        index: usize,
        available: usize,
    },
    #[error("base-case invalid: certified delta bound {delta} is not below 1")]
    BaseCaseInvalid { delta: f64 },
    #[error(transparent)]
    Sieve(#[from] SieveError),
}

/// How the base-case `delta` is handled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaPolicy {
    /// Evaluate the product form over `(q0, P_0]` and require it below 1.
    Compute,
    /// Quick-check mode: require the computed product bound to fall below
    /// a fixed constant that is externally known to suffice, and stop
    /// there — no inductive steps.
    Fixed(f64),
}

/// The step cutoffs `P_0 < P_1 < ...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdLadder {
    /// `P_i = e^(first_exp + i)`.
    ExpLadder { first_exp: ExpArg },
    /// An explicit increasing list.
    Explicit { values: Vec<Threshold> },
}

impl ThresholdLadder {
    pub fn exp_ladder(first_exp: u32) -> Self {
        ThresholdLadder::ExpLadder {
            first_exp: ExpArg::from_integer(first_exp).expect("small integer exponent"),
        }
    }

    /// `P_index`, or an error when an explicit list is too short.
    fn get(&self, index: usize, step: usize) -> Result<Threshold, CertifyError> {
        match self {
            ThresholdLadder::ExpLadder { first_exp } => {
                let raised = format!("{}+{}", first_exp, index);
                let arg: ExpArg = add_integer(first_exp, index as u32).map_err(|_| {
                    CertifyError::InvalidParams(format!(
                        "threshold exponent {raised} exceeds the supported range"
                    ))
                })?;
                Ok(Threshold::Exp(arg))
            }
            ThresholdLadder::Explicit { values } => {
                values
                    .get(index)
                    .copied()
                    .ok_or(CertifyError::MissingThreshold {
                        step,
                        index,
                        available: values.len(),
                    })
            }
        }
    }
}

fn add_integer(arg: &ExpArg, add: u32) -> Result<ExpArg, crate::primes::ThresholdError> {
    let (num, den) = arg.parts();
    ExpArg::new(num + add * den, den)
}

/// Everything driving a certification run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateParams {
    /// The multiplicative base; must be a prime-interval base.
    pub base: BaseDescriptor,
    /// Moment index `k` (closed forms ship for `k <= 3`).
    pub k: u32,
    /// The value `e^lambda` (the parameter itself, carried exactly).
    pub e_lambda: f64,
    /// Lower bound on the good-fiber proportion, in `(0, 1]`.
    pub pi_good: f64,
    pub thresholds: ThresholdLadder,
    /// Last verified step.
    pub i_max: usize,
    pub delta_policy: DeltaPolicy,
    /// Extra steps past `i_max` probed numerically (evidence only).
    pub tail_probe: usize,
}

impl CertificateParams {
    /// The canonical run: base of all primes above `q0`, third moment,
    /// `e_lambda = 2`, `pi_good = 1/2`, `P_i = e^(6+i)`, nine steps.
    pub fn defaults_for(q0: u64) -> Self {
        CertificateParams {
            base: BaseDescriptor::primes_above(q0, None, None).expect("no cap"),
            k: 3,
            e_lambda: 2.0,
            pi_good: 0.5,
            thresholds: ThresholdLadder::exp_ladder(6),
            i_max: 8,
            delta_policy: DeltaPolicy::Compute,
            tail_probe: 0,
        }
    }

    pub fn validate(&self) -> Result<(), CertifyError> {
        let fail = |msg: &str| Err(CertifyError::InvalidParams(msg.to_string()));
        if !self.base.is_prime_interval() {
            return fail("certification requires a prime-interval base");
        }
        if self.e_lambda.is_nan() || self.e_lambda <= 1.0 {
            return fail("e_lambda must exceed 1");
        }
        if self.pi_good.is_nan() || self.pi_good <= 0.0 || self.pi_good > 1.0 {
            return fail("pi_good must lie in (0, 1]");
        }
        if self.k == 0 {
            return fail("k must be at least 1");
        }
        if let DeltaPolicy::Fixed(d) = self.delta_policy {
            if d.is_nan() || d <= 0.0 {
                return fail("a fixed delta must be positive");
            }
        }
        if let ThresholdLadder::Explicit { values } = &self.thresholds {
            if values.is_empty() {
                return fail("explicit threshold list must not be empty");
            }
            let mut realized = Vec::with_capacity(values.len());
            for v in values {
                realized.push(v.realize().map_err(SieveError::from)?);
            }
            if realized.windows(2).any(|w| w[0] >= w[1]) {
                return fail("thresholds must be strictly increasing");
            }
        }
        Ok(())
    }

    fn q0(&self) -> u64 {
        self.base
            .prime_floor()
            .expect("validated prime-interval base")
    }

    /// The base primes in `(q0, P_0]`.
    fn base_interval(&self) -> Result<PrimeInterval, CertifyError> {
        let p0 = self
            .thresholds
            .get(0, 0)?
            .realize()
            .map_err(SieveError::from)?;
        Ok(self.clip(PrimeInterval::new(self.q0(), p0)))
    }

    /// The base primes in `(P_i, P_(i+1)]`, used by step `i`.
    fn step_interval(&self, i: usize) -> Result<PrimeInterval, CertifyError> {
        let lo = self
            .thresholds
            .get(i, i)?
            .realize()
            .map_err(SieveError::from)?;
        let hi = self
            .thresholds
            .get(i + 1, i)?
            .realize()
            .map_err(SieveError::from)?;
        Ok(self.clip(PrimeInterval::new(lo, hi)))
    }

    fn clip(&self, iv: PrimeInterval) -> PrimeInterval {
        let iv = iv.clip_lo(self.q0());
        match self.base.prime_ceiling() {
            Some(hi) => iv.clip_hi(hi),
            None => iv,
        }
    }
}

/// Certified upper bound on the per-prime tail sum `S(q, v)`.
fn s_upper(params: &CertificateParams, p: u64) -> CertifiedValue {
    tail_sum_s(p, params.base.cap()).expect("p >= 2").0
}

fn t_upper(params: &CertificateParams, p: u64) -> CertifiedValue {
    tail_sum_t(p, params.base.cap(), params.k).expect("p >= 2, k >= 1")
}

/// Certified upper bound on `sum over m in M_0 of 1/m`, evaluated as
/// `prod over q in (q0, P_0] of (1 + S(q, v_q)) - 1`. May exceed 1; the
/// caller decides what that means.
pub fn delta_sum_bound(
    params: &CertificateParams,
    cfg: &SieveConfig,
) -> Result<CertifiedValue, CertifyError> {
    params.validate()?;
    let iv = params.base_interval()?;
    product_minus_one(params, cfg, iv, 1.0)
}

/// `prod (1 + scale * S(q)) - 1` over an interval, certified from above.
fn product_minus_one(
    params: &CertificateParams,
    cfg: &SieveConfig,
    iv: PrimeInterval,
    scale: f64,
) -> Result<CertifiedValue, CertifyError> {
    let prod = certified_prime_product(cfg, iv, Direction::Upper, |p| {
        s_upper(params, p).scale(scale).add_exact(1.0)
    })?;
    if prod.value() == 1.0 {
        // No primes contributed: the sum over M_0 is exactly empty.
        return Ok(CertifiedValue::upper(0.0));
    }
    Ok(prod.add_exact(-1.0))
}

/// Certified upper bound on the base-case bias `beta_k(0)`:
/// `((1 - delta)^-1 * prod over (q0, P_0] of (1 + T(q, v, k)))^(1/k)`.
pub fn base_case_beta(
    params: &CertificateParams,
    cfg: &SieveConfig,
) -> Result<CertifiedValue, CertifyError> {
    let delta = delta_sum_bound(params, cfg)?;
    base_case_beta_with(params, cfg, &delta)
}

fn base_case_beta_with(
    params: &CertificateParams,
    cfg: &SieveConfig,
    delta: &CertifiedValue,
) -> Result<CertifiedValue, CertifyError> {
    if delta.value() >= 1.0 {
        return Err(CertifyError::BaseCaseInvalid {
            delta: delta.value(),
        });
    }
    let iv = params.base_interval()?;
    let prod = certified_prime_product(cfg, iv, Direction::Upper, |p| {
        t_upper(params, p).add_exact(1.0)
    })?;
    if prod.value() == 1.0 && delta.value() == 0.0 {
        // Only m = 1 contributes: the bias is exactly 1.
        return Ok(CertifiedValue::upper(1.0));
    }
    let inv = delta.sub_from(1.0).recip();
    Ok(inv.mul(&prod).kth_root(params.k))
}

/// Certified lower bound on the step-`i` threshold `B_k(i)`:
/// `((1 - e^-lambda)/e^lambda) * (1 - pi_good)^(1/k) * A_k(i)
///  * prod over (P_i, P_(i+1)] of (1 + e_lambda S(q))^-1`,
/// with `A_k(i) = (sum S(q)^k)^(-1/k)`. An empty interval leaves nothing to
/// sieve, so the condition is vacuous: `+inf`.
pub fn c1_threshold(
    params: &CertificateParams,
    i: usize,
    cfg: &SieveConfig,
) -> Result<CertifiedValue, CertifyError> {
    params.validate()?;
    let iv = params.step_interval(i)?;
    let k = params.k;

    let sum_upper = certified_prime_sum(cfg, iv, Direction::Upper, |p| s_upper(params, p).pow(k))?;
    if sum_upper.value() == 0.0 {
        // No primes in this window: nothing to sieve, the condition is
        // vacuous.
        return Ok(CertifiedValue::lower(f64::INFINITY));
    }
    let a_lower = sum_upper.kth_root(k).recip();

    let prod_upper = certified_prime_product(cfg, iv, Direction::Upper, |p| {
        s_upper(params, p).scale(params.e_lambda).add_exact(1.0)
    })?;
    let prod_inv_lower = prod_upper.recip();

    let lead = threshold_lead(params);
    Ok(lead.mul(&a_lower).mul(&prod_inv_lower))
}

/// `((1 - e^-lambda)/e^lambda) * (1 - pi_good)^(1/k)`, as a lower bound.
fn threshold_lead(params: &CertificateParams) -> CertifiedValue {
    let inv_el_upper = CertifiedValue::exact(params.e_lambda, Direction::Lower).recip();
    let one_minus = inv_el_upper.sub_from(1.0);
    let scaled = one_minus.div(&CertifiedValue::exact(params.e_lambda, Direction::Upper));
    let pg_term = CertifiedValue::exact(params.pi_good, Direction::Upper)
        .sub_from(1.0)
        .kth_root(params.k);
    scaled.mul(&pg_term)
}

/// Sound sufficient check of the step-`i` condition: the certified upper
/// bias does not exceed the certified lower threshold.
pub fn c1_check(
    params: &CertificateParams,
    i: usize,
    beta_upper: &CertifiedValue,
    cfg: &SieveConfig,
) -> Result<bool, CertifyError> {
    Ok(beta_upper.certifies_le(&c1_threshold(params, i, cfg)?))
}

/// The certified per-step growth multiplier
/// `(pi_good^-1 * prod (1 + e_lambda * T(q, v, k)))^(1/k)`.
pub fn growth_factor(
    params: &CertificateParams,
    i: usize,
    cfg: &SieveConfig,
) -> Result<CertifiedValue, CertifyError> {
    let iv = params.step_interval(i)?;
    let prod = certified_prime_product(cfg, iv, Direction::Upper, |p| {
        t_upper(params, p).scale(params.e_lambda).add_exact(1.0)
    })?;
    if prod.value() == 1.0 && params.pi_good == 1.0 {
        // A prime-free window with a unit good-fiber proportion leaves the
        // bias bound exactly unchanged.
        return Ok(CertifiedValue::upper(1.0));
    }
    let over_pg = prod.div(&CertifiedValue::exact(params.pi_good, Direction::Lower));
    Ok(over_pg.kth_root(params.k))
}

/// Push a certified bias bound through one step of the growth recursion.
pub fn beta_step(
    params: &CertificateParams,
    i: usize,
    beta_upper: &CertifiedValue,
    cfg: &SieveConfig,
) -> Result<CertifiedValue, CertifyError> {
    params.validate()?;
    let g = growth_factor(params, i, cfg)?;
    if g.value() == 1.0 {
        return Ok(*beta_upper);
    }
    Ok(beta_upper.mul(&g))
}

/// One verified step of a certification run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub i: usize,
    pub interval: PrimeInterval,
    pub beta_upper: CertifiedValue,
    pub c1_threshold_lower: CertifiedValue,
    pub passed: bool,
    pub growth_factor: CertifiedValue,
}

/// A numerical probe of a step past `i_max`: evidence (not proof) that the
/// threshold keeps growing faster than the bias.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub i: usize,
    /// Lower bound on `A_k(i) / A_k(i-1)`.
    pub a_ratio_lower: CertifiedValue,
    /// Upper bound on the bias growth over the same step.
    pub growth_upper: CertifiedValue,
    /// Whether the certified comparison `growth <= a_ratio` held.
    pub a_outgrows_bias: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    CertifiedUpToIMax,
    FailedAtStep(usize),
    BaseCaseInvalid,
}

impl Verdict {
    pub fn is_certified(&self) -> bool {
        matches!(self, Verdict::CertifiedUpToIMax)
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::CertifiedUpToIMax => write!(f, "CERTIFIED_UP_TO_I_MAX"),
            Verdict::FailedAtStep(i) => write!(f, "FAILED_AT_STEP({i})"),
            Verdict::BaseCaseInvalid => write!(f, "BASE_CASE_INVALID"),
        }
    }
}

pub const TAIL_ASSUMPTION_NOTE: &str = "steps beyond i_max rely on an assumed analytic growth \
argument (the step thresholds outgrow the certified bias); this run checks it for no step past \
i_max except any probes reported below, which are numerical evidence, not proof";

pub const FIXED_DELTA_NOTE: &str = "quick-check mode: soundness rests on an externally \
established pair (P_0, delta) for which a harmonic sum below delta rules out a covering";

/// The full result of a certification run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub params: CertificateParams,
    /// Certified upper bound on the base-case harmonic sum.
    pub delta_bound: CertifiedValue,
    /// Fixed comparison constant when the quick-check policy is in force.
    pub delta_target: Option<f64>,
    /// Certified upper bound on the base-case bias (absent when invalid).
    pub base_beta_upper: Option<CertifiedValue>,
    pub steps: Vec<StepReport>,
    pub probes: Vec<ProbeReport>,
    pub verdict: Verdict,
    pub tail_assumption: String,
}

/// Run the whole pipeline: delta bound, base-case bias, then the per-step
/// threshold checks and growth recursion up to `i_max`.
pub fn certify(
    params: &CertificateParams,
    cfg: &SieveConfig,
) -> Result<CertificateReport, CertifyError> {
    params.validate()?;
    let delta = delta_sum_bound(params, cfg)?;

    if let DeltaPolicy::Fixed(target) = params.delta_policy {
        let ok = delta.value() < target;
        return Ok(CertificateReport {
            params: params.clone(),
            delta_bound: delta,
            delta_target: Some(target),
            base_beta_upper: None,
            steps: Vec::new(),
            probes: Vec::new(),
            verdict: if ok {
                Verdict::CertifiedUpToIMax
            } else {
                Verdict::BaseCaseInvalid
            },
            tail_assumption: FIXED_DELTA_NOTE.to_string(),
        });
    }

    let mut report = CertificateReport {
        params: params.clone(),
        delta_bound: delta,
        delta_target: None,
        base_beta_upper: None,
        steps: Vec::new(),
        probes: Vec::new(),
        verdict: Verdict::CertifiedUpToIMax,
        tail_assumption: TAIL_ASSUMPTION_NOTE.to_string(),
    };

    let mut beta = match base_case_beta_with(params, cfg, &report.delta_bound) {
        Ok(b) => b,
        Err(CertifyError::BaseCaseInvalid { .. }) => {
            report.verdict = Verdict::BaseCaseInvalid;
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    report.base_beta_upper = Some(beta);

    for i in 0..=params.i_max {
        let interval = params.step_interval(i)?;
        let threshold = c1_threshold(params, i, cfg)?;
        let passed = beta.certifies_le(&threshold);
        let growth = growth_factor(params, i, cfg)?;
        report.steps.push(StepReport {
            i,
            interval,
            beta_upper: beta,
            c1_threshold_lower: threshold,
            passed,
            growth_factor: growth,
        });
        if !passed {
            report.verdict = Verdict::FailedAtStep(i);
            return Ok(report);
        }
        if growth.value() != 1.0 {
            beta = beta.mul(&growth);
        }
    }

    for i in params.i_max + 1..=params.i_max + params.tail_probe {
        report.probes.push(probe_step(params, i, cfg)?);
    }
    Ok(report)
}

/// Compare the growth of `A_k` against the certified bias growth over step
/// `i` (both endpoints honest: a lower bound on the former, an upper bound
/// on the latter).
fn probe_step(
    params: &CertificateParams,
    i: usize,
    cfg: &SieveConfig,
) -> Result<ProbeReport, CertifyError> {
    let a_next_lower = a_k_lower(params, i, cfg)?;
    let a_prev_upper = a_k_upper(params, i - 1, cfg)?;
    let a_ratio_lower = a_next_lower.div(&a_prev_upper);
    let growth_upper = growth_factor(params, i, cfg)?;
    let a_outgrows_bias = growth_upper.certifies_le(&a_ratio_lower);
    Ok(ProbeReport {
        i,
        a_ratio_lower,
        growth_upper,
        a_outgrows_bias,
    })
}

fn a_k_lower(
    params: &CertificateParams,
    i: usize,
    cfg: &SieveConfig,
) -> Result<CertifiedValue, CertifyError> {
    let iv = params.step_interval(i)?;
    let sum_upper = certified_prime_sum(cfg, iv, Direction::Upper, |p| {
        s_upper(params, p).pow(params.k)
    })?;
    if sum_upper.value() == 0.0 {
        return Ok(CertifiedValue::lower(f64::INFINITY));
    }
    Ok(sum_upper.kth_root(params.k).recip())
}

fn a_k_upper(
    params: &CertificateParams,
    i: usize,
    cfg: &SieveConfig,
) -> Result<CertifiedValue, CertifyError> {
    let iv = params.step_interval(i)?;
    let sum_lower = certified_prime_sum(cfg, iv, Direction::Lower, |p| {
        tail_sum_s_lower(p, params.base.cap())
            .expect("p >= 2")
            .pow(params.k)
    })?;
    Ok(sum_lower.kth_root(params.k).recip())
}

/// The single-product quick check: certified upper bound on
/// `prod over (q1, P_0] of (1 + 1/(p-1)) - 1`, compared against `delta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuickCheck {
    pub interval: PrimeInterval,
    pub product_minus_one: CertifiedValue,
    pub delta: f64,
    pub passes: bool,
}

pub fn hough_quick_check(
    q1: u64,
    p0: Threshold,
    delta: f64,
    cfg: &SieveConfig,
) -> Result<QuickCheck, CertifyError> {
    let hi = p0.realize().map_err(SieveError::from)?;
    let iv = PrimeInterval::new(q1, hi);
    let value = if iv.is_empty() {
        CertifiedValue::upper(0.0)
    } else {
        let prod = certified_prime_product(cfg, iv, Direction::Upper, |p| {
            tail_sum_s(p, None).expect("p >= 2").0.add_exact(1.0)
        })?;
        prod.add_exact(-1.0)
    };
    Ok(QuickCheck {
        interval: iv,
        product_minus_one: value,
        delta,
        passes: value.value() < delta,
    })
}

/// Render the report as the classic two-column table (step index, bias
/// bound, threshold bound) plus the verdict and tail note.
pub fn render_table(report: &CertificateReport) -> String {
    let mut out = String::new();
    let k = report.params.k;
    writeln!(
        out,
        "certificate: base = primes in ({}, {}], k = {}, e_lambda = {}, pi_good = {}",
        report.params.base.prime_floor().unwrap_or(0),
        report
            .params
            .base
            .prime_ceiling()
            .map_or("inf".to_string(), |b| b.to_string()),
        k,
        format_sig(report.params.e_lambda, 6),
        format_sig(report.params.pi_good, 6),
    )
    .unwrap();
    match report.delta_target {
        Some(target) => writeln!(
            out,
            "delta bound: {} (upper), target {}",
            format_sig(report.delta_bound.value(), 6),
            format_sig(target, 6)
        )
        .unwrap(),
        None => writeln!(
            out,
            "delta bound: {} (upper)",
            format_sig(report.delta_bound.value(), 6)
        )
        .unwrap(),
    }
    if !report.steps.is_empty() {
        let beta_col = format!("beta{k} (upper)");
        let b_col = format!("B{k} (lower)");
        writeln!(
            out,
            "{:>3}  {:>18}  {:>14}  {:>14}  C1",
            "i", "interval", beta_col, b_col
        )
        .unwrap();
        for s in &report.steps {
            writeln!(
                out,
                "{:>3}  {:>18}  {:>14}  {:>14}  {}",
                s.i,
                s.interval.to_string(),
                format_sig(s.beta_upper.value(), 6),
                format_sig(s.c1_threshold_lower.value(), 6),
                if s.passed { "pass" } else { "FAIL" },
            )
            .unwrap();
        }
    }
    for p in &report.probes {
        writeln!(
            out,
            "probe i = {}: A-ratio >= {}, bias growth <= {} -> {}",
            p.i,
            format_sig(p.a_ratio_lower.value(), 6),
            format_sig(p.growth_upper.value(), 6),
            if p.a_outgrows_bias {
                "consistent"
            } else {
                "inconclusive"
            },
        )
        .unwrap();
    }
    writeln!(out, "verdict: {}", report.verdict).unwrap();
    writeln!(out, "note: {}", report.tail_assumption).unwrap();
    out
}

/// Format with `sig` significant digits (plain decimal notation).
pub fn format_sig(x: f64, sig: usize) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".to_string()
        } else if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (sig as i32 - 1 - magnitude).clamp(0, 17) as usize;
    format!("{:.*}", decimals, x)
}
