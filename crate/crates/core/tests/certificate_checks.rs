//! Cross-route checks on the certificate arithmetic: exact rational
//! replays over truncated prime windows must be bracketed by the certified
//! directed-rounding outputs, and the growth factor must agree with an
//! independent log-space recomputation.

use coversys_core::base::{tail_sum_s, tail_sum_s_lower, tail_sum_t};
use coversys_core::certificate::{self, CertificateParams, DeltaPolicy, ThresholdLadder};
use coversys_core::certified::{CertifiedValue, Direction};
use coversys_core::primes::{
    certified_prime_product, certified_prime_sum, primes_in, PrimeInterval, SieveConfig, Threshold,
};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Zero};

fn cfg() -> SieveConfig {
    SieveConfig::default()
}

/// Unreduced fraction of nonnegative big integers. Skipping gcd reduction
/// keeps long exact products and sums cheap; comparisons cross-multiply.
#[derive(Clone)]
struct Frac {
    num: BigUint,
    den: BigUint,
}

impl Frac {
    fn one() -> Self {
        Frac {
            num: BigUint::from(1u32),
            den: BigUint::from(1u32),
        }
    }

    fn zero() -> Self {
        Frac {
            num: BigUint::from(0u32),
            den: BigUint::from(1u32),
        }
    }

    fn mul(&mut self, num: u64, den: u64) {
        self.num *= num;
        self.den *= den;
    }

    fn add(&mut self, num: u64, den: u64) {
        self.num = &self.num * den + &self.den * num;
        self.den *= den;
    }

    /// Is this fraction `<=` the (finite, nonnegative) float?
    fn le_f64(&self, x: f64) -> bool {
        let r = BigRational::from_f64(x).expect("finite");
        let (rn, rd) = (
            r.numer().to_biguint().unwrap(),
            r.denom().to_biguint().unwrap(),
        );
        &self.num * &rd <= rn * &self.den
    }

    fn ge_f64(&self, x: f64) -> bool {
        let r = BigRational::from_f64(x).expect("finite");
        let (rn, rd) = (
            r.numer().to_biguint().unwrap(),
            r.denom().to_biguint().unwrap(),
        );
        &self.num * &rd >= rn * &self.den
    }
}

/// `1 + 2*T(q, inf, 3)` as an exact fraction: `(q^3 + 11q^2 - q + 1)/(q-1)^3`.
fn one_plus_two_t(q: u64) -> (u64, u64) {
    let num = q * q * q + 11 * q * q - q + 1;
    let den = (q - 1) * (q - 1) * (q - 1);
    (num, den)
}

#[test]
fn truncated_window_brackets_every_reduction() {
    let window = PrimeInterval::new(19, 10_000);

    // Sum of S(p)^3 over the window.
    let upper = certified_prime_sum(&cfg(), window, Direction::Upper, |p| {
        tail_sum_s(p, None).unwrap().0.pow(3)
    })
    .unwrap();
    let lower = certified_prime_sum(&cfg(), window, Direction::Lower, |p| {
        tail_sum_s_lower(p, None).unwrap().pow(3)
    })
    .unwrap();
    let mut exact = Frac::zero();
    for p in primes_in(&cfg(), window).unwrap() {
        let d = p - 1;
        exact.add(1, d * d * d);
    }
    assert!(
        exact.le_f64(upper.value()),
        "upper bound must dominate the exact sum"
    );
    assert!(
        exact.ge_f64(lower.value()),
        "lower bound must stay below the exact sum"
    );

    // Product of (1 + 2 S(p)) = (p+1)/(p-1) over the window.
    let prod_upper = certified_prime_product(&cfg(), window, Direction::Upper, |p| {
        tail_sum_s(p, None).unwrap().0.scale(2.0).add_exact(1.0)
    })
    .unwrap();
    let prod_lower = certified_prime_product(&cfg(), window, Direction::Lower, |p| {
        tail_sum_s_lower(p, None).unwrap().scale(2.0).add_exact(1.0)
    })
    .unwrap();
    let mut exact = Frac::one();
    for p in primes_in(&cfg(), window).unwrap() {
        exact.mul(p + 1, p - 1);
    }
    assert!(exact.le_f64(prod_upper.value()));
    assert!(exact.ge_f64(prod_lower.value()));

    // Product of (1 + 2 T(p, inf, 3)) over the window.
    let growth_upper = certified_prime_product(&cfg(), window, Direction::Upper, |p| {
        tail_sum_t(p, None, 3).unwrap().scale(2.0).add_exact(1.0)
    })
    .unwrap();
    let mut exact = Frac::one();
    for p in primes_in(&cfg(), window).unwrap() {
        let (n, d) = one_plus_two_t(p);
        exact.mul(n, d);
    }
    assert!(exact.le_f64(growth_upper.value()));
}

#[test]
fn default_delta_and_beta_bracket_exact_values() {
    // The true base window of the default run, (19, 403], replayed exactly.
    let params = CertificateParams::defaults_for(19);
    let window = PrimeInterval::new(19, 403);

    let mut exact_prod = BigRational::one();
    let mut exact_growth = BigRational::one();
    for p in primes_in(&cfg(), window).unwrap() {
        exact_prod *= BigRational::new(BigUint::from(p).into(), BigUint::from(p - 1).into());
        let (n, d) = {
            // 1 + T(q, inf, 3) = q(q^2+4q+1)/(q-1)^3
            let q = p;
            (q * (q * q + 4 * q + 1), (q - 1) * (q - 1) * (q - 1))
        };
        exact_growth *= BigRational::new(BigUint::from(n).into(), BigUint::from(d).into());
    }
    let exact_delta = &exact_prod - BigRational::one();
    assert!(
        exact_delta < BigRational::one(),
        "the (19, 403] window is valid"
    );

    let delta = certificate::delta_sum_bound(&params, &cfg()).unwrap();
    assert!(BigRational::from_f64(delta.value()).unwrap() >= exact_delta);

    let beta = certificate::base_case_beta(&params, &cfg()).unwrap();
    // beta certifies ((1 - delta)^-1 prod (1 + T))^(1/3): compare cubes to
    // stay in rationals.
    let exact_beta_cubed = (BigRational::one() - &exact_delta).recip() * &exact_growth;
    let b = BigRational::from_f64(beta.value()).unwrap();
    let beta_cubed = &b * &b * &b;
    assert!(beta_cubed >= exact_beta_cubed);
    // And the bound is tight to a few parts in 10^12.
    let slack = &beta_cubed / &exact_beta_cubed;
    assert!(
        slack < BigRational::new(1_000_000_000_001i64.into(), 1_000_000_000_000i64.into()),
        "inflation should cost far less than 1e-12 relative"
    );
}

#[test]
fn threshold_lower_bound_sits_below_exact_value() {
    // Step 0 of the default ladder, replayed exactly over (403, 1096].
    let params = CertificateParams::defaults_for(19);
    let window = PrimeInterval::new(403, 1096);

    let mut exact_sum = BigRational::zero();
    let mut exact_prod = BigRational::one();
    for p in primes_in(&cfg(), window).unwrap() {
        let d = BigUint::from((p - 1) * (p - 1) * (p - 1));
        exact_sum += BigRational::new(BigUint::from(1u32).into(), d.into());
        exact_prod *= BigRational::new(BigUint::from(p + 1).into(), BigUint::from(p - 1).into());
    }
    let threshold = certificate::c1_threshold(&params, 0, &cfg()).unwrap();
    // threshold <= (1/4) (1/2)^(1/3) sum^(-1/3) prod^-1. Compare cubes:
    // threshold^3 * sum * prod^3 * 128 <= 1.
    let t = BigRational::from_f64(threshold.value()).unwrap();
    let lhs = (&t * &t * &t)
        * &exact_sum
        * (&exact_prod * &exact_prod * &exact_prod)
        * BigRational::from_integer(128.into());
    assert!(
        lhs <= BigRational::one(),
        "lower bound must not exceed the exact threshold"
    );
    // Tightness: within 0.1% of the exact value.
    assert!(lhs > BigRational::new(995.into(), 1000.into()));
}

#[test]
fn tiny_q0_harmonic_product_exceeds_two_exactly() {
    // The reason q0 = 2 can never have a valid base case: the exact product
    // of p/(p-1) over (2, 403] already exceeds 2, so the harmonic-sum bound
    // is at least 1.
    let mut prod = BigRational::one();
    for p in primes_in(&cfg(), PrimeInterval::new(2, 403)).unwrap() {
        prod *= BigRational::new(BigUint::from(p).into(), BigUint::from(p - 1).into());
    }
    assert!(prod > BigRational::from_integer(2.into()));
    let err = certificate::base_case_beta(&CertificateParams::defaults_for(2), &cfg());
    assert!(
        matches!(err, Err(certificate::CertifyError::BaseCaseInvalid { delta }) if delta >= 1.0)
    );
}

#[test]
fn growth_factor_matches_log_space_recomputation() {
    // Independent second route: plain f64 log-space accumulation of the
    // same product, no directed rounding.
    let params = CertificateParams::defaults_for(19);
    for i in 0..=2usize {
        let certified = certificate::growth_factor(&params, i, &cfg()).unwrap();
        let window = PrimeInterval::new(
            Threshold::Exp(coversys_core::ExpArg::from_integer(6 + i as u32).unwrap())
                .realize()
                .unwrap(),
            Threshold::Exp(coversys_core::ExpArg::from_integer(7 + i as u32).unwrap())
                .realize()
                .unwrap(),
        );
        let mut log_sum = 0.0f64;
        for p in primes_in(&cfg(), window).unwrap() {
            let q = p as f64;
            let t = q * (q * q + 4.0 * q + 1.0) / (q - 1.0).powi(3) - 1.0;
            log_sum += (2.0 * t).ln_1p();
        }
        let second_route = ((log_sum - 0.5f64.ln()) / 3.0).exp();
        let rel = (certified.value() - second_route).abs() / second_route;
        assert!(
            rel <= 1e-9,
            "step {i}: certified {} vs log-space {} (rel {rel})",
            certified.value(),
            second_route
        );
        // The certified route is the upper one.
        assert!(certified.value() >= second_route * (1.0 - 1e-9));
    }
}

#[test]
fn fixed_delta_policy_is_reported() {
    let mut params = CertificateParams::defaults_for(353);
    params.thresholds = ThresholdLadder::exp_ladder(11);
    params.delta_policy = DeltaPolicy::Fixed(0.86);
    let report = certificate::certify(&params, &cfg()).unwrap();
    assert_eq!(report.delta_target, Some(0.86));
    let json = serde_json::to_string(&report).unwrap();
    assert!(
        json.contains("\"fixed\":0.86"),
        "policy must be visible in the report"
    );
}

#[test]
fn explicit_threshold_list_too_short_is_an_error() {
    let mut params = CertificateParams::defaults_for(19);
    params.thresholds = ThresholdLadder::Explicit {
        values: vec![Threshold::Value(403), Threshold::Value(1096)],
    };
    params.i_max = 3;
    let err = certificate::certify(&params, &cfg()).unwrap_err();
    assert!(matches!(
        err,
        certificate::CertifyError::MissingThreshold { .. }
    ));
}

#[test]
fn vacuous_check_with_degenerate_beta() {
    // Even an enormous bias bound passes against the +inf sentinel.
    let mut params = CertificateParams::defaults_for(19);
    params.thresholds = ThresholdLadder::Explicit {
        values: vec![
            Threshold::Value(23),
            Threshold::Value(24),
            Threshold::Value(28),
        ],
    };
    assert!(certificate::c1_check(&params, 1, &CertifiedValue::upper(f64::MAX), &cfg()).unwrap());
}
