//! One-sided certified bounds on nonnegative reals.
//!
//! A [`CertifiedValue`] is an `f64` tagged with the side it bounds from:
//! an `Upper` value is `>=` the exact quantity it certifies, a `Lower`
//! value is `<=` it. Every elementary operation rounds outward: the raw
//! IEEE result is multiplied by `(1 ± EPSILON)` and then bumped one more
//! ulp in the safe direction. The extra ulp covers the regime near zero
//! where the relative model of floating-point error breaks down, so the
//! one-sided property survives arbitrary compositions of these operations.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

/// Which side of the exact value a bound certifies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Certified to be `>=` the exact quantity.
    Upper,
    /// Certified to be `<=` the exact quantity.
    Lower,
}

impl Direction {
    pub fn flip(self) -> Direction {
        match self {
            Direction::Upper => Direction::Lower,
            Direction::Lower => Direction::Upper,
        }
    }
}

/// Move `x` up by a guaranteed margin: at least one ulp plus a relative
/// factor of `EPSILON`.
pub(crate) fn inflate_up(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    let scaled = if x >= 0.0 {
        x * (1.0 + f64::EPSILON)
    } else {
        x * (1.0 - f64::EPSILON)
    };
    scaled.next_up()
}

/// Mirror image of [`inflate_up`].
pub(crate) fn inflate_down(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    let scaled = if x >= 0.0 {
        x * (1.0 - f64::EPSILON)
    } else {
        x * (1.0 + f64::EPSILON)
    };
    scaled.next_down()
}

fn inflate(x: f64, dir: Direction) -> f64 {
    match dir {
        Direction::Upper => inflate_up(x),
        Direction::Lower => inflate_down(x),
    }
}

/// `f64` upper bound on a nonnegative rational of arbitrary size.
///
/// Numerator and denominator are truncated to at most ~500 bits with the
/// truncation error pushed in the safe direction, converted, divided, and
/// inflated twice (the conversion and the division each cost at most a few
/// ulps; double inflation strictly dominates that).
pub(crate) fn rational_to_f64_up(x: &num_rational::BigRational) -> f64 {
    use num_traits::{Signed, ToPrimitive, Zero};
    assert!(
        !x.is_negative(),
        "rational_to_f64_up requires a nonnegative value"
    );
    if x.is_zero() {
        return 0.0;
    }
    let n = x.numer().magnitude();
    let d = x.denom().magnitude();
    let sn = n.bits().saturating_sub(500);
    let sd = d.bits().saturating_sub(500);
    // Truncation error goes the safe way: round the numerator up (only when
    // bits were actually dropped) and the denominator down.
    let nt = if sn == 0 { n.clone() } else { (n >> sn) + 1u32 };
    let dt = d >> sd;
    let q = nt.to_f64().unwrap() / dt.to_f64().unwrap();
    let scaled = q * pow2(sn as i64 - sd as i64);
    inflate_up(inflate_up(scaled))
}

/// Mirror image of [`rational_to_f64_up`].
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) fn rational_to_f64_down(x: &num_rational::BigRational) -> f64 {
    use num_traits::{Signed, ToPrimitive, Zero};
    assert!(
        !x.is_negative(),
        "rational_to_f64_down requires a nonnegative value"
    );
    if x.is_zero() {
        return 0.0;
    }
    let n = x.numer().magnitude();
    let d = x.denom().magnitude();
    let sn = n.bits().saturating_sub(500);
    let sd = d.bits().saturating_sub(500);
    let nt = n >> sn;
    let dt = if sd == 0 { d.clone() } else { (d >> sd) + 1u32 };
    let q = nt.to_f64().unwrap() / dt.to_f64().unwrap();
    let scaled = q * pow2(sn as i64 - sd as i64);
    if !scaled.is_finite() {
        // Overflow: the exact value is astronomically large, so any finite
        // number is a valid lower bound.
        return f64::MAX;
    }
    inflate_down(inflate_down(scaled)).max(0.0)
}

/// Exact power of two as f64 (overflow saturates to infinity, underflow to 0).
fn pow2(e: i64) -> f64 {
    if e >= 1024 {
        f64::INFINITY
    } else if e <= -1074 {
        0.0
    } else {
        f64::from_bits(if e >= -1022 {
            ((e + 1023) as u64) << 52
        } else {
            1u64 << (e + 1074) as u64
        })
    }
}

/// A one-sided machine bound on an exact nonnegative real.
///
/// The arithmetic here is closed in the directions the certificate
/// calculus needs: same-direction sums and products, division by an
/// oppositely-directed value, reciprocals (which flip the direction),
/// integer powers and verified k-th roots.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertifiedValue {
    value: f64,
    direction: Direction,
}

impl CertifiedValue {
    /// Wrap a value that is known exactly (no outward rounding applied).
    pub fn exact(value: f64, direction: Direction) -> Self {
        CertifiedValue { value, direction }
    }

    /// An exact upper bound, e.g. a rational constant rounded by the caller.
    pub fn upper(value: f64) -> Self {
        Self::exact(value, Direction::Upper)
    }

    pub fn lower(value: f64) -> Self {
        Self::exact(value, Direction::Lower)
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }

    fn expect_dir(&self, dir: Direction, op: &str) {
        assert!(
            self.direction == dir,
            "certified {op}: expected a {dir:?} operand, got {:?}",
            self.direction
        );
    }

    /// Sum of two bounds of the same direction.
    pub fn add(&self, other: &CertifiedValue) -> CertifiedValue {
        other.expect_dir(self.direction, "add");
        CertifiedValue {
            value: inflate(self.value + other.value, self.direction),
            direction: self.direction,
        }
    }

    /// Add an exactly-known constant (any sign).
    pub fn add_exact(&self, c: f64) -> CertifiedValue {
        CertifiedValue {
            value: inflate(self.value + c, self.direction),
            direction: self.direction,
        }
    }

    /// Product of two same-direction bounds on nonnegative quantities.
    ///
    /// A lower bound that has drifted below zero carries no information
    /// about a nonnegative quantity, so it is clamped to zero here (and the
    /// product then stays at zero, still a sound lower bound).
    pub fn mul(&self, other: &CertifiedValue) -> CertifiedValue {
        other.expect_dir(self.direction, "mul");
        match self.direction {
            Direction::Upper => {
                assert!(
                    self.value >= 0.0 && other.value >= 0.0,
                    "certified mul requires nonnegative upper bounds"
                );
                CertifiedValue {
                    value: inflate_up(self.value * other.value),
                    direction: Direction::Upper,
                }
            }
            Direction::Lower => {
                let a = self.value.max(0.0);
                let b = other.value.max(0.0);
                CertifiedValue {
                    value: inflate_down(a * b).max(0.0),
                    direction: Direction::Lower,
                }
            }
        }
    }

    /// Scale by an exactly-known nonnegative constant.
    pub fn scale(&self, c: f64) -> CertifiedValue {
        assert!(c >= 0.0, "certified scale requires a nonnegative constant");
        CertifiedValue {
            value: inflate(self.value * c, self.direction),
            direction: self.direction,
        }
    }

    /// `self / other` where the denominator is certified on the opposite
    /// side; the result keeps the numerator's direction. A nonpositive
    /// `Lower` denominator admits no finite upper quotient, so the result
    /// degrades to `+inf` (sound, never wrong).
    pub fn div(&self, other: &CertifiedValue) -> CertifiedValue {
        other.expect_dir(self.direction.flip(), "div");
        match self.direction {
            Direction::Upper => {
                assert!(
                    self.value >= 0.0,
                    "certified div requires a nonnegative numerator"
                );
                if other.value <= 0.0 {
                    return CertifiedValue::upper(f64::INFINITY);
                }
                CertifiedValue {
                    value: inflate_up(self.value / other.value),
                    direction: Direction::Upper,
                }
            }
            Direction::Lower => {
                assert!(
                    other.value > 0.0,
                    "certified div by a nonpositive upper bound"
                );
                let num = self.value.max(0.0);
                CertifiedValue {
                    value: inflate_down(num / other.value).max(0.0),
                    direction: Direction::Lower,
                }
            }
        }
    }

    /// Reciprocal; flips the direction. `1/Upper` is a lower bound,
    /// `1/Lower` an upper bound (degrading to `+inf` when the lower bound
    /// is not positive).
    pub fn recip(&self) -> CertifiedValue {
        match self.direction {
            Direction::Upper => {
                assert!(
                    self.value > 0.0,
                    "certified recip of a nonpositive upper bound"
                );
                CertifiedValue {
                    value: inflate_down(1.0 / self.value),
                    direction: Direction::Lower,
                }
            }
            Direction::Lower => {
                if self.value <= 0.0 {
                    return CertifiedValue::upper(f64::INFINITY);
                }
                CertifiedValue {
                    value: inflate_up(1.0 / self.value),
                    direction: Direction::Upper,
                }
            }
        }
    }

    /// `c - self` for an exactly-known `c`; flips the direction.
    pub fn sub_from(&self, c: f64) -> CertifiedValue {
        let dir = self.direction.flip();
        CertifiedValue {
            value: inflate(c - self.value, dir),
            direction: dir,
        }
    }

    /// Integer power, preserving the direction. `k = 0` gives an exact 1.
    pub fn pow(&self, k: u32) -> CertifiedValue {
        let base = match self.direction {
            Direction::Upper => {
                assert!(
                    self.value >= 0.0,
                    "certified pow requires a nonnegative upper bound"
                );
                self.value
            }
            Direction::Lower => self.value.max(0.0),
        };
        CertifiedValue {
            value: directed_pow(base, k, self.direction),
            direction: self.direction,
        }
    }

    /// Verified k-th root, preserving the direction.
    ///
    /// The candidate root from `powf` is nudged outward until its k-th
    /// power, evaluated with inward-directed rounding, lands on the correct
    /// side of the operand; no accuracy guarantee of `powf` is relied on.
    pub fn kth_root(&self, k: u32) -> CertifiedValue {
        assert!(k >= 1, "kth_root requires k >= 1");
        if k == 1 {
            return *self;
        }
        let x = match self.direction {
            // A negative lower bound on a nonnegative quantity carries no
            // information; 0 is an equally valid lower bound for the root.
            Direction::Lower if self.value < 0.0 => 0.0,
            _ => {
                assert!(self.value >= 0.0, "kth_root of a negative upper bound");
                self.value
            }
        };
        if x == 0.0 || !x.is_finite() {
            return CertifiedValue::exact(x, self.direction);
        }
        let mut y = x.powf(1.0 / k as f64);
        match self.direction {
            Direction::Upper => {
                y = inflate_up(y);
                // y is certified once y^k >= x holds even under rounding down.
                while directed_pow(y, k, Direction::Lower) < x {
                    y = y.next_up();
                }
            }
            Direction::Lower => {
                y = inflate_down(y).max(0.0);
                while directed_pow(y, k, Direction::Upper) > x {
                    y = y.next_down();
                    if y < 0.0 {
                        y = 0.0;
                        break;
                    }
                }
            }
        }
        CertifiedValue {
            value: y,
            direction: self.direction,
        }
    }

    /// Sound "less or equal" test: an upper bound on the left-hand exact
    /// value not exceeding a lower bound on the right-hand one proves the
    /// exact inequality. Ties pass.
    pub fn certifies_le(&self, other: &CertifiedValue) -> bool {
        self.expect_dir(Direction::Upper, "certifies_le");
        other.expect_dir(Direction::Lower, "certifies_le");
        self.value <= other.value
    }
}

fn directed_pow(x: f64, k: u32, dir: Direction) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let mut acc = x;
    for _ in 1..k {
        acc = inflate(acc * x, dir);
    }
    acc
}

impl fmt::Display for CertifiedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.direction {
            Direction::Upper => "<=",
            Direction::Lower => ">=",
        };
        write!(f, "{} {}", tag, self.value)
    }
}

// JSON cannot carry IEEE infinities as numbers, and the empty-interval
// threshold sentinel is +inf, so non-finite values serialize as strings.
impl Serialize for CertifiedValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            value: ValueRepr<'a>,
            bound: Direction,
        }
        #[derive(Serialize)]
        #[serde(untagged)]
        enum ValueRepr<'a> {
            Finite(f64),
            Special(&'a str),
        }
        let value = if self.value.is_finite() {
            ValueRepr::Finite(self.value)
        } else if self.value == f64::INFINITY {
            ValueRepr::Special("inf")
        } else if self.value == f64::NEG_INFINITY {
            ValueRepr::Special("-inf")
        } else {
            ValueRepr::Special("nan")
        };
        Repr {
            value,
            bound: self.direction,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CertifiedValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            value: serde_json::Value,
            bound: Direction,
        }
        let repr = Repr::deserialize(deserializer)?;
        let value = match &repr.value {
            serde_json::Value::Number(n) => n
                .as_f64()
                .ok_or_else(|| D::Error::custom("certified value out of f64 range"))?,
            serde_json::Value::String(s) => match s.as_str() {
                "inf" => f64::INFINITY,
                "-inf" => f64::NEG_INFINITY,
                "nan" => f64::NAN,
                other => return Err(D::Error::custom(format!("bad certified value `{other}`"))),
            },
            _ => {
                return Err(D::Error::custom(
                    "certified value must be a number or string",
                ))
            }
        };
        Ok(CertifiedValue {
            value,
            direction: repr.bound,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{FromPrimitive, ToPrimitive};
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn holds(cv: &CertifiedValue, exact: &BigRational) -> bool {
        let v = BigRational::from_f64(cv.value()).unwrap();
        match cv.direction() {
            Direction::Upper => v >= *exact,
            Direction::Lower => v <= *exact,
        }
    }

    #[test]
    fn inflation_moves_strictly_outward() {
        for &x in &[0.0, 1.0, 1e-300, 1e300, 0.1, 3.5] {
            assert!(inflate_up(x) > x);
            assert!(inflate_down(x) < x);
        }
        assert_eq!(inflate_up(f64::INFINITY), f64::INFINITY);
    }

    #[test]
    fn recip_flips_direction() {
        let u = CertifiedValue::upper(4.0);
        let l = u.recip();
        assert_eq!(l.direction(), Direction::Lower);
        assert!(l.value() <= 0.25);
        assert!(l.value() > 0.2499999);
    }

    #[test]
    fn div_by_nonpositive_lower_degrades_to_infinity() {
        let num = CertifiedValue::upper(1.0);
        let den = CertifiedValue::lower(-0.5);
        assert_eq!(num.div(&den).value(), f64::INFINITY);
    }

    #[test]
    fn kth_root_brackets_exact_root() {
        let x = 2.0f64;
        let up = CertifiedValue::upper(x).kth_root(3);
        let lo = CertifiedValue::lower(x).kth_root(3);
        let exact = 2f64.powf(1.0 / 3.0);
        assert!(up.value() >= exact - 1e-12);
        assert!(lo.value() <= exact + 1e-12);
        assert!(up.value() > lo.value());
        // Verified property, independent of powf: lo^3 <= 2 <= up^3.
        assert!(lo.value().powi(3) <= 2.0);
        assert!(up.value().powi(3) >= 2.0);
    }

    #[test]
    fn root_of_negative_lower_clamps_to_zero() {
        let l = CertifiedValue::lower(-1e-9);
        assert_eq!(l.kth_root(3).value(), 0.0);
    }

    #[test]
    fn sub_from_detects_sign() {
        let delta = CertifiedValue::upper(1.25);
        let rem = delta.sub_from(1.0);
        assert_eq!(rem.direction(), Direction::Lower);
        assert!(rem.value() < 0.0);
    }

    #[test]
    fn rational_conversion_brackets_huge_operands() {
        use num_bigint::BigInt;
        // x = (2^4001 + 1) / (3 * 2^4000), slightly above 2/3; numerator and
        // denominator both overflow plain f64 conversion.
        let numer = (BigInt::from(1) << 4001) + 1;
        let denom = BigInt::from(3) * (BigInt::from(1) << 4000);
        let x = BigRational::new(numer, denom);
        let up = rational_to_f64_up(&x);
        let down = rational_to_f64_down(&x);
        assert!(up.is_finite() && down.is_finite());
        assert!(BigRational::from_f64(up).unwrap() >= x);
        assert!(BigRational::from_f64(down).unwrap() <= x);
        assert!((up - down) / up < 1e-12);
    }

    #[test]
    fn serde_roundtrip_including_infinity() {
        for cv in [
            CertifiedValue::upper(7.54),
            CertifiedValue::lower(f64::INFINITY),
        ] {
            let s = serde_json::to_string(&cv).unwrap();
            let back: CertifiedValue = serde_json::from_str(&s).unwrap();
            assert_eq!(back, cv);
            assert_eq!(serde_json::to_string(&back).unwrap(), s);
        }
    }

    proptest! {
        // Chains of certified operations stay on the correct side of the
        // exact rational computation they mirror.
        #[test]
        fn directed_ops_bracket_exact(
            a in 1i64..10_000, b in 1i64..10_000,
            c in 1i64..10_000, d in 1i64..10_000,
            k in 1u32..6,
        ) {
            let xa = rat(a, b);
            let xb = rat(c, d);
            let fa = xa.to_f64().unwrap();
            let fb = xb.to_f64().unwrap();
            // The f64 seeds are not exact, so anchor the exact mirror at the
            // floats themselves.
            let ra = BigRational::from_f64(fa).unwrap();
            let rb = BigRational::from_f64(fb).unwrap();

            for dir in [Direction::Upper, Direction::Lower] {
                let va = CertifiedValue::exact(fa, dir);
                let vb = CertifiedValue::exact(fb, dir);
                prop_assert!(holds(&va.add(&vb), &(&ra + &rb)));
                prop_assert!(holds(&va.mul(&vb), &(&ra * &rb)));
                prop_assert!(holds(&va.pow(k), &num_traits::pow(ra.clone(), k as usize)));
            }

            let up = CertifiedValue::exact(fa, Direction::Upper);
            let lo = CertifiedValue::exact(fb, Direction::Lower);
            prop_assert!(holds(&up.div(&lo), &(&ra / &rb)));
            prop_assert!(holds(&up.recip(), &ra.recip()));
            prop_assert!(holds(&lo.recip(), &rb.recip()));

            // Roots: verify via the defining inequality in exact arithmetic.
            let root_up = up.kth_root(k);
            let root_lo = CertifiedValue::exact(fa, Direction::Lower).kth_root(k);
            let ru = BigRational::from_f64(root_up.value()).unwrap();
            let rl = BigRational::from_f64(root_lo.value()).unwrap();
            prop_assert!(num_traits::pow(ru, k as usize) >= ra);
            prop_assert!(num_traits::pow(rl, k as usize) <= ra);
        }
    }
}
