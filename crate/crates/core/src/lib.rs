//! Covering systems of integers: exact coverage verification and certified
//! "no covering exists" certificates for prime bases with a lower bound on
//! the admissible primes.
//!
//! The crate has four layers:
//!
//! * [`residue`] — finite residue systems, exact coverage decisions, and the
//!   uncovered set with its exact density.
//! * [`base`] — multiplicative bases, factorization over a base, the
//!   restricted tuple-count `lambda_k`, and certified tail sums over prime
//!   powers.
//! * [`primes`] — a segmented sieve over intervals `(lo, hi]` plus certified
//!   sums and products of per-prime terms.
//! * [`certificate`] — the step-by-step certification pipeline: base-case
//!   bias bound, per-step thresholds, the growth recursion, and the quick
//!   single-product check.
//!
//! One-sided numerical bounds are carried by [`certified::CertifiedValue`],
//! which inflates every elementary operation outward so that an `Upper`
//! value never falls below the exact real it bounds and a `Lower` value
//! never exceeds it.

pub mod base;
pub mod certificate;
pub mod certified;
pub mod factor;
pub mod primes;
pub mod residue;

pub use base::{BaseDescriptor, FactorOutcome, Factorization};
pub use certificate::{
    CertificateParams, CertificateReport, DeltaPolicy, StepReport, ThresholdLadder, Verdict,
};
pub use certified::{CertifiedValue, Direction};
pub use primes::{ExpArg, PrimeInterval, SieveConfig, Threshold};
pub use residue::{CoverLimits, ResidueClass, ResidueSystem, UncoveredSet};
