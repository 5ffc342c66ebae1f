//! Finite residue systems and exact coverage decisions.
//!
//! A system is a finite list of classes `a mod m`. It covers the integers
//! when every integer lies in at least one class; otherwise the uncovered
//! set is a union of residue classes modulo `Q = lcm of the moduli`. The
//! verifier decides coverage by a branching walk over the prime
//! factorization of `Q` (see `cover`), never by enumerating all residues
//! mod `Q` — `Q` is exponentially larger than the system for interesting
//! inputs. Counts and densities are exact, in arbitrary precision.
//!
//! Conventions the verifier fixes (the underlying mathematics leaves them
//! open): a modulus of 1 is legal and covers everything by itself, and
//! repeated moduli are accepted by default, with a strict constructor that
//! rejects them.

mod cover;
pub mod format;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SystemError {
    #[error("modulus must be at least 1")]
    ZeroModulus,
    #[error("repeated modulus {0} (strict mode)")]
    RepeatedModulus(BigUint),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoverError {
    #[error(
        "branching state exceeded {max_nodes} nodes; refusing (raise the node limit to proceed)"
    )]
    ResourceLimit { max_nodes: u64 },
    #[error("modulus {0} exceeds the supported 64-bit range")]
    ModulusTooLarge(BigUint),
}

/// A residue class `residue mod modulus`, normalized to
/// `0 <= residue < modulus` on construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ResidueClass {
    residue: BigUint,
    modulus: BigUint,
}

impl ResidueClass {
    /// Build a class from any integer residue (negative and overlarge
    /// residues are reduced) and a modulus `>= 1`.
    pub fn new(
        residue: impl Into<BigInt>,
        modulus: impl Into<BigUint>,
    ) -> Result<Self, SystemError> {
        let modulus: BigUint = modulus.into();
        if modulus.is_zero() {
            return Err(SystemError::ZeroModulus);
        }
        let m_int = BigInt::from(modulus.clone());
        // mod_floor takes the sign of the (positive) modulus.
        let r = residue.into().mod_floor(&m_int);
        Ok(ResidueClass {
            residue: r.to_biguint().expect("normalized residue is nonnegative"),
            modulus,
        })
    }

    pub fn residue(&self) -> &BigUint {
        &self.residue
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn contains(&self, n: &BigInt) -> bool {
        let m = BigInt::from(self.modulus.clone());
        n.mod_floor(&m).to_biguint().unwrap() == self.residue
    }
}

impl fmt::Display for ResidueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.residue, self.modulus)
    }
}

/// Work bounds for the branching verifier. Exceeding them is a refusal,
/// never a wrong answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoverLimits {
    /// Nodes the branching walk may visit.
    pub max_nodes: u64,
    /// Residues enumerated into the sample when no explicit cap is given.
    pub max_enumeration: u64,
}

impl Default for CoverLimits {
    fn default() -> Self {
        CoverLimits {
            max_nodes: 4_000_000,
            max_enumeration: 1 << 20,
        }
    }
}

/// An ordered, finite collection of residue classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueSystem {
    classes: Vec<ResidueClass>,
}

impl ResidueSystem {
    /// A system that tolerates repeated moduli (the verifier default).
    pub fn new(classes: Vec<ResidueClass>) -> Self {
        ResidueSystem { classes }
    }

    /// Strict constructor: rejects any modulus appearing twice.
    pub fn distinct_moduli(classes: Vec<ResidueClass>) -> Result<Self, SystemError> {
        let mut moduli: Vec<&BigUint> = classes.iter().map(|c| &c.modulus).collect();
        moduli.sort();
        for w in moduli.windows(2) {
            if w[0] == w[1] {
                return Err(SystemError::RepeatedModulus(w[0].clone()));
            }
        }
        Ok(ResidueSystem { classes })
    }

    pub fn classes(&self) -> &[ResidueClass] {
        &self.classes
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    /// `lcm` of all moduli; 1 for the empty system. Arbitrary precision,
    /// so there is no overflow to report.
    pub fn lcm(&self) -> BigUint {
        self.classes
            .iter()
            .fold(BigUint::one(), |acc, c| acc.lcm(&c.modulus))
    }

    /// Exact uncovered set modulo `lcm`, with default work limits.
    ///
    /// `cap` limits how many residues are materialized into the sample;
    /// the count and density are exact regardless.
    pub fn uncovered_classes(&self, cap: Option<usize>) -> Result<UncoveredSet, CoverError> {
        self.uncovered_classes_with(cap, &CoverLimits::default())
    }

    pub fn uncovered_classes_with(
        &self,
        cap: Option<usize>,
        limits: &CoverLimits,
    ) -> Result<UncoveredSet, CoverError> {
        let outcome = cover::walk(self, limits, cover::Mode::Full)?;
        Ok(assemble(self, outcome, cap, limits))
    }

    /// Does the system cover the integers? Early-exits on the first
    /// uncovered class found.
    pub fn is_covering(&self) -> Result<bool, CoverError> {
        self.is_covering_with(&CoverLimits::default())
    }

    pub fn is_covering_with(&self, limits: &CoverLimits) -> Result<bool, CoverError> {
        let outcome = cover::walk(self, limits, cover::Mode::EarlyExit)?;
        Ok(outcome.strata.is_empty())
    }

    /// Exact uncovered density `|R mod Q| / Q` in lowest terms.
    pub fn uncovered_density(&self) -> Result<BigRational, CoverError> {
        self.uncovered_density_with(&CoverLimits::default())
    }

    pub fn uncovered_density_with(&self, limits: &CoverLimits) -> Result<BigRational, CoverError> {
        Ok(self
            .uncovered_classes_with(Some(0), limits)?
            .density()
            .clone())
    }
}

/// Free-function spelling of [`ResidueSystem::lcm`].
pub fn lcm_of_system(system: &ResidueSystem) -> BigUint {
    system.lcm()
}

/// One maximal uncovered stratum: the full residue class
/// `residue mod modulus` with `modulus | Q` is uncovered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stratum {
    pub residue: BigUint,
    pub modulus: BigUint,
}

/// The uncovered set of a system, modulo `Q`.
///
/// Stored implicitly as disjoint strata plus the exact count and density;
/// `sample` holds the smallest uncovered residues, ascending, up to the
/// requested cap.
#[derive(Debug, Clone, PartialEq)]
pub struct UncoveredSet {
    modulus: BigUint,
    count: BigUint,
    density: BigRational,
    strata: Vec<Stratum>,
    sample: Vec<BigUint>,
    sample_complete: bool,
}

impl UncoveredSet {
    /// `Q`, the lcm of the system's moduli.
    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    /// Exact `|R mod Q|`.
    pub fn count(&self) -> &BigUint {
        &self.count
    }

    /// Exact `|R mod Q| / Q` in lowest terms; zero iff the system covers.
    pub fn density(&self) -> &BigRational {
        &self.density
    }

    pub fn covers(&self) -> bool {
        self.count.is_zero()
    }

    /// Disjoint residue classes (modulo divisors of `Q`) whose union is the
    /// uncovered set.
    pub fn strata(&self) -> &[Stratum] {
        &self.strata
    }

    /// Smallest uncovered residues mod `Q`, ascending, as enumerated under
    /// the cap.
    pub fn sample(&self) -> &[BigUint] {
        &self.sample
    }

    /// Whether `sample` holds the entire uncovered set.
    pub fn sample_complete(&self) -> bool {
        self.sample_complete
    }
}

fn assemble(
    system: &ResidueSystem,
    outcome: cover::Outcome,
    cap: Option<usize>,
    limits: &CoverLimits,
) -> UncoveredSet {
    let q = system.lcm();
    let mut count = BigUint::zero();
    let mut strata = Vec::with_capacity(outcome.strata.len());
    for leaf in outcome.strata {
        count += &q / &leaf.modulus;
        strata.push(leaf);
    }
    let density = BigRational::new(count.clone().into(), q.clone().into());

    let budget = match cap {
        Some(c) => c.min(limits.max_enumeration as usize),
        None => limits.max_enumeration as usize,
    };
    let (sample, sample_complete) = enumerate_sample(&q, &strata, &count, budget);
    UncoveredSet {
        modulus: q,
        count,
        density,
        strata,
        sample,
        sample_complete,
    }
}

/// Ascending merge of the strata's arithmetic progressions, stopping at
/// `budget` residues.
fn enumerate_sample(
    q: &BigUint,
    strata: &[Stratum],
    count: &BigUint,
    budget: usize,
) -> (Vec<BigUint>, bool) {
    let complete_possible = count <= &BigUint::from(budget as u64);
    let mut heap: BinaryHeap<Reverse<(BigUint, usize)>> = strata
        .iter()
        .enumerate()
        .map(|(i, s)| Reverse((s.residue.clone(), i)))
        .collect();
    let mut out = Vec::new();
    while out.len() < budget {
        let Some(Reverse((r, i))) = heap.pop() else {
            break;
        };
        let next = &r + &strata[i].modulus;
        if &next < q {
            heap.push(Reverse((next, i)));
        }
        out.push(r);
    }
    let complete = complete_possible && BigUint::from(out.len() as u64) == *count;
    (out, complete)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn class(a: i64, m: u64) -> ResidueClass {
        ResidueClass::new(a, m).unwrap()
    }

    /// The classic covering system in which every modulus divides 12.
    pub(crate) fn erdos12() -> ResidueSystem {
        ResidueSystem::new(vec![
            class(0, 2),
            class(0, 3),
            class(1, 4),
            class(1, 6),
            class(11, 12),
        ])
    }

    #[test]
    fn normalization() {
        assert_eq!(class(-1, 4), class(3, 4));
        assert_eq!(class(17, 5), class(2, 5));
        assert_eq!(
            ResidueClass::new(0, 0u64).unwrap_err(),
            SystemError::ZeroModulus
        );
    }

    #[test]
    fn lcm_examples() {
        let s = ResidueSystem::new(vec![class(0, 2), class(0, 3)]);
        assert_eq!(s.lcm(), BigUint::from(6u32));
        assert_eq!(erdos12().lcm(), BigUint::from(12u32));
        assert_eq!(ResidueSystem::new(vec![]).lcm(), BigUint::one());
    }

    #[test]
    fn lcm_beyond_machine_words() {
        // Primorial moduli force Q past u64 without any overflow report,
        // because the representation is arbitrary precision.
        let primes = [
            2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61,
        ];
        let classes: Vec<_> = primes.iter().map(|&p| class(0, p)).collect();
        let q = ResidueSystem::new(classes).lcm();
        assert!(q > BigUint::from(u64::MAX));
    }

    #[test]
    fn mod12_system_covers() {
        let s = erdos12();
        assert!(s.is_covering().unwrap());
        let u = s.uncovered_classes(None).unwrap();
        assert!(u.covers());
        assert!(u.density().is_zero());
        assert_eq!(u.modulus(), &BigUint::from(12u32));
    }

    #[test]
    fn dropping_the_12_class_leaves_11() {
        let s = ResidueSystem::new(vec![class(0, 2), class(0, 3), class(1, 4), class(1, 6)]);
        let u = s.uncovered_classes(None).unwrap();
        assert_eq!(u.count(), &BigUint::one());
        assert_eq!(u.density(), &BigRational::new(1.into(), 12.into()));
        assert_eq!(u.sample(), &[BigUint::from(11u32)]);
        assert!(u.sample_complete());
        assert!(!s.is_covering().unwrap());
    }

    #[test]
    fn single_class_leaves_complement() {
        let s = ResidueSystem::new(vec![class(0, 2)]);
        let u = s.uncovered_classes(None).unwrap();
        assert_eq!(u.density(), &BigRational::new(1.into(), 2.into()));
        assert_eq!(u.sample(), &[BigUint::one()]);
    }

    #[test]
    fn empty_system_and_modulus_one() {
        let empty = ResidueSystem::new(vec![]);
        let u = empty.uncovered_classes(None).unwrap();
        assert_eq!(u.density(), &BigRational::one());
        assert_eq!(u.count(), &BigUint::one());
        assert!(!empty.is_covering().unwrap());

        let trivial = ResidueSystem::new(vec![class(0, 1)]);
        assert!(trivial.is_covering().unwrap());
        assert_eq!(trivial.uncovered_density().unwrap(), BigRational::zero());
    }

    #[test]
    fn density_examples() {
        let s = ResidueSystem::new(vec![class(0, 2), class(1, 4)]);
        assert_eq!(
            s.uncovered_density().unwrap(),
            BigRational::new(1.into(), 4.into())
        );
    }

    #[test]
    fn strict_mode_rejects_repeats() {
        let err = ResidueSystem::distinct_moduli(vec![class(0, 4), class(1, 4)]).unwrap_err();
        assert_eq!(err, SystemError::RepeatedModulus(BigUint::from(4u32)));
        // Default mode accepts the same input.
        let s = ResidueSystem::new(vec![class(0, 4), class(1, 4)]);
        assert_eq!(
            s.uncovered_density().unwrap(),
            BigRational::new(1.into(), 2.into())
        );
    }

    #[test]
    fn resource_refusal_on_tiny_node_budget() {
        let limits = CoverLimits {
            max_nodes: 2,
            max_enumeration: 16,
        };
        let err = erdos12().uncovered_classes_with(None, &limits).unwrap_err();
        assert!(matches!(err, CoverError::ResourceLimit { .. }));
    }

    #[test]
    fn big_q_small_tree_is_fine() {
        // For each prime p <= 61, cover every residue except p-1. Q is the
        // primorial (far beyond u64) yet the walk visits ~sum(p) nodes and
        // the uncovered set is the single class -1 mod Q.
        let primes = [
            2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61,
        ];
        let mut classes = Vec::new();
        for &p in &primes {
            for r in 0..p - 1 {
                classes.push(class(r as i64, p));
            }
        }
        let s = ResidueSystem::new(classes);
        let u = s.uncovered_classes(None).unwrap();
        assert!(u.modulus() > &BigUint::from(u64::MAX));
        assert_eq!(u.count(), &BigUint::one());
        assert_eq!(u.strata().len(), 1);
        let q = u.modulus().clone();
        assert_eq!(u.strata()[0].residue, &q - BigUint::one());
        assert!(!s.is_covering().unwrap());
    }

    #[test]
    fn exponential_uncovered_set_is_refused() {
        // Ten coprime moduli each excluding one residue leave a product-set
        // of strata no exact representation can list; the walk refuses at
        // its node budget instead of thrashing.
        let primes = [101u64, 103, 107, 109, 113, 127, 131, 137, 139, 149];
        let classes: Vec<_> = primes.iter().map(|&p| class(1, p)).collect();
        let s = ResidueSystem::new(classes);
        let err = s.uncovered_classes(None).unwrap_err();
        assert!(matches!(err, CoverError::ResourceLimit { .. }));
    }

    #[test]
    fn sample_cap_truncates_but_count_is_exact() {
        let s = ResidueSystem::new(vec![class(0, 7)]);
        let u = s.uncovered_classes(Some(3)).unwrap();
        assert_eq!(u.count(), &BigUint::from(6u32));
        assert_eq!(
            u.sample(),
            &[
                BigUint::from(1u32),
                BigUint::from(2u32),
                BigUint::from(3u32)
            ]
        );
        assert!(!u.sample_complete());
    }
}
