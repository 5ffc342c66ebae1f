//! The branching coverage walk.
//!
//! Nodes of the walk are residue classes `r mod D` where `D` runs over
//! divisors of `Q` built up one prime at a time. A node is pruned when some
//! input class contains it entirely, dropped classes are those provably
//! disjoint from the node, and a node with no classes left is a maximal
//! uncovered stratum. Node residues are kept as per-prime components
//! (`r mod p^e` for each prime of `Q`), so the hot loop is pure `u64`
//! arithmetic; big integers appear only when a stratum is emitted.

use super::{CoverError, CoverLimits, ResidueSystem, Stratum};
use crate::factor::factor_u64;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

#[derive(Clone, Copy, PartialEq, Eq)]
pub(super) enum Mode {
    Full,
    EarlyExit,
}

pub(super) struct Outcome {
    pub strata: Vec<Stratum>,
}

struct Part {
    prime: usize,
    exp: u32,
    residue: u64, // class residue mod prime^exp
}

struct ClassParts {
    parts: Vec<Part>,
}

#[derive(Clone)]
struct Node {
    exps: Vec<u32>,
    res: Vec<u64>, // res[i] mod primes[i]^exps[i]
    active: Vec<u32>,
}

pub(super) fn walk(
    system: &ResidueSystem,
    limits: &CoverLimits,
    mode: Mode,
) -> Result<Outcome, CoverError> {
    // Factor every modulus; the union of the factorizations is Q's.
    let mut factored = Vec::with_capacity(system.len());
    for class in system.classes() {
        let m = class
            .modulus()
            .to_u64()
            .ok_or_else(|| CoverError::ModulusTooLarge(class.modulus().clone()))?;
        factored.push(factor_u64(m));
    }

    let mut primes: Vec<u64> = factored.iter().flatten().map(|&(p, _)| p).collect();
    primes.sort_unstable();
    primes.dedup();
    let prime_index = |p: u64| primes.binary_search(&p).expect("prime collected above");

    let mut q_exps = vec![0u32; primes.len()];
    for f in &factored {
        for &(p, e) in f {
            let i = prime_index(p);
            q_exps[i] = q_exps[i].max(e);
        }
    }
    // pow[i][j] = primes[i]^j; every entry divides some input modulus, so
    // it fits u64.
    let pow: Vec<Vec<u64>> = primes
        .iter()
        .zip(&q_exps)
        .map(|(&p, &e)| {
            let mut v = Vec::with_capacity(e as usize + 1);
            let mut acc = 1u64;
            v.push(acc);
            for _ in 0..e {
                acc *= p;
                v.push(acc);
            }
            v
        })
        .collect();

    let classes: Vec<ClassParts> = system
        .classes()
        .iter()
        .zip(&factored)
        .map(|(class, f)| ClassParts {
            parts: f
                .iter()
                .map(|&(p, e)| {
                    let i = prime_index(p);
                    let pe = pow[i][e as usize];
                    let residue = (class.residue() % BigUint::from(pe))
                        .to_u64()
                        .expect("residue reduced below a u64 prime power");
                    Part {
                        prime: i,
                        exp: e,
                        residue,
                    }
                })
                .collect(),
        })
        .collect();

    let mut strata = Vec::new();
    let mut nodes: u64 = 1;
    let mut stack = vec![Node {
        exps: vec![0; primes.len()],
        res: vec![0; primes.len()],
        active: (0..classes.len() as u32).collect(),
    }];

    while let Some(node) = stack.pop() {
        let mut next_active = Vec::new();
        let mut covered = false;
        let mut branch: usize = usize::MAX;
        for &ci in &node.active {
            let mut compat = true;
            let mut first_pending = usize::MAX;
            for part in &classes[ci as usize].parts {
                let cur = node.exps[part.prime];
                let pe = pow[part.prime][part.exp.min(cur) as usize];
                if node.res[part.prime] % pe != part.residue % pe {
                    compat = false;
                    break;
                }
                if part.exp > cur {
                    first_pending = first_pending.min(part.prime);
                }
            }
            if !compat {
                continue; // disjoint from this node, forever
            }
            if first_pending == usize::MAX {
                covered = true; // class contains the whole node
                break;
            }
            next_active.push(ci);
            branch = branch.min(first_pending);
        }
        if covered {
            continue;
        }
        if next_active.is_empty() {
            strata.push(emit(&node, &pow));
            if mode == Mode::EarlyExit {
                return Ok(Outcome { strata });
            }
            continue;
        }

        let p = primes[branch];
        let step = pow[branch][node.exps[branch] as usize];
        // Push children in descending residue order so the stack pops them
        // ascending; output order is then deterministic.
        let mut t = p;
        while t > 0 {
            t -= 1;
            nodes += 1;
            if nodes > limits.max_nodes {
                return Err(CoverError::ResourceLimit {
                    max_nodes: limits.max_nodes,
                });
            }
            let mut child = node.clone();
            child.exps[branch] += 1;
            child.res[branch] = node.res[branch] + t * step;
            child.active = next_active.clone();
            stack.push(child);
        }
    }
    Ok(Outcome { strata })
}

/// Recombine a leaf's per-prime components into `r mod D` by CRT.
fn emit(node: &Node, pow: &[Vec<u64>]) -> Stratum {
    let mut residue = BigUint::zero();
    let mut modulus = BigUint::one();
    for (i, &e) in node.exps.iter().enumerate() {
        if e == 0 {
            continue;
        }
        let pe = pow[i][e as usize];
        let a = node.res[i];
        let m_mod = (&modulus % BigUint::from(pe)).to_u64().unwrap();
        let r_mod = (&residue % BigUint::from(pe)).to_u64().unwrap();
        let diff = (a + pe - r_mod) % pe;
        let t = mul_mod(diff, mod_inverse(m_mod, pe), pe);
        residue += &modulus * BigUint::from(t);
        modulus *= BigUint::from(pe);
    }
    Stratum { residue, modulus }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Modular inverse by the extended Euclidean algorithm; `a` and `modulus`
/// must be coprime (they are: CRT moduli here are pairwise coprime).
fn mod_inverse(a: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let (mut t, mut new_t): (i128, i128) = (0, 1);
    let (mut r, mut new_r): (i128, i128) = (modulus as i128, (a % modulus) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    debug_assert_eq!(r, 1, "inverse requires coprime operands");
    if t < 0 {
        t += modulus as i128;
    }
    t as u64
}

#[cfg(test)]
mod tests {
    use super::super::{CoverLimits, ResidueClass, ResidueSystem};
    use super::*;

    fn system(classes: &[(i64, u64)]) -> ResidueSystem {
        ResidueSystem::new(
            classes
                .iter()
                .map(|&(a, m)| ResidueClass::new(a, m).unwrap())
                .collect(),
        )
    }

    /// Direct enumeration oracle over 0..Q.
    fn enumerate_uncovered(classes: &[(i64, u64)]) -> Vec<u64> {
        let q = classes
            .iter()
            .fold(1u64, |acc, &(_, m)| acc / num_integer::gcd(acc, m) * m);
        (0..q)
            .filter(|&r| {
                !classes
                    .iter()
                    .any(|&(a, m)| r % m == a.rem_euclid(m as i64) as u64)
            })
            .collect()
    }

    fn walk_residues(classes: &[(i64, u64)]) -> Vec<u64> {
        let s = system(classes);
        let u = s.uncovered_classes(None).unwrap();
        assert!(u.sample_complete());
        u.sample().iter().map(|r| r.to_u64().unwrap()).collect()
    }

    #[test]
    fn matches_enumeration_on_fixed_cases() {
        let cases: &[&[(i64, u64)]] = &[
            &[(0, 2)],
            &[(0, 2), (0, 3), (1, 4), (1, 6)],
            &[(0, 2), (0, 3), (1, 4), (1, 6), (11, 12)],
            &[(1, 2), (2, 4), (0, 8), (4, 8)],
            &[(0, 3), (1, 3)],
            &[(5, 9), (2, 6), (0, 2), (1, 4)],
            &[(0, 1)],
            &[],
        ];
        for &classes in cases {
            assert_eq!(
                walk_residues(classes),
                enumerate_uncovered(classes),
                "classes: {classes:?}"
            );
        }
    }

    #[test]
    fn strata_are_disjoint_and_exhaustive() {
        let s = system(&[(1, 2), (2, 4)]);
        let u = s.uncovered_classes(None).unwrap();
        // Uncovered: 0 mod 4; the walk should report it as one stratum.
        assert_eq!(u.strata().len(), 1);
        assert_eq!(u.strata()[0].residue, BigUint::zero());
        assert_eq!(u.strata()[0].modulus, BigUint::from(4u32));
    }

    #[test]
    fn early_exit_agrees_with_full_walk() {
        let covering = system(&[(0, 2), (0, 3), (1, 4), (1, 6), (11, 12)]);
        let limits = CoverLimits::default();
        assert_eq!(
            walk(&covering, &limits, Mode::EarlyExit)
                .unwrap()
                .strata
                .is_empty(),
            walk(&covering, &limits, Mode::Full)
                .unwrap()
                .strata
                .is_empty()
        );
    }

    #[test]
    fn modulus_beyond_u64_is_refused() {
        let big = BigUint::from(u64::MAX) + BigUint::from(2u32);
        let class = ResidueClass::new(1, big.clone()).unwrap();
        let err = ResidueSystem::new(vec![class]).is_covering().unwrap_err();
        assert_eq!(err, CoverError::ModulusTooLarge(big));
    }
}
