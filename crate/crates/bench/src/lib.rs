//! Shared inputs for the benchmarks.

use coversys_core::residue::{ResidueClass, ResidueSystem};

/// The classic five-class covering system with all moduli dividing 12.
pub fn mod12_cover() -> ResidueSystem {
    let classes = [(0i64, 2u64), (0, 3), (1, 4), (1, 6), (11, 12)]
        .into_iter()
        .map(|(a, m)| ResidueClass::new(a, m).unwrap())
        .collect();
    ResidueSystem::new(classes)
}

/// For each prime `p` in the first `n` primes, cover every residue except
/// `p - 1`. The lcm is the primorial; exactly one class mod Q stays
/// uncovered, and the branching walk stays linear in `sum(p)`.
pub fn primorial_complement(n: usize) -> ResidueSystem {
    let primes = [
        2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61,
    ];
    let mut classes = Vec::new();
    for &p in primes.iter().take(n) {
        for r in 0..p - 1 {
            classes.push(ResidueClass::new(r as i64, p).unwrap());
        }
    }
    ResidueSystem::new(classes)
}
