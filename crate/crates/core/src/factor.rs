//! Integer factorization for 64-bit moduli and base elements.
//!
//! Deterministic Miller–Rabin over the full `u64` range plus Brent's cycle
//! variant of Pollard's rho. Moduli seen by the coverage engine and base
//! elements are at most 64 bits; anything larger is refused upstream.

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin; the fixed base set decides primality for
/// every `n < 2^64`.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// One nontrivial factor of an odd composite `n`, by Brent's rho.
fn rho_factor(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        let mut q = 1u64;
        let mut count = 0u32;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            q = mul_mod(q, x.abs_diff(y).max(1), n);
            count += 1;
            if count.is_multiple_of(64) {
                d = gcd_u64(q, n);
            }
        }
        if d == n {
            // Batch gcd overshot; retry step by step with the same constant.
            x = 2;
            y = 2;
            d = 1;
            while d == 1 {
                x = f(x);
                y = f(f(y));
                d = gcd_u64(x.abs_diff(y).max(1), n);
            }
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

/// Prime factorization of `n >= 1`, as ascending `(prime, exponent)` pairs.
pub fn factor_u64(n: u64) -> Vec<(u64, u32)> {
    let mut factors = Vec::new();
    if n <= 1 {
        return factors;
    }
    let mut rest = n;
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
        if rest.is_multiple_of(p) {
            let mut e = 0u32;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            factors.push((p, e));
        }
    }
    let mut stack = Vec::new();
    if rest > 1 {
        stack.push(rest);
    }
    let mut odd: Vec<(u64, u32)> = Vec::new();
    while let Some(m) = stack.pop() {
        if is_prime_u64(m) {
            match odd.iter_mut().find(|(p, _)| *p == m) {
                Some((_, e)) => *e += 1,
                None => odd.push((m, 1)),
            }
            continue;
        }
        let d = rho_factor(m);
        stack.push(d);
        stack.push(m / d);
    }
    odd.sort_unstable();
    factors.extend(odd);
    factors
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_primality_matches_trial_division() {
        let trial = |n: u64| {
            n >= 2
                && (2..n)
                    .take_while(|d| d * d <= n)
                    .all(|d| !n.is_multiple_of(d))
        };
        for n in 0..2000 {
            assert_eq!(is_prime_u64(n), trial(n), "n = {n}");
        }
    }

    #[test]
    fn large_prime_recognized() {
        assert!(is_prime_u64(18_446_744_073_709_551_557)); // largest u64 prime
        assert!(!is_prime_u64(18_446_744_073_709_551_555));
    }

    #[test]
    fn factorization_reconstructs() {
        for n in [
            1u64,
            2,
            12,
            667,
            2 * 3 * 5 * 7 * 11 * 13,
            1 << 40,
            999_999_999_989,
        ] {
            let f = factor_u64(n);
            let back: u128 = f.iter().map(|&(p, e)| (p as u128).pow(e)).product();
            if n == 1 {
                assert!(f.is_empty());
            } else {
                assert_eq!(back, n as u128);
            }
            assert!(f.windows(2).all(|w| w[0].0 < w[1].0));
            assert!(f.iter().all(|&(p, _)| is_prime_u64(p)));
        }
    }

    #[test]
    fn semiprime_with_large_factors() {
        let p = 4_294_967_291u64; // prime near 2^32
        let q = 4_294_967_279u64;
        let f = factor_u64(p * q);
        assert_eq!(f, vec![(q, 1), (p, 1)]);
    }
}
