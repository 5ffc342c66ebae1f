use coversys_core::primes::{primes_in, PrimeInterval, SieveConfig};
use criterion::{black_box, Criterion};

pub fn bench(c: &mut Criterion) {
    let cfg = SieveConfig::default();

    c.bench_function("sieve/count_to_1e6", |b| {
        b.iter(|| {
            let n = primes_in(&cfg, PrimeInterval::new(0, 1_000_000))
                .unwrap()
                .count();
            black_box(n)
        })
    });

    // The full range a default certification run sweeps.
    c.bench_function("sieve/count_403_to_e15", |b| {
        b.iter(|| {
            let n = primes_in(&cfg, PrimeInterval::new(403, 3_269_017))
                .unwrap()
                .count();
            black_box(n)
        })
    });
}
