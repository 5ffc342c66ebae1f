mod sieve;

use criterion::{criterion_group, criterion_main, Criterion};

fn config() -> Criterion {
    Criterion::default().sample_size(10)
}

criterion_group! {
    name = benches;
    config = config();
    targets = sieve::bench, certify::bench, cover::bench
}
criterion_main!(benches);
