use coasdim_core::ordinal::{ord_rank, random_family};
use coasdim_core::spaces::Interval;
use coasdim_core::verify::oracle_1d_nocover;
use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn oracle(c: &mut Criterion) {
    let mut g = c.benchmark_group("oracle_1d");
    for (lo, hi) in [(-5, 5), (-12, 12)] {
        g.bench_function(format!("n3-R5-k1-[{lo},{hi}]"), |b| {
            b.iter(|| oracle_1d_nocover(3, 5, 1, Interval::new(lo, hi), 50_000_000).unwrap())
        });
    }
    g.bench_function("n2-R3-k2-[-8,8]", |b| {
        b.iter(|| oracle_1d_nocover(2, 3, 2, Interval::new(-8, 8), 50_000_000).unwrap())
    });
    g.finish();
}

fn rank(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    c.bench_function("ord_rank/support-8", |b| {
        b.iter_batched(
            || random_family(&mut rng, 8, 5, 24),
            |m| ord_rank(&m),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, oracle, rank);
criterion_main!(benches);
