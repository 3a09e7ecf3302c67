use coasdim_bench::{phi_case, verify_cases};
use coasdim_core::verify::{check_coarse_control, verify_cover_with, VerifyOptions};
use criterion::{criterion_group, criterion_main, Criterion};

fn verify(c: &mut Criterion) {
    let mut g = c.benchmark_group("verify_cover");
    g.sample_size(10);
    let opts = VerifyOptions::default();
    for case in verify_cases().expect("bench cases build") {
        g.bench_function(case.label, |b| {
            b.iter(|| {
                let r = verify_cover_with(&case.scheme, case.scheme.space(), &case.windows, &opts).unwrap();
                assert!(r.passed());
                r.points
            })
        });
    }
    g.finish();
}

fn control(c: &mut Criterion) {
    let (f, dom, cod, w) = phi_case();
    c.bench_function("coarse_control/phi-3", |b| {
        b.iter(|| check_coarse_control(&f, &dom, &cod, &w).unwrap().pairs)
    });
}

criterion_group!(benches, verify, control);
criterion_main!(benches);
