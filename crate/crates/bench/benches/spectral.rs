//! Criterion benchmarks for the building blocks the spectral pipelines
//! lean on: elliptic function evaluation, one monodromy integration,
//! truncated recurrence eigensolves, and the continued-fraction residual.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use fbzs_core::elliptic::{jacobi_functions, EllipticParameter};
use fbzs_core::monodromy::monodromy;
use fbzs_core::operator::PotentialSpec;
use fbzs_core::tridiag::{dense_eigenvalues, eigenvalues_truncated, truncate, FamilyTag, RecurrenceFamily};
use fbzs_core::{heun, C64};

fn bench_elliptic(c: &mut Criterion) {
    let m = EllipticParameter::new(0.5).unwrap();
    c.bench_function("jacobi_functions m=0.5", |b| {
        b.iter(|| jacobi_functions(black_box(1.3), black_box(m)))
    });
}

fn bench_monodromy(c: &mut Criterion) {
    let m = EllipticParameter::new(0.5).unwrap();
    let spec = PotentialSpec::new(2.0, m).unwrap();
    let mut group = c.benchmark_group("monodromy A=2 m=0.5");
    group.sample_size(30);
    for tol in [1e-8, 1e-10] {
        group.bench_with_input(BenchmarkId::from_parameter(tol), &tol, |b, &tol| {
            b.iter(|| monodromy(&spec, black_box(C64::new(1.0, 0.5)), 0.0, tol).unwrap())
        });
    }
    group.finish();
}

fn bench_tridiag(c: &mut Criterion) {
    let m = EllipticParameter::new(0.5).unwrap();
    let mut group = c.benchmark_group("truncated eigenvalues A=2 m=0.5");
    group.sample_size(20);
    // Similarity-transformed QL path.
    let to_minus = RecurrenceFamily::heun(FamilyTag::ToMinus, 2.0, m).unwrap();
    group.bench_function("ToMinus N=256 (QL)", |b| {
        b.iter(|| eigenvalues_truncated(black_box(&to_minus), 256).unwrap())
    });
    // Dense fallback path: the symmetrizer does not exist for this family.
    let to_plus = RecurrenceFamily::heun(FamilyTag::ToPlus, 2.0, m).unwrap();
    group.bench_function("ToPlus N=128 (dense)", |b| {
        b.iter(|| eigenvalues_truncated(black_box(&to_plus), 128).unwrap())
    });
    // One exponent-sweep step: centered truncation of the Fourier recurrence.
    let bnu = RecurrenceFamily::bnu(2.0, 0.25, m).unwrap();
    group.bench_function("Bnu nu=0.25 N=32 (dense)", |b| {
        b.iter(|| {
            let slice = truncate(black_box(&bnu), 32).unwrap();
            dense_eigenvalues(&slice)
        })
    });
    group.finish();
}

fn bench_continued_fraction(c: &mut Criterion) {
    let m = EllipticParameter::new(0.5).unwrap();
    let fam = RecurrenceFamily::heun(FamilyTag::TinfPlus, 2.0, m).unwrap();
    c.bench_function("perron_residual depth=400", |b| {
        b.iter(|| heun::perron_residual(black_box(&fam), black_box(7.3), 400).unwrap())
    });
}

criterion_group!(
    benches,
    bench_elliptic,
    bench_monodromy,
    bench_tridiag,
    bench_continued_fraction
);
criterion_main!(benches);
