use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use jointrisk::{
    alpha_c, axiom_suite, empirical_copula, gamma_dyadic, gamma_ls_form, gamma_survival_form,
    gof_distance, h_vector, mtce, ConfidenceBand, Copula, DistortionFn, JointRiskSpec, TailKind,
};
use jointrisk_bench::scrambled;
use std::hint::black_box;

fn spec(d: usize) -> JointRiskSpec {
    let c = Copula::clayton(d, 2.0).unwrap();
    JointRiskSpec::uniform(c.survival(), DistortionFn::cvar_ramp(0.9).unwrap())
}

fn scalar_forms(c: &mut Criterion) {
    let mut group = c.benchmark_group("gamma");
    for (d, m) in [(2, 64), (2, 256), (3, 32), (3, 64)] {
        let s = scrambled(d, m);
        let spec = spec(d);
        let id = format!("d{d}_m{m}");
        group.bench_with_input(BenchmarkId::new("survival", &id), &s, |b, s| {
            b.iter(|| gamma_survival_form(black_box(s), &spec).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("ls", &id), &s, |b, s| {
            b.iter(|| gamma_ls_form(black_box(s), &spec).unwrap())
        });
    }
    let s = scrambled(2, 64);
    let spec2 = spec(2);
    for n in [12, 16] {
        group.bench_with_input(BenchmarkId::new("dyadic_d2_m64", n), &n, |b, &n| {
            b.iter(|| gamma_dyadic(black_box(&s), &spec2, n).unwrap())
        });
    }
    group.finish();
}

fn vectors(c: &mut Criterion) {
    let s = scrambled(3, 1024);
    let spec = spec(3);
    let gumbel = Copula::gumbel(3, 2.0).unwrap();
    c.bench_function("h_vector_d3_m1024", |b| {
        b.iter(|| h_vector(black_box(&s), &spec).unwrap())
    });
    c.bench_function("mtce_d3_m1024", |b| {
        b.iter(|| mtce(black_box(&s), &gumbel, 0.9).unwrap())
    });
}

fn copulas(c: &mut Criterion) {
    let band = ConfidenceBand::new(0.9, 0.99).unwrap();
    let frank = Copula::frank(2, 5.0).unwrap();
    c.bench_function("alpha_c_frank_grid200", |b| {
        b.iter(|| alpha_c(black_box(&frank), band, 200).unwrap())
    });
    let s = scrambled(2, 256);
    let e = empirical_copula(&s).unwrap();
    c.bench_function("gof_empirical_m256_grid50", |b| {
        b.iter(|| gof_distance(black_box(&e), &frank, 50).unwrap())
    });
}

fn axioms(c: &mut Criterion) {
    let factory = |c: &Copula| {
        let band = ConfidenceBand::new(0.9, 0.99)?;
        Ok(JointRiskSpec::mixture(c, band, &[TailKind::Cvar; 2], 50)?.0)
    };
    let clayton = Copula::clayton(2, 2.0).unwrap();
    let mut group = c.benchmark_group("axioms");
    group.sample_size(10);
    group.bench_function("clayton_d2_20_trials", |b| {
        b.iter(|| axiom_suite(&factory, black_box(&clayton), 7, 20).unwrap())
    });
    group.finish();
}

criterion_group!(benches, scalar_forms, vectors, copulas, axioms);
criterion_main!(benches);
