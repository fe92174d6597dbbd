use criterion::{criterion_group, criterion_main, Criterion};
use mtc_coset_bench::{coset_set, generator_set};
use mtc_coset_core::coset::solve_branching;
use mtc_coset_core::spectral::diagonalize;
use std::hint::black_box;

fn generators(c: &mut Criterion) {
    let data = generator_set().unwrap();
    c.bench_function("validate_generators", |b| {
        b.iter(|| data.iter().all(|md| black_box(md.validate()).passed()))
    });
}

fn cosets(c: &mut Criterion) {
    for (name, cs) in coset_set().unwrap() {
        c.bench_function(&format!("{name}/solve_branching"), |b| {
            b.iter(|| solve_branching(cs.md1(), cs.md2(), cs.mdc(), 2).unwrap().len())
        });
        c.bench_function(&format!("{name}/diagnostics"), |b| {
            b.iter(|| {
                black_box(cs.kw_set().unwrap());
                black_box(cs.check_dim_formulas().unwrap());
                black_box(cs.field_identification().unwrap());
                black_box(cs.kw_hypothesis().unwrap());
            })
        });
        c.bench_function(&format!("{name}/spectral"), |b| {
            b.iter(|| {
                let sys = cs.module_fusion_system().unwrap();
                let spectrum = diagonalize(&sys, cs.mdc(), cs.ambient()).unwrap();
                black_box(spectrum.verify_spectral_identities().unwrap())
            })
        });
    }
}

criterion_group! {
    name = pipeline;
    config = Criterion::default().sample_size(10);
    targets = generators, cosets
}
criterion_main!(pipeline);
