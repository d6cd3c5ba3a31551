use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qlinear::coherent::{corollary1_suite, random_pr_plant, SuiteSpec};
use qlinear::par::Exec;
use qlinear::qsys::{random_pr_system, GenOptions, SystemKind};
use qlinear::tol::Tolerances;
use qlinear::xfer::{hinf_norm_with, jj_unitary_check_with, lossless_br_check_with};
use std::hint::black_box;

const POLICIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn zero_gain_suite(c: &mut Criterion) {
    let mut group = c.benchmark_group("c1_suite");
    let spec = SuiteSpec { count: 24, seed: 7, dims: Some((3, 2)) };
    for (name, exec) in POLICIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| black_box(corollary1_suite(&spec, exec)))
        });
    }
    group.finish();
}

fn frequency_sweeps(c: &mut Criterion) {
    let t = Tolerances::default();
    let ann =
        random_pr_system(6, 3, 11, GenOptions::new(SystemKind::Annihilation).hurwitz(true)).unwrap().system.to_tf();
    let gen = random_pr_system(4, 2, 11, GenOptions::new(SystemKind::General)).unwrap().system.to_tf();
    let plant = random_pr_plant(6, 2, 2, 3).unwrap().output_tf();

    let mut group = c.benchmark_group("grid_sweep");
    for (name, exec) in POLICIES {
        group.bench_with_input(BenchmarkId::new("lossless_br", name), &exec, |b, &exec| {
            b.iter(|| black_box(lossless_br_check_with(&ann, &t, exec)))
        });
        group.bench_with_input(BenchmarkId::new("jj_unitary", name), &exec, |b, &exec| {
            b.iter(|| black_box(jj_unitary_check_with(&gen, 2, &t, exec)))
        });
        group.bench_with_input(BenchmarkId::new("hinf", name), &exec, |b, &exec| {
            b.iter(|| black_box(hinf_norm_with(&plant, 1e-9, exec)))
        });
    }
    group.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = zero_gain_suite, frequency_sweeps
}

criterion_main!(benches);
