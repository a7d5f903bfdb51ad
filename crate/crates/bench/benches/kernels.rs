use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use ncsq_bench::{amps, bra, operators, params, probes, squeeze};
use ncsq_core::analytic::{single_mode_report, squeezed_overlap};
use ncsq_core::fock::{matrix_exp_dense, split_kronecker_sum, DEFAULT_EXPM_TOLERANCE};
use ncsq_core::verifier::{fit_bogoliubov, overcompleteness_mc};

fn bench_closed_forms(c: &mut Criterion) {
    let p = params(0.5);
    let (b, k, z) = (bra(), amps(), squeeze());
    c.bench_function("squeezed_overlap", |bench| {
        bench.iter(|| squeezed_overlap(black_box(&p), &b, &k, &z))
    });
    c.bench_function("single_mode_report", |bench| {
        bench.iter(|| single_mode_report(black_box(&p), Some(&z)))
    });
}

fn bench_expm(c: &mut Criterion) {
    let mut group = c.benchmark_group("matrix_exp_dense");
    for cutoff in [20, 40, 80] {
        let ops = operators(0.5, cutoff);
        let (a, _) = split_kronecker_sum(&ops.squeeze_generator(&squeeze())).expect("kronecker sum");
        group.bench_with_input(BenchmarkId::from_parameter(cutoff), &a, |bench, a| {
            bench.iter(|| matrix_exp_dense(black_box(a), DEFAULT_EXPM_TOLERANCE))
        });
    }
    group.finish();
}

fn bench_states(c: &mut Criterion) {
    let mut group = c.benchmark_group("state");
    group.sample_size(20);
    for cutoff in [20, 40] {
        let ops = operators(0.5, cutoff);
        group.bench_with_input(BenchmarkId::new("build", cutoff), &ops, |bench, ops| {
            bench.iter(|| ops.state(&amps(), Some(&squeeze())))
        });
    }
    let ops = operators(0.5, 40);
    group.bench_function("bogoliubov_fit/40", |bench| {
        bench.iter(|| fit_bogoliubov(&ops, &squeeze(), 5))
    });
    group.finish();
}

fn bench_monte_carlo(c: &mut Criterion) {
    let mut group = c.benchmark_group("overcompleteness_mc");
    group.sample_size(10);
    let samples = 100_000;
    let pairs = probes();
    group.throughput(Throughput::Elements((samples * pairs.len()) as u64));
    group.bench_function("1e5", |bench| {
        bench.iter(|| overcompleteness_mc(params(0.3), &pairs, samples, 7, None))
    });
    group.finish();
}

criterion_group!(benches, bench_closed_forms, bench_expm, bench_states, bench_monte_carlo);
criterion_main!(benches);
