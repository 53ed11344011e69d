use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dso_core::pricing::run_case;
use dso_core::solver::{solve_lp, solve_milp, SolverOptions};
use dso_core::{assemble, builtin_case, CaseMode};

const MODES: [CaseMode; 3] = [
    CaseMode::Deterministic,
    CaseMode::SingleUncertainty,
    CaseMode::MultiUncertainty,
];

fn assembly(c: &mut Criterion) {
    let mut g = c.benchmark_group("assemble");
    for mode in MODES {
        let (inst, scen) = builtin_case(mode);
        g.bench_function(BenchmarkId::from_parameter(mode.as_str()), |b| {
            b.iter(|| assemble(black_box(&inst), black_box(&scen)).unwrap())
        });
    }
    g.finish();
}

fn lp_relaxation(c: &mut Criterion) {
    let opts = SolverOptions::default();
    let mut g = c.benchmark_group("lp_relaxation");
    for mode in MODES {
        let (inst, scen) = builtin_case(mode);
        let model = assemble(&inst, &scen).unwrap();
        g.bench_function(BenchmarkId::from_parameter(mode.as_str()), |b| {
            b.iter(|| solve_lp(black_box(&model), None, &opts).unwrap())
        });
    }
    g.finish();
}

fn milp(c: &mut Criterion) {
    let opts = SolverOptions::default();
    let mut g = c.benchmark_group("milp");
    g.sample_size(10);
    for mode in MODES {
        let (inst, scen) = builtin_case(mode);
        let model = assemble(&inst, &scen).unwrap();
        g.bench_function(BenchmarkId::from_parameter(mode.as_str()), |b| {
            b.iter(|| solve_milp(black_box(&model), &opts).unwrap())
        });
    }
    g.finish();
}

fn full_case(c: &mut Criterion) {
    let opts = SolverOptions::default();
    let (inst, scen) = builtin_case(CaseMode::SingleUncertainty);
    let mut g = c.benchmark_group("run_case");
    g.sample_size(10);
    g.bench_function("single-uncertainty", |b| {
        b.iter(|| run_case(black_box(&inst), black_box(&scen), &opts).unwrap())
    });
    g.finish();
}

criterion_group!(benches, assembly, lp_relaxation, milp, full_case);
criterion_main!(benches);
