use autorobo_bench::{fixture_design, fixture_problem, fixture_spec, sample_reply};
use autorobo_core::arm::{design_robots, is_reachable, solve_ik, DEFAULT_MARGIN, IK_MAX_SWEEPS, IK_TOL};
use autorobo_core::extract::extract_code;
use autorobo_core::report::Algorithm;
use autorobo_core::rl::train;
use autorobo_core::Point2;
use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

fn design(c: &mut Criterion) {
    let problem = fixture_problem(0);
    c.bench_function("design_robots/row1", |b| b.iter(|| design_robots(black_box(&problem), DEFAULT_MARGIN)));
}

fn reachability(c: &mut Criterion) {
    let arm = &fixture_design(0).robots[0].arm;
    let target = Point2::new(0.8, 1.5);
    c.bench_function("is_reachable", |b| b.iter(|| is_reachable(black_box(arm), black_box(target), DEFAULT_MARGIN)));
    c.bench_function("solve_ik", |b| b.iter(|| solve_ik(black_box(arm), black_box(target), IK_TOL, IK_MAX_SWEEPS)));
}

fn training(c: &mut Criterion) {
    let mut group = c.benchmark_group("train");
    group.sample_size(10);
    let ppo = fixture_spec(0, 20);
    group.bench_function("ppo/20_episodes", |b| b.iter(|| train(black_box(&ppo))));
    let mut cem = fixture_spec(0, 5);
    cem.algorithm = Algorithm::Cem;
    group.bench_function("cem/5_generations", |b| b.iter(|| train(black_box(&cem))));
    group.finish();
}

fn extraction(c: &mut Criterion) {
    let reply = sample_reply();
    c.bench_function("extract_code", |b| b.iter(|| extract_code(black_box(&reply))));
}

criterion_group!(benches, design, reachability, training, extraction);
criterion_main!(benches);
