use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use hl_core::bounds::{bounds_sweep, uniform_grid};
use hl_core::cantor::{capacity_gap, feasibility_search, phase_perturbation, product_separated_structure, PhaseTransitionConfig};
use hl_core::geometry::{lattice_hits, HorizontalLevel};
use hl_core::holder::{random_standard_paf, RandomPafOptions};
use hl_core::levelset::{well_conducting_census, D1};
use hl_core::{BigRational, LevelSetTree, LevelValue};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn bounds(c: &mut Criterion) {
    let grid = uniform_grid(999);
    c.bench_function("bounds_sweep/999", |b| b.iter(|| bounds_sweep(black_box(&grid)).unwrap()));
}

fn lattice(c: &mut Criterion) {
    let mut g = c.benchmark_group("lattice_hits");
    for n in [4usize, 8, 10] {
        let digits: Vec<u8> = (0..n).map(|k| (k % 3 == 0) as u8).collect();
        let line = HorizontalLevel::from_digits(&digits).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &line, |b, line| b.iter(|| lattice_hits(line).unwrap()));
    }
    g.finish();
}

fn levelset(c: &mut Criterion) {
    let f = random_standard_paf(42, 3, 0.5, 0.9, RandomPafOptions::default()).unwrap();
    let r = LevelValue::new(q(3, 1009) * q(1, 16));
    let mut g = c.benchmark_group("levelset");
    g.sample_size(20);
    for depth in [4u32, 6] {
        g.bench_with_input(BenchmarkId::new("build", depth), &depth, |b, &d| {
            b.iter(|| LevelSetTree::build(&f, &r, 1, d).unwrap())
        });
    }
    let tree = LevelSetTree::build(&f, &r, 1, 6).unwrap();
    g.bench_function("conservation_all/k3", |b| b.iter(|| tree.conservation_all(3)));
    g.bench_function("measure_summary", |b| b.iter(|| tree.measure_summary()));
    let d1 = D1::new(1, 2).unwrap();
    g.bench_function("census/n6", |b| b.iter(|| well_conducting_census(&f, 6, 1, d1, 0.5).unwrap()));
    g.finish();
}

fn random_paf(c: &mut Criterion) {
    let mut g = c.benchmark_group("random_standard_paf");
    g.sample_size(10);
    for n in [3u32, 4] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| random_standard_paf(7, n, 0.5, 0.9, RandomPafOptions::default()).unwrap())
        });
    }
    g.finish();
}

fn cantor(c: &mut Criterion) {
    c.bench_function("capacity_gap/k12", |b| b.iter(|| capacity_gap(black_box(12), 0.75).unwrap()));
    c.bench_function("product_structure/k10", |b| b.iter(|| product_separated_structure(10).unwrap()));
    let s = product_separated_structure(10).unwrap();
    c.bench_function("feasibility_search/k60", |b| b.iter(|| feasibility_search(0.6, 0.5, 1.0, &s, 60).unwrap()));
    let cfg = PhaseTransitionConfig::new(0.6, q(1, 2), 3);
    let base = |x: &BigRational, y: &BigRational| (x + y) * q(1, 4);
    let mut g = c.benchmark_group("phase");
    g.sample_size(10);
    g.bench_function("perturbation/k3", |b| b.iter(|| phase_perturbation(base, &cfg).unwrap()));
    g.finish();
}

criterion_group!(benches, bounds, lattice, levelset, random_paf, cantor);
criterion_main!(benches);
