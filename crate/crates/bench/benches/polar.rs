use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use polarint_core::random::{case_rng, convert_point, random_field, random_points};
use polarint_core::{integrate, polar_step, polarize, PolarWindow, Rational, Scalar};

fn bench_polarize(c: &mut Criterion) {
    let mut group = c.benchmark_group("polarize");
    for (n, d) in [(2usize, 3u32), (3, 4), (4, 5)] {
        let f = random_field(&mut case_rng(11), n, d);
        group.bench_with_input(BenchmarkId::from_parameter(format!("n{n}_d{d}")), &f, |b, f| {
            b.iter(|| polarize(black_box(f)).unwrap())
        });
    }
    group.finish();
}

fn bench_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("polar_step");
    for (n, k) in [(2usize, 2usize), (4, 2), (4, 3)] {
        let mut rng = case_rng(21);
        let f = random_field(&mut rng, n, k as u32 + 1);
        let pts = random_points(&mut rng, n, k);
        let h = Rational::from_ratio(1, 20);

        let form = polarize(&f).unwrap();
        let w = PolarWindow::new(pts.clone(), h.clone()).unwrap();
        group.bench_function(BenchmarkId::new("rational", format!("n{n}_k{k}")), |b| {
            b.iter(|| polar_step(black_box(&form), black_box(&w)).unwrap())
        });

        let f64_form = polarize(&f.try_map_coeffs(|c| Ok(c.to_f64().unwrap())).unwrap()).unwrap();
        let w64 = PolarWindow::new(
            pts.iter().map(|p| convert_point::<f64>(p).unwrap()).collect(),
            0.05,
        )
        .unwrap();
        group.bench_function(BenchmarkId::new("double", format!("n{n}_k{k}")), |b| {
            b.iter(|| polar_step(black_box(&f64_form), black_box(&w64)).unwrap())
        });
    }
    group.finish();
}

fn bench_trajectory(c: &mut Criterion) {
    let mut rng = case_rng(31);
    let f = random_field(&mut rng, 2, 3);
    let form = polarize(&f.try_map_coeffs(|c| Ok(c.to_f64().unwrap())).unwrap()).unwrap();
    let pts: Vec<Vec<f64>> = random_points(&mut rng, 2, 2)
        .iter()
        .map(|p| convert_point::<f64>(p).unwrap())
        .map(|p| p.iter().map(|v| v / 8.0).collect())
        .collect();
    let w = PolarWindow::new(pts, 0.001).unwrap();
    c.bench_function("integrate_double_1000", |b| b.iter(|| integrate(black_box(&form), &w, 1000).unwrap()));
}

criterion_group!(benches, bench_polarize, bench_step, bench_trajectory);
criterion_main!(benches);
