use criterion::{black_box, criterion_group, criterion_main, Criterion};

use tripartite_core::linalg::herm_eigen;
use tripartite_core::svetlichny::{CorrelationTensor, MeasurementSettings};
use tripartite_core::{convex_roof_min, s_max_numeric, ConvexRoofOptions, Family, SmaxOptions};

fn eigen(c: &mut Criterion) {
    let rho = Family::MsCharlie.state(0.9, 0.4).unwrap();
    c.bench_function("herm_eigen 8x8", |b| b.iter(|| herm_eigen(black_box(rho.herm()))));
}

fn svetlichny_value(c: &mut Criterion) {
    let rho = Family::GghzCharlie.state(0.6, 0.3).unwrap();
    let t = CorrelationTensor::from_state(&rho);
    let s = MeasurementSettings::from_angles(&[0.3, 1.0, 2.0, 0.1, 1.5, 2.2, 0.7, 0.4, 2.9, 5.0, 1.1, 3.3]);
    c.bench_function("svetlichny value via tensor", |b| b.iter(|| t.svetlichny_value(black_box(&s))));
}

fn optimizers(c: &mut Criterion) {
    let mut g = c.benchmark_group("optimizers");
    g.sample_size(10);
    let rho = Family::MsCharlie.state(0.9, 0.4).unwrap();
    let smax = SmaxOptions {
        restarts: 16,
        ..Default::default()
    };
    g.bench_function("s_max_numeric 16 restarts", |b| {
        b.iter(|| s_max_numeric(black_box(&rho), &smax).unwrap())
    });
    let roof = ConvexRoofOptions {
        restarts: 16,
        ..Default::default()
    };
    g.bench_function("convex_roof_min m=2 16 restarts", |b| {
        b.iter(|| convex_roof_min(black_box(&rho), &roof).unwrap())
    });
    g.finish();
}

criterion_group!(benches, eigen, svetlichny_value, optimizers);
criterion_main!(benches);
