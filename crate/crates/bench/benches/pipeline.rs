use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use multinet::compose::{compose_distance, compose_ego, DistanceCoupling, EgoOptions};
use multinet::spectral::{bisect, layer_load, ConductanceVariant, EigenOptions};
use multinet::transform::{transform_layer, DynamicsParams};
use multinet_bench::{feasible_egos, planted_layers};

fn transform(c: &mut Criterion) {
    let mut group = c.benchmark_group("transform_layer");
    for n in [100, 1000] {
        let g = &planted_layers(n, 1, 10.0 / n as f64, 1.0 / n as f64, 1)[0];
        let params = DynamicsParams::degree_delay(g, 0.1);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| b.iter(|| transform_layer(g, &params).unwrap()));
    }
    group.finish();
}

fn compose(c: &mut Criterion) {
    let mut group = c.benchmark_group("compose");
    for n in [100, 1000] {
        let layers = planted_layers(n, 3, 10.0 / n as f64, 1.0 / n as f64, 2);
        let egos = feasible_egos(&layers, 3);
        group.bench_with_input(BenchmarkId::new("ego", n), &n, |b, _| {
            b.iter(|| compose_ego(&layers, &egos, &EgoOptions::default()).unwrap())
        });
        let coupling = DistanceCoupling::temporal(3, 0.5);
        group.bench_with_input(BenchmarkId::new("distance", n), &n, |b, _| {
            b.iter(|| compose_distance(&layers, &coupling).unwrap())
        });
    }
    group.finish();
}

fn analyze(c: &mut Criterion) {
    let mut group = c.benchmark_group("analyze");
    group.sample_size(10);
    for n in [100, 400] {
        let layers = planted_layers(n, 3, 10.0 / n as f64, 1.0 / n as f64, 4);
        let s = compose_distance(&layers, &DistanceCoupling::temporal(3, 1.0)).unwrap();
        let flat = s.to_graph();
        group.bench_with_input(BenchmarkId::new("bisect", n), &n, |b, _| {
            b.iter(|| bisect(&flat, &EigenOptions::default(), ConductanceVariant::Symmetric).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("layer_load", n), &n, |b, _| b.iter(|| layer_load(&s).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, transform, compose, analyze);
criterion_main!(benches);
