use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nullgeo::harness::par::{map_parallel, map_sequential};
use nullgeo::harness::{catalog_build, run_scenario_with_threads, GridSpec, Scenario};
use nullgeo::identities::{check_basic_properties, check_curvature_relations, PointData, Tolerances};

fn point_work(c: &mut Criterion) {
    let built = catalog_build("desitter_distance_graph").unwrap();
    let tol = Tolerances::default();
    let points = GridSpec { count: 3, ranges: None, singular_margin: 0.0 }.points(&built.map.domain);
    let work = |i: usize, u: &Vec<f64>| {
        let pd = PointData::compute(&built.map, u, 1, i as u64).unwrap();
        check_basic_properties(&pd, &tol).len() + check_curvature_relations(&pd, &tol).len()
    };

    let mut group = c.benchmark_group("desitter_grid_81");
    group.sample_size(10);
    group.bench_function("sequential", |b| b.iter(|| black_box(map_sequential(&points, work))));
    group.bench_function("parallel", |b| b.iter(|| black_box(map_parallel(&points, None, work))));
    group.finish();
}

fn full_scenario(c: &mut Criterion) {
    let s = Scenario::from_toml(
        r#"
        [hypersurface]
        catalog = "desitter_distance_graph"
        [grid]
        count = 2
        "#,
    )
    .unwrap();
    let mut group = c.benchmark_group("desitter_scenario_16");
    group.sample_size(10);
    for threads in [1usize, 4] {
        group.bench_with_input(BenchmarkId::from_parameter(threads), &threads, |b, &t| {
            b.iter(|| black_box(run_scenario_with_threads(&s, Some(t)).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, point_work, full_scenario);
criterion_main!(benches);
