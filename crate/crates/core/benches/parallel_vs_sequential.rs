use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pentamesh::harness::{predicate_study, uniform_tesseract, StudyConfig};
use pentamesh::insertion::{audit_delaunay, triangulate, TriangulateOptions};
use pentamesh::quality::{mesh_quality, Heuristic, QualityMode};
use pentamesh::roughness2d::roughness_trials;
use pentamesh::{Execution, MetricField};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn kernels(c: &mut Criterion) {
    let mesh = triangulate(
        &uniform_tesseract(400, 11),
        &MetricField::Identity,
        &TriangulateOptions::default(),
    )
    .expect("benchmark cloud triangulates");
    let speed = MetricField::hypercylinder_speed();

    let mut g = c.benchmark_group("delaunay_audit");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| audit_delaunay(&mesh, &MetricField::Identity, 0.0, exec))
        });
    }
    g.finish();

    let mut g = c.benchmark_group("quality_sweep_quadrature");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                mesh_quality(
                    &mesh,
                    &speed,
                    QualityMode::quadrature(),
                    Heuristic::Eta1,
                    exec,
                )
            })
        });
    }
    g.finish();

    let mut g = c.benchmark_group("predicate_study");
    g.sample_size(10);
    for (name, exec) in MODES {
        let cfg = StudyConfig {
            exec,
            dims: vec![4, 10, 20],
            trials: 100,
            ..Default::default()
        };
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| predicate_study(&cfg))
        });
    }
    g.finish();

    let mut g = c.benchmark_group("roughness_trials");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| roughness_trials(2000, 1, exec))
        });
    }
    g.finish();
}

criterion_group!(benches, kernels);
criterion_main!(benches);
