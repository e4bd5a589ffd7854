use pentamesh::bounding::build_bounding_mesh;
use pentamesh::insertion::{
    audit_delaunay, build_cavity, insert_point, triangulate, triangulate_with_stats, InsertOptions,
    TriangulateOptions,
};
use pentamesh::predicates::{inhypersphere_m, Sign};
use pentamesh::{Error, Execution, Metric4, MetricField, Point4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cloud(n: usize, seed: u64) -> Vec<Point4> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| Point4::new(rng.gen(), rng.gen(), rng.gen(), rng.gen()))
        .collect()
}

#[test]
fn random_cloud_is_delaunay_and_valid() {
    let pts = cloud(120, 7);
    let opts = TriangulateOptions {
        remove_super: false,
        ..Default::default()
    };
    let (mesh, stats) = triangulate_with_stats(&pts, &MetricField::Identity, &opts).unwrap();
    assert_eq!(stats.inserted, 120);
    mesh.check_invariants().unwrap();
    let audit = audit_delaunay(&mesh, &MetricField::Identity, 0.0, Execution::Parallel);
    assert!(
        audit.passed(),
        "{:?}",
        &audit.violations[..audit.violations.len().min(3)]
    );
    // The super tesseract with a unit-diagonal margin 2 on each side has edge 1 + 2*2.
    let vol = mesh.total_hypervolume();
    let box_vol: f64 = (0..4)
        .map(|i| {
            let c: Vec<f64> = mesh.vertices()[..16]
                .iter()
                .map(|p| p.to_array()[i])
                .collect();
            c.iter().cloned().fold(f64::MIN, f64::max) - c.iter().cloned().fold(f64::MAX, f64::min)
        })
        .product();
    assert!((vol - box_vol).abs() < 1e-9 * box_vol);
}

#[test]
fn every_subdivision_table_works() {
    let pts = cloud(40, 3);
    for n_b in [22, 23, 24] {
        let opts = TriangulateOptions {
            n_b,
            ..Default::default()
        };
        let mesh = triangulate(&pts, &MetricField::Identity, &opts).unwrap();
        mesh.check_invariants().unwrap();
        assert!(audit_delaunay(&mesh, &MetricField::Identity, 0.0, Execution::Sequential).passed());
    }
}

#[test]
fn anisotropic_constant_metric_is_delaunay() {
    let pts = cloud(80, 11);
    let field = MetricField::Constant(Metric4::diagonal([1.0, 1.0, 1.0, 25.0]).unwrap());
    let mesh = triangulate(&pts, &field, &TriangulateOptions::default()).unwrap();
    mesh.check_invariants().unwrap();
    assert!(audit_delaunay(&mesh, &field, 0.0, Execution::Parallel).passed());
}

#[test]
fn varying_metric_produces_a_valid_mesh() {
    let pts: Vec<Point4> = cloud(80, 5)
        .into_iter()
        .map(|p| Point4::new(p.x, p.y, p.z, 4.0 * p.t))
        .collect();
    let field = MetricField::hypercylinder_speed();
    let opts = TriangulateOptions {
        remove_super: false,
        ..Default::default()
    };
    let (mesh, _) = triangulate_with_stats(&pts, &field, &opts).unwrap();
    mesh.check_invariants().unwrap();
}

#[test]
fn duplicate_is_rejected() {
    let mut pts = cloud(10, 1);
    pts.push(pts[3]);
    let err =
        triangulate(&pts, &MetricField::Identity, &TriangulateOptions::default()).unwrap_err();
    assert!(matches!(err, Error::DuplicateVertex { .. }));
    let opts = TriangulateOptions {
        skip_duplicates: true,
        ..Default::default()
    };
    let (_, stats) = triangulate_with_stats(&pts, &MetricField::Identity, &opts).unwrap();
    assert_eq!(stats.skipped_duplicates, 1);
}

#[test]
fn point_outside_every_element_is_a_ghost() {
    let mut mesh = build_bounding_mesh(&[Point4::new(0.5, 0.5, 0.5, 0.5)], 24, 0.5).unwrap();
    let err = insert_point(
        &mut mesh,
        Point4::new(5.0, 0.0, 0.0, 0.0),
        &MetricField::Identity,
        &InsertOptions::default(),
    );
    assert!(matches!(err, Err(Error::GhostPoint(_))));
}

#[test]
fn cavity_matches_brute_force() {
    let pts = cloud(60, 21);
    let mesh = triangulate(
        &pts,
        &MetricField::Identity,
        &TriangulateOptions {
            remove_super: false,
            ..Default::default()
        },
    )
    .unwrap();
    let m = Metric4::identity();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..20 {
        let p = Point4::new(rng.gen(), rng.gen(), rng.gen(), rng.gen());
        let base = mesh
            .alive_elements()
            .find(|&e| {
                pentamesh::insertion::inside_element(&mesh, e, p, 0.0)
                    == pentamesh::insertion::Location::Inside
            })
            .unwrap();
        let mut cav = build_cavity(&mesh, base, p, &m).elements;
        cav.sort_unstable();
        let mut brute: Vec<u32> = mesh
            .alive_elements()
            .filter(|&e| inhypersphere_m(&m, &mesh.element_points(e), p).sign == Sign::Positive)
            .collect();
        brute.sort_unstable();
        assert_eq!(cav, brute);
    }
}

#[test]
fn sequential_and_parallel_audits_agree() {
    let pts = cloud(60, 8);
    let mesh = triangulate(&pts, &MetricField::Identity, &TriangulateOptions::default()).unwrap();
    let a = audit_delaunay(&mesh, &MetricField::Identity, 0.0, Execution::Sequential);
    let b = audit_delaunay(&mesh, &MetricField::Identity, 0.0, Execution::Parallel);
    assert_eq!(a, b);
}
