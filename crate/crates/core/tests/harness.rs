use std::f64::consts::PI;

use pentamesh::bounding::build_bounding_mesh;
use pentamesh::harness::studies::{predicate_rows_to_csv, quality_rows_to_csv};
use pentamesh::harness::{
    hypercylinder_hypervolume, hypercylinder_points, predicate_exact_trial, predicate_study,
    quality_study, read_p4m, read_p4m_points, uniform_tesseract, write_p4m, write_tet3,
    StudyConfig,
};
use pentamesh::insertion::{triangulate, TriangulateOptions};
use pentamesh::predicates::DecompositionKind;
use pentamesh::{Error, Execution, MetricField, Point4};

#[test]
fn p4m_round_trip_is_byte_identical() {
    let mesh = triangulate(
        &uniform_tesseract(60, 5),
        &MetricField::Identity,
        &TriangulateOptions::default(),
    )
    .unwrap();
    let text = write_p4m(&mesh);
    let back = read_p4m(&text).unwrap();
    assert_eq!(write_p4m(&back), text);
    assert_eq!(back.vertices(), mesh.compacted().vertices());
    assert_eq!(back.n_alive_elements(), mesh.n_alive_elements());
    assert_eq!(read_p4m_points(&text).unwrap().len(), 60);
}

#[test]
fn awkward_coordinates_survive_the_text_format() {
    let pts = [
        Point4::new(0.1, 1.0 / 3.0, -2e-308, 1e300),
        Point4::new(f64::MIN_POSITIVE, -0.0, 123456.789, 5e-324),
    ];
    let mut text = String::from("p4m 1\nvertices 2\n");
    for p in &pts {
        text += &format!("{} {} {} {}\n", p.x, p.y, p.z, p.t);
    }
    let back = read_p4m_points(&text).unwrap();
    for (a, b) in pts.iter().zip(&back) {
        assert_eq!(
            a.to_array().map(f64::to_bits),
            b.to_array().map(f64::to_bits)
        );
    }
}

#[test]
fn super_mesh_exports_120_tetrahedra() {
    let mesh = build_bounding_mesh(&[Point4::ORIGIN], 24, 1.0).unwrap();
    assert_eq!(mesh.n_alive_elements(), 24);
    let text = write_tet3(&mesh);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("tet3 1"));
    assert_eq!(lines.next(), Some("vertices 16"));
    let rest: Vec<&str> = lines.skip(16).collect();
    assert_eq!(rest[0], "tetrahedra 120");
    assert_eq!(rest.len(), 121);
    assert!(rest[1..].iter().all(|l| l.split_whitespace().count() == 4));
}

#[test]
fn corrupt_index_names_its_line() {
    let text =
        "p4m 1\nvertices 5\n0 0 0 0\n1 0 0 0\n0 1 0 0\n0 0 1 0\n0 0 0 1\npentatopes 1\n0 1 2 3 7\n";
    match read_p4m(text) {
        Err(Error::Parse { line, message }) => {
            assert_eq!(line, 9);
            assert!(message.contains('7'), "{message}");
        }
        other => panic!("expected a parse error, got {other:?}"),
    }
    let e = read_p4m("p4m 1\nvertices 1\n0 0 zero 0\npentatopes 0\n").unwrap_err();
    assert!(matches!(e, Error::Parse { line: 3, .. }), "{e}");
    let e = read_p4m("p4m 2\n").unwrap_err();
    assert!(matches!(e, Error::Parse { line: 1, .. }), "{e}");
}

#[test]
fn hypercylinder_samples_stay_inside() {
    let pts = hypercylinder_points(1.0, 4.0, 0.6, 0.6, 3);
    assert!(!pts.is_empty());
    for p in &pts {
        assert!(p.x * p.x + p.y * p.y + p.z * p.z <= 1.0 + 1e-12, "{p:?}");
        assert!((0.0..=4.0).contains(&p.t), "{p:?}");
    }
    assert_eq!(pts, hypercylinder_points(1.0, 4.0, 0.6, 0.6, 3));
}

#[test]
fn halving_the_spacing_quadruples_each_level() {
    let on_sphere_at_zero = |h: f64| {
        hypercylinder_points(1.0, 4.0, h, 1.0, 0)
            .iter()
            .filter(|p| {
                p.t == 0.0 && ((p.x * p.x + p.y * p.y + p.z * p.z).sqrt() - 1.0).abs() < 1e-12
            })
            .count() as f64
    };
    for h in [0.4, 0.2, 0.1] {
        let ratio = on_sphere_at_zero(h / 2.0) / on_sphere_at_zero(h);
        assert!((3.8..=4.2).contains(&ratio), "h {h}: ratio {ratio}");
    }
}

#[test]
fn hull_is_inscribed() {
    let exact = hypercylinder_hypervolume(1.0, 4.0);
    assert!((exact - 16.0 * PI / 3.0).abs() < 1e-13);
    for (h, seed) in [(0.9, 1), (0.7, 2)] {
        let pts = hypercylinder_points(1.0, 4.0, h, h, seed);
        let mesh =
            triangulate(&pts, &MetricField::Identity, &TriangulateOptions::default()).unwrap();
        let hv = mesh.total_hypervolume();
        assert!(hv > 0.5 * exact && hv < exact, "{hv}");
    }
}

#[test]
fn exact_predicate_difference_is_zero() {
    for t in 0..50 {
        if let Some(d) = predicate_exact_trial(11, 4, t) {
            assert_eq!(
                d,
                num_rational::BigRational::from_integer(0.into()),
                "trial {t}"
            );
        }
    }
}

#[test]
fn float_difference_grows_with_dimension() {
    let cfg = StudyConfig {
        dims: vec![2, 10],
        trials: 100,
        ..Default::default()
    };
    let rows = predicate_study(&cfg).unwrap();
    for kind in [DecompositionKind::Cholesky, DecompositionKind::Sqrt] {
        let at = |d| {
            rows.iter()
                .find(|r| r.d == d && r.kind == kind)
                .unwrap()
                .mean_normalized_difference
        };
        assert!(at(10) > at(2), "{kind:?}: {} vs {}", at(10), at(2));
    }
}

#[test]
fn identity_metric_has_no_decomposition_error() {
    use nalgebra::DMatrix;
    use pentamesh::predicates::decompose_metric;
    for d in [2, 4, 7] {
        for kind in [DecompositionKind::Cholesky, DecompositionKind::Sqrt] {
            assert_eq!(
                decompose_metric(&DMatrix::identity(d, d), kind)
                    .unwrap()
                    .reconstruction_error,
                0.0
            );
        }
    }
}

#[test]
fn study_csv_is_deterministic() {
    let cfg = StudyConfig {
        dims: vec![3, 5],
        trials: 20,
        seed: 4,
        ..Default::default()
    };
    let a = predicate_rows_to_csv(&predicate_study(&cfg).unwrap());
    let b = predicate_rows_to_csv(
        &predicate_study(&StudyConfig {
            exec: Execution::Sequential,
            ..cfg.clone()
        })
        .unwrap(),
    );
    assert_eq!(a, b);

    let cfg = StudyConfig {
        sizes: vec![30, 40],
        seed: 8,
        ..Default::default()
    };
    let a = quality_rows_to_csv(&quality_study(&cfg).unwrap());
    let b = quality_rows_to_csv(
        &quality_study(&StudyConfig {
            exec: Execution::Sequential,
            ..cfg.clone()
        })
        .unwrap(),
    );
    assert_eq!(a, b);
    let header = a.lines().next().unwrap();
    for col in [
        "amq1_initial",
        "amq5_initial",
        "amq10_initial",
        "amq20_initial",
        "amq20_final",
    ] {
        assert!(header.contains(col), "{header}");
    }
}
