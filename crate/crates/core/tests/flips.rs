mod common;

use common::{realize, stage1_mesh};
use pentamesh::flips::{
    apply_flip, find_candidates, find_candidates_of_kind, improve_quality, validate_flip,
    CandidateOptions, FlipKind, ImproveOptions, Rejection, ValidationMode,
};
use pentamesh::insertion::{triangulate, TriangulateOptions};
use pentamesh::quality::Heuristic;
use pentamesh::{Mesh4, MetricField, Point4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FORWARD: [FlipKind; 15] = [
    FlipKind::F1_5,
    FlipKind::F2_4,
    FlipKind::F3_3,
    FlipKind::F4_8,
    FlipKind::F3_9,
    FlipKind::F6_6,
    FlipKind::F6_12a,
    FlipKind::F2_8,
    FlipKind::F4_6,
    FlipKind::F8_8v1,
    FlipKind::F8_8v2,
    FlipKind::F8_8v3,
    FlipKind::F4_12,
    FlipKind::F6_12b,
    FlipKind::F8_16,
];

/// Applies the first valid candidate of `kind` touching `starter`, checking
/// exact volume conservation and mesh validity.
fn apply_some(mesh: &mut Mesh4, kind: FlipKind, starters: &[u32]) -> pentamesh::flips::FlipOutcome {
    let vol = mesh.total_hypervolume_exact();
    let (n_el, n_v) = (mesh.n_alive_elements(), mesh.n_alive_vertices());
    let cand = starters
        .iter()
        .flat_map(|&s| find_candidates_of_kind(mesh, s, kind))
        .find(|c| validate_flip(mesh, c, ValidationMode::Exact).is_ok())
        .unwrap_or_else(|| panic!("no valid {kind} candidate"));
    let out = apply_flip(mesh, &cand).unwrap();
    mesh.check_invariants().unwrap();
    assert_eq!(mesh.total_hypervolume_exact(), vol, "{kind}");
    let t = kind.table();
    assert_eq!(
        mesh.n_alive_elements(),
        n_el - t.stage1.len() + t.stage2.len()
    );
    let dv = i64::from(kind.inserts_point()) - i64::from(kind.removes_point());
    assert_eq!(mesh.n_alive_vertices() as i64, n_v as i64 + dv);
    out
}

#[test]
fn every_kind_has_valid_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for kind in FORWARD {
        for _ in 0..10 {
            let mut mesh = stage1_mesh(kind, realize(kind, &mut rng));
            let starters = mesh.alive_element_ids();
            let out = apply_some(&mut mesh, kind, &starters);
            // Undo with the reverse kind around the new elements.
            let back = apply_some(&mut mesh, kind.reverse(), &out.created);
            assert_eq!(back.created.len(), kind.table().stage1.len());
        }
    }
}

#[test]
fn float_and_exact_validation_agree_on_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for kind in FORWARD {
        let mesh = stage1_mesh(kind, realize(kind, &mut rng));
        for c in find_candidates_of_kind(&mesh, 0, kind) {
            let e = validate_flip(&mesh, &c, ValidationMode::Exact).is_ok();
            let f = validate_flip(&mesh, &c, ValidationMode::Float).is_ok();
            assert_eq!(e, f, "{kind}");
        }
    }
}

#[test]
fn convex_pair_offers_a_two_four_flip() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mesh = stage1_mesh(FlipKind::F2_4, realize(FlipKind::F2_4, &mut rng));
    let c = find_candidates(&mesh, 0, CandidateOptions::default());
    assert!(c.iter().any(
        |c| c.kind == FlipKind::F2_4 && validate_flip(&mesh, c, ValidationMode::Exact).is_ok()
    ));
}

#[test]
fn reflex_pair_is_rejected() {
    // Apexes on opposite sides of the shared facet, but the segment between
    // them misses the facet.
    let pts = vec![
        Point4::ORIGIN,
        Point4::axis(0),
        Point4::axis(1),
        Point4::new(5.0, 5.0, 0.0, 1.0),
        Point4::axis(2),
        Point4::new(5.0, 5.0, 0.0, -1.0),
    ];
    let mesh = Mesh4::from_parts(pts, &[[0, 1, 2, 4, 3], [0, 1, 2, 4, 5]]).unwrap();
    let c = find_candidates_of_kind(&mesh, 0, FlipKind::F2_4);
    assert!(!c.is_empty());
    for c in c {
        assert!(matches!(
            validate_flip(&mesh, &c, ValidationMode::Exact),
            Err(Rejection::Stage2Orientation(_))
        ));
    }
}

#[test]
fn three_three_keeps_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut mesh = stage1_mesh(FlipKind::F3_3, realize(FlipKind::F3_3, &mut rng));
    let facets = mesh.n_facets();
    let starters = mesh.alive_element_ids();
    apply_some(&mut mesh, FlipKind::F3_3, &starters);
    assert_eq!(mesh.n_alive_elements(), 3);
    assert_eq!(mesh.n_facets(), facets);
}

#[test]
fn edge_split_adds_one_vertex_and_four_elements() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut mesh = stage1_mesh(FlipKind::F4_8, realize(FlipKind::F4_8, &mut rng));
    let starters = mesh.alive_element_ids();
    let out = apply_some(&mut mesh, FlipKind::F4_8, &starters);
    assert!(out.new_vertex.is_some());
    assert_eq!(mesh.n_alive_elements(), 8);
}

#[test]
fn regular_element_is_left_alone() {
    let (s3, s6, s10) = (3f64.sqrt(), 6f64.sqrt(), 10f64.sqrt());
    let pts = vec![
        Point4::new(-s3 / 2.0, 0.0, 0.0, 0.0),
        Point4::new(0.0, -0.5, 0.0, 0.0),
        Point4::new(0.0, 0.5, 0.0, 0.0),
        Point4::new(-s3 / 6.0, 0.0, s6 / 3.0, 0.0),
        Point4::new(-s3 / 6.0, 0.0, s6 / 12.0, s10 / 4.0),
    ];
    let mut mesh = Mesh4::from_parts(pts, &[[0, 1, 2, 3, 4]]).unwrap();
    let r = improve_quality(
        &mut mesh,
        &MetricField::Identity,
        &ImproveOptions::default(),
    );
    assert!(r.flips.is_empty());
}

#[test]
fn improvement_is_monotone_and_conservative() {
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let pts: Vec<Point4> = (0..50)
        .map(|_| Point4::new(rng.gen(), rng.gen(), rng.gen(), rng.gen()))
        .collect();
    let mut mesh =
        triangulate(&pts, &MetricField::Identity, &TriangulateOptions::default()).unwrap();
    for h in [Heuristic::Eta1, Heuristic::Eta2, Heuristic::Eta3] {
        let mut m = mesh.clone();
        let opts = ImproveOptions {
            heuristic: h,
            ..Default::default()
        };
        let r = improve_quality(&mut m, &MetricField::Identity, &opts);
        m.check_invariants().unwrap();
        assert!(r.volume_conserved_exactly());
        assert!(r.flips.iter().all(|f| f.min_after > f.min_before));
        assert!(
            r.amq_after[3] >= r.amq_before[3],
            "{h:?}: {:?} -> {:?}",
            r.amq_before,
            r.amq_after
        );
        assert!(!r.flips.is_empty());
    }
    let r = improve_quality(
        &mut mesh,
        &MetricField::Identity,
        &ImproveOptions::default(),
    );
    assert_eq!(r.elements_after, mesh.n_alive_elements());
}
