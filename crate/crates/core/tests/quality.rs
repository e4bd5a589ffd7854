use nalgebra::Matrix4;
use pentamesh::geometry::{edge_lengths_sq, hypervolume};
use pentamesh::quality::{
    ellipsoid_matrix, quality, quality_metric, quality_metric_all, quality_via_matrix, theta,
    Heuristic, QualityMode,
};
use pentamesh::{Metric4, MetricField, Point4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_pentatope(rng: &mut impl Rng) -> [Point4; 5] {
    std::array::from_fn(|_| Point4::new(rng.gen(), rng.gen(), rng.gen(), rng.gen()))
}

fn random_rotation(rng: &mut impl Rng) -> Matrix4<f64> {
    let m = Matrix4::from_fn(|_, _| rng.gen::<f64>() - 0.5);
    m.qr().q()
}

fn transform(p: &[Point4; 5], q: &Matrix4<f64>, scale: f64, shift: [f64; 4]) -> [Point4; 5] {
    p.map(|x| {
        let v = q * nalgebra::Vector4::from(x.to_array());
        Point4::new(
            scale * v[0] + shift[0],
            scale * v[1] + shift[1],
            scale * v[2] + shift[2],
            scale * v[3] + shift[3],
        )
    })
}

#[test]
fn theta_matches_frobenius_route() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..500 {
        let p = random_pentatope(&mut rng);
        let Some(a) = ellipsoid_matrix(&p) else {
            continue;
        };
        let side = (96.0 * hypervolume(&p).abs() / 5f64.sqrt()).powf(0.25);
        let l2 = edge_lengths_sq(&p, &Metric4::IDENTITY);
        let direct = theta(&l2).sqrt() / (30.0 * side * side);
        assert!(
            (direct - a.norm()).abs() <= 1e-9 * a.norm(),
            "{direct} vs {}",
            a.norm()
        );
        assert!((a.determinant() - 1.0).abs() < 1e-8);
    }
}

#[test]
fn heuristics_match_matrix_route() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..500 {
        let p = random_pentatope(&mut rng);
        let (q, m) = (quality(&p), quality_via_matrix(&p));
        assert!((q.eta1 - m.eta1).abs() <= 1e-9 * m.eta1.max(1e-300));
        assert!((q.eta2 - m.eta2).abs() <= 1e-9 * m.eta2);
        assert!((q.eta3 - m.eta3).abs() <= 1e-9 * m.eta3.max(1e-300));
    }
}

#[test]
fn bounds_and_product_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10_000 {
        let q = quality(&random_pentatope(&mut rng));
        for x in [q.eta1, q.eta2, q.eta3] {
            assert!((0.0..=1.0).contains(&x));
        }
        assert!(q.eta2 >= q.eta3);
        assert!((q.eta3 - q.eta1 * q.eta2).abs() <= 1e-12 * q.eta3.max(f64::MIN_POSITIVE));
    }
}

#[test]
fn similarity_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..200 {
        let p = random_pentatope(&mut rng);
        let rot = random_rotation(&mut rng);
        let s = 10f64.powf(rng.gen_range(-3.0..3.0));
        let shift = [
            rng.gen_range(-50.0..50.0),
            rng.gen_range(-50.0..50.0),
            3.0,
            -7.0,
        ];
        let (a, b) = (quality(&p), quality(&transform(&p, &rot, s, shift)));
        for (x, y) in [(a.eta1, b.eta1), (a.eta2, b.eta2), (a.eta3, b.eta3)] {
            assert!((x - y).abs() <= 1e-9 * x, "{x} vs {y}");
        }
    }
}

#[test]
fn degenerate_limit() {
    let base = [
        Point4::ORIGIN,
        Point4::axis(0),
        Point4::axis(1),
        Point4::axis(2),
    ];
    let mut last = f64::MAX;
    for k in 1..12 {
        let h = 10f64.powi(-k);
        let p = [
            base[0],
            base[1],
            base[2],
            base[3],
            Point4::new(0.2, 0.2, 0.2, h),
        ];
        let q = quality(&p);
        assert!(q.eta1 < last && q.eta3 <= q.eta1);
        last = q.eta1;
    }
    assert!(last < 1e-4);
}

#[test]
fn metric_variants() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let p = random_pentatope(&mut rng);
    let e = quality(&p);
    let id = quality_metric_all(&p, &MetricField::Identity, QualityMode::Pointwise);
    assert!((e.eta2 - id.eta2).abs() < 1e-15);
    let c = MetricField::Constant(Metric4::diagonal([1.0, 4.0, 1.0, 9.0]).unwrap());
    let pw = quality_metric_all(&p, &c, QualityMode::Pointwise);
    let qd = quality_metric_all(&p, &c, QualityMode::quadrature());
    assert!((pw.eta3 - qd.eta3).abs() < 1e-12 * pw.eta3);
    // A stretched metric scores the correspondingly squashed element as regular.
    let stretched = MetricField::Constant(Metric4::diagonal([1.0, 1.0, 1.0, 100.0]).unwrap());
    let (s3, s6, s10) = (3f64.sqrt(), 6f64.sqrt(), 10f64.sqrt());
    let reg = [
        Point4::new(-s3 / 2.0, 0.0, 0.0, 0.0),
        Point4::new(0.0, -0.5, 0.0, 0.0),
        Point4::new(0.0, 0.5, 0.0, 0.0),
        Point4::new(-s3 / 6.0, 0.0, s6 / 3.0, 0.0),
        Point4::new(-s3 / 6.0, 0.0, s6 / 12.0, s10 / 40.0),
    ];
    assert!(
        (quality_metric(&reg, &stretched, QualityMode::Pointwise, Heuristic::Eta3) - 1.0).abs()
            < 1e-12
    );
    assert!(quality(&reg).eta3 < 0.5);
    let varying = MetricField::hypercylinder_speed();
    let v = quality_metric_all(&p, &varying, QualityMode::quadrature());
    assert!(v.eta1 > 0.0 && v.eta1 <= 1.0 && v.eta2 >= v.eta3);
}
