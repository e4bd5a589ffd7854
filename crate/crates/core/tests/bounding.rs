use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use pentamesh::bounding::{build_bounding_mesh, subdivision_table};
use pentamesh::geometry::{hypervolume_exact, FACET_LOCAL};
use pentamesh::harness::uniform_tesseract;
use pentamesh::predicates::exact::to_rational;
use pentamesh::predicates::{inhypersphere4, orientation4, Sign};
use pentamesh::Point4;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SIZES: [usize; 3] = [22, 23, 24];

#[test]
fn tables_partition_the_unit_tesseract_exactly() {
    for n_b in SIZES {
        let table = subdivision_table(n_b).unwrap();
        assert_eq!(table.tuples.len(), n_b);
        let mut total = BigRational::zero();
        for t in &table.tuples {
            assert!(t.iter().all(|&i| (1..=16).contains(&i)));
            let v = hypervolume_exact(&table.tuple_points(t)).abs();
            assert!(v.is_positive(), "{n_b}: {t:?}");
            if n_b == 24 {
                assert_eq!(v, BigRational::new(1.into(), 24.into()));
            }
            total += v;
        }
        assert!(total.is_one(), "{n_b}: {total}");
    }
    assert_eq!(subdivision_table(24).unwrap().tuples[0], [1, 2, 3, 5, 9]);
}

#[test]
fn tables_are_delaunay_against_every_corner() {
    for n_b in SIZES {
        let table = subdivision_table(n_b).unwrap();
        for t in &table.tuples {
            let p = table.tuple_points(t);
            let o = orientation4(&p).sign;
            for (k, &c) in table.corners.iter().enumerate() {
                if t.contains(&(k as u8 + 1)) {
                    continue;
                }
                let s = inhypersphere4(&p, c).sign;
                assert!(
                    o.as_i32() * s.as_i32() <= 0,
                    "{n_b}: corner {} strictly inside {t:?}",
                    k + 1
                );
            }
        }
    }
}

#[test]
fn interiors_are_disjoint() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for n_b in SIZES {
        let table = subdivision_table(n_b).unwrap();
        let elements: Vec<[Point4; 5]> =
            table.tuples.iter().map(|t| table.tuple_points(t)).collect();
        for _ in 0..2000 {
            let x = Point4::new(rng.gen(), rng.gen(), rng.gen(), rng.gen());
            let hits = elements
                .iter()
                .filter(|p| {
                    let o = orientation4(p).sign;
                    FACET_LOCAL.iter().all(|l| {
                        // Each facet with the opposite vertex replaced by x.
                        let mut q = **p;
                        let opp = (0..5).find(|i| !l.contains(i)).unwrap();
                        q[opp] = x;
                        orientation4(&q).sign == o
                    })
                })
                .count();
            assert_eq!(hits, 1, "{n_b}: {x:?}");
        }
    }
}

#[test]
fn bounding_mesh_covers_the_cloud() {
    let pts = uniform_tesseract(200, 3);
    for n_b in SIZES {
        let mesh = build_bounding_mesh(&pts, n_b, 0.5).unwrap();
        mesh.check_invariants().unwrap();
        assert_eq!(mesh.n_alive_elements(), n_b);
        let lo: [f64; 4] = std::array::from_fn(|i| {
            mesh.vertices()
                .iter()
                .map(|v| v.to_array()[i])
                .fold(f64::MAX, f64::min)
        });
        let hi: [f64; 4] = std::array::from_fn(|i| {
            mesh.vertices()
                .iter()
                .map(|v| v.to_array()[i])
                .fold(f64::MIN, f64::max)
        });
        for p in &pts {
            for i in 0..4 {
                assert!(lo[i] < p.to_array()[i] && p.to_array()[i] < hi[i]);
            }
        }
        let volume = (0..4).fold(BigRational::one(), |acc, i| {
            acc * (to_rational(hi[i]) - to_rational(lo[i]))
        });
        assert_eq!(mesh.total_hypervolume_exact(), volume);
        for e in mesh.alive_elements() {
            assert_eq!(orientation4(&mesh.element_points(e)).sign, Sign::Positive);
            for k in 0..5 {
                if mesh.neighbor(e, k).is_none() {
                    let v = mesh.element(e);
                    let f = FACET_LOCAL[k].map(|i| mesh.vertex(v[i]).to_array());
                    let on_cube = (0..4).any(|i| {
                        f.iter().all(|c| c[i] == lo[i]) || f.iter().all(|c| c[i] == hi[i])
                    });
                    assert!(on_cube, "{n_b}: boundary facet off the tesseract");
                }
            }
        }
    }
    let mesh = build_bounding_mesh(&[Point4::new(1.0, 2.0, 3.0, 4.0)], 24, 1.0).unwrap();
    assert_eq!(
        mesh.total_hypervolume_exact(),
        BigRational::from_integer(16.into())
    );
}
