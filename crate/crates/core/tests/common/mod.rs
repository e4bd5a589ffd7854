//! Geometric realizations of the flip tables for tests.
//!
//! Every configuration is the join of two pieces that live in complementary
//! coordinate subspaces and both surround the origin. Coordinates are small
//! integers and the final affine map has integer entries, so all predicates
//! and volumes are evaluated on exactly representable data.

#![allow(dead_code)]

use pentamesh::flips::FlipKind;
use pentamesh::{Mesh4, Point4};
use rand::Rng;

pub type Coords = [i64; 4];

fn axis(d: usize, s: i64) -> Coords {
    let mut c = [0; 4];
    c[d] = s;
    c
}

/// Simplex spanning the coordinate axes `dims` with the origin in its
/// relative interior.
fn simplex_around_origin(rng: &mut impl Rng, dims: &[usize]) -> Vec<Coords> {
    let mut v: Vec<Coords> = dims
        .iter()
        .map(|&d| {
            let mut c = axis(d, rng.gen_range(2..6));
            for &o in dims {
                if o != d {
                    c[o] = rng.gen_range(-1..=1);
                }
            }
            c
        })
        .collect();
    // Last vertex: minus a positive combination of the others (plus slack) keeps
    // the origin strictly inside.
    let w: Vec<i64> = (0..dims.len()).map(|_| rng.gen_range(1..3)).collect();
    let mut last = [0i64; 4];
    for (vi, wi) in v.iter().zip(&w) {
        for k in 0..4 {
            last[k] -= vi[k] * wi;
        }
    }
    v.push(last);
    v
}

/// Cross-polytope vertices `(+a, -a)` on three axes, in that order.
fn octahedron(rng: &mut impl Rng, dims: [usize; 3]) -> [[Coords; 2]; 3] {
    dims.map(|d| [axis(d, rng.gen_range(1..5)), axis(d, -rng.gen_range(1..5))])
}

fn segment(rng: &mut impl Rng, d: usize) -> [Coords; 2] {
    [axis(d, rng.gen_range(1..5)), axis(d, -rng.gen_range(1..5))]
}

fn random_affine(rng: &mut impl Rng) -> ([[i64; 4]; 4], Coords) {
    loop {
        let m: [[i64; 4]; 4] =
            std::array::from_fn(|_| std::array::from_fn(|_| rng.gen_range(-2..=2)));
        let f = m.map(|r| r.map(|x| x as f64));
        if pentamesh::geometry::det4(&f).abs() > 0.5 {
            return (m, std::array::from_fn(|_| rng.gen_range(-20..20)));
        }
    }
}

/// Stage-1 vertex coordinates of a valid configuration of `kind`, indexed
/// by label - 1. Only kinds whose stage 1 is a star of a single simplex
/// sharing no coplanarity (plus the three 8-8 versions) are supported;
/// reverse kinds are produced by applying the forward flip.
pub fn realize(kind: FlipKind, rng: &mut impl Rng) -> Vec<Point4> {
    use FlipKind::*;
    let mut lab: Vec<Coords> = vec![[0; 4]; 8];
    let mut set = |l: usize, c: Coords| lab[l - 1] = c;
    let n = kind.table().vertex_count;
    match kind {
        F1_5 => {
            for (i, c) in simplex_around_origin(rng, &[0, 1, 2, 3])
                .into_iter()
                .enumerate()
            {
                set(i + 1, c);
            }
        }
        F2_4 | F2_8 => {
            let tet = simplex_around_origin(rng, &[0, 1, 2]);
            for (l, c) in [1, 2, 3, 5].into_iter().zip(tet) {
                set(l, c);
            }
            let [a, b] = segment(rng, 3);
            set(4, a);
            set(6, b);
        }
        F3_3 => {
            for (l, c) in [1, 4, 5]
                .into_iter()
                .zip(simplex_around_origin(rng, &[0, 1]))
            {
                set(l, c);
            }
            for (l, c) in [2, 3, 6]
                .into_iter()
                .zip(simplex_around_origin(rng, &[2, 3]))
            {
                set(l, c);
            }
        }
        F4_8 => {
            let [a, b] = segment(rng, 3);
            set(2, a);
            set(4, b);
            for (l, c) in [1, 3, 5, 6]
                .into_iter()
                .zip(simplex_around_origin(rng, &[0, 1, 2]))
            {
                set(l, c);
            }
        }
        F3_9 => {
            for (l, c) in [2, 4, 5]
                .into_iter()
                .zip(simplex_around_origin(rng, &[0, 1]))
            {
                set(l, c);
            }
            for (l, c) in [1, 3, 6]
                .into_iter()
                .zip(simplex_around_origin(rng, &[2, 3]))
            {
                set(l, c);
            }
        }
        F6_6 | F6_12a => {
            // Convex quadrilateral 4-1-5-7 around the origin in the (x, y) plane.
            set(4, [rng.gen_range(2..5), 0, 0, 0]);
            set(5, [-rng.gen_range(2..5), 0, 0, 0]);
            set(1, [rng.gen_range(-1..=1), rng.gen_range(2..5), 0, 0]);
            set(7, [rng.gen_range(-1..=1), -rng.gen_range(2..5), 0, 0]);
            for (l, c) in [2, 3, 6]
                .into_iter()
                .zip(simplex_around_origin(rng, &[2, 3]))
            {
                set(l, c);
            }
        }
        F4_6 => {
            for (l, c) in [2, 3, 4]
                .into_iter()
                .zip(simplex_around_origin(rng, &[0, 1]))
            {
                set(l, c);
            }
            let [a, b] = segment(rng, 2);
            set(1, a);
            set(6, b);
            let [a, b] = segment(rng, 3);
            set(5, a);
            set(7, b);
        }
        F8_8v1 | F8_8v2 | F8_8v3 => {
            // (first diagonal, second diagonal, poles): the first diagonal is
            // stage 1's core, the second stage 2's; both lie in the z = 0 plane.
            let (d1, d2, poles) = match kind {
                F8_8v1 => ([5, 6], [2, 4], [1, 3]),
                F8_8v2 => ([5, 6], [1, 3], [2, 4]),
                _ => ([2, 4], [1, 3], [5, 6]),
            };
            let [x, y, z] = octahedron(rng, [0, 1, 2]);
            set(d1[0], x[0]);
            set(d1[1], x[1]);
            set(d2[0], y[0]);
            set(d2[1], y[1]);
            set(poles[0], z[0]);
            set(poles[1], z[1]);
            let [a, b] = segment(rng, 3);
            set(7, a);
            set(8, b);
        }
        F4_12 => {
            for (l, c) in [1, 2, 3]
                .into_iter()
                .zip(simplex_around_origin(rng, &[0, 1]))
            {
                set(l, c);
            }
            let [a, b] = segment(rng, 2);
            set(4, a);
            set(5, b);
            let [a, b] = segment(rng, 3);
            set(6, a);
            set(7, b);
        }
        F6_12b => {
            for (l, c) in [1, 2, 3]
                .into_iter()
                .zip(simplex_around_origin(rng, &[0, 1]))
            {
                set(l, c);
            }
            let [a, b] = segment(rng, 2);
            set(4, a);
            set(5, b);
            let [a, b] = segment(rng, 3);
            set(6, a);
            set(7, b);
        }
        F8_16 => {
            let [a, b] = segment(rng, 3);
            set(2, a);
            set(4, b);
            let [x, y, z] = octahedron(rng, [0, 1, 2]);
            set(1, x[0]);
            set(3, x[1]);
            set(5, y[0]);
            set(6, y[1]);
            set(7, z[0]);
            set(8, z[1]);
        }
        other => panic!("{other} is realized through its forward kind"),
    }
    let (m, shift) = random_affine(rng);
    lab.truncate(n);
    lab.into_iter()
        .map(|c| {
            let v: [f64; 4] = std::array::from_fn(|i| {
                (0..4).map(|j| m[i][j] * c[j]).sum::<i64>() as f64 + shift[i] as f64
            });
            Point4::from_array(v)
        })
        .collect()
}

/// Mesh holding exactly the stage-1 tuples of `kind` on `points`.
pub fn stage1_mesh(kind: FlipKind, points: Vec<Point4>) -> Mesh4 {
    let elems: Vec<[u32; 5]> = kind
        .table()
        .stage1
        .iter()
        .map(|t| t.map(|l| (l - 1) as u32))
        .collect();
    Mesh4::from_parts(points, &elems).expect("realization is non-degenerate")
}
