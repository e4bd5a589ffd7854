//! Exact evaluation of the 4D predicates.
//!
//! Every finite `f64` is a dyadic rational `m · 2^e`. Points are rescaled by
//! a common power of two into big integers, so differences, products and
//! determinants are exact and the sign of the scaled result is the sign of
//! the true value.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, One, Signed, Zero};

use super::Sign;
use crate::geometry::{Metric4, Point4};

/// Converts a finite `f64` into an exact rational.
pub fn to_rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite coordinate")
}

/// Scales `values` by a shared power of two so every entry is an integer.
/// Returns the integers and the exponent `e` with `value = int · 2^e`.
fn scaled_ints(values: &[f64]) -> (Vec<BigInt>, i32) {
    let decoded: Vec<(u64, i32, i8)> = values
        .iter()
        .map(|&v| {
            let (m, e, s) = Float::integer_decode(v);
            (m, e as i32, s)
        })
        .collect();
    let emin = decoded
        .iter()
        .filter(|d| d.0 != 0)
        .map(|d| d.1)
        .min()
        .unwrap_or(0);
    let ints = decoded
        .iter()
        .map(|&(m, e, s)| {
            let v = BigInt::from(m) << ((e - emin) as usize);
            if s < 0 {
                -v
            } else {
                v
            }
        })
        .collect();
    (ints, emin)
}

fn sign_of(v: &BigInt) -> Sign {
    if v.is_positive() {
        Sign::Positive
    } else if v.is_negative() {
        Sign::Negative
    } else {
        Sign::Zero
    }
}

/// Determinant of a 4×4 matrix over any commutative ring.
pub fn det4_generic<T>(m: &[[T; 4]; 4]) -> T
where
    T: Clone + std::ops::Add<Output = T> + std::ops::Sub<Output = T>,
    for<'a> &'a T: std::ops::Mul<&'a T, Output = T>,
{
    let d2 = |r0: usize, r1: usize, c0: usize, c1: usize| {
        &m[r0][c0] * &m[r1][c1] - &m[r1][c0] * &m[r0][c1]
    };
    let s = [
        d2(0, 1, 0, 1),
        d2(0, 1, 0, 2),
        d2(0, 1, 0, 3),
        d2(0, 1, 1, 2),
        d2(0, 1, 1, 3),
        d2(0, 1, 2, 3),
    ];
    let c = [
        d2(2, 3, 0, 1),
        d2(2, 3, 0, 2),
        d2(2, 3, 0, 3),
        d2(2, 3, 1, 2),
        d2(2, 3, 1, 3),
        d2(2, 3, 2, 3),
    ];
    &s[0] * &c[5] - &s[1] * &c[4] + &s[2] * &c[3] + &s[3] * &c[2] - &s[4] * &c[1] + &s[5] * &c[0]
}

fn point_ints(points: &[Point4]) -> Vec<[BigInt; 4]> {
    let flat: Vec<f64> = points.iter().flat_map(|p| p.to_array()).collect();
    let (ints, _) = scaled_ints(&flat);
    ints.chunks(4)
        .map(|c| [c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone()])
        .collect()
}

fn diff(a: &[BigInt; 4], b: &[BigInt; 4]) -> [BigInt; 4] {
    std::array::from_fn(|i| &a[i] - &b[i])
}

/// Exact sign of det of rows (a-e, b-e, c-e, d-e).
pub fn orientation4_sign(p: &[Point4; 5]) -> Sign {
    let q = point_ints(p);
    let rows = [
        diff(&q[0], &q[4]),
        diff(&q[1], &q[4]),
        diff(&q[2], &q[4]),
        diff(&q[3], &q[4]),
    ];
    sign_of(&det4_generic(&rows))
}

/// Exact sign of the metric in-hypersphere expansion (without the positive
/// `sqrt(det M)` prefactor).
pub fn inhypersphere_sign(m: &Metric4, p: &[Point4; 5], f: Point4) -> Sign {
    let pts = [p[0], p[1], p[2], p[3], p[4], f];
    let q = point_ints(&pts);
    let flat_m: Vec<f64> = m.matrix().iter().flatten().copied().collect();
    let (mi, _) = scaled_ints(&flat_m);
    let y: Vec<[BigInt; 4]> = (0..5).map(|i| diff(&q[i], &q[5])).collect();
    let quad: Vec<BigInt> = y
        .iter()
        .map(|v| {
            let mut s = BigInt::zero();
            for j in 0..4 {
                for k in 0..4 {
                    if !mi[4 * j + k].is_zero() {
                        s += &v[j] * &mi[4 * j + k] * &v[k];
                    }
                }
            }
            s
        })
        .collect();
    let mut total = BigInt::zero();
    for i in 0..5 {
        let rows: Vec<[BigInt; 4]> = (0..5).filter(|&r| r != i).map(|r| y[r].clone()).collect();
        let rows: [[BigInt; 4]; 4] = [
            rows[0].clone(),
            rows[1].clone(),
            rows[2].clone(),
            rows[3].clone(),
        ];
        let term = &quad[i] * det4_generic(&rows);
        if i % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    sign_of(&total)
}

/// Signed hypervolume in exact rational arithmetic.
pub fn hypervolume(p: &[Point4; 5]) -> BigRational {
    let flat: Vec<f64> = p.iter().flat_map(|q| q.to_array()).collect();
    let (ints, e) = scaled_ints(&flat);
    let q: Vec<[BigInt; 4]> = ints
        .chunks(4)
        .map(|c| [c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone()])
        .collect();
    let rows = [
        diff(&q[1], &q[0]),
        diff(&q[2], &q[0]),
        diff(&q[3], &q[0]),
        diff(&q[4], &q[0]),
    ];
    let det = det4_generic(&rows);
    scale_pow2(BigRational::new(det, BigInt::from(24)), 4 * e)
}

/// Exact sum of signed hypervolumes of many pentatopes sharing one vertex
/// store, using a single common scale.
pub fn hypervolume_sum(
    vertices: &[Point4],
    elements: impl Iterator<Item = [u32; 5]>,
) -> BigRational {
    let flat: Vec<f64> = vertices.iter().flat_map(|q| q.to_array()).collect();
    let (ints, e) = scaled_ints(&flat);
    let q: Vec<[BigInt; 4]> = ints
        .chunks(4)
        .map(|c| [c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone()])
        .collect();
    let mut total = BigInt::zero();
    for el in elements {
        let v = el.map(|i| &q[i as usize]);
        let rows = [
            diff(v[1], v[0]),
            diff(v[2], v[0]),
            diff(v[3], v[0]),
            diff(v[4], v[0]),
        ];
        total += det4_generic(&rows);
    }
    scale_pow2(BigRational::new(total, BigInt::from(24)), 4 * e)
}

fn scale_pow2(x: BigRational, e: i32) -> BigRational {
    let p = BigInt::one() << (e.unsigned_abs() as usize);
    if e >= 0 {
        x * BigRational::from_integer(p)
    } else {
        x / BigRational::from_integer(p)
    }
}

/// Determinant of a square rational matrix by Gaussian elimination.
pub fn det_rational(mut a: Vec<Vec<BigRational>>) -> BigRational {
    let n = a.len();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        let pivot = a[col][col].clone();
        det *= &pivot;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &pivot;
            for c in col..n {
                let delta = &factor * &a[col][c];
                a[r][c] -= delta;
            }
        }
    }
    det
}
