//! Metric orientation and in-hypersphere predicates in `d` dimensions.
//!
//! The in-hypersphere value is
//! `(-1)^d · Σ_{i=1}^{d+1} (-1)^{i+1} q_i D_i`, where `q_i` is the metric
//! quadratic form of `p_i - f` and `D_i` the determinant of the remaining
//! difference rows; it equals the lifted determinant `det[p_i - f, q_i]`, so
//! positive still means "inside" for positively oriented input in every
//! dimension. At `d = 4` both functions delegate to the robust 4D kernels.

use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use num_traits::Zero;

use super::exact::det_rational;
use super::{inhypersphere_m, orientation_m, Exactness, PredicateResult, Sign};
use crate::error::{Error, Result};
use crate::geometry::{Metric4, Point4};

fn check_shape(m: &DMatrix<f64>, pts: &[DVector<f64>], n_points: usize) -> Result<usize> {
    let d = m.nrows();
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: m.ncols(),
        });
    }
    if d < 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: d,
        });
    }
    if pts.len() != n_points {
        return Err(Error::DimensionMismatch {
            expected: n_points,
            got: pts.len(),
        });
    }
    if let Some(p) = pts.iter().find(|p| p.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: p.len(),
        });
    }
    Ok(d)
}

fn sqrt_det_spd(m: &DMatrix<f64>) -> Result<f64> {
    let chol = m
        .clone()
        .cholesky()
        .ok_or_else(|| Error::NonSpdMetric("Cholesky factorization failed".into()))?;
    Ok(chol.l().diagonal().product())
}

fn to_metric4(m: &DMatrix<f64>) -> Result<Metric4> {
    Metric4::new(std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)])))
}

fn to_points4(pts: &[DVector<f64>]) -> Vec<Point4> {
    pts.iter()
        .map(|p| Point4::new(p[0], p[1], p[2], p[3]))
        .collect()
}

fn float_result(value: f64) -> PredicateResult {
    PredicateResult {
        sign: Sign::of(value),
        value,
        exactness: Exactness::Float,
    }
}

/// `sqrt(det M) · det[p_i - p_{d+1}]` for `d + 1` points.
pub fn orientation_m_d(m: &DMatrix<f64>, pts: &[DVector<f64>]) -> Result<PredicateResult> {
    let d = check_shape(m, pts, m.nrows() + 1)?;
    if d == 4 {
        let p = to_points4(pts);
        return Ok(orientation_m(
            &to_metric4(m)?,
            &[p[0], p[1], p[2], p[3], p[4]],
        ));
    }
    let scale = sqrt_det_spd(m)?;
    let rows = DMatrix::from_fn(d, d, |i, j| pts[i][j] - pts[d][j]);
    Ok(float_result(scale * rows.determinant()))
}

/// Metric in-hypersphere test for `d + 2` points; the last one is the query.
pub fn inhypersphere_m_d(m: &DMatrix<f64>, pts: &[DVector<f64>]) -> Result<PredicateResult> {
    let d = check_shape(m, pts, m.nrows() + 2)?;
    if d == 4 {
        let p = to_points4(pts);
        return Ok(inhypersphere_m(
            &to_metric4(m)?,
            &[p[0], p[1], p[2], p[3], p[4]],
            p[5],
        ));
    }
    let scale = sqrt_det_spd(m)?;
    Ok(float_result(scale * inhypersphere_bracket(m, pts)))
}

/// The cofactor expansion without the `sqrt(det M)` prefactor, in floating
/// point.
pub fn inhypersphere_bracket(m: &DMatrix<f64>, pts: &[DVector<f64>]) -> f64 {
    let d = m.nrows();
    let f = &pts[d + 1];
    let y: Vec<DVector<f64>> = pts[..=d].iter().map(|p| p - f).collect();
    let mut sum = 0.0;
    for i in 0..=d {
        let q = y[i].dot(&(m * &y[i]));
        let rows: Vec<&DVector<f64>> = y
            .iter()
            .enumerate()
            .filter(|(r, _)| *r != i)
            .map(|(_, v)| v)
            .collect();
        let minor = DMatrix::from_fn(d, d, |r, c| rows[r][c]);
        let term = q * minor.determinant();
        sum += if i % 2 == 0 { term } else { -term };
    }
    if d % 2 == 0 {
        sum
    } else {
        -sum
    }
}

/// Exact orientation determinant `det[p_i - p_{d+1}]` (no prefactor).
pub fn orientation_bracket_exact(pts: &[Vec<BigRational>]) -> BigRational {
    let d = pts.len() - 1;
    let rows = (0..d)
        .map(|i| (0..d).map(|j| &pts[i][j] - &pts[d][j]).collect())
        .collect();
    det_rational(rows)
}

/// Exact cofactor expansion (no prefactor) for rational `M` and points.
pub fn inhypersphere_bracket_exact(
    m: &[Vec<BigRational>],
    pts: &[Vec<BigRational>],
) -> BigRational {
    let d = m.len();
    let f = &pts[d + 1];
    let y: Vec<Vec<BigRational>> = pts[..=d]
        .iter()
        .map(|p| p.iter().zip(f).map(|(a, b)| a - b).collect())
        .collect();
    let mut sum = BigRational::zero();
    for i in 0..=d {
        let mut q = BigRational::zero();
        for j in 0..d {
            for k in 0..d {
                if !m[j][k].is_zero() {
                    q += &m[j][k] * &y[i][j] * &y[i][k];
                }
            }
        }
        let minor: Vec<Vec<BigRational>> = y
            .iter()
            .enumerate()
            .filter(|(r, _)| *r != i)
            .map(|(_, v)| v.clone())
            .collect();
        let term = q * det_rational(minor);
        if i % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if d % 2 == 0 {
        sum
    } else {
        -sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(c)
    }

    #[test]
    fn triangle_contains_centroid() {
        let pts = [
            v(&[0.0, 0.0]),
            v(&[1.0, 0.0]),
            v(&[0.0, 1.0]),
            v(&[1.0 / 3.0, 1.0 / 3.0]),
        ];
        let m = DMatrix::identity(2, 2);
        assert_eq!(orientation_m_d(&m, &pts[..3]).unwrap().sign, Sign::Positive);
        assert_eq!(inhypersphere_m_d(&m, &pts).unwrap().sign, Sign::Positive);
        let out = [
            pts[0].clone(),
            pts[1].clone(),
            pts[2].clone(),
            v(&[2.0, 2.0]),
        ];
        assert_eq!(inhypersphere_m_d(&m, &out).unwrap().sign, Sign::Negative);
    }

    #[test]
    fn regular_tetrahedron_contains_centroid() {
        let s = 1.0 / 2f64.sqrt();
        let mut pts = vec![
            v(&[1.0, 0.0, -s]),
            v(&[-1.0, 0.0, -s]),
            v(&[0.0, 1.0, s]),
            v(&[0.0, -1.0, s]),
        ];
        let m = DMatrix::identity(3, 3);
        if orientation_m_d(&m, &pts).unwrap().sign == Sign::Negative {
            pts.swap(0, 1);
        }
        pts.push(v(&[0.0, 0.0, 0.0]));
        assert_eq!(inhypersphere_m_d(&m, &pts).unwrap().sign, Sign::Positive);
        pts[4] = v(&[0.0, 0.0, 3.0]);
        assert_eq!(inhypersphere_m_d(&m, &pts).unwrap().sign, Sign::Negative);
    }

    #[test]
    fn shape_errors() {
        let m = DMatrix::identity(3, 3);
        assert!(inhypersphere_m_d(&m, &[v(&[0.0, 0.0, 0.0])]).is_err());
        assert!(orientation_m_d(&DMatrix::identity(1, 1), &[v(&[0.0]), v(&[1.0])]).is_err());
    }

    #[test]
    fn lifted_determinant_identity() {
        let pts = [
            v(&[0.1, 0.2, 0.3]),
            v(&[0.9, 0.1, 0.4]),
            v(&[0.2, 0.8, 0.1]),
            v(&[0.5, 0.4, 0.9]),
            v(&[0.45, 0.35, 0.4]),
        ];
        let m = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.1, 0.3, 1.5, 0.2, 0.1, 0.2, 1.0]);
        let f = &pts[4];
        let lifted = DMatrix::from_fn(4, 4, |r, c| {
            let y = &pts[r] - f;
            if c < 3 {
                y[c]
            } else {
                y.dot(&(&m * &y))
            }
        });
        let b = inhypersphere_bracket(&m, &pts);
        assert!((b - lifted.determinant()).abs() < 1e-14 * b.abs().max(1e-3));
    }
}
