//! The decompose-and-scale formulation: factor `M = GᵀG`, map every point
//! through `G`, then evaluate the Euclidean predicates.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{Metric4, Point4};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DecompositionKind {
    /// Upper-triangular Cholesky factor.
    Cholesky,
    /// Symmetric square root via eigendecomposition.
    Sqrt,
}

impl DecompositionKind {
    pub fn name(self) -> &'static str {
        match self {
            DecompositionKind::Cholesky => "cholesky",
            DecompositionKind::Sqrt => "sqrt",
        }
    }
}

#[derive(Clone, Debug)]
pub struct MetricDecomposition {
    pub kind: DecompositionKind,
    pub g: DMatrix<f64>,
    /// Frobenius norm of `M - GᵀG`.
    pub reconstruction_error: f64,
}

/// Factors an SPD matrix as `GᵀG` with `det G > 0`.
pub fn decompose_metric(m: &DMatrix<f64>, kind: DecompositionKind) -> Result<MetricDecomposition> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            got: m.ncols(),
        });
    }
    let g = match kind {
        DecompositionKind::Cholesky => {
            let chol = m
                .clone()
                .cholesky()
                .ok_or_else(|| Error::NonSpdMetric("Cholesky factorization failed".into()))?;
            chol.l().transpose()
        }
        DecompositionKind::Sqrt => {
            let eig = m.clone().symmetric_eigen();
            if eig.eigenvalues.iter().any(|&l| l <= 0.0) {
                return Err(Error::NonSpdMetric("non-positive eigenvalue".into()));
            }
            let root = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
            &eig.eigenvectors * root * eig.eigenvectors.transpose()
        }
    };
    let reconstruction_error = (m - g.transpose() * &g).norm();
    Ok(MetricDecomposition {
        kind,
        g,
        reconstruction_error,
    })
}

/// 4D convenience wrapper.
pub fn decompose_metric4(m: &Metric4, kind: DecompositionKind) -> Result<MetricDecomposition> {
    decompose_metric(&metric_to_dmatrix(m), kind)
}

pub fn metric_to_dmatrix(m: &Metric4) -> DMatrix<f64> {
    DMatrix::from_fn(4, 4, |i, j| m.matrix()[i][j])
}

/// Maps each point through `G`.
pub fn scale_points_standard(g: &MetricDecomposition, pts: &[DVector<f64>]) -> Vec<DVector<f64>> {
    pts.iter().map(|p| &g.g * p).collect()
}

/// Maps each 4D point through a 4×4 factor.
pub fn scale_points4(g: &MetricDecomposition, pts: &[Point4]) -> Vec<Point4> {
    assert_eq!(g.g.nrows(), 4, "4D points need a 4×4 factor");
    pts.iter()
        .map(|p| {
            let v = &g.g * DVector::from_row_slice(&p.to_array());
            Point4::new(v[0], v[1], v[2], v[3])
        })
        .collect()
}
