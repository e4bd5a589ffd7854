//! Algebraic pentatope quality heuristics.
//!
//! All three compare the eigenvalues `λ₁..λ₄` of the matrix that maps a
//! regular pentatope of equal hypervolume onto the element:
//!
//! * `η₁` geometric mean over arithmetic mean,
//! * `η₂` arithmetic mean over root-mean-square,
//! * `η₃ = η₁ η₂` geometric mean over root-mean-square.
//!
//! Each is 1 for a regular pentatope and 0 for a flat one, and none needs an
//! eigen-decomposition: the trace is a multiple of the squared edge sum and
//! the Frobenius norm is `√Θ / (30a²)`, where `Θ` is a fixed quadratic form
//! in the squared edge lengths.

use nalgebra::Matrix4;

use crate::geometry::{
    edge_lengths_sq, hypervolume, metric_length_quadrature, metric_volume_quadrature, Metric4,
    MetricField, Point4, DEFAULT_LENGTH_ORDER, DEFAULT_VOLUME_ORDER,
};
use crate::mesh::{ElemId, Mesh4};
use crate::par::{self, Execution};

/// Vertex pairs in edge order `l₁..l₁₀ = d12, d13, d14, d15, d23, d24, d25, d34, d35, d45`.
pub const EDGE_PAIRS: [(usize, usize); 10] = [
    (0, 1),
    (0, 2),
    (0, 3),
    (0, 4),
    (1, 2),
    (1, 3),
    (1, 4),
    (2, 3),
    (2, 4),
    (3, 4),
];

const FIVE_POW_3_4: f64 = 3.343_701_524_882_11; // 5^(3/4)

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Heuristic {
    #[default]
    Eta1,
    Eta2,
    Eta3,
}

impl Heuristic {
    pub fn from_index(i: u8) -> Option<Self> {
        match i {
            1 => Some(Heuristic::Eta1),
            2 => Some(Heuristic::Eta2),
            3 => Some(Heuristic::Eta3),
            _ => None,
        }
    }

    pub fn index(self) -> u8 {
        self as u8 + 1
    }
}

/// How metric lengths and volumes are measured for the metric variants.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QualityMode {
    /// Metric evaluated once at the element centroid.
    Pointwise,
    /// Gauss–Legendre along edges and a simplex rule over the element.
    Quadrature {
        length_order: usize,
        volume_order: usize,
    },
}

impl Default for QualityMode {
    fn default() -> Self {
        QualityMode::Pointwise
    }
}

impl QualityMode {
    pub fn quadrature() -> Self {
        QualityMode::Quadrature {
            length_order: DEFAULT_LENGTH_ORDER,
            volume_order: DEFAULT_VOLUME_ORDER,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct QualityVector {
    pub eta1: f64,
    pub eta2: f64,
    pub eta3: f64,
}

impl QualityVector {
    pub fn get(&self, h: Heuristic) -> f64 {
        match h {
            Heuristic::Eta1 => self.eta1,
            Heuristic::Eta2 => self.eta2,
            Heuristic::Eta3 => self.eta3,
        }
    }
}

/// The quadratic form `Θ` over squared edge lengths in [`EDGE_PAIRS`] order.
pub fn theta(l2: &[f64; 10]) -> f64 {
    let [l1, l2_, l3, l4, l5, l6, l7, l8, l9, l10] = *l2;
    let sq = |x: f64| x * x;
    600.0 * sq(l1 - l2_)
        + 900.0 * sq(l5)
        + 100.0 * sq(-2.0 * (l1 + l2_) + l5)
        + 75.0 * sq(l1 - l2_ - 3.0 * l6 + 3.0 * l8)
        + 25.0 * sq(l1 + l2_ - 3.0 * l3 + l5 - 3.0 * (l6 + l8))
        + 25.0 * sq(l1 + l2_ - 6.0 * l3 - 2.0 * l5 + 3.0 * (l6 + l8))
        + 45.0 * sq(l1 - l2_ + l6 - 4.0 * l7 - l8 + 4.0 * l9)
        + 15.0 * sq(l1 + l2_ + 2.0 * l3 - 8.0 * l4 - 2.0 * l5 - l6 + 4.0 * l7 - l8 + 4.0 * l9)
        + 30.0 * sq(-l1 - l2_ + l3 + 2.0 * l4 - l5 + l6 + 2.0 * l7 + l8 + 2.0 * l9 - 6.0 * l10)
        + 9.0 * sq(l1 + l2_ + l3 - 4.0 * l4 + l5 + l6 - 4.0 * l7 + l8 - 4.0 * (l9 + l10))
}

/// `η₁` from a volume and squared edge lengths.
pub fn eta1_from(v: f64, l2: &[f64; 10]) -> f64 {
    let s: f64 = l2.iter().sum();
    if s <= 0.0 || v <= 0.0 {
        return 0.0;
    }
    (FIVE_POW_3_4 * (384.0 * v).sqrt() / s).min(1.0)
}

/// `η₂` from squared edge lengths.
pub fn eta2_from(l2: &[f64; 10]) -> f64 {
    let th = theta(l2);
    if th <= 0.0 {
        return 0.0;
    }
    (6.0 * l2.iter().sum::<f64>() / th.sqrt()).min(1.0)
}

/// `η₃` from a volume and squared edge lengths.
pub fn eta3_from(v: f64, l2: &[f64; 10]) -> f64 {
    let th = theta(l2);
    if th <= 0.0 || v <= 0.0 {
        return 0.0;
    }
    (6.0 * FIVE_POW_3_4 * (384.0 * v / th).sqrt()).min(1.0)
}

pub fn quality_from(v: f64, l2: &[f64; 10]) -> QualityVector {
    QualityVector {
        eta1: eta1_from(v, l2),
        eta2: eta2_from(l2),
        eta3: eta3_from(v, l2),
    }
}

fn euclid(p: &[Point4; 5]) -> (f64, [f64; 10]) {
    (hypervolume(p).abs(), edge_lengths_sq(p, &Metric4::IDENTITY))
}

pub fn eta1(p: &[Point4; 5]) -> f64 {
    let (v, l2) = euclid(p);
    eta1_from(v, &l2)
}

pub fn eta2(p: &[Point4; 5]) -> f64 {
    eta2_from(&euclid(p).1)
}

pub fn eta3(p: &[Point4; 5]) -> f64 {
    let (v, l2) = euclid(p);
    eta3_from(v, &l2)
}

pub fn quality(p: &[Point4; 5]) -> QualityVector {
    let (v, l2) = euclid(p);
    quality_from(v, &l2)
}

/// Metric volume and squared metric edge lengths under `field`.
pub fn metric_measures(
    p: &[Point4; 5],
    field: &MetricField,
    mode: QualityMode,
) -> (f64, [f64; 10]) {
    match mode {
        QualityMode::Pointwise => {
            let m = field.eval(Point4::centroid(p));
            (hypervolume(p).abs() * m.sqrt_det(), edge_lengths_sq(p, &m))
        }
        QualityMode::Quadrature {
            length_order,
            volume_order,
        } => {
            let l2 = EDGE_PAIRS
                .map(|(i, j)| metric_length_quadrature(p[i], p[j], field, length_order).powi(2));
            (metric_volume_quadrature(p, field, volume_order).abs(), l2)
        }
    }
}

/// All three heuristics with metric lengths and volumes.
pub fn quality_metric_all(
    p: &[Point4; 5],
    field: &MetricField,
    mode: QualityMode,
) -> QualityVector {
    let (v, l2) = metric_measures(p, field, mode);
    quality_from(v, &l2)
}

pub fn quality_metric(
    p: &[Point4; 5],
    field: &MetricField,
    mode: QualityMode,
    which: Heuristic,
) -> f64 {
    let (v, l2) = metric_measures(p, field, mode);
    match which {
        Heuristic::Eta1 => eta1_from(v, &l2),
        Heuristic::Eta2 => eta2_from(&l2),
        Heuristic::Eta3 => eta3_from(v, &l2),
    }
}

/// Quality of every alive element, in element-id order.
pub fn mesh_quality(
    mesh: &Mesh4,
    field: &MetricField,
    mode: QualityMode,
    which: Heuristic,
    exec: Execution,
) -> Vec<(ElemId, f64)> {
    let ids = mesh.alive_element_ids();
    par::map_slice(exec, &ids, |&e| {
        (
            e,
            quality_metric(&mesh.element_points(e), field, mode, which),
        )
    })
}

/// Mean of the lowest `fraction` of `values` (at least one value).
pub fn amq(values: &[f64], fraction: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = ((fraction * v.len() as f64).ceil() as usize).clamp(1, v.len());
    v[..k].iter().sum::<f64>() / k as f64
}

/// `A(R, T) = R⁻ᵀ TᵀT R⁻¹`, where the columns of `T` are `pᵢ − p₁` and `R`
/// is the regular pentatope of equal hypervolume. `None` for flat input.
pub fn ellipsoid_matrix(p: &[Point4; 5]) -> Option<Matrix4<f64>> {
    let v = hypervolume(p).abs();
    if v <= 0.0 {
        return None;
    }
    let a = (96.0 * v / 5f64.sqrt()).powf(0.25);
    let (s3, s6, s10) = (3f64.sqrt(), 6f64.sqrt(), 10f64.sqrt());
    let r = a * Matrix4::new(
        s3 / 2.0,
        s3 / 2.0,
        s3 / 3.0,
        s3 / 3.0,
        -0.5,
        0.5,
        0.0,
        0.0,
        0.0,
        0.0,
        s6 / 3.0,
        s6 / 12.0,
        0.0,
        0.0,
        0.0,
        s10 / 4.0,
    );
    let t = Matrix4::from_fn(|i, j| p[j + 1].to_array()[i] - p[0].to_array()[i]);
    let rinv = r.try_inverse()?;
    Some(rinv.transpose() * t.transpose() * t * rinv)
}

/// The three heuristics computed from trace, determinant and Frobenius norm
/// of [`ellipsoid_matrix`].
pub fn quality_via_matrix(p: &[Point4; 5]) -> QualityVector {
    let Some(a) = ellipsoid_matrix(p) else {
        return QualityVector::default();
    };
    let tr = a.trace();
    let det = a.determinant().max(0.0);
    let fro = a.norm();
    QualityVector {
        eta1: 4.0 * det.powf(0.25) / tr,
        eta2: tr / (2.0 * fro),
        eta3: 2.0 * det.powf(0.25) / fro,
    }
}
