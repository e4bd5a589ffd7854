//! Basic 4D types: events, metric tensors, metric fields, facet conventions,
//! normals, hypervolumes and metric-weighted lengths and volumes.

use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::predicates::exact;
use crate::quadrature;

/// A 4D displacement.
pub type Vector4 = [f64; 4];

/// A space-time event. `t` is stored in its own units; the metric supplies
/// the scaling between space and time.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Point4 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub t: f64,
}

impl Point4 {
    pub const ORIGIN: Point4 = Point4 {
        x: 0.0,
        y: 0.0,
        z: 0.0,
        t: 0.0,
    };

    pub const fn new(x: f64, y: f64, z: f64, t: f64) -> Self {
        Point4 { x, y, z, t }
    }

    pub const fn from_array(c: [f64; 4]) -> Self {
        Point4 {
            x: c[0],
            y: c[1],
            z: c[2],
            t: c[3],
        }
    }

    pub const fn to_array(self) -> [f64; 4] {
        [self.x, self.y, self.z, self.t]
    }

    /// Unit vector along axis `i` (0..4).
    pub fn axis(i: usize) -> Self {
        let mut c = [0.0; 4];
        c[i] = 1.0;
        Point4::from_array(c)
    }

    pub fn sub(self, o: Point4) -> Vector4 {
        [self.x - o.x, self.y - o.y, self.z - o.z, self.t - o.t]
    }

    pub fn add(self, v: Vector4) -> Point4 {
        Point4::new(self.x + v[0], self.y + v[1], self.z + v[2], self.t + v[3])
    }

    pub fn is_finite(self) -> bool {
        self.to_array().iter().all(|c| c.is_finite())
    }

    pub fn distance(self, o: Point4) -> f64 {
        norm(self.sub(o))
    }

    /// Arithmetic mean of a nonempty set of points.
    pub fn centroid(points: &[Point4]) -> Point4 {
        let mut acc = [0.0; 4];
        for p in points {
            for (a, c) in acc.iter_mut().zip(p.to_array()) {
                *a += c;
            }
        }
        let n = points.len() as f64;
        Point4::from_array(acc.map(|a| a / n))
    }
}

pub fn dot(a: Vector4, b: Vector4) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

pub fn norm(a: Vector4) -> f64 {
    dot(a, a).sqrt()
}

/// Determinant of a 4×4 matrix given by rows.
pub fn det4(m: &[[f64; 4]; 4]) -> f64 {
    // Laplace expansion over the 2×2 minors of the top and bottom row pairs.
    let s0 = m[0][0] * m[1][1] - m[1][0] * m[0][1];
    let s1 = m[0][0] * m[1][2] - m[1][0] * m[0][2];
    let s2 = m[0][0] * m[1][3] - m[1][0] * m[0][3];
    let s3 = m[0][1] * m[1][2] - m[1][1] * m[0][2];
    let s4 = m[0][1] * m[1][3] - m[1][1] * m[0][3];
    let s5 = m[0][2] * m[1][3] - m[1][2] * m[0][3];
    let c5 = m[2][2] * m[3][3] - m[3][2] * m[2][3];
    let c4 = m[2][1] * m[3][3] - m[3][1] * m[2][3];
    let c3 = m[2][1] * m[3][2] - m[3][1] * m[2][2];
    let c2 = m[2][0] * m[3][3] - m[3][0] * m[2][3];
    let c1 = m[2][0] * m[3][2] - m[3][0] * m[2][2];
    let c0 = m[2][0] * m[3][1] - m[3][0] * m[2][1];
    s0 * c5 - s1 * c4 + s2 * c3 + s3 * c2 - s4 * c1 + s5 * c0
}

pub(crate) fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// A symmetric positive-definite 4×4 metric tensor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Metric4 {
    m: [[f64; 4]; 4],
}

impl Metric4 {
    /// Validates symmetry (to 1e-12 relative) and positive definiteness via
    /// the leading principal minors.
    pub fn new(m: [[f64; 4]; 4]) -> Result<Self> {
        if m.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonSpdMetric("non-finite entry".into()));
        }
        let scale = m.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
        for i in 0..4 {
            for j in 0..i {
                if (m[i][j] - m[j][i]).abs() > 1e-12 * scale {
                    return Err(Error::NonSpdMetric(format!(
                        "entries ({i},{j}) and ({j},{i}) differ"
                    )));
                }
            }
        }
        let minors = [
            m[0][0],
            m[0][0] * m[1][1] - m[0][1] * m[1][0],
            det3([
                [m[0][0], m[0][1], m[0][2]],
                [m[1][0], m[1][1], m[1][2]],
                [m[2][0], m[2][1], m[2][2]],
            ]),
            det4(&m),
        ];
        if let Some(k) = minors.iter().position(|&d| d <= 0.0) {
            return Err(Error::NonSpdMetric(format!(
                "leading minor of order {} is not positive",
                k + 1
            )));
        }
        Ok(Metric4 { m })
    }

    pub const IDENTITY: Metric4 = Metric4 {
        m: [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ],
    };

    pub fn identity() -> Self {
        Self::IDENTITY
    }

    pub fn diagonal(d: [f64; 4]) -> Result<Self> {
        let mut m = [[0.0; 4]; 4];
        for i in 0..4 {
            m[i][i] = d[i];
        }
        Metric4::new(m)
    }

    /// `diag(1, 1, 1, c²)`: time measured in units of the characteristic
    /// speed `c`.
    pub fn space_time(c: f64) -> Result<Self> {
        Metric4::diagonal([1.0, 1.0, 1.0, c * c])
    }

    pub fn matrix(&self) -> &[[f64; 4]; 4] {
        &self.m
    }

    pub fn quad_form(&self, v: Vector4) -> f64 {
        let mut s = 0.0;
        for i in 0..4 {
            let mut r = 0.0;
            for j in 0..4 {
                r += self.m[i][j] * v[j];
            }
            s += v[i] * r;
        }
        s
    }

    pub fn apply(&self, v: Vector4) -> Vector4 {
        let mut r = [0.0; 4];
        for i in 0..4 {
            for j in 0..4 {
                r[i] += self.m[i][j] * v[j];
            }
        }
        r
    }

    pub fn det(&self) -> f64 {
        det4(&self.m)
    }

    pub fn sqrt_det(&self) -> f64 {
        self.det().sqrt()
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    /// Inverse via nalgebra's LU; exists for every SPD matrix.
    pub fn inverse(&self) -> [[f64; 4]; 4] {
        let m = nalgebra::Matrix4::from_fn(|i, j| self.m[i][j]);
        let inv = m.try_inverse().expect("SPD metric is invertible");
        std::array::from_fn(|i| std::array::from_fn(|j| inv[(i, j)]))
    }

    /// Entry-wise convex combination `(1-w)·self + w·other`; stays SPD.
    pub fn lerp(&self, other: &Metric4, w: f64) -> Metric4 {
        let m = std::array::from_fn(|i| {
            std::array::from_fn(|j| (1.0 - w) * self.m[i][j] + w * other.m[i][j])
        });
        Metric4 { m }
    }
}

/// A metric tensor field over space-time.
#[derive(Clone)]
pub enum MetricField {
    Identity,
    Constant(Metric4),
    /// `diag(1, 1, 1, c(t)²)` with `c(t) = c0 + exp(-(t - t_center)²/2) / beta`.
    SpaceTimeSpeed {
        c0: f64,
        beta: f64,
        t_center: f64,
    },
    /// Samples `(t, M)` sorted by `t`, interpolated linearly and clamped at
    /// both ends.
    TimeTable(Vec<(f64, Metric4)>),
    Custom(Arc<dyn Fn(Point4) -> Metric4 + Send + Sync>),
}

impl fmt::Debug for MetricField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricField::Identity => write!(f, "Identity"),
            MetricField::Constant(m) => write!(f, "Constant({m:?})"),
            MetricField::SpaceTimeSpeed { c0, beta, t_center } => {
                write!(
                    f,
                    "SpaceTimeSpeed {{ c0: {c0}, beta: {beta}, t_center: {t_center} }}"
                )
            }
            MetricField::TimeTable(rows) => write!(f, "TimeTable({} samples)", rows.len()),
            MetricField::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl Default for MetricField {
    fn default() -> Self {
        MetricField::Identity
    }
}

impl MetricField {
    /// The hypercylinder speed profile: `c0 = 1`, `beta = 0.1`, peak at `t = 2`.
    pub fn hypercylinder_speed() -> Self {
        MetricField::SpaceTimeSpeed {
            c0: 1.0,
            beta: 0.1,
            t_center: 2.0,
        }
    }

    pub fn speed(c0: f64, beta: f64) -> Self {
        MetricField::SpaceTimeSpeed {
            c0,
            beta,
            t_center: 2.0,
        }
    }

    pub fn custom(f: impl Fn(Point4) -> Metric4 + Send + Sync + 'static) -> Self {
        MetricField::Custom(Arc::new(f))
    }

    pub fn time_table(mut rows: Vec<(f64, Metric4)>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyInput);
        }
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(MetricField::TimeTable(rows))
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, MetricField::Identity)
    }

    /// True when the field does not depend on position.
    pub fn is_constant(&self) -> bool {
        match self {
            MetricField::Identity | MetricField::Constant(_) => true,
            MetricField::TimeTable(rows) => rows.len() == 1,
            _ => false,
        }
    }

    pub fn eval(&self, p: Point4) -> Metric4 {
        match self {
            MetricField::Identity => Metric4::IDENTITY,
            MetricField::Constant(m) => *m,
            MetricField::SpaceTimeSpeed { c0, beta, t_center } => {
                let dt = p.t - t_center;
                let c = c0 + (-dt * dt / 2.0).exp() / beta;
                let mut m = Metric4::IDENTITY;
                m.m[3][3] = c * c;
                m
            }
            MetricField::TimeTable(rows) => {
                let i = rows.partition_point(|(t, _)| *t <= p.t);
                if i == 0 {
                    rows[0].1
                } else if i == rows.len() {
                    rows[rows.len() - 1].1
                } else {
                    let (t0, m0) = &rows[i - 1];
                    let (t1, m1) = &rows[i];
                    m0.lerp(m1, (p.t - t0) / (t1 - t0))
                }
            }
            MetricField::Custom(f) => f(p),
        }
    }
}

/// A pentatope as five vertex indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Pentatope {
    pub v: [u32; 5],
}

/// A tetrahedral facet as four vertex indices, in the orientation induced by
/// its owner.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TetFacet {
    pub v: [u32; 4],
}

impl TetFacet {
    /// Order-independent key: the sorted vertex indices.
    pub fn key(&self) -> [u32; 4] {
        let mut k = self.v;
        k.sort_unstable();
        k
    }
}

/// Local vertex positions of the five facets, in canonical order:
/// F(1234), F(1253), F(1245), F(2345), F(3145).
pub const FACET_LOCAL: [[usize; 4]; 5] = [
    [0, 1, 2, 3],
    [0, 1, 4, 2],
    [0, 1, 3, 4],
    [1, 2, 3, 4],
    [2, 0, 3, 4],
];

/// Local position of the vertex opposite each canonical facet.
pub const FACET_OPPOSITE: [usize; 5] = [4, 3, 2, 0, 1];

/// The five facets of `p` in canonical order. Each facet followed by the
/// opposite vertex is an even permutation of `p`, so for a positively
/// oriented pentatope every facet "sees" its element on the positive side.
pub fn canonical_facets(p: Pentatope) -> [TetFacet; 5] {
    FACET_LOCAL.map(|l| TetFacet {
        v: l.map(|i| p.v[i]),
    })
}

/// Generalized cross product of `b-a`, `c-a`, `d-a`, from the formal
/// determinant whose last row holds the unit vectors, expanded with signs
/// (+, −, +, −).
///
/// With this sign, `dot(N, p - a) = -orientation(a, b, c, d, p)`: for a
/// canonical facet of a positively oriented element the normal points away
/// from the element. Degenerate facets give the zero vector.
pub fn facet_normal(a: Point4, b: Point4, c: Point4, d: Point4) -> Vector4 {
    let u = b.sub(a);
    let v = c.sub(a);
    let w = d.sub(a);
    let minor = |skip: usize| {
        let cols: Vec<usize> = (0..4).filter(|&j| j != skip).collect();
        det3([
            [u[cols[0]], u[cols[1]], u[cols[2]]],
            [v[cols[0]], v[cols[1]], v[cols[2]]],
            [w[cols[0]], w[cols[1]], w[cols[2]]],
        ])
    };
    [minor(0), -minor(1), minor(2), -minor(3)]
}

/// Edge-difference matrix rows `p_i - p_1`, i = 2..5.
pub(crate) fn edge_rows(p: &[Point4; 5]) -> [[f64; 4]; 4] {
    std::array::from_fn(|i| p[i + 1].sub(p[0]))
}

/// Signed hypervolume `det[p2-p1, …, p5-p1] / 4!`.
pub fn hypervolume(p: &[Point4; 5]) -> f64 {
    det4(&edge_rows(p)) / 24.0
}

/// Signed hypervolume in exact rational arithmetic.
pub fn hypervolume_exact(p: &[Point4; 5]) -> BigRational {
    exact::hypervolume(p)
}

/// Squared edge lengths in the order d12, d13, d14, d15, d23, d24, d25, d34,
/// d35, d45.
pub fn edge_lengths_sq(p: &[Point4; 5], m: &Metric4) -> [f64; 10] {
    let mut out = [0.0; 10];
    let mut k = 0;
    for i in 0..5 {
        for j in i + 1..5 {
            out[k] = m.quad_form(p[j].sub(p[i]));
            k += 1;
        }
    }
    out
}

/// `sqrt((a-b)ᵀ M (a-b))`.
pub fn metric_length_pointwise(a: Point4, b: Point4, m: &Metric4) -> f64 {
    m.quad_form(a.sub(b)).max(0.0).sqrt()
}

/// `|v| · sqrt(det M)`.
pub fn metric_volume_pointwise(p: &[Point4; 5], m: &Metric4) -> f64 {
    hypervolume(p).abs() * m.sqrt_det()
}

/// Gauss–Legendre approximation of the metric length of segment `ab` under
/// a varying field.
pub fn metric_length_quadrature(a: Point4, b: Point4, field: &MetricField, order: usize) -> f64 {
    let d = b.sub(a);
    if field.is_constant() {
        return metric_length_pointwise(a, b, &field.eval(a));
    }
    quadrature::gauss_legendre(order.max(1))
        .iter()
        .map(|&(tau, w)| {
            let x = a.add(d.map(|c| c * tau));
            w * field.eval(x).quad_form(d).max(0.0).sqrt()
        })
        .sum()
}

/// Simplex-quadrature approximation of `∫ sqrt(det M)` over the pentatope.
///
/// `order` selects the Grundmann–Möller rule of degree `2·order - 1`
/// (minimum 1); order 3 gives the default degree-5 rule.
pub fn metric_volume_quadrature(p: &[Point4; 5], field: &MetricField, order: usize) -> f64 {
    let v = hypervolume(p).abs();
    if field.is_constant() {
        return v * field.eval(p[0]).sqrt_det();
    }
    let rule = quadrature::grundmann_moller_4d(order.max(1) - 1);
    let integral: f64 = rule
        .iter()
        .map(|(bary, w)| {
            let mut x = [0.0; 4];
            for (l, pt) in bary.iter().zip(p) {
                for (xc, c) in x.iter_mut().zip(pt.to_array()) {
                    *xc += l * c;
                }
            }
            w * field.eval(Point4::from_array(x)).sqrt_det()
        })
        .sum();
    v * integral
}

/// Default quadrature order for lengths (Gauss–Legendre points).
pub const DEFAULT_LENGTH_ORDER: usize = 4;
/// Default quadrature order for volumes (degree-5 simplex rule).
pub const DEFAULT_VOLUME_ORDER: usize = 3;
