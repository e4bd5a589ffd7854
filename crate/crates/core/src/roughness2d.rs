//! Roughness minimality of the anisotropic Delaunay triangulation in 2D.
//!
//! Points are `(x, t)` pairs and the metric is `diag(1, c²)` for a
//! characteristic speed `c`. The roughness of a piecewise-linear `g` is
//! `Σ_T ∫_T c·g_x² + g_t²/c`. For a strictly convex quadrilateral mapped to
//! the canonical position `(0,0), (1,0), (r,s), (p,q)`, the difference
//! between the roughness on the `u1u3` diagonal and on the `u2u4` diagonal
//! factors as `A·B·C`, where `C` is the metric circumcircle criterion.
//!
//! [`lop`] runs Lawson's local optimization procedure with the metric
//! evaluated at each edge midpoint.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::predicates::ddim::{inhypersphere_bracket_exact, orientation_bracket_exact};
use crate::predicates::exact::to_rational;
use crate::predicates::Sign;

/// A point `(x, t)`.
pub type Point2 = [f64; 2];

/// Four points of a strictly convex quadrilateral in cyclic order, their
/// nodal values and the speed at the shared edge midpoint.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadConfig2 {
    pub u: [Point2; 4],
    pub f: [f64; 4],
    pub c_v: f64,
}

impl QuadConfig2 {
    pub fn new(u: [Point2; 4], f: [f64; 4], c_v: f64) -> Result<Self> {
        if !(c_v > 0.0 && c_v.is_finite()) {
            return Err(Error::Degenerate(format!(
                "speed must be positive, got {c_v}"
            )));
        }
        let signs: Vec<Sign> = (0..4)
            .map(|i| orient2(u[i], u[(i + 1) % 4], u[(i + 2) % 4]))
            .collect();
        if signs.contains(&Sign::Zero) || signs.iter().any(|&s| s != signs[0]) {
            return Err(Error::Degenerate(
                "quadrilateral is not strictly convex".into(),
            ));
        }
        Ok(QuadConfig2 { u, f, c_v })
    }

    /// Relative roughness of the canonical image, using this configuration's
    /// speed.
    pub fn relative_roughness(&self) -> Result<RelativeRoughness> {
        relative_roughness(&map_to_canonical(self)?, self.f, self.c_v)
    }
}

/// Canonical quadrilateral `(0,0), (1,0), (r,s), (p,q)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CanonicalQuad {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub s: f64,
}

impl CanonicalQuad {
    pub fn new(p: f64, q: f64, r: f64, s: f64) -> Result<Self> {
        let cq = CanonicalQuad { p, q, r, s };
        if cq.is_valid() {
            Ok(cq)
        } else {
            Err(Error::Degenerate(format!(
                "canonical quadrilateral {cq:?} has a non-positive triangle area"
            )))
        }
    }

    /// `rq - ps + s - q`, twice the area of triangle `(u2, u3, u4)`.
    pub fn m(&self) -> f64 {
        self.r * self.q - self.p * self.s + self.s - self.q
    }

    pub fn is_valid(&self) -> bool {
        self.q > 0.0 && self.s > 0.0 && self.r * self.q - self.p * self.s > 0.0 && self.m() > 0.0
    }

    pub fn points(&self) -> [Point2; 4] {
        [[0.0, 0.0], [1.0, 0.0], [self.r, self.s], [self.p, self.q]]
    }
}

/// Maps `u1` to the origin and `u2` to `(1, 0)`: time is scaled by `c_v`,
/// the edge `u1u2` is rotated onto the positive x axis and everything is
/// divided by its metric length. A clockwise quadrilateral is first
/// reflected in time, which preserves both the metric and the roughness.
pub fn map_to_canonical(cfg: &QuadConfig2) -> Result<CanonicalQuad> {
    let ccw = orient2(cfg.u[0], cfg.u[1], cfg.u[2]) == Sign::Positive;
    let tsign = if ccw { 1.0 } else { -1.0 };
    let w: Vec<Point2> = cfg
        .u
        .iter()
        .map(|u| [u[0] - cfg.u[0][0], tsign * cfg.c_v * (u[1] - cfg.u[0][1])])
        .collect();
    let len = w[1][0].hypot(w[1][1]);
    if len == 0.0 {
        return Err(Error::Degenerate("u1 and u2 coincide".into()));
    }
    let (cos, sin) = (w[1][0] / len, -w[1][1] / len);
    let map = |v: Point2| {
        [
            (cos * v[0] - sin * v[1]) / len,
            (sin * v[0] + cos * v[1]) / len,
        ]
    };
    let [r, s] = map(w[2]);
    let [p, q] = map(w[3]);
    CanonicalQuad::new(p, q, r, s)
}

/// `value = |H|²_{T*} − |G|²_T` and its factors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelativeRoughness {
    pub value: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl RelativeRoughness {
    pub fn product(&self) -> f64 {
        self.a * self.b * self.c
    }

    /// `|value − A·B·C|` relative to the larger of the two magnitudes.
    pub fn factorization_error(&self) -> f64 {
        let scale = self
            .value
            .abs()
            .max((self.a * self.b * self.c).abs())
            .max(f64::MIN_POSITIVE);
        (self.value - self.product()).abs() / scale
    }
}

/// `Σ |T*_j|(ã*_j² + b̃*_j²) − Σ |T_j|(ã_j² + b̃_j²)` in exact arithmetic.
/// The coefficients only enter squared, so `√c` never appears.
fn coefficient_expansion(cq: &CanonicalQuad, f: [f64; 4], c_v: f64) -> BigRational {
    let [p, q, r, s] = [cq.p, cq.q, cq.r, cq.s].map(to_rational);
    let f1 = to_rational(f[0]);
    let [f2, f3, f4] = [f[1], f[2], f[3]].map(|x| to_rational(x) - &f1);
    let c = to_rational(c_v);
    let one = BigRational::one();
    let half = BigRational::new(1.into(), 2.into());
    let det = &r * &q - &p * &s;
    let m = &det + &s - &q;
    let sq = |x: BigRational| &x * &x;

    let a1 = &c * sq(f2.clone());
    let b1 = sq(&f4 - &p * &f2) / (&c * sq(q.clone()));
    let a2 = &c * sq(&q * (&f3 - &f2) - &s * (&f4 - &f2)) / sq(m.clone());
    let b2 = sq((&r - &one) * (&f4 - &f2) - (&p - &one) * (&f3 - &f2)) / (&c * sq(m.clone()));
    let a1s = &c * sq(f2.clone());
    let b1s = sq(&f3 - &r * &f2) / (&c * sq(s.clone()));
    let a2s = &c * sq(&q * &f3 - &s * &f4) / sq(det.clone());
    let b2s = sq(&r * &f4 - &p * &f3) / (&c * sq(det.clone()));

    &half * (&s * (a1s + b1s) + &det * (a2s + b2s) - &q * (a1 + b1) - &m * (a2 + b2))
}

/// Relative roughness on a canonical quadrilateral, expanded term by term
/// from the per-triangle gradient coefficients. Values are shifted so that
/// `f1 = 0`, which leaves every gradient unchanged.
pub fn relative_roughness(cq: &CanonicalQuad, f: [f64; 4], c_v: f64) -> Result<RelativeRoughness> {
    if !cq.is_valid() || !(c_v > 0.0) {
        return Err(Error::Degenerate(format!(
            "invalid canonical quadrilateral {cq:?} or speed {c_v}"
        )));
    }
    let CanonicalQuad { p, q, r, s } = *cq;
    let value = coefficient_expansion(cq, f, c_v)
        .to_f64()
        .unwrap_or(f64::NAN);
    let (f2, f3, f4) = (f[1] - f[0], f[2] - f[0], f[3] - f[0]);
    let m = cq.m();
    let det = r * q - p * s;
    let a = 1.0 / (2.0 * c_v * m * s * det);
    let b = (q * f3 + (p * s - r * q) * f2 - s * f4).powi(2);
    let c2 = c_v * c_v;
    let c = (p * s * (1.0 - p) - c2 * q * q * s + q * (c2 * s * s + r * r - r)) / q;
    Ok(RelativeRoughness { value, a, b, c })
}

/// Roughness `area · (c·g_x² + g_t²/c)` of the linear interpolant on one
/// triangle.
pub fn triangle_roughness(tri: [Point2; 3], f: [f64; 3], c: f64) -> f64 {
    let [a, b, d] = tri;
    let (e1, e2) = ([b[0] - a[0], b[1] - a[1]], [d[0] - a[0], d[1] - a[1]]);
    let (df1, df2) = (f[1] - f[0], f[2] - f[0]);
    let det = e1[0] * e2[1] - e1[1] * e2[0];
    if det == 0.0 {
        return 0.0;
    }
    let gx = (df1 * e2[1] - e1[1] * df2) / det;
    let gt = (e1[0] * df2 - df1 * e2[0]) / det;
    0.5 * det.abs() * (c * gx * gx + gt * gt / c)
}

fn triangle_roughness_exact(tri: [Point2; 3], f: [f64; 3], c: &BigRational) -> BigRational {
    let pt = |i: usize| [to_rational(tri[i][0]), to_rational(tri[i][1])];
    let [a, b, d] = [pt(0), pt(1), pt(2)];
    let e1 = [&b[0] - &a[0], &b[1] - &a[1]];
    let e2 = [&d[0] - &a[0], &d[1] - &a[1]];
    let df1 = to_rational(f[1]) - to_rational(f[0]);
    let df2 = to_rational(f[2]) - to_rational(f[0]);
    let det = &e1[0] * &e2[1] - &e1[1] * &e2[0];
    let gx = (&df1 * &e2[1] - &e1[1] * &df2) / &det;
    let gt = (&e1[0] * &df2 - &df1 * &e2[0]) / &det;
    det.abs() / BigRational::from_integer(2.into()) * (c * &gx * &gx + &gt * &gt / c)
}

/// Relative roughness integrated directly from the two triangulations in
/// exact rational arithmetic, independent of the coefficient formulas.
pub fn direct_relative_roughness(cq: &CanonicalQuad, f: [f64; 4], c_v: f64) -> f64 {
    let [u1, u2, u3, u4] = cq.points();
    let c = to_rational(c_v);
    let h = triangle_roughness_exact([u1, u2, u3], [f[0], f[1], f[2]], &c)
        + triangle_roughness_exact([u1, u3, u4], [f[0], f[2], f[3]], &c);
    let g = triangle_roughness_exact([u1, u2, u4], [f[0], f[1], f[3]], &c)
        + triangle_roughness_exact([u2, u3, u4], [f[1], f[2], f[3]], &c);
    (h - g).to_f64().unwrap_or(f64::NAN)
}

fn rational_points(pts: &[Point2]) -> Vec<Vec<BigRational>> {
    pts.iter()
        .map(|p| vec![to_rational(p[0]), to_rational(p[1])])
        .collect()
}

fn rational_sign(v: &BigRational) -> Sign {
    if v.is_positive() {
        Sign::Positive
    } else if v.is_negative() {
        Sign::Negative
    } else {
        Sign::Zero
    }
}

/// Exact sign of `det[a - c; b - c]`, positive for counter-clockwise input.
pub fn orient2(a: Point2, b: Point2, c: Point2) -> Sign {
    let (l, r) = ((a[0] - c[0]) * (b[1] - c[1]), (a[1] - c[1]) * (b[0] - c[0]));
    let det = l - r;
    if det.abs() > 1e-14 * (l.abs() + r.abs()) {
        return Sign::of(det);
    }
    rational_sign(&orientation_bracket_exact(&rational_points(&[a, b, c])))
}

/// Metric circumcircle test under `diag(1, c_v²)`: positive when `w` lies
/// strictly outside the circle through `tri`, zero on it, negative inside.
pub fn incircle_m2(c_v: f64, tri: [Point2; 3], w: Point2) -> Result<Sign> {
    let o = orient2(tri[0], tri[1], tri[2]);
    if o == Sign::Zero {
        return Err(Error::Degenerate("collinear triangle".into()));
    }
    let c2 = c_v * c_v;
    let rows = tri.map(|p| {
        let (dx, dt) = (p[0] - w[0], p[1] - w[1]);
        [dx, dt, dx * dx + c2 * dt * dt]
    });
    let minor =
        |i: usize, j: usize, k: usize| (rows[i][0] * rows[j][1], rows[i][1] * rows[j][0], k);
    let mut det = 0.0;
    let mut perm = 0.0;
    for (i, j, k) in [(1, 2, 0), (2, 0, 1), (0, 1, 2)] {
        let (l, r, k) = minor(i, j, k);
        det += rows[k][2] * (l - r);
        perm += rows[k][2].abs() * (l.abs() + r.abs());
    }
    let inside = if det.abs() > 1e-12 * perm {
        Sign::of(det)
    } else {
        let c2 = to_rational(c_v) * to_rational(c_v);
        let m = vec![
            vec![BigRational::one(), BigRational::zero()],
            vec![BigRational::zero(), c2],
        ];
        rational_sign(&inhypersphere_bracket_exact(
            &m,
            &rational_points(&[tri[0], tri[1], tri[2], w]),
        ))
    };
    Ok(if o == Sign::Positive {
        inside.flip()
    } else {
        inside
    })
}

/// Speed field `c(x, t)` for [`lop`].
#[derive(Clone)]
pub enum SpeedField2 {
    Constant(f64),
    Custom(Arc<dyn Fn(Point2) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for SpeedField2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpeedField2::Constant(c) => write!(f, "Constant({c})"),
            SpeedField2::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl SpeedField2 {
    pub fn eval(&self, p: Point2) -> f64 {
        match self {
            SpeedField2::Constant(c) => *c,
            SpeedField2::Custom(f) => f(p),
        }
    }
}

/// Counter-clockwise triangles over a point set.
#[derive(Clone, Debug, PartialEq)]
pub struct Triangulation2 {
    pub points: Vec<Point2>,
    pub triangles: Vec<[usize; 3]>,
}

impl Triangulation2 {
    /// Undirected edges as sorted index pairs.
    pub fn edges(&self) -> BTreeSet<(usize, usize)> {
        self.triangles
            .iter()
            .flat_map(|t| (0..3).map(move |k| (t[k].min(t[(k + 1) % 3]), t[k].max(t[(k + 1) % 3]))))
            .collect()
    }

    /// Total roughness with the speed taken at each triangle centroid.
    pub fn roughness(&self, values: &[f64], field: &SpeedField2) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let pts = t.map(|i| self.points[i]);
                let centroid = [
                    (pts[0][0] + pts[1][0] + pts[2][0]) / 3.0,
                    (pts[0][1] + pts[1][1] + pts[2][1]) / 3.0,
                ];
                triangle_roughness(pts, t.map(|i| values[i]), field.eval(centroid))
            })
            .sum()
    }
}

/// Any valid triangulation: a fan over the convex hull, then every other
/// point inserted by splitting the triangle (or edge) containing it.
pub fn initial_triangulation(points: &[Point2]) -> Result<Triangulation2> {
    let n = points.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        points[a][0]
            .total_cmp(&points[b][0])
            .then(points[a][1].total_cmp(&points[b][1]))
    });
    if order.windows(2).any(|w| points[w[0]] == points[w[1]]) {
        return Err(Error::Degenerate("duplicate points".into()));
    }
    // Andrew's monotone chain, dropping collinear hull points.
    let mut hull: Vec<usize> = Vec::new();
    for pass in 0..2 {
        let start = hull.len();
        let it: Box<dyn Iterator<Item = &usize>> = if pass == 0 {
            Box::new(order.iter())
        } else {
            Box::new(order.iter().rev())
        };
        for &i in it {
            while hull.len() >= start + 2
                && orient2(
                    points[hull[hull.len() - 2]],
                    points[hull[hull.len() - 1]],
                    points[i],
                ) != Sign::Positive
            {
                hull.pop();
            }
            hull.push(i);
        }
        hull.pop();
    }
    if hull.len() < 3 {
        return Err(Error::Degenerate("points are collinear".into()));
    }
    let mut tri = Triangulation2 {
        points: points.to_vec(),
        triangles: (1..hull.len() - 1)
            .map(|k| [hull[0], hull[k], hull[k + 1]])
            .collect(),
    };
    let on_hull: BTreeSet<usize> = hull.iter().copied().collect();
    for i in (0..n).filter(|i| !on_hull.contains(i)) {
        insert_point(&mut tri, i)?;
    }
    Ok(tri)
}

fn insert_point(tri: &mut Triangulation2, i: usize) -> Result<()> {
    let p = tri.points[i];
    for (ti, t) in tri.triangles.iter().enumerate() {
        let s: Vec<Sign> = (0..3)
            .map(|k| orient2(tri.points[t[k]], tri.points[t[(k + 1) % 3]], p))
            .collect();
        if s.contains(&Sign::Negative) {
            continue;
        }
        let t = *t;
        match s.iter().filter(|&&x| x == Sign::Zero).count() {
            0 => {
                tri.triangles[ti] = [t[0], t[1], i];
                tri.triangles.push([t[1], t[2], i]);
                tri.triangles.push([t[2], t[0], i]);
            }
            1 => {
                let k = s.iter().position(|&x| x == Sign::Zero).unwrap();
                let (a, b, c) = (t[k], t[(k + 1) % 3], t[(k + 2) % 3]);
                tri.triangles[ti] = [a, i, c];
                tri.triangles.push([i, b, c]);
                if let Some(tj) = tri
                    .triangles
                    .iter()
                    .position(|u| (0..3).any(|m| u[m] == b && u[(m + 1) % 3] == a))
                {
                    let u = tri.triangles[tj];
                    let m = (0..3).find(|&m| u[m] == b).unwrap();
                    let d = u[(m + 2) % 3];
                    tri.triangles[tj] = [b, i, d];
                    tri.triangles.push([i, a, d]);
                }
            }
            _ => return Err(Error::Degenerate(format!("point {i} duplicates a vertex"))),
        }
        return Ok(());
    }
    Err(Error::Degenerate(format!(
        "point {i} lies outside the hull"
    )))
}

/// Outcome of [`lop`].
#[derive(Clone, Debug)]
pub struct LopReport {
    pub triangulation: Triangulation2,
    pub flips: usize,
    /// Total roughness after each flip (starting with the initial value) when
    /// nodal values were supplied.
    pub roughness: Vec<f64>,
    /// False when the flip cap was reached before every edge was locally
    /// Delaunay.
    pub converged: bool,
}

/// Lawson's procedure from the default initial triangulation.
pub fn lop(points: &[Point2], values: Option<&[f64]>, field: &SpeedField2) -> Result<LopReport> {
    Ok(lop_from(initial_triangulation(points)?, values, field))
}

/// Lawson's procedure from a given triangulation. An edge shared by two
/// triangles forming a strictly convex quadrilateral is flipped when the
/// opposite vertex lies strictly inside the metric circumcircle, with the
/// metric taken at the edge midpoint.
pub fn lop_from(mut tri: Triangulation2, values: Option<&[f64]>, field: &SpeedField2) -> LopReport {
    let mut owner: HashMap<(usize, usize), usize> = HashMap::new();
    for (ti, t) in tri.triangles.iter().enumerate() {
        for k in 0..3 {
            owner.insert((t[k], t[(k + 1) % 3]), ti);
        }
    }
    let mut queue: VecDeque<(usize, usize)> = tri.edges().into_iter().collect();
    let mut queued: BTreeSet<(usize, usize)> = queue.iter().copied().collect();
    let mut roughness: Vec<f64> = values
        .map(|v| vec![tri.roughness(v, field)])
        .unwrap_or_default();
    let cap = 10 * tri.points.len().pow(2) + 100;
    let mut flips = 0;
    while let Some((a, b)) = queue.pop_front() {
        queued.remove(&(a, b));
        if flips >= cap {
            return LopReport {
                triangulation: tri,
                flips,
                roughness,
                converged: false,
            };
        }
        let (Some(&t1), Some(&t2)) = (owner.get(&(a, b)), owner.get(&(b, a))) else {
            continue;
        };
        let third =
            |t: [usize; 3], x: usize, y: usize| t.into_iter().find(|&v| v != x && v != y).unwrap();
        let c = third(tri.triangles[t1], a, b);
        let d = third(tri.triangles[t2], a, b);
        let pts = &tri.points;
        if orient2(pts[a], pts[d], pts[c]) != Sign::Positive
            || orient2(pts[d], pts[b], pts[c]) != Sign::Positive
        {
            continue;
        }
        let mid = [(pts[a][0] + pts[b][0]) / 2.0, (pts[a][1] + pts[b][1]) / 2.0];
        let c_v = field.eval(mid);
        if !matches!(
            incircle_m2(c_v, [pts[a], pts[b], pts[c]], pts[d]),
            Ok(Sign::Negative)
        ) {
            continue;
        }
        for (x, y) in [(a, b), (b, a), (b, c), (c, a), (a, d), (d, b)] {
            owner.remove(&(x, y));
        }
        tri.triangles[t1] = [a, d, c];
        tri.triangles[t2] = [d, b, c];
        for (x, y, t) in [
            (a, d, t1),
            (d, c, t1),
            (c, a, t1),
            (d, b, t2),
            (b, c, t2),
            (c, d, t2),
        ] {
            owner.insert((x, y), t);
        }
        flips += 1;
        if let Some(v) = values {
            roughness.push(tri.roughness(v, field));
        }
        for (x, y) in [(a, d), (d, b), (b, c), (c, a)] {
            let e = (x.min(y), x.max(y));
            if queued.insert(e) {
                queue.push_back(e);
            }
        }
    }
    LopReport {
        triangulation: tri,
        flips,
        roughness,
        converged: true,
    }
}

/// Edges of every triangle whose metric circumcircle holds no other point
/// strictly inside, under the constant speed `c_v`.
pub fn delaunay_edges_brute_force(points: &[Point2], c_v: f64) -> BTreeSet<(usize, usize)> {
    let n = points.len();
    let mut edges = BTreeSet::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let tri = [points[i], points[j], points[k]];
                if orient2(tri[0], tri[1], tri[2]) == Sign::Zero {
                    continue;
                }
                let empty = (0..n)
                    .filter(|&w| w != i && w != j && w != k)
                    .all(|w| !matches!(incircle_m2(c_v, tri, points[w]), Ok(Sign::Negative)));
                if empty {
                    edges.extend([(i, j), (j, k), (i, k)]);
                }
            }
        }
    }
    edges
}

/// One randomized roughness trial.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RoughnessTrial {
    pub seed: u64,
    pub config: QuadConfig2,
    pub quad: CanonicalQuad,
    pub result: RelativeRoughness,
    pub direct: f64,
}

/// A strictly convex quadrilateral with vertices on a random ellipse, random
/// nodal values in `[-1, 1]` and a speed in `[0.2, 5]`. The vertex order is
/// clockwise half of the time.
pub fn random_quad_config(rng: &mut impl Rng) -> QuadConfig2 {
    use std::f64::consts::TAU;
    loop {
        let centre = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let (ra, rb, phi) = (
            rng.gen_range(0.5..2.0),
            rng.gen_range(0.5..2.0),
            rng.gen_range(0.0..TAU),
        );
        let mut angles: Vec<f64> = (0..4)
            .map(|i| (i as f64 + rng.gen_range(0.15..0.85)) * TAU / 4.0)
            .collect();
        if rng.gen_bool(0.5) {
            angles.reverse();
        }
        let u: Vec<Point2> = angles
            .iter()
            .map(|&a| {
                let (x, y) = (ra * a.cos(), rb * a.sin());
                [
                    centre[0] + x * phi.cos() - y * phi.sin(),
                    centre[1] + x * phi.sin() + y * phi.cos(),
                ]
            })
            .collect();
        let f = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let c_v = rng.gen_range(0.2f64.ln()..5.0f64.ln()).exp();
        if let Ok(cfg) = QuadConfig2::new([u[0], u[1], u[2], u[3]], f, c_v) {
            if map_to_canonical(&cfg).is_ok() {
                return cfg;
            }
        }
    }
}

/// `n` trials; trial `i` draws from its own generator seeded with `seed + i`.
pub fn roughness_trials(n: usize, seed: u64, exec: Execution) -> Vec<RoughnessTrial> {
    par::map_range(exec, n, |i| {
        let trial_seed = seed.wrapping_add(i as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
        let config = random_quad_config(&mut rng);
        let quad = map_to_canonical(&config).expect("generator yields valid quadrilaterals");
        let result = relative_roughness(&quad, config.f, config.c_v).expect("valid quadrilateral");
        let direct = direct_relative_roughness(&quad, config.f, config.c_v);
        RoughnessTrial {
            seed: trial_seed,
            config,
            quad,
            result,
            direct,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_maps_to_canonical_square() {
        let cfg = QuadConfig2::new(
            [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            [0.0; 4],
            1.0,
        )
        .unwrap();
        let cq = map_to_canonical(&cfg).unwrap();
        assert_eq!((cq.p, cq.q, cq.r, cq.s), (0.0, 1.0, 1.0, 1.0));
        let rr = relative_roughness(&cq, [0.3, -1.0, 2.0, 0.5], 1.0).unwrap();
        assert_eq!(rr.c, 0.0);
        assert!(rr.value.abs() < 1e-14);
    }

    #[test]
    fn speed_scales_time_before_rotation() {
        // u1u2 is vertical: after scaling by 2 its metric length is 2, and
        // u4 at time 1 lands at distance 1 along the rotated axis.
        let cfg = QuadConfig2::new(
            [[0.0, 0.0], [0.0, 1.0], [-1.0, 1.0], [-1.0, 0.0]],
            [0.0; 4],
            2.0,
        )
        .unwrap();
        let cq = map_to_canonical(&cfg).unwrap();
        assert!(
            (cq.r - 1.0).abs() < 1e-15 && (cq.s - 0.5).abs() < 1e-15,
            "{cq:?}"
        );
        assert!(cq.p.abs() < 1e-15 && (cq.q - 0.5).abs() < 1e-15, "{cq:?}");
    }

    #[test]
    fn clockwise_input_is_reflected() {
        let cfg = QuadConfig2::new(
            [[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]],
            [0.0; 4],
            1.0,
        )
        .unwrap();
        assert_eq!(
            map_to_canonical(&cfg).unwrap(),
            CanonicalQuad {
                p: 0.0,
                q: 1.0,
                r: 1.0,
                s: 1.0
            }
        );
    }

    #[test]
    fn constant_values_have_no_roughness_difference() {
        let cq = CanonicalQuad::new(-0.2, 0.8, 1.3, 1.1).unwrap();
        let rr = relative_roughness(&cq, [0.7; 4], 1.7).unwrap();
        assert_eq!(rr.b, 0.0);
        assert_eq!(rr.value, 0.0);
    }

    #[test]
    fn incircle_examples() {
        let t = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        assert_eq!(incircle_m2(1.0, t, [1.0, 1.0]).unwrap(), Sign::Zero);
        assert_eq!(incircle_m2(1.0, t, [10.0, 10.0]).unwrap(), Sign::Positive);
        assert_eq!(
            incircle_m2(1.0, t, [1.0 / 3.0, 1.0 / 3.0]).unwrap(),
            Sign::Negative
        );
        assert_eq!(
            incircle_m2(1.0, [t[0], t[2], t[1]], [1.0 / 3.0, 1.0 / 3.0]).unwrap(),
            Sign::Negative
        );
        assert!(incircle_m2(1.0, [[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]], [0.0, 1.0]).is_err());
        // Compressing time pulls a point below the base inside the circle.
        assert_eq!(incircle_m2(1.0, t, [0.5, -0.3]).unwrap(), Sign::Positive);
        assert_eq!(incircle_m2(0.3, t, [0.5, -0.3]).unwrap(), Sign::Negative);
    }

    #[test]
    fn cocircular_square_is_not_flipped() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let r = lop(&pts, None, &SpeedField2::Constant(1.0)).unwrap();
        assert_eq!(r.flips, 0);
        assert!(r.converged);
    }

    #[test]
    fn collinear_and_duplicate_points_are_rejected() {
        assert!(initial_triangulation(&[[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]).is_err());
        assert!(initial_triangulation(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 0.0]]).is_err());
    }

    #[test]
    fn point_on_hull_edge_is_inserted() {
        let pts = [[0.0, 0.0], [2.0, 0.0], [0.0, 2.0], [1.0, 0.0], [0.5, 0.5]];
        let t = initial_triangulation(&pts).unwrap();
        assert_eq!(t.triangles.len(), 4);
        let area: f64 = t
            .triangles
            .iter()
            .map(|x| {
                let [a, b, c] = x.map(|i| pts[i]);
                0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
            })
            .sum();
        assert!((area - 2.0).abs() < 1e-15);
    }
}
