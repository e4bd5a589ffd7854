//! Robust orientation and in-hypersphere predicates.
//!
//! The 4D predicates escalate through three stages: a floating-point
//! evaluation guarded by a forward error bound, a double-double evaluation
//! with its own bound, and an exact big-integer evaluation. The returned sign
//! is always the sign of the exact quantity for the given `f64` inputs.
//!
//! Sign conventions:
//! * `orientation4(a..e)` is `det[a-e; b-e; c-e; d-e]`, equal to
//!   `det[b-a; c-a; d-a; e-a]`, and positive for positively oriented input.
//! * `inhypersphere_m(M, a..e, f)` is positive when `f` lies strictly inside
//!   the M-circumhypersphere of a positively oriented `a..e`, zero on it and
//!   negative outside. For negatively oriented input the sign flips.
//!
//! The metric variants never factor `M`: they weight the quadratic forms
//! `(x - f)ᵀ M (x - f)` and scale by `sqrt(det M)`.

pub mod dd;
pub mod ddim;
pub mod exact;
pub mod standard;

use crate::geometry::{det4, Metric4, Point4};
use dd::Dd;

pub use ddim::{inhypersphere_m_d, orientation_m_d};
pub use standard::{
    decompose_metric, decompose_metric4, scale_points4, scale_points_standard, DecompositionKind,
    MetricDecomposition,
};

/// Sign of a predicate value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Negative = -1,
    Zero = 0,
    Positive = 1,
}

impl Sign {
    pub fn of(v: f64) -> Sign {
        if v > 0.0 {
            Sign::Positive
        } else if v < 0.0 {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    pub fn as_i32(self) -> i32 {
        self as i32
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }
}

/// Which stage certified the sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exactness {
    Float,
    Extended,
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PredicateResult {
    pub sign: Sign,
    /// Floating-point estimate of the predicate value; informational only.
    pub value: f64,
    pub exactness: Exactness,
}

const U: f64 = f64::EPSILON / 2.0;
const ORIENT_FLOAT_BOUND: f64 = 32.0 * U;
const INSPHERE_FLOAT_BOUND: f64 = 64.0 * U;
const EXTENDED_BOUND: f64 = 1024.0 * U * U;

/// Smallest entry magnitude for which a zero permanent proves a zero
/// determinant (products of up to six such entries stay normal).
const NO_UNDERFLOW: f64 = 1e-50;

/// Stage-by-stage evaluators, exposed for testing the escalation.
pub mod stages {
    use super::*;

    fn perm4(m: &[[f64; 4]; 4]) -> f64 {
        let a = m.map(|r| r.map(f64::abs));
        let p2 = |r0: usize, r1: usize, c0: usize, c1: usize| {
            a[r0][c0] * a[r1][c1] + a[r1][c0] * a[r0][c1]
        };
        p2(0, 1, 0, 1) * p2(2, 3, 2, 3)
            + p2(0, 1, 0, 2) * p2(2, 3, 1, 3)
            + p2(0, 1, 0, 3) * p2(2, 3, 1, 2)
            + p2(0, 1, 1, 2) * p2(2, 3, 0, 3)
            + p2(0, 1, 1, 3) * p2(2, 3, 0, 2)
            + p2(0, 1, 2, 3) * p2(2, 3, 0, 1)
    }

    fn tiny_entries(values: impl IntoIterator<Item = f64>) -> bool {
        values
            .into_iter()
            .any(|v| v != 0.0 && v.abs() < NO_UNDERFLOW)
    }

    fn orient_rows(p: &[Point4; 5]) -> [[f64; 4]; 4] {
        std::array::from_fn(|i| p[i].sub(p[4]))
    }

    /// Float value and, when the error bound certifies it, the sign.
    pub fn orientation4_filtered(p: &[Point4; 5]) -> (f64, Option<Sign>) {
        let rows = orient_rows(p);
        let det = det4(&rows);
        let perm = perm4(&rows);
        if perm == 0.0 && !tiny_entries(rows.iter().flatten().copied()) {
            return (0.0, Some(Sign::Zero));
        }
        let bound = ORIENT_FLOAT_BOUND * perm;
        if det.abs() > bound {
            (det, Some(Sign::of(det)))
        } else {
            (det, None)
        }
    }

    /// Double-double value and certified sign, if any.
    pub fn orientation4_extended(p: &[Point4; 5]) -> (f64, Option<Sign>) {
        let rows: [[Dd; 4]; 4] = std::array::from_fn(|i| {
            let a = p[i].to_array();
            let e = p[4].to_array();
            std::array::from_fn(|j| Dd::diff(a[j], e[j]))
        });
        let det = exact::det4_generic(&rows);
        let perm = perm4(&orient_rows(p));
        let v = det.to_f64();
        if v.abs() > EXTENDED_BOUND * perm * (1.0 + 1e-6) {
            (v, Some(Sign::of(v)))
        } else {
            (v, None)
        }
    }

    pub fn orientation4_exact(p: &[Point4; 5]) -> Sign {
        exact::orientation4_sign(p)
    }

    fn quad_abs(m: &[[f64; 4]; 4], y: &[f64; 4]) -> f64 {
        let mut s = 0.0;
        for j in 0..4 {
            for k in 0..4 {
                s += m[j][k].abs() * y[j].abs() * y[k].abs();
            }
        }
        s
    }

    fn minor_rows<T: Copy>(y: &[[T; 4]; 5], skip: usize) -> [[T; 4]; 4] {
        let mut out = [y[0]; 4];
        let mut k = 0;
        for (i, row) in y.iter().enumerate() {
            if i != skip {
                out[k] = *row;
                k += 1;
            }
        }
        out
    }

    /// Float value of the cofactor expansion (no `sqrt(det M)` prefactor)
    /// and the certified sign, if any.
    pub fn inhypersphere_filtered(m: &Metric4, p: &[Point4; 5], f: Point4) -> (f64, Option<Sign>) {
        let y: [[f64; 4]; 5] = std::array::from_fn(|i| p[i].sub(f));
        let mut value = 0.0;
        let mut perm = 0.0;
        for i in 0..5 {
            let q = m.quad_form(y[i]);
            let rows = minor_rows(&y, i);
            let d = det4(&rows);
            let term = q * d;
            value += if i % 2 == 0 { term } else { -term };
            perm += quad_abs(m.matrix(), &y[i]) * perm4(&rows);
        }
        let entries = y
            .iter()
            .flatten()
            .chain(m.matrix().iter().flatten())
            .copied();
        if perm == 0.0 && !tiny_entries(entries) {
            return (0.0, Some(Sign::Zero));
        }
        if value.abs() > INSPHERE_FLOAT_BOUND * perm {
            (value, Some(Sign::of(value)))
        } else {
            (value, None)
        }
    }

    pub fn inhypersphere_extended(m: &Metric4, p: &[Point4; 5], f: Point4) -> (f64, Option<Sign>) {
        let fa = f.to_array();
        let y: [[Dd; 4]; 5] = std::array::from_fn(|i| {
            let a = p[i].to_array();
            std::array::from_fn(|j| Dd::diff(a[j], fa[j]))
        });
        let yf: [[f64; 4]; 5] = std::array::from_fn(|i| p[i].sub(f));
        let mm = m.matrix();
        let mut value = Dd::ZERO;
        let mut perm = 0.0;
        for i in 0..5 {
            let mut q = Dd::ZERO;
            for j in 0..4 {
                for k in 0..4 {
                    if mm[j][k] != 0.0 {
                        q = q + Dd::from_f64(mm[j][k]) * y[i][j] * y[i][k];
                    }
                }
            }
            let d = exact::det4_generic(&minor_rows(&y, i));
            let term = q * d;
            value = if i % 2 == 0 {
                value + term
            } else {
                value - term
            };
            perm += quad_abs(mm, &yf[i]) * perm4(&minor_rows(&yf, i));
        }
        let v = value.to_f64();
        if v.abs() > EXTENDED_BOUND * perm * (1.0 + 1e-6) {
            (v, Some(Sign::of(v)))
        } else {
            (v, None)
        }
    }

    pub fn inhypersphere_exact(m: &Metric4, p: &[Point4; 5], f: Point4) -> Sign {
        exact::inhypersphere_sign(m, p, f)
    }
}

/// Orientation of five points; see the module docs for the convention.
pub fn orientation4(p: &[Point4; 5]) -> PredicateResult {
    let (value, sign) = stages::orientation4_filtered(p);
    if let Some(sign) = sign {
        return PredicateResult {
            sign,
            value,
            exactness: Exactness::Float,
        };
    }
    let (value, sign) = stages::orientation4_extended(p);
    if let Some(sign) = sign {
        return PredicateResult {
            sign,
            value,
            exactness: Exactness::Extended,
        };
    }
    let sign = stages::orientation4_exact(p);
    let value = if sign == Sign::Zero { 0.0 } else { value };
    PredicateResult {
        sign,
        value,
        exactness: Exactness::Exact,
    }
}

/// `sqrt(det M)` times the orientation; the sign never depends on `M`.
pub fn orientation_m(m: &Metric4, p: &[Point4; 5]) -> PredicateResult {
    let r = orientation4(p);
    PredicateResult {
        value: r.value * m.sqrt_det(),
        ..r
    }
}

/// In-hypersphere test under the identity metric.
pub fn inhypersphere4(p: &[Point4; 5], f: Point4) -> PredicateResult {
    inhypersphere_m(&Metric4::IDENTITY, p, f)
}

/// In-hypersphere test under metric `M`, without decomposing `M`.
pub fn inhypersphere_m(m: &Metric4, p: &[Point4; 5], f: Point4) -> PredicateResult {
    let scale = m.sqrt_det();
    let (value, sign) = stages::inhypersphere_filtered(m, p, f);
    if let Some(sign) = sign {
        return PredicateResult {
            sign,
            value: value * scale,
            exactness: Exactness::Float,
        };
    }
    let (value, sign) = stages::inhypersphere_extended(m, p, f);
    if let Some(sign) = sign {
        return PredicateResult {
            sign,
            value: value * scale,
            exactness: Exactness::Extended,
        };
    }
    let sign = stages::inhypersphere_exact(m, p, f);
    let value = if sign == Sign::Zero {
        0.0
    } else {
        value * scale
    };
    PredicateResult {
        sign,
        value,
        exactness: Exactness::Exact,
    }
}
