//! Quadrature rules on the unit interval and on simplices.

use std::f64::consts::PI;

/// Gauss–Legendre rule with `n` points mapped to `[0, 1]`; weights sum to 1.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1, "quadrature order must be positive");
    let mut rule = Vec::with_capacity(n);
    for i in 0..n {
        // Newton iteration on P_n starting from the Chebyshev-like guess.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.push(((1.0 - x) / 2.0, w / 2.0));
    }
    rule.sort_by(|a, b| a.0.total_cmp(&b.0));
    rule
}

/// Value and derivative of the Legendre polynomial `P_n` at `x`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Grundmann–Möller rule of degree `2s + 1` on the `n`-simplex.
///
/// Points are barycentric (`n + 1` coordinates); weights are fractions of the
/// simplex volume and sum to 1. Some weights are negative for `s ≥ 1`.
pub fn grundmann_moller(n: usize, s: usize) -> Vec<(Vec<f64>, f64)> {
    let d = 2 * s + 1;
    let n_fact: f64 = (1..=n).map(|k| k as f64).product();
    let mut rule = Vec::new();
    for i in 0..=s {
        let denom = (d + n - 2 * i) as f64;
        let fact_i: f64 = (1..=i).map(|k| k as f64).product();
        let fact_big: f64 = (1..=(d + n - i)).map(|k| k as f64).product();
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let w =
            sign * 2f64.powi(-2 * s as i32) * denom.powi(d as i32) / (fact_i * fact_big) * n_fact;
        for beta in compositions(s - i, n + 1) {
            let bary = beta.iter().map(|&b| (2 * b + 1) as f64 / denom).collect();
            rule.push((bary, w));
        }
    }
    rule
}

/// Four-simplex specialization of [`grundmann_moller`].
pub fn grundmann_moller_4d(s: usize) -> Vec<([f64; 5], f64)> {
    grundmann_moller(4, s)
        .into_iter()
        .map(|(b, w)| ([b[0], b[1], b[2], b[3], b[4]], w))
        .collect()
}

/// All vectors of `parts` non-negative integers summing to `total`.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}
