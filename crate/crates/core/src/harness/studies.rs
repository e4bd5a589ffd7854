//! Deterministic study runners. Each returns typed rows plus a CSV
//! rendering; a fixed [`StudyConfig`] always yields byte-identical CSV.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::generators::{hypercylinder_points, uniform_tesseract};
use crate::error::Result;
use crate::flips::{improve_quality, FlipKind, ImproveOptions};
use crate::geometry::MetricField;
use crate::insertion::{triangulate_with_stats, TriangulateOptions};
use crate::par::{self, Execution};
use crate::predicates::ddim::{inhypersphere_bracket, inhypersphere_bracket_exact};
use crate::predicates::exact::{det_rational, to_rational};
use crate::predicates::{decompose_metric, inhypersphere_m_d, DecompositionKind};
use crate::quality::Heuristic;
use crate::roughness2d::{roughness_trials, RoughnessTrial};

/// Exponent in the characteristic spacing `h = n_pentatopes^e`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SpacingExponent {
    /// `e = -1/3`.
    #[default]
    MinusThird,
    /// `e = -1/4`, the exponent a 4D volume argument suggests.
    MinusQuarter,
}

impl SpacingExponent {
    pub fn value(self) -> f64 {
        match self {
            SpacingExponent::MinusThird => -1.0 / 3.0,
            SpacingExponent::MinusQuarter => -0.25,
        }
    }
}

/// Parameters shared by all studies; each study reads the fields it needs.
#[derive(Clone, Debug, PartialEq)]
pub struct StudyConfig {
    pub seed: u64,
    pub exec: Execution,
    /// Convergence: refinement levels, hypercylinder radius and length,
    /// coarsest sphere spacing and the refinement ratio between levels.
    pub levels: usize,
    pub radius: f64,
    pub length: f64,
    pub h_coarse: f64,
    pub refinement: f64,
    /// Time spacing as a multiple of the sphere spacing.
    pub time_ratio: f64,
    pub spacing_exponent: SpacingExponent,
    /// Predicates: dimensions and random trials per dimension.
    pub dims: Vec<usize>,
    pub trials: usize,
    /// Quality: cloud sizes and heuristic.
    pub sizes: Vec<usize>,
    pub heuristic: Heuristic,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig {
            seed: 1,
            exec: Execution::default(),
            levels: 4,
            radius: 1.0,
            length: 4.0,
            h_coarse: 0.9,
            refinement: 1.5,
            time_ratio: 1.0,
            spacing_exponent: SpacingExponent::default(),
            dims: vec![2, 3, 4, 5, 10, 20],
            trials: 100,
            sizes: vec![50, 100, 150, 200, 250, 300],
            heuristic: Heuristic::Eta1,
        }
    }
}

fn write_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV is UTF-8")
}

/// Least-squares slope of `ys` against `xs`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Hypervolume of `B³(R) × [0, L]`.
pub fn hypercylinder_hypervolume(radius: f64, length: f64) -> f64 {
    4.0 / 3.0 * PI * radius.powi(3) * length
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub level: usize,
    pub n_points: usize,
    pub n_pentatopes: usize,
    pub hv_approx: f64,
    pub hv_error: f64,
    pub h: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub field: String,
    pub rows: Vec<ConvergenceRow>,
    /// Slope of `log hv_error` against `log h`.
    pub slope: f64,
}

impl ConvergenceReport {
    pub fn to_csv(&self) -> String {
        write_csv(
            &[
                "field",
                "level",
                "n_points",
                "n_pentatopes",
                "hv_approx",
                "hv_error",
                "h",
            ],
            self.rows.iter().map(|r| {
                vec![
                    self.field.clone(),
                    r.level.to_string(),
                    r.n_points.to_string(),
                    r.n_pentatopes.to_string(),
                    r.hv_approx.to_string(),
                    r.hv_error.to_string(),
                    r.h.to_string(),
                ]
            }),
        )
    }
}

/// Triangulates hypercylinder samples at successively finer spacing and
/// compares the meshed hypervolume with the exact one.
pub fn convergence_study(
    cfg: &StudyConfig,
    field: &MetricField,
    field_name: &str,
) -> Result<ConvergenceReport> {
    let exact = hypercylinder_hypervolume(cfg.radius, cfg.length);
    let mut rows = Vec::new();
    for level in 0..cfg.levels {
        let hs = cfg.h_coarse / cfg.refinement.powi(level as i32);
        let points = hypercylinder_points(
            cfg.radius,
            cfg.length,
            hs,
            hs * cfg.time_ratio,
            cfg.seed.wrapping_add(level as u64),
        );
        let opts = TriangulateOptions {
            shuffle_seed: Some(cfg.seed.wrapping_add(level as u64)),
            ..Default::default()
        };
        let (mesh, _) = triangulate_with_stats(&points, field, &opts)?;
        let hv = mesh.total_hypervolume();
        let n = mesh.n_alive_elements();
        rows.push(ConvergenceRow {
            level,
            n_points: points.len(),
            n_pentatopes: n,
            hv_approx: hv,
            hv_error: (exact - hv).abs(),
            h: (n as f64).powf(cfg.spacing_exponent.value()),
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.h.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.hv_error.ln()).collect();
    Ok(ConvergenceReport {
        field: field_name.to_string(),
        slope: least_squares_slope(&xs, &ys),
        rows,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PredicateRow {
    pub d: usize,
    pub kind: DecompositionKind,
    pub mean_normalized_difference: f64,
    pub mean_decomposition_error: f64,
}

pub fn predicate_rows_to_csv(rows: &[PredicateRow]) -> String {
    write_csv(
        &[
            "d",
            "kind",
            "mean_normalized_difference",
            "mean_decomposition_error",
        ],
        rows.iter().map(|r| {
            vec![
                r.d.to_string(),
                r.kind.name().to_string(),
                r.mean_normalized_difference.to_string(),
                r.mean_decomposition_error.to_string(),
            ]
        }),
    )
}

/// Independent stream per `(d, trial)` under one seed.
fn trial_rng(seed: u64, d: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((d as u64) << 32) | trial as u64);
    rng
}

/// `S` with entries in `[0, 10]` and `d + 2` points in `[0, 1]^d`.
fn random_instance(rng: &mut impl Rng, d: usize) -> (DMatrix<f64>, Vec<DVector<f64>>) {
    let s = DMatrix::from_fn(d, d, |_, _| rng.gen_range(0.0..10.0));
    let pts = (0..d + 2)
        .map(|_| DVector::from_fn(d, |_, _| rng.gen::<f64>()))
        .collect();
    (s, pts)
}

/// Floating-point comparison of the decompose-and-scale predicate with the
/// metric-weighted one on `M = SᵀS`. Trials whose standard value is exactly
/// zero are skipped in the mean.
pub fn predicate_study(cfg: &StudyConfig) -> Result<Vec<PredicateRow>> {
    let mut rows = Vec::new();
    for &d in &cfg.dims {
        let per_trial: Vec<Result<[(f64, f64); 2]>> = par::map_range(cfg.exec, cfg.trials, |t| {
            let (s, pts) = random_instance(&mut trial_rng(cfg.seed, d, t), d);
            let m = s.transpose() * &s;
            let alt = inhypersphere_m_d(&m, &pts)?.value;
            let mut out = [(0.0, 0.0); 2];
            for (slot, kind) in [DecompositionKind::Cholesky, DecompositionKind::Sqrt]
                .into_iter()
                .enumerate()
            {
                let g = decompose_metric(&m, kind)?;
                let scaled: Vec<DVector<f64>> = pts.iter().map(|p| &g.g * p).collect();
                let std = inhypersphere_bracket(&DMatrix::identity(d, d), &scaled);
                let diff = if std == 0.0 {
                    f64::NAN
                } else {
                    (std - alt).abs() / std.abs()
                };
                out[slot] = (diff, g.reconstruction_error);
            }
            Ok(out)
        });
        let per_trial: Vec<[(f64, f64); 2]> = per_trial.into_iter().collect::<Result<_>>()?;
        for (slot, kind) in [DecompositionKind::Cholesky, DecompositionKind::Sqrt]
            .into_iter()
            .enumerate()
        {
            let diffs: Vec<f64> = per_trial
                .iter()
                .map(|t| t[slot].0)
                .filter(|x| x.is_finite())
                .collect();
            let errs: Vec<f64> = per_trial.iter().map(|t| t[slot].1).collect();
            rows.push(PredicateRow {
                d,
                kind,
                mean_normalized_difference: diffs.iter().sum::<f64>() / diffs.len().max(1) as f64,
                mean_decomposition_error: errs.iter().sum::<f64>() / errs.len().max(1) as f64,
            });
        }
    }
    Ok(rows)
}

/// Exact normalized difference for one trial. The generating factor `S`
/// (with a row negated if needed so `det S > 0`) is an exact decomposition
/// of `M = SᵀS`; the standard value is the Euclidean lifted determinant of
/// the scaled points and the alternative is `det S` times the metric
/// bracket. Returns `None` when the standard value is zero.
pub fn predicate_exact_trial(seed: u64, d: usize, trial: usize) -> Option<BigRational> {
    let (s, pts) = random_instance(&mut trial_rng(seed, d, trial), d);
    let mut s: Vec<Vec<BigRational>> = (0..d)
        .map(|i| (0..d).map(|j| to_rational(s[(i, j)])).collect())
        .collect();
    let mut det_s = det_rational(s.clone());
    if det_s.is_negative() {
        s[0] = s[0].iter().map(|x| -x).collect();
        det_s = -det_s;
    }
    let pts: Vec<Vec<BigRational>> = pts
        .iter()
        .map(|p| p.iter().map(|&x| to_rational(x)).collect())
        .collect();
    let m: Vec<Vec<BigRational>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| (0..d).fold(BigRational::zero(), |acc, k| acc + &s[k][i] * &s[k][j]))
                .collect()
        })
        .collect();
    let scaled: Vec<Vec<BigRational>> = pts
        .iter()
        .map(|p| {
            (0..d)
                .map(|i| (0..d).fold(BigRational::zero(), |acc, j| acc + &s[i][j] * &p[j]))
                .collect()
        })
        .collect();
    let identity: Vec<Vec<BigRational>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    if i == j {
                        BigRational::from_integer(1.into())
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect();
    let standard = inhypersphere_bracket_exact(&identity, &scaled);
    let alternative = det_s * inhypersphere_bracket_exact(&m, &pts);
    if standard.is_zero() {
        return None;
    }
    Some((&standard - &alternative).abs() / standard.abs())
}

#[derive(Clone, Debug, PartialEq)]
pub struct QualityRow {
    pub n_points: usize,
    pub seed: u64,
    pub heuristic: Heuristic,
    pub elements_before: usize,
    pub elements_after: usize,
    pub vertices_before: usize,
    pub vertices_after: usize,
    pub amq_before: [f64; 4],
    pub amq_after: [f64; 4],
    pub min_before: f64,
    pub min_after: f64,
    pub starters: usize,
    pub flips: usize,
    pub histogram: Vec<(FlipKind, usize)>,
    pub hv_before: f64,
    pub hv_after: f64,
    /// Exact `|after - before|`, rounded to `f64`.
    pub hv_exact_difference: f64,
}

pub fn quality_rows_to_csv(rows: &[QualityRow]) -> String {
    let header = [
        "n_points",
        "seed",
        "heuristic",
        "elements_initial",
        "elements_final",
        "vertices_initial",
        "vertices_final",
        "amq1_initial",
        "amq5_initial",
        "amq10_initial",
        "amq20_initial",
        "amq1_final",
        "amq5_final",
        "amq10_final",
        "amq20_final",
        "min_initial",
        "min_final",
        "starters",
        "flips",
        "histogram",
        "hv_initial",
        "hv_final",
        "hv_exact_difference",
    ];
    write_csv(
        &header,
        rows.iter().map(|r| {
            let mut v = vec![
                r.n_points.to_string(),
                r.seed.to_string(),
                format!("eta{}", r.heuristic.index()),
                r.elements_before.to_string(),
                r.elements_after.to_string(),
                r.vertices_before.to_string(),
                r.vertices_after.to_string(),
            ];
            v.extend(r.amq_before.iter().chain(&r.amq_after).map(f64::to_string));
            v.extend([
                r.min_before.to_string(),
                r.min_after.to_string(),
                r.starters.to_string(),
                r.flips.to_string(),
            ]);
            v.push(
                r.histogram
                    .iter()
                    .map(|(k, c)| format!("{k}:{c}"))
                    .collect::<Vec<_>>()
                    .join(";"),
            );
            v.extend([
                r.hv_before.to_string(),
                r.hv_after.to_string(),
                r.hv_exact_difference.to_string(),
            ]);
            v
        }),
    )
}

/// Uniform clouds in the unit tesseract, isotropic triangulation, then
/// greedy flip improvement. Cloud `n` is drawn with seed `seed + n`.
pub fn quality_study(cfg: &StudyConfig) -> Result<Vec<QualityRow>> {
    let field = MetricField::Identity;
    let mut rows = Vec::new();
    for &n in &cfg.sizes {
        let seed = cfg.seed.wrapping_add(n as u64);
        let pts = uniform_tesseract(n, seed);
        let (mut mesh, _) = triangulate_with_stats(&pts, &field, &TriangulateOptions::default())?;
        let opts = ImproveOptions {
            heuristic: cfg.heuristic,
            exec: cfg.exec,
            ..Default::default()
        };
        let r = improve_quality(&mut mesh, &field, &opts);
        let diff = (&r.volume_after_exact - &r.volume_before_exact).abs();
        rows.push(QualityRow {
            n_points: n,
            seed,
            heuristic: cfg.heuristic,
            elements_before: r.elements_before,
            elements_after: r.elements_after,
            vertices_before: r.vertices_before,
            vertices_after: r.vertices_after,
            amq_before: r.amq_before,
            amq_after: r.amq_after,
            min_before: r.min_before,
            min_after: r.min_after,
            starters: r.starters,
            flips: r.flips.len(),
            histogram: r.histogram.iter().map(|(k, c)| (*k, *c)).collect(),
            hv_before: r.volume_before,
            hv_after: r.volume_after,
            hv_exact_difference: num_traits::ToPrimitive::to_f64(&diff).unwrap_or(f64::NAN),
        });
    }
    Ok(rows)
}

/// Randomized checks of the roughness factorization, one CSV row per trial.
pub fn roughness_study(cfg: &StudyConfig) -> Vec<RoughnessTrial> {
    roughness_trials(cfg.trials, cfg.seed, cfg.exec)
}

pub fn roughness_rows_to_csv(rows: &[RoughnessTrial]) -> String {
    write_csv(
        &[
            "seed", "p", "q", "r", "s", "c_v", "A", "B", "C", "value", "direct",
        ],
        rows.iter().map(|t| {
            let nums = [
                t.quad.p,
                t.quad.q,
                t.quad.r,
                t.quad.s,
                t.config.c_v,
                t.result.a,
                t.result.b,
                t.result.c,
                t.result.value,
                t.direct,
            ];
            std::iter::once(t.seed.to_string())
                .chain(nums.iter().map(f64::to_string))
                .collect()
        }),
    )
}
