use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use pentamesh::flips::{improve_quality, ImproveOptions, AMQ_FRACTIONS};
use pentamesh::harness::studies::{
    predicate_rows_to_csv, quality_rows_to_csv, roughness_rows_to_csv,
};
use pentamesh::harness::{
    convergence_study, predicate_study, quality_study, read_mesh_file, read_points_file,
    roughness_study, write_p4m, write_tet3, SpacingExponent, StudyConfig,
};
use pentamesh::insertion::{audit_delaunay, triangulate_with_stats, TriangulateOptions};
use pentamesh::quality::{amq, mesh_quality, Heuristic, QualityMode};
use pentamesh::{Execution, MetricField};

/// Anisotropic Delaunay meshing of 4D space-time point clouds.
#[derive(Parser)]
#[command(name = "pentamesh", version)]
struct Cli {
    /// Run every batch sequentially instead of on the thread pool.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Triangulate a point file (`.csv` with x,y,z,t rows, otherwise p4m).
    Mesh {
        points: PathBuf,
        /// `identity` or `speed:c0,beta`.
        #[arg(long, default_value = "identity", value_parser = parse_metric)]
        metric: MetricField,
        /// Pentatopes in the bounding tesseract: 22, 23 or 24.
        #[arg(long, default_value_t = 24, value_parser = clap::value_parser!(u8).range(22..=24))]
        nb: u8,
        /// Check the empty-circumhypersphere property with exact predicates.
        #[arg(long)]
        audit: bool,
        /// Seed for a random insertion order.
        #[arg(long)]
        seed: Option<u64>,
        /// Output mesh (p4m); stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Per-element quality as CSV, with a summary on stderr.
    Quality {
        mesh: PathBuf,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
        heuristic: u8,
        #[arg(long, default_value = "identity", value_parser = parse_metric)]
        metric: MetricField,
        /// Integrate metric lengths and volumes instead of sampling the centroid.
        #[arg(long)]
        quadrature: bool,
    },
    /// Greedy flip-based quality improvement; writes a report CSV.
    Improve {
        mesh: PathBuf,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
        heuristic: u8,
        #[arg(long, default_value = "identity", value_parser = parse_metric)]
        metric: MetricField,
        /// Seeded tie-break between equally bad starters.
        #[arg(long)]
        seed: Option<u64>,
        /// Improved mesh (p4m).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run one of the numerical studies and print its CSV.
    Study {
        kind: StudyKind,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Refinement levels (convergence).
        #[arg(long, default_value_t = 4)]
        levels: usize,
        /// Dimensions, comma separated (predicates).
        #[arg(long, value_delimiter = ',', default_value = "2,3,4,5,10,20")]
        dims: Vec<usize>,
        /// Trials per dimension (predicates, roughness).
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Cloud sizes, comma separated (flips).
        #[arg(long, value_delimiter = ',', default_value = "50,100,150,200,250,300")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
        heuristic: u8,
        /// Metric fields for the convergence study.
        #[arg(long, value_enum, default_value_t = FieldChoice::Both)]
        field: FieldChoice,
        /// Use `n^(-1/4)` instead of `n^(-1/3)` as the spacing.
        #[arg(long)]
        quarter_exponent: bool,
        /// CSV destination; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Convert a mesh to p4m or to projected tetrahedra.
    Export {
        mesh: PathBuf,
        #[arg(long, value_enum)]
        format: ExportFormat,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StudyKind {
    Convergence,
    Predicates,
    Flips,
    Roughness,
}

#[derive(Clone, Copy, ValueEnum)]
enum FieldChoice {
    Iso,
    Aniso,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportFormat {
    P4m,
    Tet3,
}

fn parse_metric(s: &str) -> std::result::Result<MetricField, String> {
    if s == "identity" {
        return Ok(MetricField::Identity);
    }
    let args = s
        .strip_prefix("speed:")
        .ok_or_else(|| format!("expected `identity` or `speed:c0,beta`, got `{s}`"))?;
    let v: Vec<f64> = args
        .split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| format!("invalid number `{x}`"))
        })
        .collect::<std::result::Result<_, _>>()?;
    match v[..] {
        [c0, beta] if c0 > 0.0 && beta > 0.0 => Ok(MetricField::speed(c0, beta)),
        [_, _] => Err("c0 and beta must be positive".into()),
        _ => Err(format!(
            "expected two values after `speed:`, got {}",
            v.len()
        )),
    }
}

fn heuristic(i: u8) -> Heuristic {
    Heuristic::from_index(i).expect("range checked by clap")
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .context("writing to stdout"),
    }
}

fn amq_summary(values: &[f64]) -> String {
    AMQ_FRACTIONS
        .iter()
        .map(|&f| format!("amq{}%={:.6}", (f * 100.0).round(), amq(values, f)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn run(cli: Cli) -> Result<ExitCode> {
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    match cli.command {
        Command::Mesh {
            points,
            metric,
            nb,
            audit,
            seed,
            output,
        } => {
            let pts = read_points_file(&points)
                .with_context(|| format!("reading {}", points.display()))?;
            let opts = TriangulateOptions {
                n_b: nb as usize,
                shuffle_seed: seed,
                ..Default::default()
            };
            let start = Instant::now();
            let (mesh, stats) = triangulate_with_stats(&pts, &metric, &opts)?;
            eprintln!(
                "{} points -> {} pentatopes in {:.2?} (hypervolume {})",
                pts.len(),
                mesh.n_alive_elements(),
                start.elapsed(),
                mesh.total_hypervolume()
            );
            eprintln!(
                "walk steps {}, walk fallbacks {}, visibility removals {}, duplicates skipped {}",
                stats.walk_steps,
                stats.walk_fallbacks,
                stats.visibility_removals,
                stats.skipped_duplicates
            );
            emit(output.as_deref(), &write_p4m(&mesh))?;
            if audit {
                let report = audit_delaunay(&mesh, &metric, 0.0, exec);
                eprintln!(
                    "audit: {} pairs checked, {} violations",
                    report.pairs_checked,
                    report.violations.len()
                );
                for v in report.violations.iter().take(20) {
                    eprintln!(
                        "  vertex {} inside element {} (value {:e})",
                        v.vertex, v.element, v.value
                    );
                }
                if !report.passed() {
                    return Ok(ExitCode::from(3));
                }
            }
        }
        Command::Quality {
            mesh,
            heuristic: h,
            metric,
            quadrature,
        } => {
            let mesh =
                read_mesh_file(&mesh).with_context(|| format!("reading {}", mesh.display()))?;
            let mode = if quadrature {
                QualityMode::quadrature()
            } else {
                QualityMode::Pointwise
            };
            let q = mesh_quality(&mesh, &metric, mode, heuristic(h), exec);
            let mut out = format!("element,eta{h}\n");
            for (e, v) in &q {
                out += &format!("{e},{v}\n");
            }
            emit(None, &out)?;
            let values: Vec<f64> = q.iter().map(|x| x.1).collect();
            let min = values.iter().copied().fold(f64::INFINITY, f64::min);
            eprintln!(
                "{} pentatopes, min {min:.6}, {}",
                values.len(),
                amq_summary(&values)
            );
        }
        Command::Improve {
            mesh: path,
            heuristic: h,
            metric,
            seed,
            output,
        } => {
            let mut mesh =
                read_mesh_file(&path).with_context(|| format!("reading {}", path.display()))?;
            let opts = ImproveOptions {
                heuristic: heuristic(h),
                exec,
                tie_seed: seed,
                ..Default::default()
            };
            let r = improve_quality(&mut mesh, &metric, &opts);
            let mut out = String::from("quantity,initial,final\n");
            out += &format!("elements,{},{}\n", r.elements_before, r.elements_after);
            out += &format!("vertices,{},{}\n", r.vertices_before, r.vertices_after);
            out += &format!("min,{},{}\n", r.min_before, r.min_after);
            for (i, f) in AMQ_FRACTIONS.iter().enumerate() {
                out += &format!(
                    "amq{},{},{}\n",
                    (f * 100.0).round(),
                    r.amq_before[i],
                    r.amq_after[i]
                );
            }
            out += &format!("hypervolume,{},{}\n", r.volume_before, r.volume_after);
            for (k, c) in &r.histogram {
                out += &format!("flips_{k},,{c}\n");
            }
            emit(None, &out)?;
            eprintln!(
                "{} flips from {} starters; hypervolume conserved exactly: {}",
                r.flips.len(),
                r.starters,
                r.volume_conserved_exactly()
            );
            if let Some(p) = output {
                emit(Some(&p), &write_p4m(&mesh))?;
            }
        }
        Command::Study {
            kind,
            seed,
            levels,
            dims,
            trials,
            sizes,
            heuristic: h,
            field,
            quarter_exponent,
            output,
        } => {
            let spacing_exponent = if quarter_exponent {
                SpacingExponent::MinusQuarter
            } else {
                SpacingExponent::MinusThird
            };
            let cfg = StudyConfig {
                seed,
                exec,
                levels,
                dims,
                trials,
                sizes,
                heuristic: heuristic(h),
                spacing_exponent,
                ..Default::default()
            };
            let csv = match kind {
                StudyKind::Convergence => {
                    if levels < 3 {
                        bail!("the convergence study needs at least 3 levels");
                    }
                    let fields: Vec<(&str, MetricField)> = match field {
                        FieldChoice::Iso => vec![("iso", MetricField::Identity)],
                        FieldChoice::Aniso => vec![("aniso", MetricField::hypercylinder_speed())],
                        FieldChoice::Both => {
                            vec![
                                ("iso", MetricField::Identity),
                                ("aniso", MetricField::hypercylinder_speed()),
                            ]
                        }
                    };
                    let mut csv = String::new();
                    for (i, (name, f)) in fields.iter().enumerate() {
                        let report = convergence_study(&cfg, f, name)?;
                        eprintln!("{name}: slope {:.4}", report.slope);
                        let text = report.to_csv();
                        // Keep one header when several fields are concatenated.
                        csv += if i == 0 {
                            &text
                        } else {
                            text.split_once('\n').map_or("", |x| x.1)
                        };
                    }
                    csv
                }
                StudyKind::Predicates => predicate_rows_to_csv(&predicate_study(&cfg)?),
                StudyKind::Flips => quality_rows_to_csv(&quality_study(&cfg)?),
                StudyKind::Roughness => roughness_rows_to_csv(&roughness_study(&cfg)),
            };
            emit(output.as_deref(), &csv)?;
        }
        Command::Export {
            mesh,
            format,
            output,
        } => {
            let mesh =
                read_mesh_file(&mesh).with_context(|| format!("reading {}", mesh.display()))?;
            let text = match format {
                ExportFormat::P4m => write_p4m(&mesh),
                ExportFormat::Tet3 => write_tet3(&mesh),
            };
            emit(Some(&output), &text)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
