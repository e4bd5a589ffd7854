//! Greedy starter-based quality improvement.
//!
//! The worst element that is neither frozen nor a previous starter becomes
//! the starter. Every flip matched around it is validated, and the one that
//! most increases the minimum quality over the affected elements is applied.
//! Its new elements are frozen. The loop ends when no eligible starter is
//! left.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap, HashSet};

use num_rational::BigRational;

use super::{
    apply_flip, find_candidates, validate_flip, CandidateOptions, FlipCandidate, FlipKind,
    ValidationMode,
};
use crate::geometry::MetricField;
use crate::mesh::{ElemId, Mesh4};
use crate::par::{self, Execution};
use crate::quality::{amq, mesh_quality, quality_metric, Heuristic, QualityMode};

/// Fractions of worst elements reported as average minimum quality.
pub const AMQ_FRACTIONS: [f64; 4] = [0.01, 0.05, 0.10, 0.20];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImproveOptions {
    pub heuristic: Heuristic,
    pub mode: QualityMode,
    pub allow_point_insertion: bool,
    pub allow_point_removal: bool,
    /// Volume check used while ranking candidates; the chosen flip is always
    /// re-validated exactly before it is applied.
    pub validation: ValidationMode,
    pub exec: Execution,
    /// Safety cap on the number of starters examined.
    pub max_starters: Option<usize>,
    /// Breaks ties between equally bad starters with a seeded hash of the
    /// element id instead of the id itself.
    pub tie_seed: Option<u64>,
}

impl Default for ImproveOptions {
    fn default() -> Self {
        ImproveOptions {
            heuristic: Heuristic::Eta1,
            mode: QualityMode::Pointwise,
            allow_point_insertion: true,
            allow_point_removal: true,
            validation: ValidationMode::Float,
            exec: Execution::default(),
            max_starters: None,
            tie_seed: None,
        }
    }
}

/// One executed flip.
#[derive(Clone, Debug, PartialEq)]
pub struct FlipRecord {
    pub kind: FlipKind,
    pub starter: ElemId,
    pub min_before: f64,
    pub min_after: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ImprovementReport {
    pub heuristic: Heuristic,
    pub flips: Vec<FlipRecord>,
    pub histogram: BTreeMap<FlipKind, usize>,
    pub starters: usize,
    pub candidates_examined: usize,
    pub candidates_rejected: usize,
    pub elements_before: usize,
    pub elements_after: usize,
    pub vertices_before: usize,
    pub vertices_after: usize,
    /// AMQ at [`AMQ_FRACTIONS`].
    pub amq_before: [f64; 4],
    pub amq_after: [f64; 4],
    pub min_before: f64,
    pub min_after: f64,
    pub volume_before: f64,
    pub volume_after: f64,
    pub volume_before_exact: BigRational,
    pub volume_after_exact: BigRational,
}

impl ImprovementReport {
    pub fn volume_conserved_exactly(&self) -> bool {
        self.volume_before_exact == self.volume_after_exact
    }
}

#[derive(PartialEq)]
struct Entry(f64, u64, ElemId);

fn tie_key(seed: Option<u64>, e: ElemId) -> u64 {
    match seed {
        None => e as u64,
        Some(s) => {
            // splitmix64 finalizer
            let mut z = s ^ (e as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
            z ^ (z >> 31)
        }
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // Reversed so the max-heap pops the worst quality (then lowest key) first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .total_cmp(&self.0)
            .then(other.1.cmp(&self.1))
            .then(other.2.cmp(&self.2))
    }
}

fn summary(mesh: &Mesh4, field: &MetricField, opts: &ImproveOptions) -> ([f64; 4], f64) {
    let q: Vec<f64> = mesh_quality(mesh, field, opts.mode, opts.heuristic, opts.exec)
        .into_iter()
        .map(|x| x.1)
        .collect();
    let min = q.iter().copied().fold(f64::INFINITY, f64::min);
    (
        AMQ_FRACTIONS.map(|f| amq(&q, f)),
        if q.is_empty() { 0.0 } else { min },
    )
}

struct Scored {
    cand: FlipCandidate,
    min_before: f64,
    min_after: f64,
}

/// Runs the greedy improvement loop in place.
pub fn improve_quality(
    mesh: &mut Mesh4,
    field: &MetricField,
    opts: &ImproveOptions,
) -> ImprovementReport {
    let q =
        |pts: &[crate::geometry::Point4; 5]| quality_metric(pts, field, opts.mode, opts.heuristic);
    let (amq_before, min_before) = summary(mesh, field, opts);
    let elements_before = mesh.n_alive_elements();
    let vertices_before = mesh.n_alive_vertices();
    let volume_before = mesh.total_hypervolume();
    let volume_before_exact = mesh.total_hypervolume_exact();

    let mut heap: BinaryHeap<Entry> =
        mesh_quality(mesh, field, opts.mode, opts.heuristic, opts.exec)
            .into_iter()
            .map(|(e, v)| Entry(v, tie_key(opts.tie_seed, e), e))
            .collect();
    let mut frozen: HashSet<ElemId> = HashSet::new();
    let mut flips = Vec::new();
    let mut histogram = BTreeMap::new();
    let (mut starters, mut examined, mut rejected) = (0usize, 0usize, 0usize);
    let cand_opts = CandidateOptions {
        allow_point_insertion: opts.allow_point_insertion,
        allow_point_removal: opts.allow_point_removal,
    };

    while let Some(Entry(_, _, starter)) = heap.pop() {
        if !mesh.is_alive(starter) || frozen.contains(&starter) {
            continue;
        }
        if opts.max_starters.is_some_and(|m| starters >= m) {
            break;
        }
        starters += 1;
        let cands: Vec<FlipCandidate> = find_candidates(mesh, starter, cand_opts)
            .into_iter()
            .filter(|c| !c.elements.iter().any(|e| frozen.contains(e)))
            .collect();
        examined += cands.len();
        let mesh_ref: &Mesh4 = mesh;
        let scored: Vec<Option<Scored>> = par::map_slice(opts.exec, &cands, |c| {
            validate_flip(mesh_ref, c, opts.validation).ok()?;
            let min_before = c
                .elements
                .iter()
                .map(|&e| q(&mesh_ref.element_points(e)))
                .fold(f64::INFINITY, f64::min);
            let min_after = c
                .stage2_points(mesh_ref)
                .iter()
                .map(q)
                .fold(f64::INFINITY, f64::min);
            (min_after > min_before).then(|| Scored {
                cand: c.clone(),
                min_before,
                min_after,
            })
        });
        rejected += scored.iter().filter(|s| s.is_none()).count();
        let best = scored.into_iter().flatten().max_by(|a, b| {
            let ga = a.min_after - a.min_before;
            let gb = b.min_after - b.min_before;
            ga.total_cmp(&gb)
                .then_with(|| b.cand.kind.cmp(&a.cand.kind))
                .then_with(|| {
                    b.cand
                        .elements
                        .iter()
                        .min()
                        .cmp(&a.cand.elements.iter().min())
                })
        });
        let Some(best) = best else { continue };
        match apply_flip(mesh, &best.cand) {
            Ok(out) => {
                frozen.extend(out.created.iter().copied());
                *histogram.entry(best.cand.kind).or_insert(0) += 1;
                flips.push(FlipRecord {
                    kind: best.cand.kind,
                    starter,
                    min_before: best.min_before,
                    min_after: best.min_after,
                });
            }
            Err(_) => rejected += 1,
        }
    }

    let (amq_after, min_after) = summary(mesh, field, opts);
    ImprovementReport {
        heuristic: opts.heuristic,
        flips,
        histogram,
        starters,
        candidates_examined: examined,
        candidates_rejected: rejected,
        elements_before,
        elements_after: mesh.n_alive_elements(),
        vertices_before,
        vertices_after: mesh.n_alive_vertices(),
        amq_before,
        amq_after,
        min_before,
        min_after,
        volume_before,
        volume_after: mesh.total_hypervolume(),
        volume_before_exact,
        volume_after_exact: mesh.total_hypervolume_exact(),
    }
}
