//! Bistellar flips: catalog, matching against a mesh, validation and
//! application, plus a greedy quality-improvement driver.
//!
//! A candidate assigns every stage-1 label to a mesh vertex so that the
//! stage-1 tuples are exactly the star of the core simplex (the labels common
//! to all stage-1 tuples). It is valid when the mapped tuples of both stages
//! have the orientation signs the table predicts, up to one global sign, with
//! no zeros. Stage 2 then has the same oriented boundary as stage 1 and every
//! element positive, so it tiles the same region.

mod improve;
mod matching;
mod tables;

pub use improve::{improve_quality, FlipRecord, ImproveOptions, ImprovementReport, AMQ_FRACTIONS};
pub use tables::{flip_vertex_count, FlipKind, FlipTable, NewVertexRule};

use std::collections::{BTreeSet, HashSet};

use matching::Matcher;

use itertools::Itertools;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::geometry::{hypervolume, Point4};
use crate::mesh::{facet_key, ElemId, Mesh4, VertexId};
use crate::predicates::{exact, orientation4, Sign};

/// Placeholder id for a vertex that does not exist yet.
pub const NEW_VERTEX: VertexId = VertexId::MAX;

/// A match of one flip table onto mesh elements.
#[derive(Clone, Debug, PartialEq)]
pub struct FlipCandidate {
    pub kind: FlipKind,
    /// Mesh elements matched to the stage-1 tuples, in table order.
    pub elements: Vec<ElemId>,
    /// `labels[l - 1]` is the vertex for label `l`; the new label maps to
    /// [`NEW_VERTEX`].
    pub labels: Vec<VertexId>,
    pub new_point: Option<Point4>,
}

impl FlipCandidate {
    /// Stage-2 tuples as vertex ids (new vertex as [`NEW_VERTEX`]).
    pub fn stage2_vertices(&self) -> Vec<[VertexId; 5]> {
        let t = self.kind.table();
        t.stage2
            .iter()
            .map(|s| s.map(|l| self.labels[l as usize - 1]))
            .collect()
    }

    fn point(&self, mesh: &Mesh4, v: VertexId) -> Point4 {
        if v == NEW_VERTEX {
            self.new_point
                .expect("point-inserting candidate carries its point")
        } else {
            mesh.vertex(v)
        }
    }

    /// Coordinates of each stage-2 tuple in table order.
    pub fn stage2_points(&self, mesh: &Mesh4) -> Vec<[Point4; 5]> {
        self.stage2_vertices()
            .iter()
            .map(|t| t.map(|v| self.point(mesh, v)))
            .collect()
    }

    fn stage1_points(&self, mesh: &Mesh4) -> Vec<[Point4; 5]> {
        let t = self.kind.table();
        t.stage1
            .iter()
            .map(|s| s.map(|l| mesh.vertex(self.labels[l as usize - 1])))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CandidateOptions {
    pub allow_point_insertion: bool,
    pub allow_point_removal: bool,
}

impl CandidateOptions {
    pub fn all() -> Self {
        CandidateOptions {
            allow_point_insertion: true,
            allow_point_removal: true,
        }
    }
}

fn new_point_for(mesh: &Mesh4, table: &FlipTable, labels: &[VertexId]) -> Option<Point4> {
    table.new_label?;
    let pts: Vec<Point4> = table
        .core
        .iter()
        .map(|&l| mesh.vertex(labels[l as usize - 1]))
        .collect();
    Some(Point4::centroid(&pts))
}

/// Matches of `kind` whose core is a sub-simplex of `starter`.
pub fn find_candidates_of_kind(
    mesh: &Mesh4,
    starter: ElemId,
    kind: FlipKind,
) -> Vec<FlipCandidate> {
    let table = kind.table();
    let sv = mesh.element(starter);
    let mut out = Vec::new();
    let mut seen: HashSet<BTreeSet<[VertexId; 5]>> = HashSet::new();
    for core in sv.iter().copied().combinations(table.core.len()) {
        let star = mesh.star(&core);
        if star.len() != table.stage1.len() {
            continue;
        }
        let star_sets: Vec<[VertexId; 5]> = star.iter().map(|&e| mesh.element(e)).collect();
        let n_verts = star_sets.iter().flatten().collect::<HashSet<_>>().len();
        if n_verts != table.vertex_count {
            continue;
        }
        let n_labels = table.vertex_count + usize::from(table.new_label.is_some());
        let order = table.search_order.clone();
        let first = Matcher::new(
            &table.stage1,
            order,
            &table.core,
            n_labels,
            &core,
            &star_sets,
            true,
        )
        .run();
        let Some((m0, tau0)) = first.into_iter().next() else {
            continue;
        };
        let matches = table.symmetries.iter().map(|(perm, sigma)| {
            let labels: Vec<VertexId> = perm.iter().map(|&p| m0[p as usize - 1]).collect();
            let elements: Vec<ElemId> = sigma.iter().map(|&j| star[tau0[j]]).collect();
            (labels, elements)
        });
        for (labels, elements) in matches {
            let cand = FlipCandidate {
                kind,
                new_point: new_point_for(mesh, table, &labels),
                elements,
                labels,
            };
            let key: BTreeSet<[VertexId; 5]> = cand
                .stage2_vertices()
                .into_iter()
                .map(|mut t| {
                    t.sort_unstable();
                    t
                })
                .collect();
            if seen.insert(key) {
                out.push(cand);
            }
        }
    }
    out
}

/// Every match within the vertex star of `starter`, by kind then discovery.
pub fn find_candidates(
    mesh: &Mesh4,
    starter: ElemId,
    opts: CandidateOptions,
) -> Vec<FlipCandidate> {
    if !mesh.is_alive(starter) {
        return Vec::new();
    }
    FlipKind::ALL
        .into_iter()
        .filter(|k| {
            (opts.allow_point_insertion || !k.inserts_point())
                && (opts.allow_point_removal || !k.removes_point())
        })
        .flat_map(|k| find_candidates_of_kind(mesh, starter, k))
        .collect()
}

/// Arithmetic used for the volume conservation check.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ValidationMode {
    /// Relative tolerance 1e-12 on floating-point sums.
    Float,
    /// Exact rational sums.
    #[default]
    Exact,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Rejection {
    /// Matched elements are no longer alive or not the current star.
    Stale,
    /// A stage-1 tuple has an unexpected orientation sign.
    Stage1Orientation(usize),
    /// A stage-2 tuple would be flat or inverted.
    Stage2Orientation(usize),
    /// Stage-2 volume differs from stage 1.
    Volume { before: f64, after: f64 },
    /// Stage-2 boundary differs from stage 1.
    Boundary,
}

fn boundary_of(tuples: &[[VertexId; 5]]) -> Vec<[VertexId; 4]> {
    let mut all: Vec<[VertexId; 4]> = tuples
        .iter()
        .flat_map(|t| (0..5).map(move |k| facet_key(t, k)))
        .collect();
    all.sort_unstable();
    let mut out = Vec::new();
    let mut i = 0;
    while i < all.len() {
        let mut j = i;
        while j < all.len() && all[j] == all[i] {
            j += 1;
        }
        if j - i == 1 {
            out.push(all[i]);
        }
        i = j;
    }
    out
}

/// Checks orientations, volume conservation and boundary preservation.
pub fn validate_flip(
    mesh: &Mesh4,
    cand: &FlipCandidate,
    mode: ValidationMode,
) -> std::result::Result<(), Rejection> {
    let table = cand.kind.table();
    if cand.elements.iter().any(|&e| !mesh.is_alive(e)) {
        return Err(Rejection::Stale);
    }
    for (&e, t) in cand.elements.iter().zip(&table.stage1) {
        let mut a = mesh.element(e);
        let mut b = t.map(|l| cand.labels[l as usize - 1]);
        a.sort_unstable();
        b.sort_unstable();
        if a != b {
            return Err(Rejection::Stale);
        }
    }
    let s1 = cand.stage1_points(mesh);
    let s2 = cand.stage2_points(mesh);
    let global = orientation4(&s1[0]).sign.as_i32() * i32::from(table.sign1[0]);
    if global == 0 {
        return Err(Rejection::Stage1Orientation(0));
    }
    for (i, p) in s1.iter().enumerate() {
        if orientation4(p).sign.as_i32() != global * i32::from(table.sign1[i]) {
            return Err(Rejection::Stage1Orientation(i));
        }
    }
    for (j, p) in s2.iter().enumerate() {
        if orientation4(p).sign.as_i32() != global * i32::from(table.sign2[j]) {
            return Err(Rejection::Stage2Orientation(j));
        }
    }
    let before_f: f64 = s1.iter().map(|p| hypervolume(p).abs()).sum();
    let after_f: f64 = s2.iter().map(|p| hypervolume(p).abs()).sum();
    let conserved = match mode {
        ValidationMode::Float => (before_f - after_f).abs() <= 1e-12 * before_f,
        ValidationMode::Exact => {
            let sum = |ps: &[[Point4; 5]]| {
                ps.iter().fold(BigRational::zero(), |acc, p| {
                    let v = exact::hypervolume(p);
                    acc + if v < BigRational::zero() { -v } else { v }
                })
            };
            sum(&s1) == sum(&s2)
        }
    };
    if !conserved {
        return Err(Rejection::Volume {
            before: before_f,
            after: after_f,
        });
    }
    let stage1_vertices: Vec<[VertexId; 5]> =
        cand.elements.iter().map(|&e| mesh.element(e)).collect();
    if boundary_of(&stage1_vertices) != boundary_of(&cand.stage2_vertices()) {
        return Err(Rejection::Boundary);
    }
    Ok(())
}

/// What a flip changed.
#[derive(Clone, Debug, PartialEq)]
pub struct FlipOutcome {
    pub kind: FlipKind,
    pub removed: Vec<ElemId>,
    pub created: Vec<ElemId>,
    pub new_vertex: Option<VertexId>,
    pub removed_vertex: Option<VertexId>,
}

/// Validates (exactly) and applies a flip. Nothing changes on failure.
pub fn apply_flip(mesh: &mut Mesh4, cand: &FlipCandidate) -> Result<FlipOutcome> {
    validate_flip(mesh, cand, ValidationMode::Exact)
        .map_err(|r| Error::InvalidFlip(format!("{}: {r:?}", cand.kind)))?;
    let table = cand.kind.table();
    let stage2 = cand.stage2_vertices();
    let stage2_pts = cand.stage2_points(mesh);
    for &e in &cand.elements {
        mesh.remove_element(e);
    }
    let new_vertex = cand.new_point.map(|p| mesh.add_vertex(p, false));
    let mut created = Vec::with_capacity(stage2.len());
    for (t, pts) in stage2.iter().zip(&stage2_pts) {
        let mut v = t.map(|x| {
            if x == NEW_VERTEX {
                new_vertex.unwrap()
            } else {
                x
            }
        });
        if orientation4(pts).sign == Sign::Negative {
            v.swap(0, 1);
        }
        created.push(mesh.push_element(v));
    }
    let removed_vertex = table.removed_label.map(|l| cand.labels[l as usize - 1]);
    if let Some(v) = removed_vertex {
        mesh.kill_vertex(v);
    }
    Ok(FlipOutcome {
        kind: cand.kind,
        removed: cand.elements.clone(),
        created,
        new_vertex,
        removed_vertex,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simplex() -> Mesh4 {
        let pts = vec![
            Point4::ORIGIN,
            Point4::axis(0),
            Point4::axis(1),
            Point4::axis(2),
            Point4::axis(3),
        ];
        Mesh4::from_parts(pts, &[[0, 1, 2, 3, 4]]).unwrap()
    }

    #[test]
    fn single_element_only_splits() {
        let m = simplex();
        let c = find_candidates(&m, 0, CandidateOptions::all());
        assert!(!c.is_empty());
        assert!(c.iter().all(|c| c.kind == FlipKind::F1_5));
        assert!(find_candidates(&m, 0, CandidateOptions::default()).is_empty());
    }

    #[test]
    fn split_then_merge_restores_the_element() {
        let mut m = simplex();
        let before = m.total_hypervolume_exact();
        let c = find_candidates(&m, 0, CandidateOptions::all()).remove(0);
        let out = apply_flip(&mut m, &c).unwrap();
        assert_eq!(m.n_alive_elements(), 5);
        m.check_invariants().unwrap();
        assert_eq!(m.total_hypervolume_exact(), before);
        let nv = out.new_vertex.unwrap();
        let starter = m.incident_elements(nv)[0];
        let back = find_candidates_of_kind(&m, starter, FlipKind::F5_1);
        assert_eq!(back.len(), 1);
        let out = apply_flip(&mut m, &back[0]).unwrap();
        assert_eq!(out.removed_vertex, Some(nv));
        assert_eq!(m.n_alive_elements(), 1);
        let mut e = m.element(out.created[0]);
        e.sort_unstable();
        assert_eq!(e, [0, 1, 2, 3, 4]);
        m.check_invariants().unwrap();
    }
}
