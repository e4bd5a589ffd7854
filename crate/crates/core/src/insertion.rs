//! Incremental Bowyer–Watson insertion under a metric field.
//!
//! Each insertion locates a base element by walking across facets, grows the
//! cavity of elements whose M-circumhypersphere (with `M` evaluated at the
//! new point) contains the point, shrinks the cavity until every boundary
//! facet is visible from the point, and reconnects the boundary to the point.

use std::collections::{HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bounding::{build_bounding_mesh, cloud_diagonal};
use crate::error::{Error, Result};
use crate::geometry::{dot, facet_normal, Metric4, MetricField, Point4, FACET_LOCAL};
use crate::mesh::{ElemId, Mesh4, VertexId};
use crate::par::{self, Execution};
use crate::predicates::{inhypersphere_m, orientation4, Sign};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InsertOptions {
    /// Minimum metric cosine between a boundary facet's inward normal and
    /// the facet-centroid-to-point vector.
    pub q_tol: f64,
    /// Walk tolerance relative to the fourth power of the local extent.
    pub inside_tol: f64,
    /// Duplicate-vertex snap distance relative to the mesh bounding diagonal.
    pub snap_rel: f64,
}

impl Default for InsertOptions {
    fn default() -> Self {
        InsertOptions {
            q_tol: 1e-16,
            inside_tol: 1e-13,
            snap_rel: 1e-12,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TriangulateOptions {
    pub n_b: usize,
    /// Absolute margin around the point cloud; `None` uses the cloud's
    /// bounding diagonal (or 1 for a single point).
    pub margin: Option<f64>,
    /// Shuffle the insertion order with this seed.
    pub shuffle_seed: Option<u64>,
    pub remove_super: bool,
    /// Skip points that coincide with an existing vertex instead of failing.
    pub skip_duplicates: bool,
    pub insert: InsertOptions,
}

impl Default for TriangulateOptions {
    fn default() -> Self {
        TriangulateOptions {
            n_b: 24,
            margin: None,
            shuffle_seed: None,
            remove_super: true,
            skip_duplicates: false,
            insert: InsertOptions::default(),
        }
    }
}

/// Result of testing a point against an element.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    Inside,
    Outside { exit_facet: usize },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct WalkStats {
    pub steps: usize,
    pub fallback_used: bool,
}

/// A cavity boundary facet, listed in its owner's canonical order so that
/// the owner lies on its positive side.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundaryFacet {
    pub verts: [VertexId; 4],
    pub owner: ElemId,
    pub local: u8,
    /// Element across the facet, `None` on the mesh hull.
    pub outside: Option<ElemId>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Cavity {
    pub base: ElemId,
    pub elements: Vec<ElemId>,
    pub boundary: Vec<BoundaryFacet>,
}

impl Cavity {
    pub fn contains(&self, e: ElemId) -> bool {
        self.elements.contains(&e)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InsertReport {
    pub vertex: VertexId,
    pub base: ElemId,
    pub walk: WalkStats,
    /// Cavity size before visibility repair.
    pub cavity_size: usize,
    pub removed_for_visibility: usize,
    pub new_elements: Vec<ElemId>,
}

fn temp_points(mesh: &Mesh4, e: ElemId, k: usize, p: Point4) -> [Point4; 5] {
    let v = mesh.element(e);
    let l = FACET_LOCAL[k];
    [
        mesh.vertex(v[l[0]]),
        mesh.vertex(v[l[1]]),
        mesh.vertex(v[l[2]]),
        mesh.vertex(v[l[3]]),
        p,
    ]
}

/// Classifies `p` against element `elem` using the five facet-plus-point
/// pentatopes. Orientations within `tol · L⁴` of zero count as zero, where
/// `L` is the largest coordinate offset between `p` and the element. When
/// outside, the exit facet is the one `p` lies furthest beyond.
pub fn inside_element(mesh: &Mesh4, elem: ElemId, p: Point4, tol: f64) -> Location {
    let pts = mesh.element_points(elem);
    let extent = pts
        .iter()
        .flat_map(|q| q.sub(p))
        .fold(0.0f64, |a, c| a.max(c.abs()));
    let band = tol * extent.powi(4);
    let mut vals = [0.0; 5];
    for (k, val) in vals.iter_mut().enumerate() {
        let r = orientation4(&temp_points(mesh, elem, k, p));
        *val = match r.sign {
            Sign::Zero => 0.0,
            _ if r.value.abs() <= band => 0.0,
            _ => r.value,
        };
    }
    if vals.iter().all(|&v| v >= 0.0) || vals.iter().all(|&v| v <= 0.0) {
        return Location::Inside;
    }
    let exit_facet = (0..5).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    Location::Outside { exit_facet }
}

/// Walks from `start` (or the most recently created element) towards `p`.
pub fn find_base_element(
    mesh: &Mesh4,
    p: Point4,
    start: Option<ElemId>,
    tol: f64,
) -> Result<(ElemId, WalkStats)> {
    let start = start
        .filter(|&e| mesh.is_alive(e))
        .or(mesh.last_created())
        .or_else(|| mesh.alive_elements().next());
    let Some(start) = start else {
        return Err(Error::GhostPoint(p));
    };
    let mut visited = HashSet::new();
    walk_from(mesh, p, start, tol, &mut visited)
}

/// Walk with a caller-supplied visited set; elements already in the set are
/// never re-entered, which lets tests force the fallback.
pub(crate) fn walk_from(
    mesh: &Mesh4,
    p: Point4,
    start: ElemId,
    tol: f64,
    visited: &mut HashSet<ElemId>,
) -> Result<(ElemId, WalkStats)> {
    let limit = mesh.n_alive_elements();
    let mut cur = start;
    let mut steps = 0;
    visited.insert(cur);
    loop {
        match inside_element(mesh, cur, p, tol) {
            Location::Inside => {
                return Ok((
                    cur,
                    WalkStats {
                        steps,
                        fallback_used: false,
                    },
                ))
            }
            Location::Outside { exit_facet } => {
                let next = mesh
                    .neighbor(cur, exit_facet)
                    .filter(|n| !visited.contains(n))
                    .or_else(|| {
                        // Any other facet that p lies beyond, furthest first.
                        let mut cands: Vec<(f64, ElemId)> = (0..5)
                            .filter_map(|k| {
                                let r = orientation4(&temp_points(mesh, cur, k, p));
                                let n = mesh.neighbor(cur, k)?;
                                (r.sign == Sign::Negative && !visited.contains(&n))
                                    .then_some((r.value, n))
                            })
                            .collect();
                        cands.sort_by(|a, b| a.0.total_cmp(&b.0));
                        cands.first().map(|c| c.1)
                    });
                match next {
                    Some(n) if steps < limit => {
                        visited.insert(n);
                        cur = n;
                        steps += 1;
                    }
                    _ => {
                        let e = scan_for_element(mesh, p, tol)?;
                        return Ok((
                            e,
                            WalkStats {
                                steps,
                                fallback_used: true,
                            },
                        ));
                    }
                }
            }
        }
    }
}

fn scan_for_element(mesh: &Mesh4, p: Point4, tol: f64) -> Result<ElemId> {
    mesh.alive_elements()
        .find(|&e| inside_element(mesh, e, p, 0.0) == Location::Inside)
        .map_or_else(
            || {
                mesh.alive_elements()
                    .find(|&e| inside_element(mesh, e, p, tol) == Location::Inside)
                    .ok_or(Error::GhostPoint(p))
            },
            Ok,
        )
}

fn in_sphere(mesh: &Mesh4, e: ElemId, p: Point4, m: &Metric4) -> bool {
    inhypersphere_m(m, &mesh.element_points(e), p).sign == Sign::Positive
}

fn boundary_of(mesh: &Mesh4, elements: &[ElemId], members: &HashSet<ElemId>) -> Vec<BoundaryFacet> {
    let mut out = Vec::new();
    for &e in elements {
        let v = mesh.element(e);
        for k in 0..5 {
            let n = mesh.neighbor(e, k);
            if n.is_none_or(|n| !members.contains(&n)) {
                out.push(BoundaryFacet {
                    verts: FACET_LOCAL[k].map(|i| v[i]),
                    owner: e,
                    local: k as u8,
                    outside: n,
                });
            }
        }
    }
    out
}

/// Facet-connected set of elements whose M-circumhypersphere strictly
/// contains `p`, grown from `base` (always included).
pub fn build_cavity(mesh: &Mesh4, base: ElemId, p: Point4, m_p: &Metric4) -> Cavity {
    let mut members: HashSet<ElemId> = HashSet::from([base]);
    let mut tested: HashSet<ElemId> = HashSet::from([base]);
    let mut elements = vec![base];
    let mut queue = VecDeque::from([base]);
    while let Some(e) = queue.pop_front() {
        for k in 0..5 {
            let Some(n) = mesh.neighbor(e, k) else {
                continue;
            };
            if !tested.insert(n) {
                continue;
            }
            if in_sphere(mesh, n, p, m_p) {
                members.insert(n);
                elements.push(n);
                queue.push_back(n);
            }
        }
    }
    let boundary = boundary_of(mesh, &elements, &members);
    Cavity {
        base,
        elements,
        boundary,
    }
}

/// Metric cosine between the inward normal of `f` and `p - centroid(f)`.
pub fn visibility_q(mesh: &Mesh4, f: &BoundaryFacet, p: Point4, m_p: &Metric4) -> f64 {
    let [a, b, c, d] = f.verts.map(|v| mesh.vertex(v));
    let n = facet_normal(a, b, c, d).map(|x| -x);
    let cp = p.sub(Point4::centroid(&[a, b, c, d]));
    let minv = m_p.inverse();
    let mut n_m = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            n_m += n[i] * minv[i][j] * n[j];
        }
    }
    let denom = n_m.max(0.0).sqrt() * m_p.quad_form(cp).max(0.0).sqrt();
    if denom == 0.0 {
        0.0
    } else {
        dot(n, cp) / denom
    }
}

/// True when `p` lies in the closed element `e` (exact signs).
fn closure_contains(mesh: &Mesh4, e: ElemId, p: Point4) -> bool {
    let v = mesh.element(e);
    FACET_LOCAL.iter().all(|l| {
        let f = l.map(|i| mesh.vertex(v[i]));
        orientation4(&[f[0], f[1], f[2], f[3], p]).sign != Sign::Negative
    })
}

/// Strictly visible: positive exact orientation and `Q` above the
/// tolerance. The `Q` test is waived for elements whose closure holds `p`,
/// where rounding in the float normal can misjudge near-degenerate facets
/// and the new element is positive regardless.
fn facet_visible(mesh: &Mesh4, f: &BoundaryFacet, p: Point4, m_p: &Metric4, q_tol: f64) -> bool {
    let pts = [f.verts[0], f.verts[1], f.verts[2], f.verts[3]].map(|v| mesh.vertex(v));
    orientation4(&[pts[0], pts[1], pts[2], pts[3], p]).sign == Sign::Positive
        && (visibility_q(mesh, f, p, m_p) > q_tol || closure_contains(mesh, f.owner, p))
}

/// Removes owners of invisible boundary facets until every boundary facet
/// is strictly visible from `p`. Returns the repaired cavity and the number
/// of removed elements.
pub fn enforce_visibility(
    mesh: &Mesh4,
    cavity: Cavity,
    p: Point4,
    m_p: &Metric4,
    q_tol: f64,
) -> Result<(Cavity, usize)> {
    let mut members: HashSet<ElemId> = cavity.elements.iter().copied().collect();
    let mut elements = cavity.elements;
    let mut boundary = cavity.boundary;
    let mut removed = 0;
    loop {
        let mut doomed: Vec<ElemId> = boundary
            .iter()
            .filter(|f| !facet_visible(mesh, f, p, m_p, q_tol))
            .map(|f| f.owner)
            .collect();
        if doomed.is_empty() {
            return Ok((
                Cavity {
                    base: cavity.base,
                    elements,
                    boundary,
                },
                removed,
            ));
        }
        doomed.sort_unstable();
        doomed.dedup();
        if doomed.contains(&cavity.base) {
            return Err(Error::Invariant(format!(
                "visibility repair would remove the base element {}",
                cavity.base
            )));
        }
        for e in &doomed {
            members.remove(e);
        }
        elements.retain(|e| members.contains(e));
        removed += doomed.len();
        boundary = boundary_of(mesh, &elements, &members);
    }
}

/// Largest distance between the extreme vertex coordinates of the mesh.
fn mesh_diagonal(mesh: &Mesh4) -> f64 {
    cloud_diagonal(mesh.vertices())
}

/// Inserts `p`, with the metric evaluated once at `p`.
pub fn insert_point(
    mesh: &mut Mesh4,
    p: Point4,
    field: &MetricField,
    opts: &InsertOptions,
) -> Result<InsertReport> {
    let diag = mesh_diagonal(mesh);
    insert_with_snap(mesh, p, field, opts, opts.snap_rel * diag)
}

fn insert_with_snap(
    mesh: &mut Mesh4,
    p: Point4,
    field: &MetricField,
    opts: &InsertOptions,
    snap: f64,
) -> Result<InsertReport> {
    if !p.is_finite() {
        return Err(Error::Degenerate(format!("non-finite point {p:?}")));
    }
    let (base, walk) = find_base_element(mesh, p, None, opts.inside_tol)?;
    let m_p = field.eval(p);
    let cavity = build_cavity(mesh, base, p, &m_p);
    for &e in &cavity.elements {
        for v in mesh.element(e) {
            if mesh.vertex(v).distance(p) <= snap {
                return Err(Error::DuplicateVertex {
                    point: p,
                    vertex: v,
                });
            }
        }
    }
    let cavity_size = cavity.elements.len();
    let (cavity, removed) = enforce_visibility(mesh, cavity, p, &m_p, opts.q_tol)?;
    let vertex = mesh.add_vertex(p, false);
    for &e in &cavity.elements {
        mesh.remove_element(e);
    }
    let new_elements = cavity
        .boundary
        .iter()
        .map(|f| mesh.push_element([f.verts[0], f.verts[1], f.verts[2], f.verts[3], vertex]))
        .collect();
    Ok(InsertReport {
        vertex,
        base,
        walk,
        cavity_size,
        removed_for_visibility: removed,
        new_elements,
    })
}

/// Aggregate counters over a whole triangulation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TriangulationStats {
    pub inserted: usize,
    pub skipped_duplicates: usize,
    pub walk_steps: usize,
    pub walk_fallbacks: usize,
    pub visibility_removals: usize,
}

/// Delaunay mesh of `points` under `field`.
pub fn triangulate(
    points: &[Point4],
    field: &MetricField,
    opts: &TriangulateOptions,
) -> Result<Mesh4> {
    triangulate_with_stats(points, field, opts).map(|(m, _)| m)
}

pub fn triangulate_with_stats(
    points: &[Point4],
    field: &MetricField,
    opts: &TriangulateOptions,
) -> Result<(Mesh4, TriangulationStats)> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let diag = cloud_diagonal(points);
    let margin = opts.margin.unwrap_or(if diag > 0.0 { diag } else { 1.0 });
    let mut mesh = build_bounding_mesh(points, opts.n_b, margin)?;
    let snap = opts.insert.snap_rel * mesh_diagonal(&mesh);
    let mut order: Vec<usize> = (0..points.len()).collect();
    if let Some(seed) = opts.shuffle_seed {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    let mut stats = TriangulationStats::default();
    for i in order {
        match insert_with_snap(&mut mesh, points[i], field, &opts.insert, snap) {
            Ok(r) => {
                stats.inserted += 1;
                stats.walk_steps += r.walk.steps;
                stats.walk_fallbacks += r.walk.fallback_used as usize;
                stats.visibility_removals += r.removed_for_visibility;
            }
            Err(Error::DuplicateVertex { .. }) if opts.skip_duplicates => {
                stats.skipped_duplicates += 1
            }
            Err(e) => return Err(e),
        }
    }
    if opts.remove_super {
        mesh.remove_super_elements();
    }
    Ok((mesh, stats))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Violation {
    pub vertex: VertexId,
    pub element: ElemId,
    pub value: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AuditReport {
    pub violations: Vec<Violation>,
    pub pairs_checked: usize,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Circumball of an element under a constant metric, for cheap rejection.
/// `None` when the element is too badly conditioned to trust.
fn circumball(pts: &[Point4; 5], m: &Metric4) -> Option<(Point4, f64)> {
    let a = nalgebra::Matrix4::from_fn(|i, j| 2.0 * m.apply(pts[i + 1].sub(pts[0]))[j]);
    let b = nalgebra::Vector4::from_fn(|i, _| {
        m.quad_form(pts[i + 1].to_array()) - m.quad_form(pts[0].to_array())
    });
    let c = a.lu().solve(&b)?;
    let center = Point4::new(c[0], c[1], c[2], c[3]);
    let r2: Vec<f64> = pts.iter().map(|p| m.quad_form(p.sub(center))).collect();
    let hi = r2.iter().cloned().fold(f64::MIN, f64::max);
    let lo = r2.iter().cloned().fold(f64::MAX, f64::min);
    if !hi.is_finite() || hi - lo > 1e-6 * hi {
        return None;
    }
    Some((center, hi * (1.0 + 1e-6) + (hi - lo) * 4.0))
}

/// Checks the empty-circumhypersphere property: no alive vertex may lie
/// strictly inside the M-circumhypersphere of an element it is not part of,
/// with `M` evaluated at the vertex. A violation also requires the predicate
/// value to exceed `tol` (use 0 for the exact test).
pub fn audit_delaunay(mesh: &Mesh4, field: &MetricField, tol: f64, exec: Execution) -> AuditReport {
    let elements = mesh.alive_element_ids();
    let vertices: Vec<VertexId> = (0..mesh.n_vertices() as VertexId)
        .filter(|&v| mesh.is_vertex_alive(v))
        .collect();
    let balls: Vec<Option<(Point4, f64)>> = if field.is_constant() {
        let m = field.eval(Point4::ORIGIN);
        par::map_slice(exec, &elements, |&e| {
            circumball(&mesh.element_points(e), &m)
        })
    } else {
        vec![None; elements.len()]
    };
    let per_vertex = par::map_slice(exec, &vertices, |&v| {
        let p = mesh.vertex(v);
        let m = field.eval(p);
        let mut found = Vec::new();
        let mut checked = 0usize;
        for (i, &e) in elements.iter().enumerate() {
            let el = mesh.element(e);
            if el.contains(&v) {
                continue;
            }
            if let Some((c, r2)) = balls[i] {
                if m.quad_form(p.sub(c)) > r2 {
                    checked += 1;
                    continue;
                }
            }
            checked += 1;
            let r = inhypersphere_m(&m, &mesh.points_of(&el), p);
            if r.sign == Sign::Positive && r.value > tol {
                found.push(Violation {
                    vertex: v,
                    element: e,
                    value: r.value,
                });
            }
        }
        (found, checked)
    });
    let mut report = AuditReport::default();
    for (found, checked) in per_vertex {
        report.violations.extend(found);
        report.pairs_checked += checked;
    }
    report
}
