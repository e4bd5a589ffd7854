//! Pentatope mesh storage with facet-keyed adjacency.
//!
//! Elements and vertices are never physically deleted during meshing; dead
//! entries keep their slot so ids stay stable. [`Mesh4::compacted`] produces
//! a dense copy for export.

use std::collections::HashMap;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::geometry::{canonical_facets, hypervolume, Pentatope, Point4, FACET_LOCAL};
use crate::predicates::{exact, orientation4, Sign};

pub type VertexId = u32;
pub type ElemId = u32;

/// One side of a facet: the owning element and the facet's local index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FacetOwner {
    pub elem: ElemId,
    pub local: u8,
}

#[derive(Clone, Debug, Default)]
pub struct Mesh4 {
    vertices: Vec<Point4>,
    is_super: Vec<bool>,
    vertex_alive: Vec<bool>,
    elements: Vec<[VertexId; 5]>,
    elem_alive: Vec<bool>,
    adjacency: HashMap<[VertexId; 4], [Option<FacetOwner>; 2]>,
    incident: Vec<Vec<ElemId>>,
    n_alive: usize,
    last_created: Option<ElemId>,
}

/// Sorted vertex set of facet `k` of an element.
pub fn facet_key(v: &[VertexId; 5], k: usize) -> [VertexId; 4] {
    let mut key = FACET_LOCAL[k].map(|i| v[i]);
    key.sort_unstable();
    key
}

impl Mesh4 {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a mesh from raw arrays, reorienting negative elements.
    pub fn from_parts(vertices: Vec<Point4>, elements: &[[VertexId; 5]]) -> Result<Self> {
        let mut mesh = Mesh4::new();
        for p in vertices {
            if !p.is_finite() {
                return Err(Error::Degenerate(format!("non-finite vertex {p:?}")));
            }
            mesh.add_vertex(p, false);
        }
        for e in elements {
            if e.iter().any(|&v| v as usize >= mesh.vertices.len()) {
                return Err(Error::Invariant(format!(
                    "element {e:?} references a missing vertex"
                )));
            }
            mesh.add_element(*e)?;
        }
        Ok(mesh)
    }

    pub fn add_vertex(&mut self, p: Point4, is_super: bool) -> VertexId {
        self.vertices.push(p);
        self.is_super.push(is_super);
        self.vertex_alive.push(true);
        self.incident.push(Vec::new());
        (self.vertices.len() - 1) as VertexId
    }

    /// Adds an element, swapping two vertices if needed so it is positively
    /// oriented. Fails on degenerate or non-manifold input without mutating.
    pub fn add_element(&mut self, mut v: [VertexId; 5]) -> Result<ElemId> {
        let mut sorted = v;
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Degenerate(format!("repeated vertex in {v:?}")));
        }
        match orientation4(&self.points_of(&v)).sign {
            Sign::Zero => return Err(Error::Degenerate(format!("zero hypervolume element {v:?}"))),
            Sign::Negative => v.swap(0, 1),
            Sign::Positive => {}
        }
        for k in 0..5 {
            if let Some(slots) = self.adjacency.get(&facet_key(&v, k)) {
                if slots.iter().all(Option::is_some) {
                    return Err(Error::Invariant(format!(
                        "facet {:?} would get a third owner",
                        facet_key(&v, k)
                    )));
                }
            }
        }
        Ok(self.push_element(v))
    }

    /// Adds an element whose positive orientation the caller guarantees.
    pub(crate) fn push_element(&mut self, v: [VertexId; 5]) -> ElemId {
        let id = self.elements.len() as ElemId;
        self.elements.push(v);
        self.elem_alive.push(true);
        for k in 0..5 {
            let slots = self
                .adjacency
                .entry(facet_key(&v, k))
                .or_insert([None, None]);
            let owner = Some(FacetOwner {
                elem: id,
                local: k as u8,
            });
            if slots[0].is_none() {
                slots[0] = owner;
            } else {
                debug_assert!(slots[1].is_none(), "facet with three owners");
                slots[1] = owner;
            }
        }
        for &x in &v {
            self.incident[x as usize].push(id);
        }
        self.n_alive += 1;
        self.last_created = Some(id);
        id
    }

    pub fn remove_element(&mut self, e: ElemId) {
        if !self.elem_alive[e as usize] {
            return;
        }
        self.elem_alive[e as usize] = false;
        let v = self.elements[e as usize];
        for k in 0..5 {
            let key = facet_key(&v, k);
            if let Some(slots) = self.adjacency.get_mut(&key) {
                for s in slots.iter_mut() {
                    if s.is_some_and(|o| o.elem == e) {
                        *s = None;
                    }
                }
                if slots[0].is_none() {
                    slots.swap(0, 1);
                }
                if slots[0].is_none() {
                    self.adjacency.remove(&key);
                }
            }
        }
        for &x in &v {
            let list = &mut self.incident[x as usize];
            if let Some(i) = list.iter().position(|&y| y == e) {
                list.swap_remove(i);
            }
        }
        self.n_alive -= 1;
        if self.last_created == Some(e) {
            self.last_created = None;
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_alive_vertices(&self) -> usize {
        self.vertex_alive.iter().filter(|&&a| a).count()
    }

    pub fn n_element_slots(&self) -> usize {
        self.elements.len()
    }

    pub fn n_alive_elements(&self) -> usize {
        self.n_alive
    }

    pub fn vertex(&self, v: VertexId) -> Point4 {
        self.vertices[v as usize]
    }

    pub fn vertices(&self) -> &[Point4] {
        &self.vertices
    }

    pub fn is_super(&self, v: VertexId) -> bool {
        self.is_super[v as usize]
    }

    pub fn is_vertex_alive(&self, v: VertexId) -> bool {
        self.vertex_alive[v as usize]
    }

    /// Retires a vertex that no alive element uses any more.
    pub(crate) fn kill_vertex(&mut self, v: VertexId) {
        debug_assert!(self.incident[v as usize].is_empty());
        self.vertex_alive[v as usize] = false;
    }

    pub fn element(&self, e: ElemId) -> [VertexId; 5] {
        self.elements[e as usize]
    }

    pub fn pentatope(&self, e: ElemId) -> Pentatope {
        Pentatope { v: self.element(e) }
    }

    pub fn is_alive(&self, e: ElemId) -> bool {
        self.elem_alive.get(e as usize).copied().unwrap_or(false)
    }

    pub fn points_of(&self, v: &[VertexId; 5]) -> [Point4; 5] {
        v.map(|i| self.vertices[i as usize])
    }

    pub fn element_points(&self, e: ElemId) -> [Point4; 5] {
        self.points_of(&self.elements[e as usize])
    }

    pub fn alive_elements(&self) -> impl Iterator<Item = ElemId> + '_ {
        (0..self.elements.len() as ElemId).filter(move |&e| self.elem_alive[e as usize])
    }

    pub fn alive_element_ids(&self) -> Vec<ElemId> {
        self.alive_elements().collect()
    }

    pub fn last_created(&self) -> Option<ElemId> {
        self.last_created.filter(|&e| self.is_alive(e))
    }

    /// Element across facet `k` of `e`, if any.
    pub fn neighbor(&self, e: ElemId, k: usize) -> Option<ElemId> {
        let key = facet_key(&self.elements[e as usize], k);
        self.other_owner(&key, e).map(|o| o.elem)
    }

    pub fn other_owner(&self, key: &[VertexId; 4], e: ElemId) -> Option<FacetOwner> {
        let slots = self.adjacency.get(key)?;
        slots.iter().flatten().find(|o| o.elem != e).copied()
    }

    pub fn facet_owners(&self, key: &[VertexId; 4]) -> Vec<FacetOwner> {
        self.adjacency
            .get(key)
            .map(|s| s.iter().flatten().copied().collect())
            .unwrap_or_default()
    }

    pub fn n_facets(&self) -> usize {
        self.adjacency.len()
    }

    pub fn incident_elements(&self, v: VertexId) -> &[ElemId] {
        &self.incident[v as usize]
    }

    /// Alive elements containing every vertex of `verts` (the star of that
    /// simplex), sorted by id.
    pub fn star(&self, verts: &[VertexId]) -> Vec<ElemId> {
        let Some(&first) = verts
            .iter()
            .min_by_key(|&&v| self.incident[v as usize].len())
        else {
            return Vec::new();
        };
        let mut out: Vec<ElemId> = self.incident[first as usize]
            .iter()
            .copied()
            .filter(|&e| {
                let el = &self.elements[e as usize];
                verts.iter().all(|v| el.contains(v))
            })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn total_hypervolume(&self) -> f64 {
        self.alive_elements()
            .map(|e| hypervolume(&self.element_points(e)))
            .sum()
    }

    pub fn total_hypervolume_exact(&self) -> BigRational {
        exact::hypervolume_sum(
            &self.vertices,
            self.alive_elements().map(|e| self.element(e)),
        )
    }

    /// Removes every element touching a super-vertex and retires the
    /// super-vertices themselves.
    pub fn remove_super_elements(&mut self) {
        let doomed: Vec<ElemId> = self
            .alive_elements()
            .filter(|&e| {
                self.elements[e as usize]
                    .iter()
                    .any(|&v| self.is_super[v as usize])
            })
            .collect();
        for e in doomed {
            self.remove_element(e);
        }
        for v in 0..self.vertices.len() {
            if self.is_super[v] {
                self.vertex_alive[v] = false;
            }
        }
    }

    /// Dense copy holding only alive elements and the vertices they use
    /// (plus alive isolated vertices), preserving relative order.
    pub fn compacted(&self) -> Mesh4 {
        let mut used = vec![false; self.vertices.len()];
        for e in self.alive_elements() {
            for &v in &self.elements[e as usize] {
                used[v as usize] = true;
            }
        }
        let mut map = vec![u32::MAX; self.vertices.len()];
        let mut out = Mesh4::new();
        for (i, p) in self.vertices.iter().enumerate() {
            if used[i] || (self.vertex_alive[i] && !self.is_super[i]) {
                map[i] = out.add_vertex(*p, self.is_super[i]);
            }
        }
        for e in self.alive_elements() {
            out.push_element(self.elements[e as usize].map(|v| map[v as usize]));
        }
        out
    }

    /// Full consistency check; intended for tests and debugging.
    pub fn check_invariants(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Invariant(m));
        let mut seen: HashMap<[VertexId; 4], usize> = HashMap::new();
        for e in self.alive_elements() {
            let v = self.elements[e as usize];
            if v.iter().any(|&x| !self.vertex_alive[x as usize]) {
                return fail(format!("element {e} uses a dead vertex"));
            }
            if orientation4(&self.points_of(&v)).sign != Sign::Positive {
                return fail(format!("element {e} is not positively oriented"));
            }
            for (k, f) in canonical_facets(Pentatope { v }).iter().enumerate() {
                let key = f.key();
                *seen.entry(key).or_default() += 1;
                let owners = self.facet_owners(&key);
                if !owners.contains(&FacetOwner {
                    elem: e,
                    local: k as u8,
                }) {
                    return fail(format!("facet {k} of element {e} missing from adjacency"));
                }
            }
            for &x in &v {
                if !self.incident[x as usize].contains(&e) {
                    return fail(format!("incidence of vertex {x} misses element {e}"));
                }
            }
        }
        for (key, slots) in &self.adjacency {
            let n = slots.iter().flatten().count();
            if n == 0 || seen.get(key).copied() != Some(n) {
                return fail(format!("adjacency entry {key:?} is stale"));
            }
            if let [Some(a), Some(b)] = slots {
                // Shared facets must be induced with opposite orientations:
                // the two opposite vertices lie on opposite sides.
                let fa = FACET_LOCAL[a.local as usize].map(|i| self.elements[a.elem as usize][i]);
                let opp_b = self.elements[b.elem as usize]
                    .iter()
                    .copied()
                    .find(|x| !key.contains(x))
                    .unwrap();
                let mut pts = [Point4::ORIGIN; 5];
                for i in 0..4 {
                    pts[i] = self.vertices[fa[i] as usize];
                }
                pts[4] = self.vertices[opp_b as usize];
                if orientation4(&pts).sign != Sign::Negative {
                    return fail(format!(
                        "elements {} and {} overlap across {key:?}",
                        a.elem, b.elem
                    ));
                }
            }
        }
        let total: usize = self.incident.iter().map(Vec::len).sum();
        if total != 5 * self.n_alive {
            return fail("incidence lists hold stale entries".into());
        }
        Ok(())
    }
}
