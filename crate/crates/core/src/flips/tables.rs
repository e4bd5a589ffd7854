//! Connectivity tables for the bistellar flip catalog.
//!
//! Every table is stored exactly as published with 1-based labels. Reverse
//! kinds swap the two stages. Tuples are not all positively ordered; the
//! relative orientation of each tuple in a geometric realization follows
//! from the combinatorics alone and is precomputed in [`FlipTable::sign1`]
//! and [`FlipTable::sign2`].

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::OnceLock;

#[allow(non_camel_case_types)]
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FlipKind {
    F1_5,
    F5_1,
    F2_4,
    F4_2,
    F3_3,
    F4_8,
    F8_4,
    F3_9,
    F9_3,
    F6_6,
    F6_12a,
    F12_6a,
    F2_8,
    F8_2,
    F4_6,
    F6_4,
    F8_8v1,
    F8_8v2,
    F8_8v3,
    F4_12,
    F12_4,
    F6_12b,
    F12_6b,
    F8_16,
    F16_8,
}

use FlipKind::*;

impl FlipKind {
    pub const ALL: [FlipKind; 25] = [
        F1_5, F5_1, F2_4, F4_2, F3_3, F4_8, F8_4, F3_9, F9_3, F6_6, F6_12a, F12_6a, F2_8, F8_2,
        F4_6, F6_4, F8_8v1, F8_8v2, F8_8v3, F4_12, F12_4, F6_12b, F12_6b, F8_16, F16_8,
    ];

    /// Short label such as `"4-8"` or `"8-8v2"`.
    pub fn name(self) -> &'static str {
        match self {
            F1_5 => "1-5",
            F5_1 => "5-1",
            F2_4 => "2-4",
            F4_2 => "4-2",
            F3_3 => "3-3",
            F4_8 => "4-8",
            F8_4 => "8-4",
            F3_9 => "3-9",
            F9_3 => "9-3",
            F6_6 => "6-6",
            F6_12a => "6-12a",
            F12_6a => "12-6a",
            F2_8 => "2-8",
            F8_2 => "8-2",
            F4_6 => "4-6",
            F6_4 => "6-4",
            F8_8v1 => "8-8v1",
            F8_8v2 => "8-8v2",
            F8_8v3 => "8-8v3",
            F4_12 => "4-12",
            F12_4 => "12-4",
            F6_12b => "6-12b",
            F12_6b => "12-6b",
            F8_16 => "8-16",
            F16_8 => "16-8",
        }
    }

    pub fn from_name(s: &str) -> Option<FlipKind> {
        FlipKind::ALL.into_iter().find(|k| k.name() == s)
    }

    /// The kind undoing this one; self-inverse kinds return themselves.
    pub fn reverse(self) -> FlipKind {
        match self {
            F1_5 => F5_1,
            F5_1 => F1_5,
            F2_4 => F4_2,
            F4_2 => F2_4,
            F4_8 => F8_4,
            F8_4 => F4_8,
            F3_9 => F9_3,
            F9_3 => F3_9,
            F6_12a => F12_6a,
            F12_6a => F6_12a,
            F2_8 => F8_2,
            F8_2 => F2_8,
            F4_6 => F6_4,
            F6_4 => F4_6,
            F4_12 => F12_4,
            F12_4 => F4_12,
            F6_12b => F12_6b,
            F12_6b => F6_12b,
            F8_16 => F16_8,
            F16_8 => F8_16,
            k => k,
        }
    }

    pub fn inserts_point(self) -> bool {
        matches!(
            self,
            F1_5 | F4_8 | F3_9 | F6_12a | F2_8 | F4_12 | F6_12b | F8_16
        )
    }

    pub fn removes_point(self) -> bool {
        self != self.reverse() && self.reverse().inserts_point()
    }

    pub fn table(self) -> &'static FlipTable {
        static TABLES: OnceLock<Vec<FlipTable>> = OnceLock::new();
        let all =
            TABLES.get_or_init(|| FlipKind::ALL.iter().map(|&k| FlipTable::build(k)).collect());
        &all[self as usize]
    }
}

impl fmt::Display for FlipKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Where a point-inserting flip places its new vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NewVertexRule {
    None,
    EdgeMidpoint,
    TriangleCentroid,
    TetCentroid,
    ElementCentroid,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlipTable {
    pub kind: FlipKind,
    pub stage1: Vec<[u8; 5]>,
    pub stage2: Vec<[u8; 5]>,
    /// Number of labels used by stage 1.
    pub vertex_count: usize,
    /// Labels shared by every stage-1 tuple.
    pub core: Vec<u8>,
    /// Label created by the flip, if any.
    pub new_label: Option<u8>,
    /// Label that disappears, if any.
    pub removed_label: Option<u8>,
    pub new_vertex_rule: NewVertexRule,
    /// Orientation signs of the tuples, as listed, in any realization (up to
    /// one global sign shared by both stages).
    pub sign1: Vec<i8>,
    pub sign2: Vec<i8>,
    /// Label symmetries of stage 1, one per distinct stage-2 image: the
    /// label permutation (index `l - 1`) and the induced stage-1 tuple
    /// permutation.
    pub(crate) symmetries: Vec<(Vec<u8>, Vec<usize>)>,
    pub(crate) search_order: Vec<usize>,
}

fn parse(rows: &[&str]) -> Vec<[u8; 5]> {
    rows.iter()
        .map(|r| {
            let b = r.as_bytes();
            std::array::from_fn(|i| b[i] - b'0')
        })
        .collect()
}

fn forward(kind: FlipKind) -> (Vec<[u8; 5]>, Vec<[u8; 5]>) {
    let (a, b): (&[&str], &[&str]) = match kind {
        F1_5 => (&["12345"], &["12346", "23456", "13456", "12456", "12356"]),
        F2_4 => (&["12345", "12356"], &["12346", "12456", "23456", "13456"]),
        F3_3 => (&["12345", "12456", "13456"], &["12346", "23456", "12356"]),
        F4_8 => (
            &["12345", "12456", "23456", "12346"],
            &[
                "13457", "12357", "14567", "12567", "34567", "23567", "13467", "12367",
            ],
        ),
        F3_9 => (
            &["12345", "12456", "23456"],
            &[
                "12347", "13457", "12357", "14567", "12567", "12467", "34567", "23567", "23467",
            ],
        ),
        F6_6 => (
            &["12345", "12456", "13456", "23457", "24567", "34567"],
            &["12347", "12467", "13467", "12357", "12567", "13567"],
        ),
        F6_12a => (
            &["12345", "12456", "13456", "23457", "24567", "34567"],
            &[
                "12348", "12468", "13468", "12358", "12568", "13568", "23478", "24678", "34678",
                "23578", "25678", "35678",
            ],
        ),
        F2_8 => (
            &["12345", "12356"],
            &[
                "12347", "23457", "13457", "12457", "23567", "13567", "12567", "12367",
            ],
        ),
        F4_6 => (
            &["12345", "23456", "12347", "23467"],
            &["12367", "13467", "12456", "13456", "12356", "12467"],
        ),
        F8_8v1 => (
            &[
                "12567", "23567", "34567", "14567", "12568", "23568", "34568", "14568",
            ],
            &[
                "12457", "23457", "12467", "23467", "12458", "23458", "12468", "23468",
            ],
        ),
        F8_8v2 => (
            &[
                "12567", "23567", "34567", "14567", "12568", "23568", "34568", "14568",
            ],
            &[
                "12357", "13457", "12367", "13467", "12358", "13458", "12368", "13468",
            ],
        ),
        F8_8v3 => (
            &[
                "12457", "23457", "12467", "23467", "12458", "23458", "12468", "23468",
            ],
            &[
                "12357", "13457", "12367", "13467", "12358", "13458", "12368", "13468",
            ],
        ),
        F4_12 => (
            &["12346", "12356", "12347", "12357"],
            &[
                "23468", "13468", "12468", "23568", "13568", "12568", "23478", "13478", "12478",
                "23578", "13578", "12578",
            ],
        ),
        F6_12b => (
            &["12456", "23456", "13456", "12457", "23457", "13457"],
            &[
                "12568", "12468", "23568", "23468", "13568", "13468", "12578", "12478", "23578",
                "23478", "13578", "13478",
            ],
        ),
        F8_16 => (
            &[
                "12457", "23457", "12467", "23467", "12458", "23458", "12468", "23468",
            ],
            &[
                "23679", "14579", "12579", "34579", "23579", "14679", "12679", "34679", "14589",
                "12589", "34589", "23589", "14689", "12689", "34689", "23689",
            ],
        ),
        other => unreachable!("{other} is stored as a reverse"),
    };
    (parse(a), parse(b))
}

fn common(tuples: &[[u8; 5]]) -> Vec<u8> {
    let mut c: Vec<u8> = tuples[0].to_vec();
    c.retain(|l| tuples.iter().all(|t| t.contains(l)));
    c.sort_unstable();
    c
}

fn labels(tuples: &[[u8; 5]]) -> Vec<u8> {
    let mut l: Vec<u8> = tuples.iter().flatten().copied().collect();
    l.sort_unstable();
    l.dedup();
    l
}

/// Sign of the permutation taking `from` to `to` (same label set).
pub(crate) fn parity(from: &[u8; 5], to: &[u8; 5]) -> i8 {
    let mut perm: [usize; 5] =
        std::array::from_fn(|i| to.iter().position(|&x| x == from[i]).expect("same labels"));
    let mut sign = 1;
    for i in 0..5 {
        while perm[i] != i {
            let j = perm[i];
            perm.swap(i, j);
            sign = -sign;
        }
    }
    sign
}

/// `t` rearranged as (sorted facet, apex) for the facet omitting `apex`.
fn facet_then_apex(t: &[u8; 5], apex: u8) -> [u8; 5] {
    let mut f: Vec<u8> = t.iter().copied().filter(|&x| x != apex).collect();
    f.sort_unstable();
    [f[0], f[1], f[2], f[3], apex]
}

fn facet_keys(t: &[u8; 5]) -> Vec<([u8; 4], u8)> {
    (0..5)
        .map(|skip| {
            let mut f: Vec<u8> = t.iter().copied().filter(|&x| x != t[skip]).collect();
            f.sort_unstable();
            ([f[0], f[1], f[2], f[3]], t[skip])
        })
        .collect()
}

/// Sorted boundary facets (facets used by exactly one tuple).
pub(crate) fn boundary(tuples: &[[u8; 5]]) -> Vec<[u8; 4]> {
    let mut count: HashMap<[u8; 4], usize> = HashMap::new();
    for t in tuples {
        for (f, _) in facet_keys(t) {
            *count.entry(f).or_default() += 1;
        }
    }
    let mut b: Vec<[u8; 4]> = count
        .into_iter()
        .filter(|&(_, n)| n == 1)
        .map(|(f, _)| f)
        .collect();
    b.sort_unstable();
    b
}

/// Relative orientation signs of all tuples in both stages, or `None` if
/// the combinatorics admit no consistent realization.
fn orientation_signs(s1: &[[u8; 5]], s2: &[[u8; 5]]) -> Option<(Vec<i8>, Vec<i8>)> {
    let all: Vec<[u8; 5]> = s1.iter().chain(s2).copied().collect();
    let n1 = s1.len();
    let stage = |i: usize| usize::from(i >= n1);
    let b1 = boundary(s1);
    let b2 = boundary(s2);
    // facet -> list of (tuple, apex)
    let mut by_facet: HashMap<[u8; 4], Vec<(usize, u8)>> = HashMap::new();
    for (i, t) in all.iter().enumerate() {
        for (f, apex) in facet_keys(t) {
            by_facet.entry(f).or_default().push((i, apex));
        }
    }
    let mut sign: Vec<Option<i8>> = vec![None; all.len()];
    sign[0] = Some(1);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let si = sign[i].unwrap();
        for (f, apex) in facet_keys(&all[i]) {
            let pi = parity(&all[i], &facet_then_apex(&all[i], apex));
            for &(j, apex_j) in &by_facet[&f] {
                if j == i {
                    continue;
                }
                let same_stage = stage(i) == stage(j);
                if !same_stage && !(b1.binary_search(&f).is_ok() && b2.binary_search(&f).is_ok()) {
                    continue;
                }
                let pj = parity(&all[j], &facet_then_apex(&all[j], apex_j));
                // Neighbours in one stage sit on opposite sides of the facet;
                // a boundary facet sees both stages from the same side.
                let sj = if same_stage {
                    -si * pi * pj
                } else {
                    si * pi * pj
                };
                match sign[j] {
                    None => {
                        sign[j] = Some(sj);
                        queue.push_back(j);
                    }
                    Some(x) if x != sj => return None,
                    Some(_) => {}
                }
            }
        }
    }
    let signs: Option<Vec<i8>> = sign.into_iter().collect();
    let signs = signs?;
    Some((signs[..n1].to_vec(), signs[n1..].to_vec()))
}

/// Label automorphisms of `stage1` (fixing the core as a set), reduced to one
/// representative per image of `stage2`.
fn symmetries(
    stage1: &[[u8; 5]],
    stage2: &[[u8; 5]],
    core: &[u8],
    n_labels: usize,
    order: &[usize],
) -> Vec<(Vec<u8>, Vec<usize>)> {
    let targets: Vec<[u32; 5]> = stage1.iter().map(|t| t.map(u32::from)).collect();
    let core_targets: Vec<u32> = core.iter().map(|&l| u32::from(l)).collect();
    let found = super::matching::Matcher::new(
        stage1,
        order.to_vec(),
        core,
        n_labels,
        &core_targets,
        &targets,
        false,
    )
    .run();
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for (map, tuples) in found {
        let perm: Vec<u8> = map
            .iter()
            .enumerate()
            .map(|(i, &v)| if v == u32::MAX { i as u8 + 1 } else { v as u8 })
            .collect();
        let mut image: Vec<[u8; 5]> = stage2
            .iter()
            .map(|t| {
                let mut m = t.map(|l| perm[l as usize - 1]);
                m.sort_unstable();
                m
            })
            .collect();
        image.sort_unstable();
        if seen.insert(image) {
            out.push((perm, tuples));
        }
    }
    out
}

impl FlipTable {
    fn build(kind: FlipKind) -> FlipTable {
        let (stage1, stage2) =
            if kind == kind.reverse() || kind.inserts_point() || matches!(kind, F2_4 | F4_6) {
                forward(kind)
            } else {
                let (a, b) = forward(kind.reverse());
                (b, a)
            };
        let l1 = labels(&stage1);
        let l2 = labels(&stage2);
        let new_label = l2.iter().copied().find(|l| !l1.contains(l));
        let removed_label = l1.iter().copied().find(|l| !l2.contains(l));
        let core = common(&stage1);
        let new_vertex_rule = match (new_label, core.len()) {
            (None, _) => NewVertexRule::None,
            (Some(_), 2) => NewVertexRule::EdgeMidpoint,
            (Some(_), 3) => NewVertexRule::TriangleCentroid,
            (Some(_), 4) => NewVertexRule::TetCentroid,
            (Some(_), _) => NewVertexRule::ElementCentroid,
        };
        let (sign1, sign2) =
            orientation_signs(&stage1, &stage2).expect("flip table admits a realization");
        let n_labels = l1.len() + usize::from(new_label.is_some());
        let search_order = super::matching::search_order(&stage1);
        let symmetries = symmetries(&stage1, &stage2, &core, n_labels, &search_order);
        FlipTable {
            symmetries,
            search_order,
            kind,
            vertex_count: l1.len(),
            stage1,
            stage2,
            core,
            new_label,
            removed_label,
            new_vertex_rule,
            sign1,
            sign2,
        }
    }

    /// Boundary facets of stage 1 and stage 2, each sorted.
    pub fn boundaries(&self) -> (Vec<[u8; 4]>, Vec<[u8; 4]>) {
        (boundary(&self.stage1), boundary(&self.stage2))
    }
}

/// Labels needed by a basic flip acting on `k` simplices in `d` dimensions.
pub fn flip_vertex_count(d: usize, k: usize) -> usize {
    if k == 1 {
        d + 1
    } else {
        d + 2
    }
}
