//! Backtracking assignment of table labels to vertices.

use itertools::Itertools;

/// Assigns labels `1..=n_labels` to vertices so that every pattern tuple
/// maps onto a distinct target set and core labels land on `core_targets`.
pub(crate) struct Matcher<'a> {
    pattern: &'a [[u8; 5]],
    core: &'a [u8],
    core_targets: &'a [u32],
    targets: &'a [[u32; 5]],
    order: Vec<usize>,
    map: Vec<Option<u32>>,
    tuple_target: Vec<Option<usize>>,
    used: Vec<bool>,
    first_only: bool,
    found: Vec<(Vec<u32>, Vec<usize>)>,
}

/// Pattern order in which each tuple overlaps the earlier ones as much as
/// possible, so the search prunes early.
pub(crate) fn search_order(pattern: &[[u8; 5]]) -> Vec<usize> {
    let n = pattern.len();
    let mut order = vec![0];
    let mut seen: Vec<u8> = pattern[0].to_vec();
    while order.len() < n {
        let next = (0..n)
            .filter(|i| !order.contains(i))
            .max_by_key(|&i| {
                (
                    pattern[i].iter().filter(|l| seen.contains(l)).count(),
                    std::cmp::Reverse(i),
                )
            })
            .unwrap();
        seen.extend(pattern[next]);
        order.push(next);
    }
    order
}

impl<'a> Matcher<'a> {
    pub(crate) fn new(
        pattern: &'a [[u8; 5]],
        order: Vec<usize>,
        core: &'a [u8],
        n_labels: usize,
        core_targets: &'a [u32],
        targets: &'a [[u32; 5]],
        first_only: bool,
    ) -> Self {
        Matcher {
            pattern,
            core,
            core_targets,
            targets,
            order,
            map: vec![None; n_labels],
            tuple_target: vec![None; pattern.len()],
            used: vec![false; targets.len()],
            first_only,
            found: Vec::new(),
        }
    }

    /// Each match as the label map (index `l - 1`, `u32::MAX` for labels
    /// absent from the pattern) and the target index of every pattern tuple.
    pub(crate) fn run(mut self) -> Vec<(Vec<u32>, Vec<usize>)> {
        if self.targets.len() == self.pattern.len() {
            self.recurse(0);
        }
        self.found
    }

    fn done(&self) -> bool {
        self.first_only && !self.found.is_empty()
    }

    fn recurse(&mut self, depth: usize) {
        if depth == self.order.len() {
            let labels = self.map.iter().map(|v| v.unwrap_or(u32::MAX)).collect();
            let tuples = self.tuple_target.iter().map(|t| t.unwrap()).collect();
            self.found.push((labels, tuples));
            return;
        }
        let ti = self.order[depth];
        let tuple = self.pattern[ti];
        for ei in 0..self.targets.len() {
            if self.used[ei] || self.done() {
                continue;
            }
            let verts = self.targets[ei];
            let assigned: Vec<u32> = tuple
                .iter()
                .filter_map(|&l| self.map[l as usize - 1])
                .collect();
            if !assigned.iter().all(|v| verts.contains(v)) {
                continue;
            }
            let foreign = verts.iter().any(|v| {
                self.map
                    .iter()
                    .enumerate()
                    .any(|(i, m)| *m == Some(*v) && !tuple.contains(&(i as u8 + 1)))
            });
            if foreign {
                continue;
            }
            let free_labels: Vec<u8> = tuple
                .iter()
                .copied()
                .filter(|&l| self.map[l as usize - 1].is_none())
                .collect();
            let free_verts: Vec<u32> = verts
                .iter()
                .copied()
                .filter(|v| !assigned.contains(v))
                .collect();
            for perm in free_verts.iter().copied().permutations(free_verts.len()) {
                if self.done() {
                    return;
                }
                let ok = free_labels
                    .iter()
                    .zip(&perm)
                    .all(|(l, v)| self.core.contains(l) == self.core_targets.contains(v));
                if !ok {
                    continue;
                }
                for (&l, &v) in free_labels.iter().zip(&perm) {
                    self.map[l as usize - 1] = Some(v);
                }
                self.used[ei] = true;
                self.tuple_target[ti] = Some(ei);
                self.recurse(depth + 1);
                self.tuple_target[ti] = None;
                self.used[ei] = false;
                for &l in &free_labels {
                    self.map[l as usize - 1] = None;
                }
            }
        }
    }
}
