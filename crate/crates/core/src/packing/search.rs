//! Branch-and-bound maximum-weight packing over a finite candidate set.

use alloc::vec;
use alloc::vec::Vec;

/// Relative tolerance below which a branch cannot improve the incumbent.
const IMPROVEMENT_TOLERANCE: f64 = 1e-12;

/// Default number of search nodes before the search stops early.
pub const NODE_BUDGET: u64 = 4_000_000;

/// Best packing found: total weight and the chosen candidate indices.
#[derive(Clone, Debug, PartialEq)]
pub struct PackingSolution {
    /// Weight of the best packing found.
    pub value: f64,
    pub chosen: Vec<usize>,
    /// Upper bound of the optimum; equals `value` when the search completed.
    pub upper: f64,
    /// Whether every branch was either explored or pruned by its bound.
    pub complete: bool,
    pub nodes: u64,
}

/// Largest candidate set accepted (the compatibility matrix is stored as bits).
pub const MAX_SEARCH_CANDIDATES: usize = 1 << 14;

/// Maximum of `Σ_{i∈J} w_i` over sets `J` of at most `cap` pairwise compatible
/// candidates.
///
/// `groups[i]` labels cliques of the conflict graph (candidates sharing a label
/// must conflict pairwise); they tighten the bound and may all be distinct.
/// Weights must be nonnegative and at most [`MAX_SEARCH_CANDIDATES`] of them
/// positive. After `budget` nodes the remaining branches are not explored;
/// their bounds enter [`PackingSolution::upper`].
pub fn max_weight_packing<C>(weights: &[f64], groups: &[usize], cap: usize, budget: u64, conflict: C) -> PackingSolution
where
    C: Fn(usize, usize) -> bool,
{
    assert_eq!(weights.len(), groups.len());
    let mut order: Vec<usize> = (0..weights.len()).filter(|&i| weights[i] > 0.0).collect();
    assert!(order.len() <= MAX_SEARCH_CANDIDATES, "too many packing candidates");
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
    let m = order.len();
    let words = m.div_ceil(64);
    // compat[p] holds the ranks q > p compatible with rank p
    let mut compat = vec![0u64; m * words];
    for p in 0..m {
        for q in p + 1..m {
            if !conflict(order[p], order[q]) {
                compat[p * words + q / 64] |= 1 << (q % 64);
            }
        }
    }
    let group_count = groups.iter().copied().max().map_or(0, |g| g + 1);
    let mut search = Search {
        weight: order.iter().map(|&i| weights[i]).collect(),
        group: order.iter().map(|&i| groups[i]).collect(),
        compat,
        words,
        cap,
        suffix: vec![0.0; m + 1],
        best: 0.0,
        best_set: Vec::new(),
        current: Vec::with_capacity(cap),
        seen: vec![0; group_count],
        stamp: 0,
        nodes: 0,
        budget,
        open_bound: 0.0,
        exhausted: false,
    };
    if cap > 0 {
        // solve the suffixes of the rank order from the lightest end; each optimum bounds later searches
        for i in (0..m).rev() {
            if search.exhausted {
                search.suffix[i] = search.suffix[i + 1] + search.weight[i];
                continue;
            }
            search.best = search.suffix[i + 1];
            search.open_bound = 0.0;
            let allowed = search.row(i).to_vec();
            search.current.push(i);
            search.explore(search.weight[i], allowed);
            search.current.pop();
            search.suffix[i] = search.best.max(search.open_bound);
        }
    }
    let value = search.best_set.iter().map(|&p| search.weight[p]).sum();
    let mut chosen: Vec<usize> = search.best_set.iter().map(|&p| order[p]).collect();
    chosen.sort_unstable();
    PackingSolution {
        value,
        chosen,
        upper: search.suffix[0],
        complete: !search.exhausted,
        nodes: search.nodes,
    }
}

fn first_bit(set: &[u64]) -> Option<usize> {
    set.iter()
        .enumerate()
        .find(|(_, w)| **w != 0)
        .map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
}

struct Search {
    /// Weights and clique labels by rank (heaviest first).
    weight: Vec<f64>,
    group: Vec<usize>,
    compat: Vec<u64>,
    words: usize,
    cap: usize,
    /// `suffix[i]`: optimum (or bound) over ranks `i..`.
    suffix: Vec<f64>,
    best: f64,
    best_set: Vec<usize>,
    current: Vec<usize>,
    seen: Vec<u32>,
    stamp: u32,
    nodes: u64,
    budget: u64,
    /// Largest bound among branches of the current suffix left unexplored.
    open_bound: f64,
    exhausted: bool,
}

impl Search {
    fn row(&self, p: usize) -> &[u64] {
        &self.compat[p * self.words..(p + 1) * self.words]
    }

    fn threshold(&self) -> f64 {
        self.best * (1.0 + IMPROVEMENT_TOLERANCE)
    }

    /// Sum of the `room` largest per-clique maxima in `allowed`.
    fn group_bound(&mut self, allowed: &[u64], room: usize) -> f64 {
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.seen.iter_mut().for_each(|s| *s = 0);
            self.stamp = 1;
        }
        let mut total = 0.0;
        let mut taken = 0;
        for (k, &word) in allowed.iter().enumerate() {
            let mut w = word;
            while w != 0 {
                let p = k * 64 + w.trailing_zeros() as usize;
                w &= w - 1;
                let g = self.group[p];
                if self.seen[g] != self.stamp {
                    self.seen[g] = self.stamp;
                    total += self.weight[p];
                    taken += 1;
                    if taken == room {
                        return total;
                    }
                }
            }
        }
        total
    }

    fn explore(&mut self, value: f64, mut allowed: Vec<u64>) {
        self.nodes += 1;
        if value > self.best {
            self.best = value;
            self.best_set = self.current.clone();
        }
        let room = self.cap - self.current.len();
        let Some(head) = first_bit(&allowed) else {
            return;
        };
        if room == 0 {
            return;
        }
        let bound = value + self.suffix[head].min(self.group_bound(&allowed, room));
        if bound <= self.threshold() {
            return;
        }
        if self.nodes >= self.budget {
            self.exhausted = true;
            self.open_bound = self.open_bound.max(bound);
            return;
        }
        while let Some(p) = first_bit(&allowed) {
            // suffix optima decrease with rank
            if value + self.suffix[p] <= self.threshold() {
                break;
            }
            allowed[p / 64] &= !(1 << (p % 64));
            let child: Vec<u64> = allowed.iter().zip(self.row(p)).map(|(a, b)| a & b).collect();
            self.current.push(p);
            self.explore(value + self.weight[p], child);
            self.current.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force(weights: &[f64], cap: usize, conflict: &dyn Fn(usize, usize) -> bool) -> f64 {
        let n = weights.len();
        let mut best = 0.0f64;
        for mask in 0u32..(1 << n) {
            let set: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            if set.len() > cap {
                continue;
            }
            let ok = set.iter().enumerate().all(|(a, &i)| set[a + 1..].iter().all(|&j| !conflict(i, j)));
            if ok {
                best = best.max(set.iter().map(|&i| weights[i]).sum());
            }
        }
        best
    }

    #[test]
    fn path_graph() {
        // conflicts between neighbours on a path
        let w = [3.0, 4.0, 3.0, 1.0, 5.0];
        let groups = [0, 1, 2, 3, 4];
        let conflict = |i: usize, j: usize| i.abs_diff(j) == 1;
        let s = max_weight_packing(&w, &groups, 5, NODE_BUDGET, conflict);
        assert_eq!(s.value, 11.0);
        assert_eq!(s.chosen, vec![0, 2, 4]);
        let s = max_weight_packing(&w, &groups, 1, NODE_BUDGET, conflict);
        assert_eq!(s.value, 5.0);
    }

    #[test]
    fn matches_brute_force_on_pseudo_random_graphs() {
        let mut state = 0x2545_f491_4f6c_dd1du64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..200 {
            let n = 1 + (next() % 12) as usize;
            let weights: Vec<f64> = (0..n).map(|_| (next() % 100) as f64 / 10.0).collect();
            let edges: Vec<bool> = (0..n * n).map(|_| next() % 3 == 0).collect();
            let conflict = |i: usize, j: usize| edges[i.min(j) * n + i.max(j)];
            let cap = 1 + (next() % n as u64) as usize;
            let groups: Vec<usize> = (0..n).collect();
            let got = max_weight_packing(&weights, &groups, cap, NODE_BUDGET, conflict);
            let want = brute_force(&weights, cap, &conflict);
            assert!((got.value - want).abs() < 1e-12, "{} vs {want}", got.value);
            assert!(got.complete && got.upper == got.value);
            assert!(got.chosen.len() <= cap);
            let cut = max_weight_packing(&weights, &groups, cap, 2, conflict);
            assert!(cut.value <= want + 1e-12 && cut.upper >= want - 1e-12);
        }
    }
}
