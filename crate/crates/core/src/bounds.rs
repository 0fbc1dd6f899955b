//! Explicit inequalities and asymptotic regimes checked numerically: Gaussian
//! lattice sums against their quadratic bound, the Laplace-functional
//! coefficient, finite-n tail probabilities, weak-growth budgets, tail-slope
//! fits and the Laplace upper bound of the IDS.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::BoxDomain;
use crate::interaction::{EnergyKind, InteractionModel, PairPotential};
use crate::num::{self, Energy};
use crate::packing::InteractionWindow;
use crate::schrodinger::IdsEstimate;

/// Largest number of cells in lattice sums and exhaustive subset enumeration.
pub const MAX_LATTICE_CELLS: usize = 8;

/// Largest number of cells for which `K` is enumerated exhaustively.
pub const MAX_GRAPH_CELLS: usize = 20;

/// Largest per-axis truncation of a lattice sum.
pub const MAX_TRUNCATION: u64 = 1 << 20;

/// Subtrees whose bound lies this far (in log) below the running sum are bounded, not summed.
const PRUNE_DEPTH: f64 = 60.0;

/// Largest relative CI width of `N̂(λ)` admitted into a slope fit.
pub const MAX_RELATIVE_CI_WIDTH: f64 = 0.5;

fn check_edges(k: usize, edges: &[(usize, usize)]) -> Result<()> {
    for &(i, j) in edges {
        if !(i < j && j < k) {
            return Err(Error::invalid("edges", alloc::format!("edge ({i}, {j}) must satisfy i < j < {k}")));
        }
    }
    Ok(())
}

fn check_weights(v: &[f64], max: usize) -> Result<()> {
    if v.is_empty() || v.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(Error::invalid("v", "weights must be positive and finite"));
    }
    if v.len() > max {
        return Err(Error::TooLarge {
            what: "cells",
            count: v.len(),
            max,
        });
    }
    Ok(())
}

fn positive(name: &'static str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, "must be positive and finite"))
    }
}

/// Running `log Σ exp(x_i)`.
#[derive(Clone, Copy, Debug)]
struct LogAccumulator {
    max: f64,
    scaled: f64,
}

impl LogAccumulator {
    fn new() -> Self {
        LogAccumulator {
            max: f64::NEG_INFINITY,
            scaled: 0.0,
        }
    }

    fn add(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x > self.max {
            self.scaled = self.scaled * num::exp(self.max - x) + 1.0;
            self.max = x;
        } else {
            self.scaled += num::exp(x - self.max);
        }
    }

    fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + num::ln(self.scaled)
        }
    }
}

/// `log G(t; I)` with its parts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeSum {
    /// `log` of the summed terms plus both remainder bounds.
    pub log_value: f64,
    /// `log` of the terms actually summed.
    pub log_head: f64,
    /// `log` bound of the mass beyond the truncation and of pruned subtrees.
    pub log_remainder: f64,
    /// Per-axis truncation `N`: indices `0..=N` are summed.
    pub truncation: u64,
}

/// `⌈t max v / (2c)⌉ + ⌈40 / √c⌉`.
pub fn lattice_truncation(c: f64, v: &[f64], t: f64) -> u64 {
    let vmax = v.iter().copied().fold(0.0, f64::max);
    (num::ceil(t * vmax / (2.0 * c)) + num::ceil(40.0 / num::sqrt(c))) as u64
}

/// `log Σ_{n ∈ ℕ^k} exp(-c Σ n_j² - 2c Σ_{(i,j)∈I} n_i n_j + t Σ v_j n_j)`.
///
/// Edges are 0-based pairs `(i, j)` with `i < j`. The terms inside `[0, N]^k`
/// are summed (subtrees negligible against the running sum are bounded
/// instead); the remainder is bounded with the cross terms dropped. `N` starts
/// at [`lattice_truncation`] and grows until that bound is below
/// [`LATTICE_TAIL_FRACTION`] of the summed mass.
pub fn gaussian_lattice_sum(c: f64, v: &[f64], edges: &[(usize, usize)], t: f64) -> Result<LatticeSum> {
    positive("c", c)?;
    check_weights(v, MAX_LATTICE_CELLS)?;
    check_edges(v.len(), edges)?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::invalid("t", "must be nonnegative and finite"));
    }
    let k = v.len();
    let target = num::ln(LATTICE_TAIL_FRACTION);
    let mut n_max = lattice_truncation(c, v, t);
    loop {
        if n_max > MAX_TRUNCATION {
            return Err(Error::TooLarge {
                what: "lattice truncation",
                count: n_max as usize,
                max: MAX_TRUNCATION as usize,
            });
        }
        let (sum, log_full) = truncated_lattice_sum(c, v, edges, t, n_max);
        if sum.log_remainder - sum.log_head <= target {
            return Ok(sum);
        }
        // smallest N whose axis tails fall below the target given the other axes' full sums
        let total: f64 = log_full.iter().sum();
        let budget = sum.log_head + target - num::ln(2.0 * k as f64);
        let mut next = n_max + 1;
        for j in 0..k {
            let b = budget - (total - log_full[j]);
            let disc = t * t * v[j] * v[j] - 4.0 * c * b;
            if disc > 0.0 {
                let m = (t * v[j] + num::sqrt(disc)) / (2.0 * c);
                next = next.max(num::ceil(m) as u64);
            }
        }
        n_max = next;
    }
}

/// Remainder below which the truncation stops growing, relative to the summed mass.
pub const LATTICE_TAIL_FRACTION: f64 = 1e-12;

fn truncated_lattice_sum(c: f64, v: &[f64], edges: &[(usize, usize)], t: f64, n_max: u64) -> (LatticeSum, Vec<f64>) {
    let k = v.len();
    let term = |j: usize, n: f64| -c * n * n + t * v[j] * n;
    // per-axis sums without cross terms: head over 0..=N, geometric bound beyond
    let mut log_head_axis = Vec::with_capacity(k);
    let mut log_tail_axis = Vec::with_capacity(k);
    let mut log_full_axis = Vec::with_capacity(k);
    for j in 0..k {
        let mut acc = LogAccumulator::new();
        for n in 0..=n_max {
            acc.add(term(j, n as f64));
        }
        let first = (n_max + 1) as f64;
        let ratio = -c * (2.0 * first + 1.0) + t * v[j];
        let tail = term(j, first) - num::ln(-num::exp_m1(ratio));
        log_head_axis.push(acc.value());
        log_tail_axis.push(tail);
        log_full_axis.push(num::log_add_exp(acc.value(), tail));
    }
    // log bound of the remaining axes j..k
    let mut rest = vec![0.0; k + 1];
    for j in (0..k).rev() {
        rest[j] = rest[j + 1] + log_full_axis[j];
    }
    let mut neighbours: Vec<Vec<usize>> = vec![Vec::new(); k];
    for &(i, j) in edges {
        neighbours[j].push(i);
    }
    let mut walk = LatticeWalk {
        c,
        t,
        v,
        n_max,
        neighbours: &neighbours,
        rest: &rest,
        floor: log_head_axis.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        counts: vec![0; k],
        head: LogAccumulator::new(),
        pruned: LogAccumulator::new(),
    };
    walk.visit(0, 0.0);
    let mut remainder = walk.pruned;
    for j in 0..k {
        remainder.add(log_tail_axis[j] + rest[0] - log_full_axis[j]);
    }
    let log_head = walk.head.value();
    let log_remainder = remainder.value();
    let sum = LatticeSum {
        log_value: num::log_add_exp(log_head, log_remainder),
        log_head,
        log_remainder,
        truncation: n_max,
    };
    (sum, log_full_axis)
}

struct LatticeWalk<'a> {
    c: f64,
    t: f64,
    v: &'a [f64],
    n_max: u64,
    neighbours: &'a [Vec<usize>],
    rest: &'a [f64],
    /// A lower bound of the full sum (largest single-axis head).
    floor: f64,
    counts: Vec<u64>,
    head: LogAccumulator,
    pruned: LogAccumulator,
}

impl LatticeWalk<'_> {
    fn visit(&mut self, axis: usize, exponent: f64) {
        let k = self.v.len();
        if axis == k {
            self.head.add(exponent);
            return;
        }
        let coupling: u64 = self.neighbours[axis].iter().map(|&i| self.counts[i]).sum();
        for n in 0..=self.n_max {
            let nf = n as f64;
            let e = exponent - self.c * nf * nf - 2.0 * self.c * nf * coupling as f64 + self.t * self.v[axis] * nf;
            let bound = e + self.rest[axis + 1];
            if bound < self.floor.max(self.head.value()) - PRUNE_DEPTH {
                self.pruned.add(bound);
                continue;
            }
            self.counts[axis] = n;
            self.visit(axis + 1, e);
        }
        self.counts[axis] = 0;
    }
}

/// Heaviest subset `J` with no edge inside it: `(Σ_{j∈J} w_j, J as a bit mask)`.
pub fn max_independent_weight(weights: &[f64], edges: &[(usize, usize)]) -> Result<(f64, u32)> {
    let k = weights.len();
    if k > MAX_GRAPH_CELLS {
        return Err(Error::TooLarge {
            what: "cells",
            count: k,
            max: MAX_GRAPH_CELLS,
        });
    }
    check_edges(k, edges)?;
    let mut best = (0.0, 0u32);
    for mask in 0u32..(1 << k) {
        if edges.iter().any(|&(i, j)| mask >> i & 1 == 1 && mask >> j & 1 == 1) {
            continue;
        }
        let w: f64 = (0..k).filter(|j| mask >> j & 1 == 1).map(|j| weights[j]).sum();
        if w > best.0 {
            best = (w, mask);
        }
    }
    Ok(best)
}

/// `(1+ε) (max_{J∈K_I} Σ_{j∈J} v_j²) t² / (4c)`, the log of the quadratic bound.
pub fn int_lem_bound(c: f64, v: &[f64], edges: &[(usize, usize)], t: f64, eps: f64) -> Result<f64> {
    positive("c", c)?;
    positive("eps", eps)?;
    check_weights(v, MAX_LATTICE_CELLS)?;
    let squares: Vec<f64> = v.iter().map(|x| x * x).collect();
    let (w, _) = max_independent_weight(&squares, edges)?;
    Ok((1.0 + eps) * w * t * t / (4.0 * c))
}

/// `count` points from `lo` to `hi` in geometric progression.
pub fn geometric_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    positive("lo", lo)?;
    if !(hi.is_finite() && hi > lo) || count < 2 {
        return Err(Error::invalid("grid", "needs 0 < lo < hi and at least two points"));
    }
    let ratio = num::ln(hi / lo) / (count - 1) as f64;
    Ok((0..count).map(|i| lo * num::exp(ratio * i as f64)).collect())
}

/// Lattice sum against the quadratic bound at one `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdRow {
    pub t: f64,
    pub lattice_sum: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Outcome of a threshold scan.
#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdScan {
    /// Smallest grid `t` from which the inequality holds at every later grid point.
    pub threshold: Option<f64>,
    pub rows: Vec<ThresholdRow>,
    /// Grid points where the inequality fails.
    pub violations: Vec<f64>,
}

/// Locates the `t` beyond which `log G(t; I) ≤ int_lem_bound` on the grid `ts`.
pub fn find_validity_threshold(
    c: f64,
    v: &[f64],
    edges: &[(usize, usize)],
    eps: f64,
    ts: &[f64],
) -> Result<ThresholdScan> {
    if ts.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("t", "grid must be strictly increasing"));
    }
    let rows = ts
        .iter()
        .map(|&t| {
            let lattice_sum = gaussian_lattice_sum(c, v, edges, t)?.log_value;
            let bound = int_lem_bound(c, v, edges, t, eps)?;
            Ok(ThresholdRow {
                t,
                lattice_sum,
                bound,
                holds: lattice_sum <= bound,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let violations: Vec<f64> = rows.iter().filter(|r| !r.holds).map(|r| r.t).collect();
    let threshold = match rows.iter().rposition(|r| !r.holds) {
        None => rows.first().map(|r| r.t),
        Some(last) if last + 1 < rows.len() => Some(rows[last + 1].t),
        Some(_) => None,
    };
    Ok(ThresholdScan {
        threshold,
        rows,
        violations,
    })
}

/// Cells `Λ_1..Λ_k` with the edge set `I` of pairs whose differences all lie in `S`.
#[derive(Clone, Debug, PartialEq)]
pub struct InteractionGraph {
    cells: Vec<BoxDomain>,
    edges: Vec<(usize, usize)>,
}

impl InteractionGraph {
    /// Closed cells; `(i, j) ∈ I` when the difference box `Λ_i - Λ_j` lies in `S`.
    pub fn new(cells: Vec<BoxDomain>, s: &InteractionWindow) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::invalid("cells", "need at least one cell"));
        }
        for c in &cells {
            if c.dim() != s.dim() {
                return Err(Error::DimensionMismatch {
                    expected: s.dim(),
                    found: c.dim(),
                });
            }
        }
        let mut edges = Vec::new();
        for i in 0..cells.len() {
            for j in i + 1..cells.len() {
                let (lo, hi) = difference_box(&cells[i], &cells[j]);
                if s.contains_closed_box(&lo, &hi) {
                    edges.push((i, j));
                }
            }
        }
        Ok(InteractionGraph { cells, edges })
    }

    pub fn cells(&self) -> &[BoxDomain] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// `I`, as 0-based pairs `(i, j)` with `i < j`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn in_i(&self, i: usize, j: usize) -> bool {
        let (a, b) = (i.min(j), i.max(j));
        self.edges.contains(&(a, b))
    }

    /// Membership in `K`: no pair of `members` lies in `I`.
    pub fn in_k(&self, members: &[usize]) -> bool {
        members
            .iter()
            .enumerate()
            .all(|(a, &i)| members[a + 1..].iter().all(|&j| i == j || !self.in_i(i, j)))
    }

    /// All members of `K` as bit masks.
    pub fn k_family(&self) -> Result<Vec<u32>> {
        let k = self.cells.len();
        if k > MAX_GRAPH_CELLS {
            return Err(Error::TooLarge {
                what: "cells",
                count: k,
                max: MAX_GRAPH_CELLS,
            });
        }
        Ok((0u32..(1 << k))
            .filter(|mask| !self.edges.iter().any(|&(i, j)| mask >> i & 1 == 1 && mask >> j & 1 == 1))
            .collect())
    }
}

/// `Λ_i - Λ_j` as a closed box.
fn difference_box(a: &BoxDomain, b: &BoxDomain) -> (Vec<f64>, Vec<f64>) {
    let d = a.dim();
    let lo = (0..d).map(|k| a.lower(k) - b.upper(k)).collect();
    let hi = (0..d).map(|k| a.upper(k) - b.lower(k)).collect();
    (lo, hi)
}

/// The Laplace-functional coefficient `(1/2a) max_{J∈K} Σ v_j²` with its maximizer.
#[derive(Clone, Debug, PartialEq)]
pub struct UpperLapBound {
    pub coefficient: f64,
    /// Maximizing member of `K`.
    pub members: Vec<usize>,
    pub graph: InteractionGraph,
}

/// Coefficient bounding `limsup t⁻² log E exp(t Σ v(x_j))` for `v = Σ v_j 1_{Λ_j}`
/// under a pairwise process with `φ ≥ a` on `S`.
pub fn upper_lap_bound(cells: Vec<BoxDomain>, v: &[f64], s: &InteractionWindow, a: f64) -> Result<UpperLapBound> {
    positive("a", a)?;
    check_weights(v, MAX_GRAPH_CELLS)?;
    if cells.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: cells.len(),
            found: v.len(),
        });
    }
    for (index, cell) in cells.iter().enumerate() {
        let (lo, hi) = difference_box(cell, cell);
        if cell.dim() == s.dim() && !s.contains_closed_box(&lo, &hi) {
            let mut corner = [0.0; 3];
            for (k, c) in corner.iter_mut().enumerate().take(cell.dim()) {
                *c = hi[k];
            }
            return Err(Error::CellNotInWindow { cell: index, corner });
        }
    }
    for i in 0..cells.len() {
        for j in i + 1..cells.len() {
            let overlap: f64 = (0..cells[i].dim())
                .map(|k| (cells[i].upper(k).min(cells[j].upper(k)) - cells[i].lower(k).max(cells[j].lower(k))).max(0.0))
                .product();
            if overlap > 1e-12 * cells[i].volume().min(cells[j].volume()) {
                return Err(Error::invalid("cells", alloc::format!("cells {i} and {j} overlap")));
            }
        }
    }
    let graph = InteractionGraph::new(cells, s)?;
    let squares: Vec<f64> = v.iter().map(|x| x * x).collect();
    let (w, mask) = max_independent_weight(&squares, graph.edges())?;
    Ok(UpperLapBound {
        coefficient: w / (2.0 * a),
        members: (0..v.len()).filter(|j| mask >> j & 1 == 1).collect(),
        graph,
    })
}

/// Upper bound of `sup U` over `n` points in `window`.
pub fn energy_sup(model: &InteractionModel, window: &BoxDomain, n: u64) -> Energy {
    let pairs = (n * n.saturating_sub(1) / 2) as f64;
    match model.kind() {
        EnergyKind::Null => Energy::ZERO,
        EnergyKind::Pairwise(p) => {
            if n < 2 {
                return Energy::ZERO;
            }
            match p {
                PairPotential::Strauss { strength, .. } => Energy::Finite(strength * pairs),
                _ => p.sup_within(window.diameter()).scale(pairs),
            }
        }
        EnergyKind::Area { .. } => {
            let ball = model.ball_volume().unwrap_or(0.0);
            let reach = window.parallel_volume(model.range() / 2.0);
            Energy::Finite((n as f64 * ball).min(reach))
        }
    }
}

/// `log P(M_Λ = n) ≥ -z|Λ_R| + n log|Λ| - log n! - sup U` with `Λ_R = Λ + B(0, R)`.
pub fn tail_lower_bound(window: &BoxDomain, n: u64, model: &InteractionModel, z: f64) -> Result<f64> {
    positive("z", z)?;
    if window.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: window.dim(),
            found: model.dim(),
        });
    }
    let reach = window.parallel_volume(model.range());
    let base = -z * reach + n as f64 * num::ln(window.volume()) - num::ln_factorial(n);
    Ok(match energy_sup(model, window, n) {
        Energy::Finite(u) => base - u,
        Energy::Infinite => f64::NEG_INFINITY,
    })
}

/// `log P(M_{Λ_j} = n_j ∀j) ≤ |Λ| + Σ (n_j log|Λ_j| - log n_j!) - (a/2) Σ n_j(n_j-1) - a Σ_I n_i n_j`.
pub fn tail_upper_bound(cells: &[BoxDomain], counts: &[u64], a: f64, edges: &[(usize, usize)]) -> Result<f64> {
    if cells.len() != counts.len() {
        return Err(Error::DimensionMismatch {
            expected: cells.len(),
            found: counts.len(),
        });
    }
    if !(a.is_finite() && a >= 0.0) {
        return Err(Error::invalid("a", "must be nonnegative and finite"));
    }
    check_edges(cells.len(), edges)?;
    let volume: f64 = cells.iter().map(|c| c.volume()).sum();
    let mut total = volume;
    for (cell, &n) in cells.iter().zip(counts) {
        let nf = n as f64;
        total += nf * num::ln(cell.volume()) - num::ln_factorial(n) - 0.5 * a * nf * (nf - 1.0);
    }
    for &(i, j) in edges {
        total -= a * counts[i] as f64 * counts[j] as f64;
    }
    Ok(total)
}

/// Energy budget of the weak growth condition with its ratio to `x log x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeakBudget {
    pub budget: f64,
    /// `budget / (x log x)`.
    pub ratio: f64,
    /// Radius `r(x)` of the packing ball (`NaN` when the budget does not depend on it).
    pub radius: f64,
}

/// Upper bound of `sup U(η_{B(0, r(x))})` over `n` points.
///
/// Area energies give `|B(0,R)| n`; soft-shell pair potentials give
/// `(n choose 2) sup_{|y| ≤ 2r} φ(y)` with `r(x) = (log x)^{-1/p} / 2`.
pub fn weak_condition_budget(model: &InteractionModel, n: u64, x: f64) -> Result<WeakBudget> {
    if !(x.is_finite() && x > 1.0) {
        return Err(Error::invalid("x", "must exceed 1"));
    }
    let scale = x * num::ln(x);
    let pairs = (n * n.saturating_sub(1) / 2) as f64;
    let (budget, radius) = match model.kind() {
        EnergyKind::Null => (0.0, f64::NAN),
        EnergyKind::Area { .. } => (model.ball_volume().unwrap_or(0.0) * n as f64, f64::NAN),
        EnergyKind::Pairwise(PairPotential::SoftShell { exponent, .. }) => {
            let r = 0.5 * num::powf(num::ln(x), -1.0 / exponent);
            let p = model.pair_potential().map(|p| p.sup_within(2.0 * r)).unwrap_or(Energy::ZERO);
            (pairs * p.value(), r)
        }
        EnergyKind::Pairwise(_) => {
            return Err(Error::Unsupported("weak-growth budgets need an area energy or a soft-shell potential"));
        }
    };
    Ok(WeakBudget {
        budget,
        ratio: budget / scale,
        radius,
    })
}

/// Which tail regime a slope fit targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailRegime {
    /// `log N / (λ log|λ|)`.
    Pastur,
    /// `log N / λ²`.
    Quadratic,
}

/// Transformed IDS ordinates over a fit window.
#[derive(Clone, Debug, PartialEq)]
pub struct SlopeFit {
    pub regime: TailRegime,
    /// Grid points admitted into the fit (`N̂ > 0`, narrow CI, and `λ < -1` for Pastur fits).
    pub lambdas: Vec<f64>,
    pub ordinates: Vec<f64>,
    /// Standard error of each ordinate (delta method).
    pub ordinate_errors: Vec<f64>,
    /// `[lo, hi]` of the fit window.
    pub window: (f64, f64),
    /// Mean ordinate over the fit window.
    pub plateau: f64,
    /// Conservative standard error of the plateau (mean of the ordinate errors).
    pub plateau_error: f64,
    /// `(max - min) / |mean|` of the ordinates in the window.
    pub relative_spread: f64,
    /// Predicted asymptotic value.
    pub target: f64,
}

impl SlopeFit {
    /// Ordinates inside the fit window.
    pub fn window_ordinates(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let (lo, hi) = self.window;
        self.lambdas
            .iter()
            .zip(&self.ordinates)
            .filter(move |(l, _)| **l >= lo && **l <= hi)
            .map(|(l, o)| (*l, *o))
    }

    /// Ratio of the plateau to the target.
    pub fn ratio_to_target(&self) -> f64 {
        self.plateau / self.target
    }
}

fn slope_fit(ids: &IdsEstimate, regime: TailRegime, target: f64, window: Option<(f64, f64)>) -> Result<SlopeFit> {
    let mut lambdas = Vec::new();
    let mut ordinates = Vec::new();
    let mut errors = Vec::new();
    for (i, &lambda) in ids.lambdas.iter().enumerate() {
        let n = ids.n_hat[i];
        if !(n > 0.0) || ids.ci_high[i] - ids.ci_low[i] >= MAX_RELATIVE_CI_WIDTH * n {
            continue;
        }
        let scale = match regime {
            TailRegime::Pastur => {
                if lambda >= -1.0 {
                    continue;
                }
                lambda * num::ln(-lambda)
            }
            TailRegime::Quadratic => {
                if lambda == 0.0 {
                    continue;
                }
                lambda * lambda
            }
        };
        lambdas.push(lambda);
        ordinates.push(num::ln(n) / scale);
        errors.push(ids.std_error[i] / n / scale.abs());
    }
    let mut order: Vec<usize> = (0..lambdas.len()).collect();
    order.sort_by(|&a, &b| lambdas[a].total_cmp(&lambdas[b]));
    let lambdas: Vec<f64> = order.iter().map(|&i| lambdas[i]).collect();
    let ordinates: Vec<f64> = order.iter().map(|&i| ordinates[i]).collect();
    let errors: Vec<f64> = order.iter().map(|&i| errors[i]).collect();
    let window = match window {
        Some(w) => w,
        None => {
            if lambdas.is_empty() {
                return Err(Error::EmptyFitWindow);
            }
            let take = lambdas.len().div_ceil(3);
            (lambdas[0], lambdas[take - 1])
        }
    };
    let inside: Vec<usize> = (0..lambdas.len())
        .filter(|&i| lambdas[i] >= window.0 && lambdas[i] <= window.1)
        .collect();
    if inside.is_empty() {
        return Err(Error::EmptyFitWindow);
    }
    let m = inside.len() as f64;
    let plateau = inside.iter().map(|&i| ordinates[i]).sum::<f64>() / m;
    let plateau_error = inside.iter().map(|&i| errors[i]).sum::<f64>() / m;
    let hi = inside.iter().map(|&i| ordinates[i]).fold(f64::NEG_INFINITY, f64::max);
    let lo = inside.iter().map(|&i| ordinates[i]).fold(f64::INFINITY, f64::min);
    Ok(SlopeFit {
        regime,
        lambdas,
        ordinates,
        ordinate_errors: errors,
        window,
        plateau,
        plateau_error,
        relative_spread: (hi - lo) / plateau.abs(),
        target,
    })
}

/// `log N̂(λ) / (λ log|λ|)` against `-1/u₀(0)`; the default window is the most negative third of the valid grid.
pub fn pastur_slope_fit(ids: &IdsEstimate, u0_at_origin: f64, window: Option<(f64, f64)>) -> Result<SlopeFit> {
    if !(u0_at_origin.is_finite() && u0_at_origin < 0.0) {
        return Err(Error::invalid("u0", "u0(0) must be negative"));
    }
    slope_fit(ids, TailRegime::Pastur, -1.0 / u0_at_origin, window)
}

/// `log N̂(λ) / λ²` against `-φ(0) / (2 ‖u₀‖²_S)`.
pub fn quadratic_slope_fit(ids: &IdsEstimate, phi0: f64, norm: f64, window: Option<(f64, f64)>) -> Result<SlopeFit> {
    positive("phi0", phi0)?;
    positive("norm", norm)?;
    slope_fit(ids, TailRegime::Quadratic, -phi0 / (2.0 * norm), window)
}

/// `log` of the Laplace functional `E exp(t Σ u(x_j))` at one `t` (upper CI end).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LaplacePoint {
    pub t: f64,
    pub log_upper: f64,
}

/// One λ of the Laplace upper-bound check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdsBoundRow {
    pub lambda: f64,
    pub log_n_hat: f64,
    pub bound: f64,
    /// `t` attaining the bound.
    pub t: f64,
    pub holds: bool,
}

/// `log N̂(λ) ≤ min_t (λ t + log Laplace(t)) + slack` per λ; the `t = 0` entry
/// stands for the trivial bound `log(dimension / |Λ|)`.
pub fn ids_upper_bound_check(
    ids: &IdsEstimate,
    laplace: &[LaplacePoint],
    dimension: usize,
    slack: f64,
) -> Result<Vec<IdsBoundRow>> {
    if laplace.is_empty() {
        return Err(Error::invalid("laplace", "no Laplace estimates"));
    }
    if laplace.iter().any(|p| !(p.t.is_finite() && p.t >= 0.0)) {
        return Err(Error::invalid("t", "must be nonnegative and finite"));
    }
    let trivial = num::ln(dimension as f64 / ids.volume);
    Ok(ids
        .lambdas
        .iter()
        .zip(&ids.n_hat)
        .map(|(&lambda, &n)| {
            let (bound, t) = laplace
                .iter()
                .map(|p| {
                    if p.t == 0.0 {
                        (trivial, 0.0)
                    } else {
                        (lambda * p.t + p.log_upper, p.t)
                    }
                })
                .fold((f64::INFINITY, f64::NAN), |acc, x| if x.0 < acc.0 { x } else { acc });
            let log_n_hat = num::ln(n);
            IdsBoundRow {
                lambda,
                log_n_hat,
                bound,
                t,
                holds: log_n_hat <= bound + slack,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_lattice_sums() {
        let s = gaussian_lattice_sum(1.0, &[1.0], &[], 2.0).unwrap();
        assert!((s.log_value - 1.562_011_797_259_621).abs() < 1e-12);
        assert!(s.log_remainder < s.log_head - 30.0);
        let s = gaussian_lattice_sum(1.0, &[1.0], &[], 20.0).unwrap();
        assert!((s.log_value - 100.572_468_383_946_9).abs() < 1e-10);
    }

    #[test]
    fn bound_examples() {
        assert!((int_lem_bound(1.0, &[1.0], &[], 2.0, 0.1).unwrap() - 1.1).abs() < 1e-15);
        assert!((int_lem_bound(1.0, &[1.0], &[], 20.0, 0.1).unwrap() - 110.0).abs() < 1e-12);
        assert_eq!(max_independent_weight(&[1.0, 4.0], &[(0, 1)]).unwrap(), (4.0, 0b10));
        assert_eq!(max_independent_weight(&[1.0, 1.0, 1.0], &[(0, 1)]).unwrap().0, 2.0);
        assert!(int_lem_bound(1.0, &[1.0, 1.0], &[(1, 0)], 1.0, 0.1).is_err());
    }

    #[test]
    fn threshold_rules() {
        let grid = geometric_grid(0.5, 50.0, 30).unwrap();
        let scan = find_validity_threshold(1.0, &[1.0], &[], 0.1, &grid).unwrap();
        let t = scan.threshold.unwrap();
        assert!(t > 2.0 && t < 20.0);
        assert!(scan.violations.iter().all(|v| *v < t));
        let loose = find_validity_threshold(1.0, &[1.0], &[], 1.0, &grid).unwrap();
        assert!(loose.threshold.unwrap() < t);
    }

    #[test]
    fn tail_bound_plug_ins() {
        let unit = BoxDomain::interval(0.0, 1.0).unwrap();
        let null = InteractionModel::null(1);
        assert!((tail_lower_bound(&unit, 1, &null, 1.0).unwrap() + 1.0).abs() < 1e-15);
        let strauss = InteractionModel::pairwise(PairPotential::strauss(1.0, 1.0).unwrap(), 1);
        let want = -3.0 - num::ln(2.0) - 1.0;
        assert!((tail_lower_bound(&unit, 2, &strauss, 1.0).unwrap() - want).abs() < 1e-12);
        assert!((tail_lower_bound(&unit, 0, &strauss, 1.0).unwrap() + 3.0).abs() < 1e-12);
        let hard = InteractionModel::pairwise(PairPotential::hardcore(0.1).unwrap(), 1);
        assert_eq!(tail_lower_bound(&unit, 2, &hard, 1.0).unwrap(), f64::NEG_INFINITY);

        let cells = [unit.clone()];
        assert!((tail_upper_bound(&cells, &[2], 1.0, &[]).unwrap() + num::ln(2.0)).abs() < 1e-12);
        assert_eq!(tail_upper_bound(&cells, &[0], 1.0, &[]).unwrap(), 1.0);
        let two = [unit.clone(), BoxDomain::interval(1.0, 2.0).unwrap()];
        let with = tail_upper_bound(&two, &[1, 1], 1.0, &[(0, 1)]).unwrap();
        let without = tail_upper_bound(&two, &[1, 1], 1.0, &[]).unwrap();
        assert!((without - with - 1.0).abs() < 1e-12);
    }

    #[test]
    fn weak_budgets() {
        let area = InteractionModel::area(1.0, 1).unwrap();
        assert!((weak_condition_budget(&area, 5, 10.0).unwrap().budget - 10.0).abs() < 1e-12);
        let soft = InteractionModel::pairwise(PairPotential::soft_shell(1.0, 1.0).unwrap(), 1);
        let x = num::exp(4.0);
        let b = weak_condition_budget(&soft, 10, x).unwrap();
        assert!((b.radius - 0.125).abs() < 1e-15);
        assert!((b.budget - 45.0 * num::exp(-4.0)).abs() < 1e-12);
        let strauss = InteractionModel::pairwise(PairPotential::strauss(1.0, 1.0).unwrap(), 1);
        assert!(weak_condition_budget(&strauss, 5, 10.0).is_err());
    }

    #[test]
    fn synthetic_inversions() {
        let lambdas: Vec<f64> = (0..30).map(|i| -8.0 + 0.2 * i as f64).collect();
        let pastur: Vec<f64> = lambdas.iter().map(|&l| num::exp(l * num::ln(-l))).collect();
        let ids = IdsEstimate::from_values(lambdas.clone(), pastur, 1);
        let fit = pastur_slope_fit(&ids, -1.0, None).unwrap();
        assert!((fit.plateau - 1.0).abs() < 1e-9);
        assert!((fit.target - 1.0).abs() < 1e-15);
        let quad: Vec<f64> = lambdas.iter().map(|&l| num::exp(-l * l)).collect();
        let ids = IdsEstimate::from_values(lambdas, quad, 1);
        let fit = quadratic_slope_fit(&ids, 2.0, 1.0, None).unwrap();
        assert!((fit.plateau + 1.0).abs() < 1e-9);
        assert_eq!(fit.target, -1.0);
        assert!(matches!(
            quadratic_slope_fit(&ids, 2.0, 1.0, Some((5.0, 6.0))),
            Err(Error::EmptyFitWindow)
        ));
    }
}
