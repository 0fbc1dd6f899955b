//! Separated packings: the norm `‖u‖²_S = sup Σ u(x_j)²` over point sets whose
//! pairwise differences avoid `S`, its staircase approximations, and the
//! potential floor of hardcore configurations.

mod search;
mod staircase;
mod window;

pub use search::{max_weight_packing, PackingSolution, MAX_SEARCH_CANDIDATES, NODE_BUDGET};
pub use staircase::{Staircase, CELL_SAMPLES};
pub use window::{
    ConditionReport, InteractionWindow, Interpolation, StarProfile, WindowShape, BOUNDARY_TOLERANCE, EROSION_DIRECTIONS,
};

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::num;
use crate::potential::{SingleSitePotential, SiteFunction};

/// Largest candidate set handed to the branch-and-bound search.
pub const MAX_CANDIDATES: usize = search::MAX_SEARCH_CANDIDATES;

/// Fewest lattice nodes allowed across the support along any axis.
pub const MIN_NODES: usize = 4;

/// Points with pairwise differences outside `S`, and `Σ` of their weights.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparatedPacking {
    pub points: Vec<Point>,
    pub objective: f64,
}

impl SeparatedPacking {
    /// Every pairwise difference lies outside `S`.
    pub fn is_feasible(&self, s: &InteractionWindow) -> bool {
        self.points
            .iter()
            .enumerate()
            .all(|(a, x)| self.points[a + 1..].iter().all(|y| !s.contains(&(x - y))))
    }
}

/// Lattice value of `‖u‖²_S` with its continuity slack.
#[derive(Clone, Debug, PartialEq)]
pub struct NormReport {
    /// Maximum over lattice packings; a lower bound of the norm.
    pub value: f64,
    /// Modulus-of-continuity allowance `cap · (2 max u δ + δ²)`, `δ = Lip · r √d / 2`.
    pub slack: f64,
    pub witness: SeparatedPacking,
    /// A priori bound on the number of points in any packing meeting the support.
    pub cap: usize,
    pub resolution: f64,
    pub candidates: usize,
    /// Whether the lattice maximum was certified; otherwise `value` is the best
    /// packing found within the node budget and `lattice_upper` bounds the lattice maximum.
    pub exact: bool,
    pub lattice_upper: f64,
}

/// How a packing point contributes to the objective.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Weighting {
    /// `Σ u(x_j)`.
    Linear,
    /// `Σ u(x_j)²`.
    Squared,
}

impl Weighting {
    fn apply(self, v: f64) -> f64 {
        match self {
            Weighting::Linear => v,
            Weighting::Squared => v * v,
        }
    }
}

/// Number of points, pairwise at least `ρ` apart, that fit in the box
/// `[lo, hi]`: `Π (side_i + ρ) / (ω_d (ρ/2)^d)`.
pub fn packing_cap(lo: &[f64], hi: &[f64], rho: f64) -> usize {
    let d = lo.len();
    // differences within the boundary tolerance of ρ still count as separated
    let rho = rho - 2.0 * BOUNDARY_TOLERANCE;
    let enlarged: f64 = lo.iter().zip(hi).map(|(a, b)| (b - a).max(0.0) + rho).product();
    let ball = num::unit_ball_volume(d) * num::powi(0.5 * rho, d as i32);
    (num::floor(enlarged / ball) as usize).max(1)
}

/// Dense labels of the cubes of side `side` containing each point.
fn clique_groups(points: &[Vec<f64>], side: f64) -> Vec<usize> {
    let mut labels: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
    points
        .iter()
        .map(|p| {
            let key: Vec<i64> = p.iter().map(|c| num::floor(c / side) as i64).collect();
            let next = labels.len();
            *labels.entry(key).or_insert(next)
        })
        .collect()
}

fn difference(a: &[f64], b: &[f64]) -> Point {
    Point::new(a.iter().zip(b).map(|(x, y)| x - y))
}

fn check_dims<F: SiteFunction + ?Sized>(u: &F, s: &InteractionWindow) -> Result<()> {
    if u.dim() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            found: u.dim(),
        });
    }
    Ok(())
}

/// `‖u‖²_S` restricted to the lattice `r ℤ^d` over the support of `u`.
pub fn norm_u_s<F: SiteFunction + ?Sized>(u: &F, s: &InteractionWindow, resolution: f64) -> Result<NormReport> {
    check_dims(u, s)?;
    if !(resolution.is_finite() && resolution > 0.0) {
        return Err(Error::invalid("resolution", "must be positive and finite"));
    }
    let d = u.dim();
    let (lo, hi) = u.support_bounds();
    let mut first = Vec::with_capacity(d);
    let mut counts = Vec::with_capacity(d);
    for i in 0..d {
        let a = num::ceil(lo[i] / resolution - 1e-9) as i64;
        let b = num::floor(hi[i] / resolution + 1e-9) as i64;
        let nodes = (b - a + 1).max(0) as usize;
        if nodes < MIN_NODES {
            return Err(Error::ResolutionTooCoarse { nodes });
        }
        first.push(a);
        counts.push(nodes);
    }
    let total = counts.iter().try_fold(1usize, |acc, c| acc.checked_mul(*c)).unwrap_or(usize::MAX);
    if total > 16 * MAX_CANDIDATES {
        return Err(Error::TooLarge {
            what: "lattice nodes",
            count: total,
            max: 16 * MAX_CANDIDATES,
        });
    }
    let mut points: Vec<Vec<f64>> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    for flat in 0..total {
        let mut rest = flat;
        let coords: Vec<f64> = (0..d)
            .map(|i| {
                let k = first[i] + (rest % counts[i]) as i64;
                rest /= counts[i];
                k as f64 * resolution
            })
            .collect();
        let v = u.value(&Point::new(coords.iter().copied()));
        if v > 0.0 {
            points.push(coords);
            weights.push(v * v);
        }
    }
    if points.len() > MAX_CANDIDATES {
        return Err(Error::TooLarge {
            what: "packing candidates",
            count: points.len(),
            max: MAX_CANDIDATES,
        });
    }
    let rho = s.inradius();
    let cap = packing_cap(lo.coords(), hi.coords(), rho);
    let groups = clique_groups(&points, 0.999 * rho / num::sqrt(d as f64));
    let solution = max_weight_packing(&weights, &groups, cap, NODE_BUDGET, |i, j| s.contains(&difference(&points[i], &points[j])));
    let witness = SeparatedPacking {
        points: solution.chosen.iter().map(|&i| Point::new(points[i].iter().copied())).collect(),
        objective: solution.value,
    };
    let delta = u.lipschitz() * resolution * num::sqrt(d as f64) / 2.0;
    let slack = if delta.is_finite() {
        cap as f64 * (2.0 * u.max_value() * delta + delta * delta)
    } else {
        f64::INFINITY
    };
    Ok(NormReport {
        value: solution.value,
        slack,
        witness,
        cap,
        resolution,
        candidates: points.len(),
        exact: solution.complete,
        lattice_upper: solution.upper,
    })
}

/// Upper bound of the cell-closure packing problem.
#[derive(Clone, Debug, PartialEq)]
pub struct CellBound {
    pub value: f64,
    /// Indices of the cells in the best family found.
    pub cells: Vec<usize>,
    pub cap: usize,
    /// Whether the search completed (then `value` is attained by `cells`).
    pub exact: bool,
}

/// Upper bound of `sup Σ w(u_n(x_j))` over packings with differences outside `S`.
///
/// Two cells conflict when every difference of their closures lies in `S`, so a
/// packing meets each cell at most once and never meets two conflicting cells.
/// Each cell's own difference box must lie in `S`.
pub fn cell_upper_bound(stair: &Staircase, s: &InteractionWindow, weighting: Weighting) -> Result<CellBound> {
    check_dims(stair, s)?;
    let d = stair.dim();
    let side = 1.0 / stair.n() as f64;
    let block_fits = |m: usize| {
        let w = m as f64 * side;
        let lo: Vec<f64> = (0..d).map(|_| -w).collect();
        let hi: Vec<f64> = (0..d).map(|_| w).collect();
        s.contains_closed_box(&lo, &hi)
    };
    if !block_fits(1) {
        let mut corner = [0.0; 3];
        corner[..d].iter_mut().for_each(|c| *c = side);
        return Err(Error::CellNotInWindow { cell: 0, corner });
    }
    let mut block = 1;
    while block < 1 << 20 && block_fits(block + 1) {
        block += 1;
    }
    let cells: Vec<usize> = (0..stair.cell_count()).filter(|&k| stair.cell_value(k) > 0.0).collect();
    if cells.len() > MAX_CANDIDATES {
        return Err(Error::TooLarge {
            what: "staircase cells",
            count: cells.len(),
            max: MAX_CANDIDATES,
        });
    }
    let bounds: Vec<(Vec<f64>, Vec<f64>)> = cells.iter().map(|&k| stair.cell_bounds(k)).collect();
    let weights: Vec<f64> = cells.iter().map(|&k| weighting.apply(stair.cell_value(k))).collect();
    let blocks: Vec<Vec<f64>> = cells
        .iter()
        .map(|&k| {
            let off = stair.cell_offset(k);
            (0..d).map(|i| (off[i] / block) as f64).collect()
        })
        .collect();
    let groups = clique_groups(&blocks, 1.0);
    let (lo, hi) = stair.support_bounds();
    let cap = packing_cap(lo.coords(), hi.coords(), s.inradius());
    let solution = max_weight_packing(&weights, &groups, cap, NODE_BUDGET, |i, j| {
        let (ai, bi) = &bounds[i];
        let (aj, bj) = &bounds[j];
        let dlo: Vec<f64> = (0..d).map(|k| ai[k] - bj[k]).collect();
        let dhi: Vec<f64> = (0..d).map(|k| bi[k] - aj[k]).collect();
        s.contains_closed_box(&dlo, &dhi)
    });
    Ok(CellBound {
        value: solution.upper,
        exact: solution.complete,
        cells: solution.chosen.iter().map(|&i| cells[i]).collect(),
        cap,
    })
}

/// Lower bound of the potential field generated by hardcore configurations.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialFloor {
    /// `β ≤ V_η(x)` for every `x` and every configuration with all pairwise distances above the range.
    pub floor: f64,
    /// Upper bound of `sup Σ u(y_j)` over such configurations.
    pub packing_bound: f64,
    pub cells_per_unit: usize,
    pub cap: usize,
}

/// `β = -sup Σ_j u(y_j)` bounded through cells of side `1/n` with Lipschitz slack,
/// where `u(y) = -u₀(-y)` and the `y_j` are pairwise more than `range` apart.
pub fn potential_floor(u0: &SingleSitePotential, range: f64, cells_per_unit: usize) -> Result<PotentialFloor> {
    let u = u0.reflected();
    let s = InteractionWindow::ball(range, u0.dim())?;
    let stair = Staircase::with_slack(&u, cells_per_unit)?;
    let bound = cell_upper_bound(&stair, &s, Weighting::Linear)?;
    Ok(PotentialFloor {
        floor: -bound.value,
        packing_bound: bound.value,
        cells_per_unit,
        cap: bound.cap,
    })
}

/// One row of the staircase convergence table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Upper2Row {
    pub n: usize,
    /// Erosion depth `b/n`.
    pub epsilon: f64,
    /// Lattice lower bound of `‖u_n‖²_{S_{b/n}}`.
    pub lower: f64,
    /// Cell-closure upper bound of `‖u_n‖²_{S_{b/n}}`.
    pub upper: f64,
    /// `(upper - reference) / reference`.
    pub gap: f64,
}

/// Lattice points per cell side used for the lower bounds in [`upper2_convergence`].
pub const UPPER2_SUBDIVISION: usize = 2;

/// `‖u_n‖²_{S_{b/n}}` for each `n`, bracketed from both sides and compared with `reference = ‖u‖²_S`.
pub fn upper2_convergence<F: SiteFunction + ?Sized>(
    u: &F,
    s: &InteractionWindow,
    b: f64,
    ns: &[usize],
    reference: f64,
) -> Result<Vec<Upper2Row>> {
    check_dims(u, s)?;
    if !(b.is_finite() && b >= 0.0) {
        return Err(Error::invalid("b", "must be nonnegative and finite"));
    }
    if !(reference.is_finite() && reference > 0.0) {
        return Err(Error::invalid("reference", "must be positive and finite"));
    }
    ns.iter()
        .map(|&n| {
            if n == 0 {
                return Err(Error::invalid("n", "must be positive"));
            }
            let epsilon = b / n as f64;
            let eroded = s.erode(epsilon)?;
            let stair = Staircase::new(u, n)?;
            let lower = norm_u_s(&stair, &eroded, 1.0 / (UPPER2_SUBDIVISION * n) as f64)?.value;
            let upper = cell_upper_bound(&stair, &eroded, Weighting::Squared)?.value;
            Ok(Upper2Row {
                n,
                epsilon,
                lower,
                upper,
                gap: (upper - reference) / reference,
            })
        })
        .collect()
}
