//! Dirichlet finite-difference discretization of `-Δ + V_η`, eigenvalue
//! counting by inertia, and the Monte Carlo IDS estimator.

use alloc::vec::Vec;

use rand::Rng;

use crate::configuration::PointConfiguration;
use crate::error::{Error, Result};
use crate::geometry::{BoxDomain, Point};
use crate::num;
use crate::potential::SingleSitePotential;
use crate::sampler::{sample_gibbs, sample_poisson, stream_rng, GibbsTarget, ProposalSettings};
use crate::stats::Z95;
use crate::InteractionModel;

/// Tolerance for the spacing dividing the side lengths.
pub const DIVISIBILITY_TOLERANCE: f64 = 1e-12;

/// Relative size of the diagonal perturbation used when a pivot vanishes.
pub const PERTURBATION: f64 = 1e-10;

/// Number of perturbed retries before giving up.
pub const MAX_RETRIES: usize = 3;

const PIVOT_FLOOR: f64 = 1e-14;

/// Uniform grid of interior nodes of a box; axis 0 varies fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    domain: BoxDomain,
    spacing: f64,
    nodes: Vec<usize>,
}

impl Grid {
    pub fn new(domain: BoxDomain, spacing: f64) -> Result<Self> {
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::invalid("h", "must be positive and finite"));
        }
        let mut nodes = Vec::with_capacity(domain.dim());
        for &side in domain.sides() {
            let cells = num::round(side / spacing);
            if (side - cells * spacing).abs() > DIVISIBILITY_TOLERANCE * side.max(1.0) {
                return Err(Error::invalid("h", "spacing must divide every side length"));
            }
            if cells < 2.0 {
                return Err(Error::invalid("h", "grid needs at least one interior node per axis"));
            }
            nodes.push(cells as usize - 1);
        }
        Ok(Grid { domain, spacing, nodes })
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.nodes.len()
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Interior nodes per axis.
    pub fn nodes_per_axis(&self) -> &[usize] {
        &self.nodes
    }

    /// Total number of unknowns.
    pub fn len(&self) -> usize {
        self.nodes.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coordinate of node `k` (0-based) along `axis`.
    pub fn coordinate(&self, axis: usize, k: usize) -> f64 {
        self.domain.lower(axis) + (k + 1) as f64 * self.spacing
    }

    fn multi_index(&self, mut index: usize) -> Vec<usize> {
        self.nodes
            .iter()
            .map(|n| {
                let k = index % n;
                index /= n;
                k
            })
            .collect()
    }

    pub fn node(&self, index: usize) -> Point {
        let ks = self.multi_index(index);
        Point::new(ks.iter().enumerate().map(|(axis, k)| self.coordinate(axis, *k)))
    }

    /// Offset between neighbours along `axis` in the flat numbering.
    fn stride(&self, axis: usize) -> usize {
        self.nodes[..axis].iter().product()
    }

    /// Half-bandwidth of the operator.
    pub fn bandwidth(&self) -> usize {
        self.stride(self.dim() - 1)
    }
}

/// `H = -Δ_h + V` on a grid with Dirichlet boundary.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteOperator {
    grid: Grid,
    potential: Vec<f64>,
}

impl DiscreteOperator {
    /// Operator with explicit nodal potential values.
    pub fn with_potential(grid: Grid, potential: Vec<f64>) -> Result<Self> {
        if potential.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: potential.len(),
            });
        }
        if potential.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("potential", "values must be finite"));
        }
        Ok(DiscreteOperator { grid, potential })
    }

    pub fn free(grid: Grid) -> Self {
        let n = grid.len();
        DiscreteOperator {
            grid,
            potential: alloc::vec![0.0; n],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn dimension(&self) -> usize {
        self.potential.len()
    }

    /// `V + c`.
    pub fn shifted(&self, c: f64) -> Self {
        DiscreteOperator {
            grid: self.grid.clone(),
            potential: self.potential.iter().map(|v| v + c).collect(),
        }
    }

    fn kinetic(&self) -> (f64, f64) {
        let h2 = self.grid.spacing * self.grid.spacing;
        (2.0 * self.grid.dim() as f64 / h2, -1.0 / h2)
    }

    /// Maximum absolute row sum.
    pub fn norm(&self) -> f64 {
        let (diag, off) = self.kinetic();
        let neighbours = 2.0 * self.grid.dim() as f64;
        self.potential
            .iter()
            .map(|v| (diag + v).abs() + neighbours * off.abs())
            .fold(0.0, f64::max)
    }

    /// Visits every stored entry `(i, j, value)` with `j <= i`.
    fn for_each_lower<F: FnMut(usize, usize, f64)>(&self, mut f: F) {
        let (diag, off) = self.kinetic();
        let n = self.dimension();
        for i in 0..n {
            let ks = self.grid.multi_index(i);
            for axis in 0..self.grid.dim() {
                if ks[axis] > 0 {
                    f(i, i - self.grid.stride(axis), off);
                }
            }
            f(i, i, diag + self.potential[i]);
        }
    }

    /// All nonzero entries `(row, column, value)`, both triangles, row-major.
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        let mut lower = Vec::new();
        self.for_each_lower(|i, j, v| lower.push((i, j, v)));
        let mut all: Vec<(usize, usize, f64)> = Vec::with_capacity(2 * lower.len());
        for &(i, j, v) in &lower {
            all.push((i, j, v));
            if i != j {
                all.push((j, i, v));
            }
        }
        all.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        all
    }

    /// Dense row-major matrix.
    pub fn dense_matrix(&self) -> Vec<f64> {
        let n = self.dimension();
        let mut m = alloc::vec![0.0; n * n];
        self.for_each_lower(|i, j, v| {
            m[i * n + j] = v;
            m[j * n + i] = v;
        });
        m
    }

    /// Negative pivots of `H - λI` by banded `LDLᵀ`; `None` if a pivot vanishes.
    fn inertia_below(&self, lambda: f64, scale: f64) -> Option<usize> {
        let n = self.dimension();
        let b = self.grid.bandwidth();
        let (diag, off) = self.kinetic();
        let strides: Vec<usize> = (0..self.grid.dim()).map(|a| self.grid.stride(a)).collect();
        // band[i * (b + 1) + k] holds L(i, i - k) for k in 1..=b and the pivot for k = 0
        let w = b + 1;
        let mut band = alloc::vec![0.0; n * w];
        let mut negatives = 0;
        let mut ks = alloc::vec![0usize; self.grid.dim()];
        for i in 0..n {
            // entries of row i of A in the band
            for k in 1..=b.min(i) {
                band[i * w + k] = 0.0;
            }
            for (axis, &s) in strides.iter().enumerate() {
                if ks[axis] > 0 {
                    band[i * w + s] = off;
                }
            }
            // L(i, j) = (A(i, j) - Σ_{m<j} L(i, m) L(j, m) d_m) / d_j
            let first = i.saturating_sub(b);
            for j in first..i {
                let mut a = band[i * w + (i - j)];
                let lo = first.max(j.saturating_sub(b));
                for m in lo..j {
                    a -= band[i * w + (i - m)] * band[j * w + (j - m)] * band[m * w];
                }
                band[i * w + (i - j)] = a / band[j * w];
            }
            let mut d = diag + self.potential[i] - lambda;
            for m in first..i {
                let l = band[i * w + (i - m)];
                d -= l * l * band[m * w];
            }
            if !d.is_finite() || d.abs() <= PIVOT_FLOOR * scale {
                return None;
            }
            band[i * w] = d;
            if d < 0.0 {
                negatives += 1;
            }
            // advance the multi-index
            for axis in 0..ks.len() {
                ks[axis] += 1;
                if ks[axis] < self.grid.nodes[axis] {
                    break;
                }
                ks[axis] = 0;
            }
        }
        Some(negatives)
    }

    /// `#{eigenvalues ≤ λ}`.
    ///
    /// A vanishing pivot is retried at `λ + k·10⁻¹⁰·‖H‖`, `k = 1, 2, 3`, which
    /// counts an eigenvalue sitting exactly at `λ`.
    pub fn count_eigenvalues_leq(&self, lambda: f64) -> Result<usize> {
        let scale = self.norm().max(1.0);
        for attempt in 0..=MAX_RETRIES {
            let shifted = lambda + attempt as f64 * PERTURBATION * scale;
            if let Some(count) = self.inertia_below(shifted, scale) {
                return Ok(count);
            }
        }
        Err(Error::FactorizationBreakdown {
            lambda,
            attempts: MAX_RETRIES,
        })
    }

    /// Counts for every threshold in `lambdas`.
    pub fn counts_leq(&self, lambdas: &[f64]) -> Result<Vec<usize>> {
        lambdas.iter().map(|l| self.count_eigenvalues_leq(*l)).collect()
    }
}

/// `V_η` at the nodes of `grid`.
pub fn potential_on_grid(config: &PointConfiguration, u0: &SingleSitePotential, grid: &Grid) -> Result<Vec<f64>> {
    if config.dim() != grid.dim() || u0.dim() != grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: grid.dim(),
            found: if config.dim() != grid.dim() { config.dim() } else { u0.dim() },
        });
    }
    let d = grid.dim();
    let h = grid.spacing();
    let reach = u0.support_radius();
    let mut values = alloc::vec![0.0; grid.len()];
    for p in config.points() {
        // node index range per axis touching the support around p
        let mut lo = Vec::with_capacity(d);
        let mut hi = Vec::with_capacity(d);
        let mut empty = false;
        for axis in 0..d {
            let base = grid.domain().lower(axis) + h;
            let a = num::ceil((p[axis] - reach - base) / h).max(0.0);
            let b = num::floor((p[axis] + reach - base) / h).min(grid.nodes[axis] as f64 - 1.0);
            if b < a {
                empty = true;
                break;
            }
            lo.push(a as usize);
            hi.push(b as usize);
        }
        if empty {
            continue;
        }
        let mut ks = lo.clone();
        'nodes: loop {
            let index: usize = ks.iter().enumerate().map(|(axis, k)| k * grid.stride(axis)).sum();
            let x = Point::new(ks.iter().enumerate().map(|(axis, k)| grid.coordinate(axis, *k)));
            values[index] += u0.value(&(&x - p));
            for axis in 0..d {
                ks[axis] += 1;
                if ks[axis] <= hi[axis] {
                    continue 'nodes;
                }
                ks[axis] = lo[axis];
            }
            break;
        }
    }
    Ok(values)
}

/// `-Δ_h + V_η` on `grid`.
pub fn discretize(config: &PointConfiguration, u0: &SingleSitePotential, grid: &Grid) -> Result<DiscreteOperator> {
    let values = potential_on_grid(config, u0, grid)?;
    DiscreteOperator::with_potential(grid.clone(), values)
}

/// Sorted eigenvalues of the free Dirichlet Laplacian on `grid`.
pub fn dirichlet_laplacian_spectrum(grid: &Grid) -> Vec<f64> {
    let h = grid.spacing();
    let axes: Vec<Vec<f64>> = grid
        .nodes_per_axis()
        .iter()
        .map(|&n| {
            (1..=n)
                .map(|k| {
                    let s = num::sin(k as f64 * num::PI / (2.0 * (n + 1) as f64));
                    4.0 / (h * h) * s * s
                })
                .collect()
        })
        .collect();
    let mut values = alloc::vec![0.0];
    for axis in &axes {
        values = values.iter().flat_map(|v| axis.iter().map(move |a| v + a)).collect();
    }
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    values
}

/// Where replica configurations come from.
#[derive(Clone, Debug)]
pub enum ConfigurationSource {
    /// No points: `V ≡ 0`.
    Empty,
    /// Poisson process of the given intensity.
    Poisson { intensity: f64 },
    /// Gibbs process on the padded window, free boundary, state after `burn_in` steps.
    Gibbs {
        model: InteractionModel,
        proposal: ProposalSettings,
        burn_in: u64,
    },
}

impl ConfigurationSource {
    pub fn interaction_range(&self) -> f64 {
        match self {
            ConfigurationSource::Gibbs { model, .. } => model.range(),
            _ => 0.0,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, window: &BoxDomain, rng: &mut R) -> Result<PointConfiguration> {
        match self {
            ConfigurationSource::Empty => Ok(PointConfiguration::empty(window.clone())),
            ConfigurationSource::Poisson { intensity } => sample_poisson(window, *intensity, rng),
            ConfigurationSource::Gibbs {
                model,
                proposal,
                burn_in,
            } => {
                let target = GibbsTarget::new(model.clone(), window.clone())?;
                sample_gibbs(&target, proposal, *burn_in, rng)
            }
        }
    }
}

/// Geometry and sweep of an IDS run.
#[derive(Clone, Debug, PartialEq)]
pub struct IdsSettings {
    pub dim: usize,
    /// Side `L` of `Λ_L = (-L/2, L/2)^d`.
    pub length: f64,
    pub spacing: f64,
    pub lambdas: Vec<f64>,
    pub replicas: usize,
    pub seed: u64,
    /// Margin of the sampling window around `Λ_L`; `None` uses the support
    /// radius of `u₀` plus the interaction range.
    pub padding: Option<f64>,
}

impl IdsSettings {
    pub fn box_domain(&self) -> Result<BoxDomain> {
        BoxDomain::centered(self.length, self.dim)
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.box_domain()?, self.spacing)
    }

    pub fn validate(&self, u0: &SingleSitePotential) -> Result<()> {
        if self.replicas == 0 {
            return Err(Error::invalid("replicas", "must be at least 1"));
        }
        if self.lambdas.is_empty() || self.lambdas.iter().any(|l| !l.is_finite()) {
            return Err(Error::invalid("lambda", "grid must be nonempty and finite"));
        }
        if self.length <= 2.0 * u0.support_radius() {
            return Err(Error::invalid("L", "must exceed twice the support radius of u0"));
        }
        if u0.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: u0.dim(),
            });
        }
        if let Some(p) = self.padding {
            if !(p.is_finite() && p >= u0.support_radius()) {
                return Err(Error::invalid("padding", "must be at least the support radius of u0"));
            }
        }
        self.grid().map(|_| ())
    }

    /// `Λ_L` enlarged by the padding: points outside it cannot reach the grid.
    pub fn sampling_window(&self, u0: &SingleSitePotential, source: &ConfigurationSource) -> Result<BoxDomain> {
        let padding = self
            .padding
            .unwrap_or_else(|| u0.support_radius() + source.interaction_range());
        self.box_domain()?.padded(padding)
    }
}

/// Eigenvalue counts of one replica at every λ (stream = replica index).
pub fn replica_counts(
    source: &ConfigurationSource,
    u0: &SingleSitePotential,
    settings: &IdsSettings,
    replica: usize,
) -> Result<Vec<usize>> {
    let attach = |e: Error| Error::Replica {
        replica,
        source: alloc::boxed::Box::new(e),
    };
    let grid = settings.grid()?;
    let sampling_window = settings.sampling_window(u0, source)?;
    let mut rng = stream_rng(settings.seed, replica as u64);
    let config = source.sample(&sampling_window, &mut rng).map_err(attach)?;
    let op = discretize(&config, u0, &grid).map_err(attach)?;
    op.counts_leq(&settings.lambdas).map_err(attach)
}

/// `N̂(λ)` with normal intervals, normalized by `|Λ_L|`.
#[derive(Clone, Debug, PartialEq)]
pub struct IdsEstimate {
    pub lambdas: Vec<f64>,
    pub n_hat: Vec<f64>,
    pub std_error: Vec<f64>,
    pub ci_low: Vec<f64>,
    pub ci_high: Vec<f64>,
    pub dim: usize,
    pub length: f64,
    pub spacing: f64,
    pub replicas: usize,
    pub volume: f64,
}

impl IdsEstimate {
    /// Aggregates per-replica counts with integer sums (order independent).
    pub fn from_counts(settings: &IdsSettings, counts: &[Vec<usize>]) -> Result<Self> {
        let volume = settings.box_domain()?.volume();
        let r = counts.len();
        if r == 0 {
            return Err(Error::invalid("replicas", "no replica counts"));
        }
        let m = settings.lambdas.len();
        let mut sums = alloc::vec![0u128; m];
        let mut squares = alloc::vec![0u128; m];
        for row in counts {
            if row.len() != m {
                return Err(Error::DimensionMismatch { expected: m, found: row.len() });
            }
            for (k, &c) in row.iter().enumerate() {
                sums[k] += c as u128;
                squares[k] += (c as u128) * (c as u128);
            }
        }
        let rf = r as f64;
        let mut n_hat = Vec::with_capacity(m);
        let mut std_error = Vec::with_capacity(m);
        for k in 0..m {
            let mean = sums[k] as f64 / rf;
            let var = if r > 1 {
                // exact integer numerator: r Σc² - (Σc)²
                let num = (r as u128) * squares[k] - sums[k] * sums[k];
                num as f64 / (rf * (rf - 1.0))
            } else {
                0.0
            };
            n_hat.push(mean / volume);
            std_error.push(num::sqrt(var / rf) / volume);
        }
        let mut ci_low: Vec<f64> = n_hat.iter().zip(&std_error).map(|(m, s)| (m - Z95 * s).max(0.0)).collect();
        let mut ci_high: Vec<f64> = n_hat.iter().zip(&std_error).map(|(m, s)| m + Z95 * s).collect();
        // monotone envelope over increasing λ
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|a, b| settings.lambdas[*a].partial_cmp(&settings.lambdas[*b]).unwrap());
        let mut run_low = 0.0f64;
        let mut run_high = 0.0f64;
        for &k in &order {
            run_low = run_low.max(ci_low[k]);
            run_high = run_high.max(ci_high[k]);
            ci_low[k] = run_low;
            ci_high[k] = run_high;
        }
        Ok(IdsEstimate {
            lambdas: settings.lambdas.clone(),
            n_hat,
            std_error,
            ci_low,
            ci_high,
            dim: settings.dim,
            length: settings.length,
            spacing: settings.spacing,
            replicas: r,
            volume,
        })
    }

    /// IDS estimate from explicit values (synthetic curves and tests).
    pub fn from_values(lambdas: Vec<f64>, n_hat: Vec<f64>, dim: usize) -> Self {
        let m = lambdas.len();
        IdsEstimate {
            ci_low: n_hat.clone(),
            ci_high: n_hat.clone(),
            std_error: alloc::vec![0.0; m],
            lambdas,
            n_hat,
            dim,
            length: 0.0,
            spacing: 0.0,
            replicas: 0,
            volume: 1.0,
        }
    }
}

/// Sequential IDS estimate over `settings.replicas` replicas.
pub fn estimate_ids(source: &ConfigurationSource, u0: &SingleSitePotential, settings: &IdsSettings) -> Result<IdsEstimate> {
    settings.validate(u0)?;
    let counts = (0..settings.replicas)
        .map(|r| replica_counts(source, u0, settings, r))
        .collect::<Result<Vec<_>>>()?;
    IdsEstimate::from_counts(settings, &counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn grid_1d() -> Grid {
        Grid::new(BoxDomain::interval(0.0, 1.0).unwrap(), 0.25).unwrap()
    }

    #[test]
    fn free_spectrum_closed_form() {
        let ev = dirichlet_laplacian_spectrum(&grid_1d());
        let rounded: Vec<f64> = ev.iter().map(|v| num::round(v * 100.0) / 100.0).collect();
        assert_eq!(rounded, vec![9.37, 32.0, 54.63]);
        let op = DiscreteOperator::free(grid_1d());
        assert_eq!(op.count_eigenvalues_leq(10.0).unwrap(), 1);
        assert_eq!(op.count_eigenvalues_leq(0.0).unwrap(), 0);
        assert_eq!(op.count_eigenvalues_leq(100.0).unwrap(), 3);
        // an eigenvalue exactly at λ is counted
        assert_eq!(op.count_eigenvalues_leq(32.0).unwrap(), 2);
    }

    #[test]
    fn two_by_two_grid() {
        let g = Grid::new(BoxDomain::from_bounds(&[0.0, 0.0], &[3.0, 3.0]).unwrap(), 1.0).unwrap();
        let ev = dirichlet_laplacian_spectrum(&g);
        assert_eq!(ev.len(), 4);
        assert!((ev[0] - 2.0).abs() < 1e-12 && (ev[3] - 6.0).abs() < 1e-12);
        assert!((ev[1] - 4.0).abs() < 1e-12 && (ev[2] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn grid_rejects_non_dividing_spacing() {
        assert!(Grid::new(BoxDomain::interval(0.0, 1.0).unwrap(), 0.3).is_err());
        assert!(Grid::new(BoxDomain::interval(0.0, 1.0).unwrap(), 1.0).is_err());
        let g = Grid::new(BoxDomain::from_bounds(&[0.0, 0.0], &[1.0, 0.5]).unwrap(), 0.125).unwrap();
        assert_eq!(g.nodes_per_axis(), &[7, 3]);
        assert_eq!(g.bandwidth(), 7);
        let p = g.node(8);
        assert!((p[0] - 0.25).abs() < 1e-15 && (p[1] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn triplets_form_the_stencil() {
        let g = Grid::new(BoxDomain::from_bounds(&[0.0, 0.0], &[3.0, 3.0]).unwrap(), 1.0).unwrap();
        let t = DiscreteOperator::free(g).triplets();
        // 4 diagonal + 8 off-diagonal entries
        assert_eq!(t.len(), 12);
        assert!(t.iter().all(|(i, j, v)| if i == j { *v == 4.0 } else { *v == -1.0 }));
    }

    #[test]
    fn constant_shift_moves_counts() {
        let op = DiscreteOperator::free(grid_1d());
        let shifted = op.shifted(5.0);
        for l in [0.0, 10.0, 20.0, 40.0, 70.0] {
            assert_eq!(shifted.count_eigenvalues_leq(l + 5.0).unwrap(), op.count_eigenvalues_leq(l).unwrap());
        }
    }

    #[test]
    fn potential_on_grid_matches_pointwise_field() {
        let g = Grid::new(BoxDomain::centered(4.0, 1).unwrap(), 0.125).unwrap();
        let u0 = SingleSitePotential::triangular(2.0, 0.5, 1).unwrap();
        let domain = BoxDomain::centered(6.0, 1).unwrap();
        let c = PointConfiguration::new(vec![Point::from(0.1), Point::from(-1.93), Point::from(2.3)], domain).unwrap();
        let v = potential_on_grid(&c, &u0, &g).unwrap();
        for (i, value) in v.iter().enumerate() {
            let expected = u0.field_at(&g.node(i), &c);
            assert!((value - expected).abs() < 1e-14, "node {i}");
        }
    }

    #[test]
    fn free_ids_has_no_variance() {
        let u0 = SingleSitePotential::triangular(1.0, 0.5, 1).unwrap();
        let settings = IdsSettings {
            dim: 1,
            length: 4.0,
            spacing: 0.25,
            lambdas: vec![5.0, 20.0, 60.0],
            replicas: 3,
            seed: 1,
            padding: None,
        };
        let est = estimate_ids(&ConfigurationSource::Empty, &u0, &settings).unwrap();
        let op = DiscreteOperator::free(settings.grid().unwrap());
        for (k, l) in settings.lambdas.iter().enumerate() {
            assert_eq!(est.n_hat[k], op.count_eigenvalues_leq(*l).unwrap() as f64 / 4.0);
            assert_eq!(est.std_error[k], 0.0);
        }
    }
}
