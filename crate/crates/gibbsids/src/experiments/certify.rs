use rayon::prelude::*;

use gibbsids_core::bounds::{
    find_validity_threshold, gaussian_lattice_sum, geometric_grid, int_lem_bound, tail_lower_bound, tail_upper_bound,
    upper_lap_bound, weak_condition_budget, InteractionGraph,
};
use gibbsids_core::packing::InteractionWindow;
use gibbsids_core::sampler::{run_chain_with, stream_rng, ChainSchedule, ChainState, GibbsTarget, ProposalSettings};
use gibbsids_core::stats::{log_mean_exp_blocked, wilson_interval, Z95};
use gibbsids_core::{BoxDomain, Error, InteractionModel, PairPotential};

use super::{gibbs_model, invalid, proposal, RunError};
use crate::config::{ConfigError, Reader};
use crate::output::{Check, Report, Table};

fn schedule(r: &mut Reader) -> Result<ChainSchedule, ConfigError> {
    let steps = r.count("sampler.steps")?;
    let burn_in = r.count("sampler.burn_in")?;
    let thinning = r.count_or("sampler.thinning", 1)?;
    ChainSchedule::new(steps, burn_in, thinning).map_err(|e| invalid("sampler", e))
}

fn chains(r: &mut Reader) -> Result<usize, ConfigError> {
    let n = r.count_or("sampler.chains", 8)?;
    if n == 0 {
        return Err(invalid("sampler.chains", "must be positive"));
    }
    Ok(n as usize)
}

fn strauss(r: &mut Reader, dim: usize) -> Result<InteractionModel, ConfigError> {
    r.word_or("model.kind", &["strauss"], "strauss")?;
    let p = PairPotential::strauss(r.positive("model.a")?, r.positive("model.R")?).map_err(|e| invalid("model", e))?;
    Ok(InteractionModel::pairwise(p, dim))
}

/// Per-chain series, one entry per retained state, from independent parallel chains.
fn chain_series<T, F>(
    target: &GibbsTarget,
    proposal: &ProposalSettings,
    schedule: &ChainSchedule,
    chains: usize,
    seed: u64,
    observe: F,
) -> Result<Vec<Vec<T>>, Error>
where
    T: Send,
    F: Fn(&gibbsids_core::PointConfiguration) -> T + Sync,
{
    (0..chains)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(seed, k as u64);
            let mut state = ChainState::empty(target, k as u64);
            let mut out = Vec::with_capacity(schedule.retained() as usize);
            run_chain_with(&mut state, target, proposal, schedule, &mut rng, |c| out.push(observe(c)))?;
            Ok(out)
        })
        .collect()
}

/// Batches per chain for the variance inflation of indicator means.
const BATCHES: usize = 50;

/// `Var(batch mean) · batch / Var(indicator)`, at least 1; pooled over chains.
fn inflation(series: &[Vec<usize>], n: usize) -> f64 {
    let mut between = 0.0;
    let mut within = 0.0;
    let mut terms = 0usize;
    for s in series {
        let b = s.len() / BATCHES;
        if b == 0 {
            return f64::INFINITY;
        }
        let p = s.iter().filter(|&&c| c == n).count() as f64 / s.len() as f64;
        for chunk in s.chunks_exact(b) {
            let m = chunk.iter().filter(|&&c| c == n).count() as f64 / b as f64;
            between += (m - p) * (m - p) * b as f64;
            terms += 1;
        }
        within += p * (1.0 - p);
    }
    let within = within / series.len() as f64;
    if within <= 0.0 {
        return 1.0;
    }
    let ratio = between / (terms.saturating_sub(series.len())).max(1) as f64 / within;
    ratio.max(1.0)
}

/// Empirical law of the count in a small window under a Strauss chain, between
/// the finite-n tail bounds.
#[derive(Clone, Debug)]
pub struct TailSandwich {
    pub model: InteractionModel,
    pub strength: f64,
    pub domain: BoxDomain,
    pub window: BoxDomain,
    pub proposal: ProposalSettings,
    pub schedule: ChainSchedule,
    pub chains: usize,
    pub min_hits: u64,
    pub max_n: usize,
}

impl TailSandwich {
    pub(super) fn parse(r: &mut Reader) -> Result<Self, ConfigError> {
        let dim = super::dimension(r)?;
        let model = strauss(r, dim)?;
        let strength = match model.pair_potential() {
            Some(PairPotential::Strauss { strength, .. }) => *strength,
            _ => unreachable!(),
        };
        let domain = BoxDomain::centered(r.positive("geometry.L")?, dim).map_err(|e| invalid("geometry.L", e))?;
        let side = r.positive_or("window.side", 1.0 / (dim as f64).sqrt())?;
        let window = BoxDomain::centered(side, dim).map_err(|e| invalid("window.side", e))?;
        if window.diameter() > model.range() + 1e-12 {
            return Err(invalid("window.side", "window diameter must not exceed the interaction range"));
        }
        if side > domain.sides()[0] {
            return Err(invalid("window.side", "window must lie inside the simulation box"));
        }
        Ok(TailSandwich {
            model,
            strength,
            domain,
            window,
            proposal: proposal(r)?,
            schedule: schedule(r)?,
            chains: chains(r)?,
            min_hits: r.count_or("tail.min_hits", 30)?,
            max_n: r.count_or("tail.max_n", 6)? as usize,
        })
    }

    pub fn run(&self, seed: u64) -> Result<Report, RunError> {
        let target = GibbsTarget::new(self.model.clone(), self.domain.clone())?;
        let window = self.window.clone();
        let series = chain_series(&target, &self.proposal, &self.schedule, self.chains, seed, |c| c.count_in(&window))?;
        let total: u64 = series.iter().map(|s| s.len() as u64).sum();
        let top = series.iter().flatten().copied().max().unwrap_or(0).max(self.max_n);
        let mut table = Table::new(
            None,
            &["n", "hits", "log_p", "log_ci_low", "log_ci_high", "inflation", "lower_bound", "upper_bound", "tested", "holds"],
        );
        let mut margin = f64::INFINITY;
        let mut tested = 0usize;
        let mut failures = Vec::new();
        for n in 0..=top {
            let hits = series.iter().flatten().filter(|&&c| c == n).count() as u64;
            let p = hits as f64 / total as f64;
            let tau = inflation(&series, n);
            let effective = (total as f64 / tau).max(1.0);
            let (lo, hi) = wilson_interval((p * effective).round() as u64, effective.round() as u64, Z95);
            let (lo, hi) = (lo.min(p), hi.max(p));
            let lower = tail_lower_bound(&self.window, n as u64, &self.model, 1.0)?;
            let upper = tail_upper_bound(std::slice::from_ref(&self.window), &[n as u64], self.strength, &[])?;
            let check = hits >= self.min_hits && n <= self.max_n;
            let m = (hi.ln() - lower).min(upper - lo.ln());
            if check {
                tested += 1;
                margin = margin.min(m);
                if m < 0.0 {
                    failures.push(n);
                }
            }
            table.push(vec![
                n.into(),
                hits.into(),
                p.ln().into(),
                lo.ln().into(),
                hi.ln().into(),
                tau.into(),
                lower.into(),
                upper.into(),
                check.into(),
                (m >= 0.0).into(),
            ]);
        }
        let check = Check::new(
            "tail-sandwich",
            tested > 0 && failures.is_empty(),
            margin,
            format!("retained={total} tested n={tested} failing n={failures:?}"),
        );
        Ok(Report {
            tables: vec![table],
            checks: vec![check],
        })
    }
}

fn cells_from_breaks(breaks: &[f64]) -> Result<Vec<BoxDomain>, ConfigError> {
    if breaks.len() < 2 || breaks.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("layout.breaks", "need at least two strictly increasing boundaries"));
    }
    breaks
        .windows(2)
        .map(|w| BoxDomain::interval(w[0], w[1]).map_err(|e| invalid("layout.breaks", e)))
        .collect()
}

/// Largest `Σ v_j²` over subsets without an `I` pair, by plain subset enumeration.
fn brute_force_k(graph: &InteractionGraph, weights: &[f64]) -> f64 {
    let k = weights.len();
    let mut best = 0.0f64;
    for mask in 0u32..(1 << k) {
        let members: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
        let independent = members
            .iter()
            .enumerate()
            .all(|(x, &i)| members[x + 1..].iter().all(|&j| !graph.in_i(i, j)));
        if independent {
            best = best.max(members.iter().map(|&i| weights[i]).sum());
        }
    }
    best
}

/// Monte Carlo Laplace functional of a Strauss process against its quadratic upper bound.
#[derive(Clone, Debug)]
pub struct LaplaceBound {
    pub model: InteractionModel,
    pub strength: f64,
    pub cells: Vec<BoxDomain>,
    pub v: Vec<f64>,
    pub ts: Vec<f64>,
    pub eps: f64,
    pub domain: BoxDomain,
    pub proposal: ProposalSettings,
    pub schedule: ChainSchedule,
    pub chains: usize,
    pub blocks: usize,
}

impl LaplaceBound {
    pub(super) fn parse(r: &mut Reader) -> Result<Self, ConfigError> {
        let model = strauss(r, 1)?;
        let strength = match model.pair_potential() {
            Some(PairPotential::Strauss { strength, .. }) => *strength,
            _ => unreachable!(),
        };
        let cells = cells_from_breaks(&r.numbers("layout.breaks")?)?;
        let v = r.numbers("layout.v")?;
        if v.len() != cells.len() || v.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(invalid("layout.v", format!("expected {} positive weights", cells.len())));
        }
        let ts = r.numbers("sweep.t")?;
        if ts.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(invalid("sweep.t", "must be positive"));
        }
        let eps = r.positive_or("layout.eps", 0.2)?;
        let lo = cells[0].lower(0);
        let hi = cells[cells.len() - 1].upper(0);
        let padding = r.opt::<f64>("geometry.padding", "a number")?.unwrap_or(model.range());
        if !(padding.is_finite() && padding >= 0.0) {
            return Err(invalid("geometry.padding", "must be nonnegative"));
        }
        let domain = BoxDomain::interval(lo - padding, hi + padding).map_err(|e| invalid("geometry.padding", e))?;
        let blocks = r.count_or("sampler.blocks", 50)? as usize;
        Ok(LaplaceBound {
            model,
            strength,
            cells,
            v,
            ts,
            eps,
            domain,
            proposal: proposal(r)?,
            schedule: schedule(r)?,
            chains: chains(r)?,
            blocks: blocks.max(2),
        })
    }

    pub fn run(&self, seed: u64) -> Result<Report, RunError> {
        let s = InteractionWindow::ball(self.model.range(), 1)?.closed();
        let bound = upper_lap_bound(self.cells.clone(), &self.v, &s, self.strength)?;
        let squares: Vec<f64> = self.v.iter().map(|x| x * x).collect();
        let brute = brute_force_k(&bound.graph, &squares) / (2.0 * self.strength);
        let target = GibbsTarget::new(self.model.clone(), self.domain.clone())?;
        let cells = self.cells.clone();
        let series = chain_series(&target, &self.proposal, &self.schedule, self.chains, seed, |c| {
            cells.iter().map(|cell| c.count_in(cell)).collect::<Vec<_>>()
        })?;
        let samples: Vec<&Vec<usize>> = series.iter().flatten().collect();
        let limit = (1.0 + self.eps) * bound.coefficient;
        let mut table = Table::new(
            None,
            &["t", "log_laplace", "ci_low", "ci_high", "scaled_ci_low", "scaled", "limit", "effective_samples", "heavy_tailed", "holds"],
        );
        let mut margin = f64::INFINITY;
        let mut failing = Vec::new();
        for &t in &self.ts {
            let logs: Vec<f64> = samples
                .iter()
                .map(|m| t * m.iter().zip(&self.v).map(|(n, v)| *n as f64 * v).sum::<f64>())
                .collect();
            let est = log_mean_exp_blocked(&logs, self.blocks * self.chains);
            let scaled = est.log_mean / (t * t);
            let scaled_low = est.ci_low / (t * t);
            let m = limit - scaled_low;
            margin = margin.min(m);
            if m < 0.0 {
                failing.push(t);
            }
            table.push(vec![
                t.into(),
                est.log_mean.into(),
                est.ci_low.into(),
                est.ci_high.into(),
                scaled_low.into(),
                scaled.into(),
                limit.into(),
                est.effective_samples.into(),
                est.heavy_tailed().into(),
                (m >= 0.0).into(),
            ]);
        }
        let mut graph = Table::new(Some("graph"), &["i", "j", "in_i"]);
        for i in 0..self.cells.len() {
            for j in i + 1..self.cells.len() {
                graph.push(vec![(i + 1).into(), (j + 1).into(), bound.graph.in_i(i, j).into()]);
            }
        }
        let checks = vec![
            Check::new(
                "laplace-bound",
                failing.is_empty(),
                margin,
                format!("coefficient={:.6} eps={} failing t={failing:?}", bound.coefficient, self.eps),
            ),
            Check::new(
                "k-family-exhaustive",
                brute == bound.coefficient,
                0.0 - (brute - bound.coefficient).abs(),
                format!("brute force={brute:.6} members={:?}", bound.members),
            ),
        ];
        Ok(Report {
            tables: vec![table, graph],
            checks,
        })
    }
}

/// Points of the confirmation grid in `(T, 10T]`.
pub const CONFIRM_POINTS: usize = 40;

/// Gaussian lattice sums against their quadratic bound over a `t` grid, per `ε`.
#[derive(Clone, Debug)]
pub struct IntLemScan {
    pub c: f64,
    pub v: Vec<f64>,
    pub edges: Vec<(usize, usize)>,
    pub eps: Vec<f64>,
    pub ts: Vec<f64>,
}

fn parse_edges(tokens: &[String], k: usize) -> Result<Vec<(usize, usize)>, ConfigError> {
    tokens
        .iter()
        .map(|tok| {
            let (a, b) = tok
                .split_once('-')
                .ok_or_else(|| invalid("intlem.edges", format!("`{tok}` is not of the form i-j")))?;
            let (a, b): (usize, usize) = match (a.parse(), b.parse()) {
                (Ok(a), Ok(b)) => (a, b),
                _ => return Err(invalid("intlem.edges", format!("`{tok}` is not of the form i-j"))),
            };
            if a == 0 || b == 0 || a > k || b > k || a == b {
                return Err(invalid("intlem.edges", format!("`{tok}` is not a pair of distinct cells in 1..={k}")));
            }
            Ok((a.min(b) - 1, a.max(b) - 1))
        })
        .collect()
}

impl IntLemScan {
    pub(super) fn parse(r: &mut Reader) -> Result<Self, ConfigError> {
        let c = r.positive("intlem.c")?;
        let v = r.numbers("intlem.v")?;
        let edges = match r.opt_list::<String>("intlem.edges", "cell pairs")? {
            Some(tokens) => parse_edges(&tokens, v.len())?,
            None => Vec::new(),
        };
        let eps = r.numbers("intlem.eps")?;
        if eps.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return Err(invalid("intlem.eps", "must be positive"));
        }
        let t_min = r.positive("intlem.t_min")?;
        let t_max = r.positive("intlem.t_max")?;
        let count = r.count_or("intlem.t_count", 80)? as usize;
        let ts = geometric_grid(t_min, t_max, count).map_err(|e| invalid("intlem.t_min", e))?;
        int_lem_bound(c, &v, &edges, 1.0, 1.0).map_err(|e| invalid("intlem.v", e))?;
        Ok(IntLemScan { c, v, edges, eps, ts })
    }

    pub fn run(&self) -> Result<Report, RunError> {
        let mut scan_table = Table::new(None, &["eps", "t", "log_sum", "bound", "holds"]);
        let mut confirm_table = Table::new(
            Some("threshold"),
            &["eps", "threshold", "violations", "confirm_points", "confirm_failures"],
        );
        let mut checks = Vec::new();
        let scans: Vec<_> = self
            .eps
            .par_iter()
            .map(|&eps| -> Result<_, Error> {
                let scan = find_validity_threshold(self.c, &self.v, &self.edges, eps, &self.ts)?;
                let confirm = match scan.threshold {
                    Some(t) => {
                        let grid = geometric_grid(t, 10.0 * t, CONFIRM_POINTS + 1)?;
                        grid[1..]
                            .iter()
                            .map(|&s| {
                                let sum = gaussian_lattice_sum(self.c, &self.v, &self.edges, s)?.log_value;
                                let bound = int_lem_bound(self.c, &self.v, &self.edges, s, eps)?;
                                Ok((s, sum - bound))
                            })
                            .collect::<Result<Vec<_>, Error>>()?
                    }
                    None => Vec::new(),
                };
                Ok((eps, scan, confirm))
            })
            .collect::<Result<_, Error>>()?;
        for (eps, scan, confirm) in scans {
            for row in &scan.rows {
                scan_table.push(vec![eps.into(), row.t.into(), row.lattice_sum.into(), row.bound.into(), row.holds.into()]);
            }
            let failures = confirm.iter().filter(|(_, excess)| *excess > 0.0).count();
            let worst = confirm.iter().map(|(_, e)| -e).fold(f64::INFINITY, f64::min);
            confirm_table.push(vec![
                eps.into(),
                scan.threshold.unwrap_or(f64::NAN).into(),
                scan.violations.len().into(),
                confirm.len().into(),
                failures.into(),
            ]);
            checks.push(Check::new(
                format!("int-lem eps={eps}"),
                scan.threshold.is_some() && failures == 0,
                if scan.threshold.is_some() { worst } else { f64::NEG_INFINITY },
                format!(
                    "threshold={} violations below it={}",
                    scan.threshold.map_or("none".to_string(), |t| format!("{t:.6}")),
                    scan.violations.len()
                ),
            ));
        }
        Ok(Report {
            tables: vec![scan_table, confirm_table],
            checks,
        })
    }
}

/// Weak-growth budgets of weak interactions along growing `x`.
#[derive(Clone, Debug)]
pub struct WeakBudgetScan {
    pub model: InteractionModel,
    pub log_x: Vec<f64>,
    pub n_factor: f64,
}

impl WeakBudgetScan {
    pub(super) fn parse(r: &mut Reader) -> Result<Self, ConfigError> {
        let dim = r.count_or("geometry.d", 1)?;
        if !(1..=3).contains(&dim) {
            return Err(invalid("geometry.d", "must be 1, 2 or 3"));
        }
        let kind = r.word("model.kind", &["area", "softshell", "strauss", "hardcore", "null", "tabulated"])?;
        if kind != "area" && kind != "softshell" {
            return Err(invalid("model.kind", format!("weak-condition budgets need area or softshell, not {kind}")));
        }
        let model = gibbs_model(r, &kind, dim as usize)?;
        let log_x = r.numbers("weak.log_x")?;
        if log_x.iter().any(|l| !(l.is_finite() && *l > 0.0)) || log_x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("weak.log_x", "must be positive and strictly increasing"));
        }
        let n_factor = r.positive_or("weak.n_factor", 1.1)?;
        Ok(WeakBudgetScan { model, log_x, n_factor })
    }

    pub fn run(&self) -> Result<Report, RunError> {
        let mut table = Table::new(None, &["log_x", "x", "n", "radius", "budget", "ratio"]);
        let mut ratios = Vec::new();
        for &l in &self.log_x {
            let x = l.exp();
            let n = (self.n_factor * x).ceil() as u64;
            let w = weak_condition_budget(&self.model, n, x)?;
            ratios.push(w.ratio);
            table.push(vec![l.into(), x.into(), n.into(), w.radius.into(), w.budget.into(), w.ratio.into()]);
        }
        let margin = ratios.windows(2).map(|w| w[0] - w[1]).fold(f64::INFINITY, f64::min);
        let check = Check::new(
            "weak-budget-decay",
            ratios.len() >= 2 && margin > 0.0,
            margin,
            format!("ratios={ratios:?}"),
        );
        Ok(Report {
            tables: vec![table],
            checks: vec![check],
        })
    }
}
