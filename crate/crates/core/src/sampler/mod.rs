//! Poisson sampling and birth-death-move Metropolis-Hastings chains for
//! finite-volume Gibbs specifications.

mod estimators;

pub use estimators::{
    check_domination, estimate_count_pmf, laplace_functional_mc, laplace_functional_mc_blocked,
    log_poisson_laplace, partition_bounds, poisson_laplace_closed_form, ConfigFunctional, Constant, CountIn, CountPmfEstimate,
    DominationReport, SiteSum,
};

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::configuration::PointConfiguration;
use crate::error::{Error, Result};
use crate::geometry::{BoxDomain, Point};
use crate::interaction::InteractionModel;
use crate::num::{self, Energy};
use crate::stats;

const TOL2: f64 = crate::geometry::COINCIDENCE_TOLERANCE * crate::geometry::COINCIDENCE_TOLERANCE;

/// Random stream `stream` of the run seeded by `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Poisson point process of intensity `z` on `window`.
pub fn sample_poisson<R: Rng + ?Sized>(window: &BoxDomain, intensity: f64, rng: &mut R) -> Result<PointConfiguration> {
    if !(intensity.is_finite() && intensity > 0.0) {
        return Err(Error::invalid("intensity", "must be positive and finite"));
    }
    let mean = intensity * window.volume();
    let count = Poisson::new(mean)
        .map_err(|_| Error::invalid("intensity", "Poisson mean out of range"))?
        .sample(rng) as usize;
    let mut config = PointConfiguration::empty(window.clone());
    let points = config.points_mut();
    points.reserve(count);
    while points.len() < count {
        let x = window.sample_uniform(rng);
        if !points.iter().any(|p| p.distance_sq(&x) <= TOL2) {
            points.push(x);
        }
    }
    Ok(config)
}

/// `P_{Λ,γ}`: density `exp(-U_Λ(η_Λ + γ_{Λ^c}))` against the unit Poisson process on `Λ`.
#[derive(Clone, Debug)]
pub struct GibbsTarget {
    model: InteractionModel,
    window: BoxDomain,
    boundary: Vec<Point>,
}

impl GibbsTarget {
    /// Free boundary condition.
    pub fn new(model: InteractionModel, window: BoxDomain) -> Result<Self> {
        if model.dim() != window.dim() {
            return Err(Error::DimensionMismatch {
                expected: window.dim(),
                found: model.dim(),
            });
        }
        Ok(GibbsTarget {
            model,
            window,
            boundary: Vec::new(),
        })
    }

    /// Boundary configuration `γ`; its points must lie outside the window.
    /// Points farther than the interaction range are dropped.
    pub fn with_boundary(mut self, boundary: &PointConfiguration) -> Result<Self> {
        let reach = self.model.range();
        let mut kept = Vec::new();
        for (index, p) in boundary.points().iter().enumerate() {
            p.check_dim(self.window.dim())?;
            if self.window.contains(p) {
                return Err(Error::invalid(
                    "boundary",
                    alloc::format!("boundary point {index} lies inside the window"),
                ));
            }
            if self.window.distance_to(p) <= reach {
                kept.push(p.clone());
            }
        }
        self.boundary = kept;
        Ok(self)
    }

    pub fn model(&self) -> &InteractionModel {
        &self.model
    }

    pub fn window(&self) -> &BoxDomain {
        &self.window
    }

    pub fn boundary(&self) -> &[Point] {
        &self.boundary
    }

    /// `U_Λ(η + γ)` for a configuration of window points.
    pub fn energy(&self, config: &PointConfiguration) -> Energy {
        if self.boundary.is_empty() {
            return self.model.total_energy(config);
        }
        let mut all: Vec<Point> = config.points().to_vec();
        all.extend(self.boundary.iter().cloned());
        let hull = bounding_box(&all, &self.window);
        let joint = PointConfiguration::from_parts_unchecked(all, hull);
        self.model.conditional_energy(&joint, &self.window)
    }

    /// `h(x, η - δ_{x_skip} + γ)`.
    fn local_energy(&self, x: &Point, points: &[Point], skip: Option<usize>) -> Energy {
        let others = points
            .iter()
            .enumerate()
            .filter(move |(i, _)| Some(*i) != skip)
            .map(|(_, p)| p)
            .chain(self.boundary.iter());
        self.model.local_energy_among(x, others)
    }
}

fn bounding_box(points: &[Point], window: &BoxDomain) -> BoxDomain {
    let d = window.dim();
    let mut lo: Vec<f64> = (0..d).map(|i| window.lower(i)).collect();
    let mut hi: Vec<f64> = (0..d).map(|i| window.upper(i)).collect();
    for p in points {
        for i in 0..d {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    BoxDomain::from_bounds(&lo, &hi).unwrap_or_else(|_| window.clone())
}

/// Relative proposal weights and the move radius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProposalSettings {
    pub birth: f64,
    pub death: f64,
    pub displacement: f64,
    /// Radius of the uniform displacement ball; `None` uses half the interaction
    /// range (a quarter of the shortest window side for the null model).
    pub move_radius: Option<f64>,
}

impl Default for ProposalSettings {
    fn default() -> Self {
        ProposalSettings {
            birth: 1.0,
            death: 1.0,
            displacement: 1.0,
            move_radius: None,
        }
    }
}

impl ProposalSettings {
    pub fn validate(&self) -> Result<()> {
        let w = [self.birth, self.death, self.displacement];
        if w.iter().any(|x| !(x.is_finite() && *x >= 0.0)) || w.iter().sum::<f64>() <= 0.0 {
            return Err(Error::invalid("proposal", "weights must be nonnegative with a positive sum"));
        }
        if (self.birth > 0.0) != (self.death > 0.0) {
            return Err(Error::invalid("proposal", "birth and death must both be enabled or both disabled"));
        }
        if let Some(r) = self.move_radius {
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::invalid("move_radius", "must be positive and finite"));
            }
        }
        Ok(())
    }

    fn radius_for(&self, target: &GibbsTarget) -> f64 {
        self.move_radius.unwrap_or_else(|| {
            let range = target.model.range();
            if range > 0.0 {
                0.5 * range
            } else {
                0.25 * target.window.sides().iter().copied().fold(f64::INFINITY, f64::min)
            }
        })
    }
}

/// Which kind of proposal a step made.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Proposal {
    Birth,
    Death,
    Move,
}

/// Chain position: configuration in the window, steps taken, stream id.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainState {
    configuration: PointConfiguration,
    step: u64,
    stream: u64,
}

impl ChainState {
    /// Empty starting configuration (always feasible).
    pub fn empty(target: &GibbsTarget, stream: u64) -> Self {
        ChainState {
            configuration: PointConfiguration::empty(target.window.clone()),
            step: 0,
            stream,
        }
    }

    /// Start from `configuration`, which must lie in the window with finite energy.
    pub fn from_configuration(target: &GibbsTarget, configuration: PointConfiguration, stream: u64) -> Result<Self> {
        let configuration = configuration.rebound(target.window.clone())?;
        if target.energy(&configuration).is_infinite() {
            return Err(Error::invalid("configuration", "initial state has infinite energy"));
        }
        Ok(ChainState {
            configuration,
            step: 0,
            stream,
        })
    }

    pub fn configuration(&self) -> &PointConfiguration {
        &self.configuration
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }
}

/// Outcome of one step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StepOutcome {
    pub proposal: Proposal,
    pub accepted: bool,
}

fn uniform_in_ball<R: Rng + ?Sized>(center: &Point, radius: f64, rng: &mut R) -> Point {
    let d = center.dim();
    loop {
        let offset: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        if offset.iter().map(|v| v * v).sum::<f64>() <= 1.0 {
            return Point::new(center.coords().iter().zip(&offset).map(|(c, o)| c + radius * o));
        }
    }
}

fn accept<R: Rng + ?Sized>(log_ratio: f64, rng: &mut R) -> bool {
    log_ratio >= 0.0 || rng.random::<f64>() < num::exp(log_ratio)
}

/// Log Metropolis-Hastings ratio for adding `x` to the window points:
/// `ln(|Λ| e^{-h(x, η+γ)} / (n+1))`, `-inf` if the birth is infeasible.
pub fn birth_log_ratio(target: &GibbsTarget, points: &[Point], x: &Point) -> f64 {
    if points.iter().any(|p| p.distance_sq(x) <= TOL2) {
        return f64::NEG_INFINITY;
    }
    match target.local_energy(x, points, None) {
        Energy::Infinite => f64::NEG_INFINITY,
        Energy::Finite(h) => num::ln(target.window.volume()) - h - num::ln((points.len() + 1) as f64),
    }
}

/// Log ratio for removing point `index`: `ln(n e^{h(x, η-δ_x+γ)} / |Λ|)`.
pub fn death_log_ratio(target: &GibbsTarget, points: &[Point], index: usize) -> f64 {
    match target.local_energy(&points[index], points, Some(index)) {
        // removing a point from an infeasible state always restores feasibility
        Energy::Infinite => f64::INFINITY,
        Energy::Finite(h) => num::ln(points.len() as f64) + h - num::ln(target.window.volume()),
    }
}

/// Log ratio for moving point `index` to `y`: `h(x_i) - h(y)` against the other points.
pub fn move_log_ratio(target: &GibbsTarget, points: &[Point], index: usize, y: &Point) -> f64 {
    let coincides = points
        .iter()
        .enumerate()
        .any(|(j, p)| j != index && p.distance_sq(y) <= TOL2);
    if !target.window.contains(y) || coincides {
        return f64::NEG_INFINITY;
    }
    match target.local_energy(y, points, Some(index)) {
        Energy::Infinite => f64::NEG_INFINITY,
        Energy::Finite(h_new) => match target.local_energy(&points[index], points, Some(index)) {
            Energy::Infinite => f64::INFINITY,
            Energy::Finite(h_old) => h_old - h_new,
        },
    }
}

/// One birth-death-move Metropolis-Hastings step in place.
pub fn mcmc_step_in_place<R: Rng + ?Sized>(
    state: &mut ChainState,
    target: &GibbsTarget,
    settings: &ProposalSettings,
    rng: &mut R,
) -> StepOutcome {
    state.step += 1;
    let total = settings.birth + settings.death + settings.displacement;
    let pick = rng.random::<f64>() * total;
    let proposal = if pick < settings.birth {
        Proposal::Birth
    } else if pick < settings.birth + settings.death {
        Proposal::Death
    } else {
        Proposal::Move
    };
    let n = state.configuration.len();
    let accepted = match proposal {
        Proposal::Birth => {
            let x = target.window.sample_uniform(rng);
            let ok = accept(birth_log_ratio(target, state.configuration.points(), &x), rng);
            if ok {
                state.configuration.points_mut().push(x);
            }
            ok
        }
        Proposal::Death => {
            if n == 0 {
                false
            } else {
                let i = rng.random_range(0..n);
                let ok = accept(death_log_ratio(target, state.configuration.points(), i), rng);
                if ok {
                    state.configuration.points_mut().swap_remove(i);
                }
                ok
            }
        }
        Proposal::Move => {
            if n == 0 {
                false
            } else {
                let i = rng.random_range(0..n);
                let y = uniform_in_ball(&state.configuration.points()[i], settings.radius_for(target), rng);
                let ok = accept(move_log_ratio(target, state.configuration.points(), i, &y), rng);
                if ok {
                    state.configuration.points_mut()[i] = y;
                }
                ok
            }
        }
    };
    StepOutcome { proposal, accepted }
}

/// One step, returning the new state.
pub fn mcmc_step<R: Rng + ?Sized>(
    state: &ChainState,
    target: &GibbsTarget,
    settings: &ProposalSettings,
    rng: &mut R,
) -> ChainState {
    let mut next = state.clone();
    mcmc_step_in_place(&mut next, target, settings, rng);
    next
}

/// Step budget of a chain: `steps` total, the first `burn_in` discarded, then
/// one sample every `thinning` steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChainSchedule {
    pub steps: u64,
    pub burn_in: u64,
    pub thinning: u64,
}

impl ChainSchedule {
    pub fn new(steps: u64, burn_in: u64, thinning: u64) -> Result<Self> {
        let s = ChainSchedule {
            steps,
            burn_in,
            thinning,
        };
        s.validate()?;
        Ok(s)
    }

    /// `burn_in = 10⁴ × expected count` (at least `10⁴`), thinning 10, and enough
    /// steps for `samples` retained configurations.
    pub fn for_samples(window: &BoxDomain, intensity: f64, samples: u64) -> Self {
        let expected = num::ceil(intensity * window.volume()).max(1.0) as u64;
        let burn_in = 10_000 * expected;
        ChainSchedule {
            steps: burn_in + 10 * samples,
            burn_in,
            thinning: 10,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.burn_in >= self.steps {
            return Err(Error::invalid("burn_in", "must be smaller than steps"));
        }
        if self.thinning == 0 {
            return Err(Error::invalid("thinning", "must be at least 1"));
        }
        Ok(())
    }

    pub fn retained(&self) -> u64 {
        (self.steps - self.burn_in) / self.thinning
    }
}

/// Acceptance counters per proposal kind: `(proposed, accepted)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AcceptanceStats {
    pub birth: (u64, u64),
    pub death: (u64, u64),
    pub displacement: (u64, u64),
}

impl AcceptanceStats {
    fn record(&mut self, outcome: StepOutcome) {
        let slot = match outcome.proposal {
            Proposal::Birth => &mut self.birth,
            Proposal::Death => &mut self.death,
            Proposal::Move => &mut self.displacement,
        };
        slot.0 += 1;
        slot.1 += outcome.accepted as u64;
    }
}

/// Drive a chain through `schedule`, calling `visit` on every retained state.
pub fn run_chain_with<R, F>(
    state: &mut ChainState,
    target: &GibbsTarget,
    settings: &ProposalSettings,
    schedule: &ChainSchedule,
    rng: &mut R,
    mut visit: F,
) -> Result<AcceptanceStats>
where
    R: Rng + ?Sized,
    F: FnMut(&PointConfiguration),
{
    schedule.validate()?;
    settings.validate()?;
    let mut acceptance = AcceptanceStats::default();
    for k in 1..=schedule.steps {
        acceptance.record(mcmc_step_in_place(state, target, settings, rng));
        if k > schedule.burn_in && (k - schedule.burn_in) % schedule.thinning == 0 {
            visit(&state.configuration);
        }
    }
    Ok(acceptance)
}

/// Retained samples of a chain together with diagnostics.
#[derive(Clone, Debug)]
pub struct ChainRun {
    pub samples: Vec<PointConfiguration>,
    /// Effective sample size of the window count series.
    pub count_ess: f64,
    pub acceptance: AcceptanceStats,
    pub final_state: ChainState,
}

/// Chain from the empty configuration.
pub fn run_chain<R: Rng + ?Sized>(
    target: &GibbsTarget,
    settings: &ProposalSettings,
    schedule: &ChainSchedule,
    stream: u64,
    rng: &mut R,
) -> Result<ChainRun> {
    let mut state = ChainState::empty(target, stream);
    let mut samples = Vec::with_capacity(schedule.retained().min(1 << 24) as usize);
    let acceptance = run_chain_with(&mut state, target, settings, schedule, rng, |c| samples.push(c.clone()))?;
    let counts: Vec<f64> = samples.iter().map(|c| c.len() as f64).collect();
    Ok(ChainRun {
        count_ess: stats::effective_sample_size(&counts),
        samples,
        acceptance,
        final_state: state,
    })
}

/// The chain's state after `burn_in` steps: one approximately stationary draw.
pub fn sample_gibbs<R: Rng + ?Sized>(
    target: &GibbsTarget,
    settings: &ProposalSettings,
    burn_in: u64,
    rng: &mut R,
) -> Result<PointConfiguration> {
    settings.validate()?;
    let mut state = ChainState::empty(target, 0);
    for _ in 0..burn_in {
        mcmc_step_in_place(&mut state, target, settings, rng);
    }
    Ok(state.configuration)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interaction::PairPotential;

    fn strauss_target() -> GibbsTarget {
        let model = InteractionModel::pairwise(PairPotential::strauss(1.0, 1.0).unwrap(), 1);
        GibbsTarget::new(model, BoxDomain::interval(0.0, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn schedule_rules() {
        assert!(ChainSchedule::new(10, 10, 1).is_err());
        assert!(ChainSchedule::new(10, 0, 0).is_err());
        assert_eq!(ChainSchedule::new(25, 5, 4).unwrap().retained(), 5);
    }

    #[test]
    fn thinning_one_returns_every_step() {
        let target = strauss_target();
        let schedule = ChainSchedule::new(100, 0, 1).unwrap();
        let run = run_chain(&target, &ProposalSettings::default(), &schedule, 0, &mut stream_rng(1, 0)).unwrap();
        assert_eq!(run.samples.len(), 100);
    }

    #[test]
    fn same_seed_same_stream() {
        let target = strauss_target();
        let schedule = ChainSchedule::new(2000, 100, 3).unwrap();
        let a = run_chain(&target, &ProposalSettings::default(), &schedule, 0, &mut stream_rng(7, 2)).unwrap();
        let b = run_chain(&target, &ProposalSettings::default(), &schedule, 0, &mut stream_rng(7, 2)).unwrap();
        assert_eq!(a.samples, b.samples);
        let c = run_chain(&target, &ProposalSettings::default(), &schedule, 0, &mut stream_rng(7, 3)).unwrap();
        assert_ne!(a.samples, c.samples);
    }

    #[test]
    fn boundary_points_must_be_outside() {
        let target = strauss_target();
        let inside = PointConfiguration::new(
            alloc::vec![Point::from(0.5)],
            BoxDomain::interval(-3.0, 3.0).unwrap(),
        )
        .unwrap();
        assert!(target.clone().with_boundary(&inside).is_err());
        let outside = PointConfiguration::new(
            alloc::vec![Point::from(1.5), Point::from(2.5)],
            BoxDomain::interval(-3.0, 3.0).unwrap(),
        )
        .unwrap();
        let t = target.with_boundary(&outside).unwrap();
        assert_eq!(t.boundary().len(), 1);
    }

    #[test]
    fn poisson_count_mean() {
        let window = BoxDomain::from_bounds(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let mut rng = stream_rng(3, 0);
        let n = 20_000;
        let total: usize = (0..n).map(|_| sample_poisson(&window, 2.0, &mut rng).unwrap().len()).sum();
        let mean = total as f64 / n as f64;
        assert!((mean - 2.0).abs() < 3.0 * num::sqrt(2.0 / n as f64));
        assert!(sample_poisson(&window, 0.0, &mut rng).is_err());
    }
}
