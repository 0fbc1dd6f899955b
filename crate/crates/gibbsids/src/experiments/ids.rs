use rayon::prelude::*;

use gibbsids_core::bounds::{pastur_slope_fit, quadratic_slope_fit, SlopeFit};
use gibbsids_core::packing::{norm_u_s, potential_floor, InteractionWindow};
use gibbsids_core::sampler::stream_rng;
use gibbsids_core::schrodinger::{
    potential_on_grid, replica_counts, ConfigurationSource, DiscreteOperator, IdsEstimate, IdsSettings,
};
use gibbsids_core::{Error, InteractionModel, PairPotential, SingleSitePotential};

use super::{dimension, invalid, potential, proposal, RunError};
use crate::config::{interval, lambda_grid, ConfigError, Reader};
use crate::output::{Check, Report, Table};

/// Which tail law the IDS is compared against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    Pastur,
    Quadratic,
}

fn settings(r: &mut Reader, dim: usize, lambdas: Vec<f64>, seed: u64) -> Result<IdsSettings, ConfigError> {
    Ok(IdsSettings {
        dim,
        length: r.positive("geometry.L")?,
        spacing: r.positive("geometry.h")?,
        lambdas,
        replicas: r.count("sampler.replicas")? as usize,
        seed,
        padding: r.opt("geometry.padding", "a number")?,
    })
}

fn gibbs_source(r: &mut Reader, potential: PairPotential, dim: usize) -> Result<ConfigurationSource, ConfigError> {
    Ok(ConfigurationSource::Gibbs {
        model: InteractionModel::pairwise(potential, dim),
        proposal: proposal(r)?,
        burn_in: r.count("sampler.burn_in")?,
    })
}

fn counts_parallel(
    source: &ConfigurationSource,
    u0: &SingleSitePotential,
    settings: &IdsSettings,
) -> Result<Vec<Vec<usize>>, Error> {
    (0..settings.replicas)
        .into_par_iter()
        .map(|k| replica_counts(source, u0, settings, k))
        .collect()
}

/// IDS sweep of a Poisson or Strauss configuration field, with its slope fit.
#[derive(Clone, Debug)]
pub struct IdsRun {
    pub regime: Regime,
    pub u0: SingleSitePotential,
    pub source: ConfigurationSource,
    pub settings: IdsSettings,
    pub fit_window: Option<(f64, f64)>,
    /// Strauss strength and the window of the separated-packing norm.
    pub strength: f64,
    pub norm_window: Option<InteractionWindow>,
    pub norm_resolution: f64,
}

impl IdsRun {
    pub(super) fn parse(r: &mut Reader, regime: Regime, seed: u64) -> Result<Self, ConfigError> {
        let dim = dimension(r)?;
        let u0 = potential(r, dim)?;
        let lambdas = lambda_grid(r)?;
        let settings = settings(r, dim, lambdas, seed)?;
        let fit_window = interval(r, "sweep.fit_window")?;
        let run = match regime {
            Regime::Pastur => {
                r.word_or("model.kind", &["poisson"], "poisson")?;
                IdsRun {
                    regime,
                    u0,
                    source: ConfigurationSource::Poisson {
                        intensity: r.positive_or("model.z", 1.0)?,
                    },
                    settings,
                    fit_window,
                    strength: 0.0,
                    norm_window: None,
                    norm_resolution: 0.0,
                }
            }
            Regime::Quadratic => {
                r.word_or("model.kind", &["strauss"], "strauss")?;
                let a = r.positive("model.a")?;
                let range = r.positive("model.R")?;
                let pair = PairPotential::strauss(a, range).map_err(|e| invalid("model", e))?;
                let norm_window = InteractionWindow::ball(range, dim)
                    .map_err(|e| invalid("model.R", e))?
                    .closed();
                IdsRun {
                    regime,
                    u0,
                    source: gibbs_source(r, pair, dim)?,
                    settings,
                    fit_window,
                    strength: a,
                    norm_window: Some(norm_window),
                    norm_resolution: r.positive_or("packing.norm_resolution", 1e-3)?,
                }
            }
        };
        run.settings.validate(&run.u0).map_err(|e| invalid("geometry", e))?;
        Ok(run)
    }

    pub fn estimate(&self) -> Result<IdsEstimate, RunError> {
        let counts = counts_parallel(&self.source, &self.u0, &self.settings)?;
        Ok(IdsEstimate::from_counts(&self.settings, &counts)?)
    }

    pub fn fit(&self, ids: &IdsEstimate) -> Result<(SlopeFit, Option<f64>), RunError> {
        match self.regime {
            Regime::Pastur => Ok((pastur_slope_fit(ids, self.u0.at_origin(), self.fit_window)?, None)),
            Regime::Quadratic => {
                let s = self.norm_window.as_ref().expect("quadratic runs carry a window");
                let norm = norm_u_s(&self.u0.reflected(), s, self.norm_resolution)?.value;
                Ok((quadratic_slope_fit(ids, self.strength, norm, self.fit_window)?, Some(norm)))
            }
        }
    }

    pub fn run(&self) -> Result<Report, RunError> {
        let ids = self.estimate()?;
        let mut table = Table::new(None, &["lambda", "n_hat", "std_error", "ci_low", "ci_high"]);
        for i in 0..ids.lambdas.len() {
            table.push(vec![
                ids.lambdas[i].into(),
                ids.n_hat[i].into(),
                ids.std_error[i].into(),
                ids.ci_low[i].into(),
                ids.ci_high[i].into(),
            ]);
        }
        let mut report = Report {
            tables: vec![table],
            checks: Vec::new(),
        };
        match self.fit(&ids) {
            Ok((fit, norm)) => {
                report.tables.push(fit_table(&fit, norm));
                report.checks.extend(fit_checks(&fit));
            }
            Err(RunError::Core(Error::EmptyFitWindow)) => {
                report.checks.push(Check::new(
                    "fit-window",
                    false,
                    f64::NAN,
                    "no admissible λ in the fit window",
                ));
            }
            Err(e) => return Err(e),
        }
        Ok(report)
    }
}

fn fit_table(fit: &SlopeFit, norm: Option<f64>) -> Table {
    let mut t = Table::new(
        Some("fit"),
        &["lambda", "ordinate", "ordinate_error", "in_window", "target", "norm"],
    );
    for i in 0..fit.lambdas.len() {
        let l = fit.lambdas[i];
        t.push(vec![
            l.into(),
            fit.ordinates[i].into(),
            fit.ordinate_errors[i].into(),
            (l >= fit.window.0 && l <= fit.window.1).into(),
            fit.target.into(),
            norm.unwrap_or(f64::NAN).into(),
        ]);
    }
    t
}

/// Fewest window ordinates for a spread to mean anything.
pub const MIN_STABLE_POINTS: usize = 3;

/// The regime checks on the ordinates inside the fit window.
pub fn fit_checks(fit: &SlopeFit) -> Vec<Check> {
    let window = format!("window=[{}, {}]", fit.window.0, fit.window.1);
    let ordinates: Vec<f64> = fit.window_ordinates().map(|(_, o)| o).collect();
    match fit.regime {
        gibbsids_core::bounds::TailRegime::Pastur => {
            let worst = ordinates
                .iter()
                .map(|o| (o / fit.target).ln().abs())
                .fold(0.0, f64::max);
            let margin = std::f64::consts::LN_2 - worst;
            vec![Check::new(
                "pastur-ordinate-factor-2",
                margin >= 0.0,
                margin,
                format!("plateau={:.4} target={:.4} points={} {window}", fit.plateau, fit.target, ordinates.len()),
            )]
        }
        gibbsids_core::bounds::TailRegime::Quadratic => {
            let top = ordinates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let margin = 0.5 - fit.relative_spread;
            vec![
                Check::new(
                    "quadratic-ordinate-negative",
                    top < 0.0,
                    -top,
                    format!("max ordinate={top:.5} target={:.5} {window}", fit.target),
                ),
                Check::new(
                    "quadratic-ordinate-stable",
                    margin > 0.0 && ordinates.len() >= MIN_STABLE_POINTS,
                    margin,
                    format!("relative spread={:.4} points={} {window}", fit.relative_spread, ordinates.len()),
                ),
            ]
        }
    }
}

/// Hardcore configuration field against the floor of `V_η`.
#[derive(Clone, Debug)]
pub struct FloorRun {
    pub u0: SingleSitePotential,
    pub range: f64,
    pub cells_per_unit: usize,
    pub source: ConfigurationSource,
    pub settings: IdsSettings,
}

/// Default λ grid: this many points on each side of the floor.
const FLOOR_GRID_HALF: usize = 16;

impl FloorRun {
    pub(super) fn parse(r: &mut Reader, seed: u64) -> Result<Self, ConfigError> {
        let dim = dimension(r)?;
        let u0 = potential(r, dim)?;
        r.word_or("model.kind", &["hardcore"], "hardcore")?;
        let range = r.positive("model.R")?;
        let pair = PairPotential::hardcore(range).map_err(|e| invalid("model.R", e))?;
        let lambdas = if r.has("sweep.lambda") || r.has("sweep.lambda_min") {
            lambda_grid(r)?
        } else {
            Vec::new()
        };
        let cells_per_unit = r.count_or("packing.cells_per_unit", 8)? as usize;
        if cells_per_unit == 0 {
            return Err(invalid("packing.cells_per_unit", "must be positive"));
        }
        let run = FloorRun {
            source: gibbs_source(r, pair, dim)?,
            settings: settings(r, dim, lambdas, seed)?,
            u0,
            range,
            cells_per_unit,
        };
        let mut probe = run.settings.clone();
        probe.lambdas = vec![0.0];
        probe.validate(&run.u0).map_err(|e| invalid("geometry", e))?;
        Ok(run)
    }

    pub fn run(&self) -> Result<Report, RunError> {
        let floor = potential_floor(&self.u0, self.range, self.cells_per_unit)?;
        let beta = floor.floor;
        let mut settings = self.settings.clone();
        if settings.lambdas.is_empty() {
            let step = self.u0.max_abs() / FLOOR_GRID_HALF as f64;
            settings.lambdas = (0..2 * FLOOR_GRID_HALF)
                .map(|k| beta + step * (k as f64 - FLOOR_GRID_HALF as f64 + 0.5))
                .collect();
        }
        let grid = settings.grid()?;
        let window = settings.sampling_window(&self.u0, &self.source)?;
        let rows: Vec<(f64, usize, Vec<usize>)> = (0..settings.replicas)
            .into_par_iter()
            .map(|k| {
                let mut rng = stream_rng(settings.seed, k as u64);
                let config = self.source.sample(&window, &mut rng)?;
                let v = potential_on_grid(&config, &self.u0, &grid)?;
                let min = v.iter().copied().fold(f64::INFINITY, f64::min);
                let counts = DiscreteOperator::with_potential(grid.clone(), v)?.counts_leq(&settings.lambdas)?;
                Ok((min, config.len(), counts))
            })
            .collect::<Result<_, Error>>()?;

        let mut field = Table::new(None, &["replica", "points", "min_potential", "floor", "margin"]);
        for (k, (min, points, _)) in rows.iter().enumerate() {
            field.push(vec![k.into(), (*points).into(), (*min).into(), beta.into(), (min - beta).into()]);
        }
        let counts: Vec<Vec<usize>> = rows.iter().map(|r| r.2.clone()).collect();
        let ids = IdsEstimate::from_counts(&settings, &counts)?;
        let mut sweep = Table::new(Some("ids"), &["lambda", "below_floor", "n_hat", "max_count"]);
        let mut below = 0usize;
        let mut below_hits = 0usize;
        for (i, &l) in settings.lambdas.iter().enumerate() {
            let max = counts.iter().map(|c| c[i]).max().unwrap_or(0);
            if l < beta {
                below += 1;
                below_hits += counts.iter().map(|c| c[i]).sum::<usize>();
            }
            sweep.push(vec![l.into(), (l < beta).into(), ids.n_hat[i].into(), max.into()]);
        }
        let margin = rows.iter().map(|r| r.0 - beta).fold(f64::INFINITY, f64::min);
        let checks = vec![
            Check::new(
                "potential-above-floor",
                margin >= 0.0,
                margin,
                format!("floor={beta:.6} packing_bound={:.6} cap={}", floor.packing_bound, floor.cap),
            ),
            Check::new(
                "ids-vanishes-below-floor",
                below > 0 && below_hits == 0,
                0.0 - below_hits as f64,
                format!("λ below floor={below} eigenvalues counted there={below_hits}"),
            ),
        ];
        Ok(Report {
            tables: vec![field, sweep],
            checks,
        })
    }
}
