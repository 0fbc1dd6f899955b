//! The catalog of named experiments: parsing a configuration into a runnable
//! experiment and executing it.

mod certify;
mod ids;
mod packing;

use gibbsids_core::interaction::{InteractionModel, PairPotential};
use gibbsids_core::packing::InteractionWindow;
use gibbsids_core::sampler::ProposalSettings;
use gibbsids_core::{Layout, RadialTable, SingleSitePotential};

use crate::config::{ConfigError, RawConfig, Reader};
use crate::output::Report;

pub use certify::{IntLemScan, LaplaceBound, TailSandwich, WeakBudgetScan};
pub use ids::{FloorRun, IdsRun, Regime};
pub use packing::{NormScan, Upper2Scan};

/// Failures while running an experiment.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] gibbsids_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One line of `list`.
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub required: &'static [&'static str],
}

const IDS_KEYS: &[&str] = &[
    "seed",
    "potential.profile",
    "potential.depth",
    "potential.radius",
    "geometry.d",
    "geometry.L",
    "geometry.h",
    "sampler.replicas",
    "sweep.lambda",
];

pub const CATALOG: &[CatalogEntry] = &[
    CatalogEntry {
        name: "poisson-ids",
        description: "IDS under a Poisson process with the Pastur slope fit",
        required: IDS_KEYS,
    },
    CatalogEntry {
        name: "strauss-ids",
        description: "IDS under a Strauss process with the quadratic slope fit",
        required: &[
            "seed",
            "model.a",
            "model.R",
            "potential.profile",
            "potential.depth",
            "potential.radius",
            "geometry.d",
            "geometry.L",
            "geometry.h",
            "sampler.replicas",
            "sampler.burn_in",
            "sweep.lambda",
        ],
    },
    CatalogEntry {
        name: "hardcore-floor",
        description: "hardcore potential field against its packing floor, and vanishing IDS below it",
        required: &[
            "seed",
            "model.R",
            "potential.profile",
            "potential.depth",
            "potential.radius",
            "geometry.d",
            "geometry.L",
            "geometry.h",
            "sampler.replicas",
            "sampler.burn_in",
        ],
    },
    CatalogEntry {
        name: "tail-sandwich",
        description: "empirical count law of a Strauss window between the explicit tail bounds",
        required: &["seed", "model.a", "model.R", "geometry.d", "geometry.L", "sampler.steps", "sampler.burn_in"],
    },
    CatalogEntry {
        name: "laplace-bound",
        description: "Monte Carlo Laplace functional of a Strauss cell layout against its quadratic bound",
        required: &["seed", "model.a", "model.R", "layout.breaks", "layout.v", "sweep.t", "sampler.steps", "sampler.burn_in"],
    },
    CatalogEntry {
        name: "intlem-scan",
        description: "Gaussian lattice sums against their quadratic bound and the validity threshold",
        required: &["seed", "intlem.c", "intlem.v", "intlem.eps", "intlem.t_min", "intlem.t_max"],
    },
    CatalogEntry {
        name: "norm-S",
        description: "separated-packing norm of u on refining lattices",
        required: &["seed", "potential.profile", "potential.depth", "potential.radius", "geometry.d", "window.shape", "packing.resolution"],
    },
    CatalogEntry {
        name: "upper2-scan",
        description: "staircase approximations on eroded windows converging to the packing norm",
        required: &["seed", "potential.profile", "potential.depth", "potential.radius", "geometry.d", "window.shape", "packing.n"],
    },
    CatalogEntry {
        name: "weak-budget",
        description: "energy budgets of the weak growth condition against x log x",
        required: &["seed", "model.kind", "model.R", "weak.log_x"],
    },
];

/// A validated configuration.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub name: &'static str,
    pub seed: u64,
    pub hash: String,
    pub experiment: Experiment,
}

#[derive(Clone, Debug)]
pub enum Experiment {
    Ids(IdsRun),
    Floor(FloorRun),
    Tail(TailSandwich),
    Laplace(LaplaceBound),
    IntLem(IntLemScan),
    Norm(NormScan),
    Upper2(Upper2Scan),
    Weak(WeakBudgetScan),
}

impl ExperimentConfig {
    /// Validates every key; unknown keys are rejected with their path.
    pub fn parse(raw: &RawConfig) -> Result<Self, ConfigError> {
        Self::parse_inner(raw).map_err(|e| match e {
            ConfigError::Missing(path) => match raw.near_miss(&path) {
                Some(found) => ConfigError::Misspelled {
                    found: found.to_string(),
                    expected: path,
                },
                None => ConfigError::Missing(path),
            },
            e => e,
        })
    }

    fn parse_inner(raw: &RawConfig) -> Result<Self, ConfigError> {
        let mut r = raw.reader();
        let kind: String = r.req("experiment", "an experiment name")?;
        let entry = CATALOG
            .iter()
            .find(|e| e.name == kind)
            .ok_or_else(|| ConfigError::Invalid {
                key: "experiment".into(),
                reason: format!("unknown experiment `{kind}`"),
            })?;
        let seed: u64 = r.req("seed", "a nonnegative integer")?;
        let experiment = match entry.name {
            "poisson-ids" => Experiment::Ids(IdsRun::parse(&mut r, Regime::Pastur, seed)?),
            "strauss-ids" => Experiment::Ids(IdsRun::parse(&mut r, Regime::Quadratic, seed)?),
            "hardcore-floor" => Experiment::Floor(FloorRun::parse(&mut r, seed)?),
            "tail-sandwich" => Experiment::Tail(TailSandwich::parse(&mut r)?),
            "laplace-bound" => Experiment::Laplace(LaplaceBound::parse(&mut r)?),
            "intlem-scan" => Experiment::IntLem(IntLemScan::parse(&mut r)?),
            "norm-S" => Experiment::Norm(NormScan::parse(&mut r)?),
            "upper2-scan" => Experiment::Upper2(Upper2Scan::parse(&mut r)?),
            _ => Experiment::Weak(WeakBudgetScan::parse(&mut r)?),
        };
        r.finish()?;
        Ok(ExperimentConfig {
            name: entry.name,
            seed,
            hash: raw.hash(),
            experiment,
        })
    }

    /// Runs inside the current rayon pool; results do not depend on its size.
    pub fn run(&self) -> Result<Report, RunError> {
        match &self.experiment {
            Experiment::Ids(e) => e.run(),
            Experiment::Floor(e) => e.run(),
            Experiment::Tail(e) => e.run(self.seed),
            Experiment::Laplace(e) => e.run(self.seed),
            Experiment::IntLem(e) => e.run(),
            Experiment::Norm(e) => e.run(),
            Experiment::Upper2(e) => e.run(),
            Experiment::Weak(e) => e.run(),
        }
    }
}

fn invalid(key: &str, e: impl std::fmt::Display) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        reason: e.to_string(),
    }
}

fn dimension(r: &mut Reader) -> Result<usize, ConfigError> {
    let d: u64 = r.count("geometry.d")?;
    if !(1..=3).contains(&d) {
        return Err(invalid("geometry.d", "must be 1, 2 or 3"));
    }
    Ok(d as usize)
}

fn knots(r: &mut Reader, path: &str) -> Result<RadialTable, ConfigError> {
    let values = r.numbers(path)?;
    if values.len() % 2 != 0 {
        return Err(invalid(path, "expected radius value pairs"));
    }
    let pairs = values.chunks(2).map(|c| (c[0], c[1])).collect();
    RadialTable::new(pairs).map_err(|e| invalid(path, e))
}

fn potential(r: &mut Reader, dim: usize) -> Result<SingleSitePotential, ConfigError> {
    let profile = r.word("potential.profile", &["triangular", "cosine", "tabulated"])?;
    let u0 = match profile.as_str() {
        "tabulated" => {
            let table = knots(r, "potential.knots")?;
            let layout = match r.word_or("potential.layout", &["radial", "separable"], "radial")?.as_str() {
                "radial" => Layout::Radial,
                _ => Layout::Separable,
            };
            SingleSitePotential::tabulated(table, layout, dim)
        }
        "triangular" => SingleSitePotential::triangular(r.positive("potential.depth")?, r.positive("potential.radius")?, dim),
        _ => SingleSitePotential::cosine(r.positive("potential.depth")?, r.positive("potential.radius")?, dim),
    };
    u0.map_err(|e| invalid("potential", e))
}

fn pair_potential(r: &mut Reader, kind: &str) -> Result<PairPotential, ConfigError> {
    let p = match kind {
        "tabulated" => PairPotential::tabulated(knots(r, "model.knots")?),
        "strauss" => PairPotential::strauss(r.positive("model.a")?, r.positive("model.R")?),
        "hardcore" => PairPotential::hardcore(r.positive("model.R")?),
        _ => PairPotential::soft_shell(r.positive("model.p")?, r.positive("model.R")?),
    };
    p.map_err(|e| invalid("model", e))
}

fn gibbs_model(r: &mut Reader, kind: &str, dim: usize) -> Result<InteractionModel, ConfigError> {
    match kind {
        "area" => InteractionModel::area(r.positive("model.R")?, dim).map_err(|e| invalid("model", e)),
        "null" => Ok(InteractionModel::null(dim)),
        _ => Ok(InteractionModel::pairwise(pair_potential(r, kind)?, dim)),
    }
}

fn proposal(r: &mut Reader) -> Result<ProposalSettings, ConfigError> {
    let mut p = ProposalSettings::default();
    p.move_radius = r.opt::<f64>("sampler.move_radius", "a number")?;
    p.validate().map_err(|e| invalid("sampler.move_radius", e))?;
    Ok(p)
}

fn window(r: &mut Reader, dim: usize) -> Result<InteractionWindow, ConfigError> {
    let shape = r.word("window.shape", &["ball", "cube"])?;
    let s = if shape == "ball" {
        InteractionWindow::ball(r.positive("window.radius")?, dim)
    } else {
        let h = r.numbers("window.half_widths")?;
        if h.len() != dim {
            return Err(invalid("window.half_widths", format!("expected {dim} values")));
        }
        InteractionWindow::cube(h)
    };
    let s = s.map_err(|e| invalid("window", e))?;
    let closed: bool = r.opt("window.closed", "true or false")?.unwrap_or(false);
    Ok(if closed { s.closed() } else { s })
}
