use rayon::prelude::*;

use gibbsids_core::packing::{norm_u_s, upper2_convergence, InteractionWindow, NormReport};
use gibbsids_core::potential::SiteFunction;
use gibbsids_core::{Error, SingleSitePotential};

use super::{dimension, invalid, potential, window, RunError};
use crate::config::{ConfigError, Reader};
use crate::output::{Check, Report, Table};

/// Relative tolerance when comparing packing values against each other.
const VALUE_TOLERANCE: f64 = 1e-9;

/// `‖u‖²_S` on a sequence of lattices, with witnesses.
#[derive(Clone, Debug)]
pub struct NormScan {
    pub u0: SingleSitePotential,
    pub window: InteractionWindow,
    pub resolutions: Vec<f64>,
}

fn resolutions(r: &mut Reader, path: &str) -> Result<Vec<f64>, ConfigError> {
    let list = r.numbers(path)?;
    if list.is_empty() || list.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(invalid(path, "must be a nonempty list of positive numbers"));
    }
    Ok(list)
}

/// Whether `S` contains every difference of two points in the support.
fn covers_differences(u: &dyn SiteFunction, s: &InteractionWindow) -> bool {
    let (lo, hi) = u.support_bounds();
    let dlo: Vec<f64> = lo.coords().iter().zip(hi.coords()).map(|(a, b)| a - b).collect();
    let dhi: Vec<f64> = dlo.iter().map(|x| -x).collect();
    s.contains_closed_box(&dlo, &dhi)
}

impl NormScan {
    pub(super) fn parse(r: &mut Reader) -> Result<Self, ConfigError> {
        let dim = dimension(r)?;
        Ok(NormScan {
            u0: potential(r, dim)?,
            window: window(r, dim)?,
            resolutions: resolutions(r, "packing.resolution")?,
        })
    }

    pub fn run(&self) -> Result<Report, RunError> {
        let u = self.u0.reflected();
        let reports: Vec<NormReport> = self
            .resolutions
            .par_iter()
            .map(|&res| norm_u_s(&u, &self.window, res))
            .collect::<Result<_, Error>>()?;
        let mut table = Table::new(
            None,
            &["resolution", "value", "slack", "lattice_upper", "cap", "candidates", "exact", "witness_points"],
        );
        let mut witness = Table::new(Some("witness"), &["resolution", "point", "coords", "u"]);
        let mut feasible = true;
        let mut exact = true;
        for rep in &reports {
            table.push(vec![
                rep.resolution.into(),
                rep.value.into(),
                rep.slack.into(),
                rep.lattice_upper.into(),
                rep.cap.into(),
                rep.candidates.into(),
                rep.exact.into(),
                rep.witness.points.len().into(),
            ]);
            for (k, p) in rep.witness.points.iter().enumerate() {
                let coords: Vec<String> = p.coords().iter().map(|c| format!("{c:?}")).collect();
                witness.push(vec![rep.resolution.into(), k.into(), coords.join(" ").into(), u.value(p).into()]);
            }
            feasible &= rep.witness.is_feasible(&self.window);
            exact &= rep.exact;
        }
        let mut checks = vec![
            Check::new("norm-witness-separated", feasible, 0.0, "every witness avoids S pairwise"),
            Check::new("norm-search-complete", exact, 0.0, "branch and bound closed within its node budget"),
        ];
        if covers_differences(&u, &self.window) {
            let max_sq = u.max_value() * u.max_value();
            let worst = reports
                .iter()
                .map(|rep| (rep.value - max_sq).abs())
                .fold(0.0, f64::max);
            checks.push(Check::new(
                "norm-single-point",
                worst <= VALUE_TOLERANCE * max_sq,
                VALUE_TOLERANCE * max_sq - worst,
                format!("S covers supp u - supp u; max u² = {max_sq}"),
            ));
        }
        Ok(Report {
            tables: vec![table, witness],
            checks,
        })
    }
}

/// Staircase approximations `u_n` on eroded windows against `‖u‖²_S`.
#[derive(Clone, Debug)]
pub struct Upper2Scan {
    pub u0: SingleSitePotential,
    pub window: InteractionWindow,
    pub b: f64,
    pub ns: Vec<usize>,
    pub reference_resolution: f64,
    pub max_gap: f64,
}

impl Upper2Scan {
    pub(super) fn parse(r: &mut Reader) -> Result<Self, ConfigError> {
        let dim = dimension(r)?;
        let u0 = potential(r, dim)?;
        let window = window(r, dim)?;
        let b = r.opt::<f64>("packing.b", "a number")?.unwrap_or(2.0 * (dim as f64).sqrt());
        if !(b.is_finite() && b >= 0.0) {
            return Err(invalid("packing.b", "must be nonnegative"));
        }
        let ns: Vec<u64> = r.list("packing.n", "positive integers")?;
        if ns.is_empty() || ns.contains(&0) {
            return Err(invalid("packing.n", "must be a nonempty list of positive integers"));
        }
        Ok(Upper2Scan {
            u0,
            window,
            b,
            ns: ns.into_iter().map(|n| n as usize).collect(),
            reference_resolution: r.positive_or("packing.reference_resolution", 1e-3)?,
            max_gap: r.positive_or("packing.max_gap", 0.05)?,
        })
    }

    pub fn run(&self) -> Result<Report, RunError> {
        let u = self.u0.reflected();
        let reference = norm_u_s(&u, &self.window, self.reference_resolution)?.value;
        let rows = self
            .ns
            .par_iter()
            .map(|&n| upper2_convergence(&u, &self.window, self.b, &[n], reference).map(|mut r| r.remove(0)))
            .collect::<Result<Vec<_>, Error>>()?;
        let mut table = Table::new(None, &["n", "epsilon", "lower", "upper", "reference", "gap"]);
        for row in &rows {
            table.push(vec![
                row.n.into(),
                row.epsilon.into(),
                row.lower.into(),
                row.upper.into(),
                reference.into(),
                row.gap.into(),
            ]);
        }
        let above = rows.iter().map(|r| r.lower - reference).fold(f64::INFINITY, f64::min);
        let last = rows.iter().max_by_key(|r| r.n).expect("nonempty n list");
        let checks = vec![
            Check::new(
                "upper2-above-norm",
                above >= -VALUE_TOLERANCE * reference,
                above,
                format!("reference={reference:.9} b={}", self.b),
            ),
            Check::new(
                "upper2-gap",
                last.gap < self.max_gap,
                self.max_gap - last.gap,
                format!("n={} gap={:.5}", last.n, last.gap),
            ),
        ];
        Ok(Report {
            tables: vec![table],
            checks,
        })
    }
}
