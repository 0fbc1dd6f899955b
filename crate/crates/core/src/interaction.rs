//! Pair potentials, energy functions and local energies.

use alloc::vec::Vec;

use crate::configuration::PointConfiguration;
use crate::error::{Error, Result};
use crate::geometry::{BoxDomain, Point};
use crate::num::{self, Energy};
use crate::profile::RadialTable;
use crate::union::union_volume;

/// Symmetric nonnegative pair potential `φ` with support in `B(0, R)`.
#[derive(Clone, Debug, PartialEq)]
pub enum PairPotential {
    /// `φ = a · 1_{|x| <= R}`.
    Strauss { strength: f64, range: f64 },
    /// `φ = +∞ · 1_{|x| <= R}`.
    Hardcore { range: f64 },
    /// `φ(x) = exp(-|x|^{-p})` for `0 < |x| <= R`, zero beyond, `φ(0) = 0`.
    SoftShell { exponent: f64, range: f64 },
    /// Radial knot table, linear in between, zero beyond the last knot.
    Tabulated(RadialTable),
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, "must be positive and finite"))
    }
}

impl PairPotential {
    pub fn strauss(strength: f64, range: f64) -> Result<Self> {
        positive("strength", strength)?;
        positive("range", range)?;
        Ok(PairPotential::Strauss { strength, range })
    }

    pub fn hardcore(range: f64) -> Result<Self> {
        positive("range", range)?;
        Ok(PairPotential::Hardcore { range })
    }

    pub fn soft_shell(exponent: f64, range: f64) -> Result<Self> {
        positive("exponent", exponent)?;
        positive("range", range)?;
        Ok(PairPotential::SoftShell { exponent, range })
    }

    pub fn tabulated(table: RadialTable) -> Result<Self> {
        if table.knots().iter().any(|(_, v)| *v < 0.0) {
            return Err(Error::invalid("knots", "pair potential values must be nonnegative"));
        }
        Ok(PairPotential::Tabulated(table))
    }

    pub fn range(&self) -> f64 {
        match self {
            PairPotential::Strauss { range, .. }
            | PairPotential::Hardcore { range }
            | PairPotential::SoftShell { range, .. } => *range,
            PairPotential::Tabulated(t) => t.support_radius(),
        }
    }

    /// `φ` at distance `r >= 0`.
    pub fn at_distance(&self, r: f64) -> Energy {
        match self {
            PairPotential::Strauss { strength, range } => {
                if r <= *range {
                    Energy::Finite(*strength)
                } else {
                    Energy::ZERO
                }
            }
            PairPotential::Hardcore { range } => {
                if r <= *range {
                    Energy::Infinite
                } else {
                    Energy::ZERO
                }
            }
            PairPotential::SoftShell { exponent, range } => {
                if r > 0.0 && r <= *range {
                    Energy::Finite(num::exp(-num::powf(r, -exponent)))
                } else {
                    Energy::ZERO
                }
            }
            PairPotential::Tabulated(t) => Energy::Finite(t.eval(r)),
        }
    }

    pub fn value(&self, x: &Point) -> Energy {
        self.at_distance(x.norm())
    }

    /// `φ(0)`.
    pub fn at_origin(&self) -> Energy {
        self.at_distance(0.0)
    }

    /// `sup_{|y| <= radius} φ(y)`.
    pub fn sup_within(&self, radius: f64) -> Energy {
        match self {
            PairPotential::Strauss { .. } | PairPotential::Hardcore { .. } => self.at_origin(),
            PairPotential::SoftShell { exponent, range } => {
                let r = radius.min(*range);
                if r > 0.0 {
                    Energy::Finite(num::exp(-num::powf(r, -exponent)))
                } else {
                    Energy::ZERO
                }
            }
            PairPotential::Tabulated(t) => Energy::Finite(t.max_within(radius)),
        }
    }
}

/// Which energy function drives the interaction.
#[derive(Clone, Debug, PartialEq)]
pub enum EnergyKind {
    /// `U ≡ 0`: the Poisson process.
    Null,
    /// `U(η) = Σ_{pairs} φ(x - y)`.
    Pairwise(PairPotential),
    /// `U(η) = |∪_j B(x_j, R)|`.
    Area { radius: f64 },
}

/// Energy function with finite range, plus a lower bound on its local energy.
#[derive(Clone, Debug, PartialEq)]
pub struct InteractionModel {
    kind: EnergyKind,
    dim: usize,
    local_energy_lower_bound: f64,
}

impl InteractionModel {
    pub fn null(dim: usize) -> Self {
        InteractionModel {
            kind: EnergyKind::Null,
            dim,
            local_energy_lower_bound: 0.0,
        }
    }

    pub fn pairwise(potential: PairPotential, dim: usize) -> Self {
        InteractionModel {
            kind: EnergyKind::Pairwise(potential),
            dim,
            local_energy_lower_bound: 0.0,
        }
    }

    pub fn area(radius: f64, dim: usize) -> Result<Self> {
        positive("radius", radius)?;
        Ok(InteractionModel {
            kind: EnergyKind::Area { radius },
            dim,
            local_energy_lower_bound: 0.0,
        })
    }

    pub fn kind(&self) -> &EnergyKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pair_potential(&self) -> Option<&PairPotential> {
        match &self.kind {
            EnergyKind::Pairwise(p) => Some(p),
            _ => None,
        }
    }

    /// `-log z` for the dominating Poisson intensity `z`.
    pub fn local_energy_lower_bound(&self) -> f64 {
        self.local_energy_lower_bound
    }

    /// `z = exp(-inf h)`.
    pub fn domination_intensity(&self) -> f64 {
        num::exp(-self.local_energy_lower_bound)
    }

    /// Interaction range: `R` for pair potentials, `2R` for the area energy
    /// (balls of radius `R` overlap when their centres are within `2R`).
    pub fn range(&self) -> f64 {
        match &self.kind {
            EnergyKind::Null => 0.0,
            EnergyKind::Pairwise(p) => p.range(),
            EnergyKind::Area { radius } => 2.0 * radius,
        }
    }

    /// `|B(0, R)|` for the area energy.
    pub fn ball_volume(&self) -> Option<f64> {
        match self.kind {
            EnergyKind::Area { radius } => {
                Some(num::unit_ball_volume(self.dim) * num::powi(radius, self.dim as i32))
            }
            _ => None,
        }
    }

    fn pair_sum<'a>(potential: &PairPotential, points: impl Iterator<Item = (&'a Point, bool)> + Clone) -> Energy {
        let pts: Vec<(&Point, bool)> = points.collect();
        let mut total = Energy::ZERO;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                if !(pts[i].1 || pts[j].1) {
                    continue;
                }
                total += potential.at_distance(pts[i].0.distance(pts[j].0));
                if total.is_infinite() {
                    return total;
                }
            }
        }
        total
    }

    /// `U(η)`.
    pub fn total_energy(&self, config: &PointConfiguration) -> Energy {
        match &self.kind {
            EnergyKind::Null => Energy::ZERO,
            EnergyKind::Pairwise(p) => Self::pair_sum(p, config.points().iter().map(|x| (x, true))),
            EnergyKind::Area { radius } => {
                let refs: Vec<&Point> = config.points().iter().collect();
                Energy::Finite(union_volume(&refs, *radius, self.dim))
            }
        }
    }

    /// `U_Λ(η)`: energy of the pairs touching `window` (pairwise), or
    /// `U(η) - U(η_{Λ^c})` otherwise.
    pub fn conditional_energy(&self, config: &PointConfiguration, window: &BoxDomain) -> Energy {
        match &self.kind {
            EnergyKind::Null => Energy::ZERO,
            EnergyKind::Pairwise(p) => {
                let reach = p.range();
                let near = config
                    .points()
                    .iter()
                    .filter(|x| window.distance_to(x) <= reach)
                    .map(|x| (x, window.contains(x)));
                Self::pair_sum(p, near)
            }
            EnergyKind::Area { radius } => {
                let near: Vec<&Point> = config
                    .points()
                    .iter()
                    .filter(|x| window.distance_to(x) <= 2.0 * radius)
                    .collect();
                let outside: Vec<&Point> = near.iter().copied().filter(|x| !window.contains(x)).collect();
                let with = union_volume(&near, *radius, self.dim);
                let without = union_volume(&outside, *radius, self.dim);
                Energy::Finite((with - without).max(0.0))
            }
        }
    }

    /// `h(x, η) = U_{{x}}(η + δ_x)`; rejects `x` coinciding with a point of `η`.
    pub fn local_energy(&self, x: &Point, config: &PointConfiguration) -> Result<Energy> {
        x.check_dim(config.dim())?;
        if config.has_point_near(x) {
            return Err(Error::CoincidentPoint { index: config.len() });
        }
        Ok(self.local_energy_among(x, config.points().iter()))
    }

    /// Local energy of `x` against an arbitrary collection of points (no simplicity check).
    pub(crate) fn local_energy_among<'a>(&self, x: &Point, others: impl Iterator<Item = &'a Point>) -> Energy {
        match &self.kind {
            EnergyKind::Null => Energy::ZERO,
            EnergyKind::Pairwise(p) => {
                let reach2 = p.range() * p.range();
                let mut total = Energy::ZERO;
                for y in others {
                    let d2 = x.distance_sq(y);
                    if d2 <= reach2 {
                        total += p.at_distance(num::sqrt(d2));
                        if total.is_infinite() {
                            break;
                        }
                    }
                }
                total
            }
            EnergyKind::Area { radius } => {
                let reach2 = 4.0 * radius * radius;
                let mut near: Vec<&Point> = others.filter(|y| x.distance_sq(y) < reach2).collect();
                let ball = self.ball_volume().unwrap_or(0.0);
                if near.is_empty() {
                    return Energy::Finite(ball);
                }
                let without = union_volume(&near, *radius, self.dim);
                near.push(x);
                let with = union_volume(&near, *radius, self.dim);
                Energy::Finite((with - without).clamp(0.0, ball))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn line(xs: &[f64]) -> PointConfiguration {
        let domain = BoxDomain::interval(-10.0, 10.0).unwrap();
        PointConfiguration::new(xs.iter().map(|&x| Point::from(x)).collect(), domain).unwrap()
    }

    fn strauss() -> InteractionModel {
        InteractionModel::pairwise(PairPotential::strauss(1.0, 1.0).unwrap(), 1)
    }

    #[test]
    fn strauss_pair_sum() {
        assert_eq!(strauss().total_energy(&line(&[0.0, 0.5, 2.0])), Energy::Finite(1.0));
        assert_eq!(strauss().total_energy(&line(&[])), Energy::ZERO);
    }

    #[test]
    fn area_energy_interval_union() {
        let m = InteractionModel::area(1.0, 1).unwrap();
        assert_eq!(m.total_energy(&line(&[0.0, 0.5])), Energy::Finite(2.5));
        let h = m.local_energy(&Point::from(0.5), &line(&[0.0])).unwrap();
        assert!((h.value() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn conditional_energy_cases() {
        let w = BoxDomain::interval(-0.1, 0.1).unwrap();
        assert_eq!(strauss().conditional_energy(&line(&[0.0, 0.5]), &w), Energy::Finite(1.0));
        let far = BoxDomain::interval(5.0, 6.0).unwrap();
        assert_eq!(strauss().conditional_energy(&line(&[0.0, 0.5]), &far), Energy::ZERO);
        // pairs not touching the window are ignored
        assert_eq!(strauss().conditional_energy(&line(&[0.0, 2.0, 2.5]), &w), Energy::ZERO);
    }

    #[test]
    fn local_energy_cases() {
        assert_eq!(strauss().local_energy(&Point::from(0.5), &line(&[0.0])).unwrap(), Energy::Finite(1.0));
        assert_eq!(strauss().local_energy(&Point::from(0.5), &line(&[])).unwrap(), Energy::ZERO);
        let hard = InteractionModel::pairwise(PairPotential::hardcore(1.0).unwrap(), 1);
        assert_eq!(hard.local_energy(&Point::from(0.3), &line(&[0.0])).unwrap(), Energy::Infinite);
        assert!(strauss().local_energy(&Point::from(0.0), &line(&[0.0])).is_err());
    }

    #[test]
    fn soft_shell_vanishes_at_origin() {
        let p = PairPotential::soft_shell(1.0, 1.0).unwrap();
        assert_eq!(p.at_origin(), Energy::ZERO);
        assert!((p.at_distance(0.25).value() - num::exp(-4.0)).abs() < 1e-15);
        assert_eq!(p.at_distance(1.5), Energy::ZERO);
        assert!((p.sup_within(0.25).value() - num::exp(-4.0)).abs() < 1e-15);
    }

    #[test]
    fn tabulated_pair_potential() {
        let t = RadialTable::new(vec![(0.0, 2.0), (1.0, 0.0)]).unwrap();
        let p = PairPotential::tabulated(t).unwrap();
        assert_eq!(p.at_distance(0.5), Energy::Finite(1.0));
        assert_eq!(p.range(), 1.0);
        let neg = RadialTable::new(vec![(0.0, -1.0), (1.0, 0.0)]).unwrap();
        assert!(PairPotential::tabulated(neg).is_err());
    }
}
