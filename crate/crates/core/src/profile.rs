//! Radial knot tables with linear interpolation.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Piecewise-linear radial profile through `(radius, value)` knots.
///
/// Constant below the first knot, exactly zero beyond the last one.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialTable {
    knots: Vec<(f64, f64)>,
}

impl RadialTable {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::invalid("knots", "at least one knot is required"));
        }
        if knots.iter().any(|(r, v)| !(r.is_finite() && v.is_finite()) || *r < 0.0) {
            return Err(Error::invalid("knots", "radii must be nonnegative, values finite"));
        }
        if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::invalid("knots", "radii must be strictly increasing"));
        }
        if knots[knots.len() - 1].0 <= 0.0 {
            return Err(Error::invalid("knots", "support radius must be positive"));
        }
        Ok(RadialTable { knots })
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    /// Radius of the last knot; the table vanishes beyond it.
    pub fn support_radius(&self) -> f64 {
        self.knots[self.knots.len() - 1].0
    }

    pub fn eval(&self, r: f64) -> f64 {
        let r = r.abs();
        let (r0, v0) = self.knots[0];
        if r <= r0 {
            return v0;
        }
        if r > self.support_radius() {
            return 0.0;
        }
        // first knot with radius >= r
        let idx = self.knots.partition_point(|(kr, _)| *kr < r);
        let (ra, va) = self.knots[idx - 1];
        let (rb, vb) = self.knots[idx];
        va + (vb - va) * (r - ra) / (rb - ra)
    }

    /// Largest `|value|` (attained at a knot).
    pub fn max_abs(&self) -> f64 {
        self.knots.iter().map(|(_, v)| v.abs()).fold(0.0, f64::max)
    }

    /// Largest value over radii in `[0, radius]`.
    pub fn max_within(&self, radius: f64) -> f64 {
        let mut best = self.eval(0.0).max(self.eval(radius));
        for &(r, v) in &self.knots {
            if r <= radius {
                best = best.max(v);
            }
        }
        if radius > self.support_radius() {
            best = best.max(0.0);
        }
        best
    }

    /// Largest slope magnitude; infinite if the table jumps to zero at its end.
    pub fn lipschitz(&self) -> f64 {
        let mut slope: f64 = 0.0;
        for w in self.knots.windows(2) {
            slope = slope.max(((w[1].1 - w[0].1) / (w[1].0 - w[0].0)).abs());
        }
        if self.knots[self.knots.len() - 1].1 != 0.0 {
            f64::INFINITY
        } else {
            slope
        }
    }

    pub(crate) fn breakpoints(&self) -> impl Iterator<Item = f64> + '_ {
        self.knots.iter().map(|(r, _)| *r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn interpolates_and_vanishes() {
        let t = RadialTable::new(vec![(0.0, -1.0), (1.0, 0.0)]).unwrap();
        assert_eq!(t.eval(0.25), -0.75);
        assert_eq!(t.eval(-0.25), -0.75);
        assert_eq!(t.eval(1.5), 0.0);
        assert_eq!(t.lipschitz(), 1.0);
        let step = RadialTable::new(vec![(0.0, 2.0), (0.5, 2.0)]).unwrap();
        assert_eq!(step.eval(0.5), 2.0);
        assert_eq!(step.eval(0.5000001), 0.0);
        assert!(step.lipschitz().is_infinite());
        assert!(RadialTable::new(vec![(1.0, 0.0), (0.5, 1.0)]).is_err());
    }
}
