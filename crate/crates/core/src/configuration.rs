//! Finite simple point configurations.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{BoxDomain, Point, COINCIDENCE_TOLERANCE};

/// A finite simple set of points inside a bounding box.
#[derive(Clone, Debug, PartialEq)]
pub struct PointConfiguration {
    points: Vec<Point>,
    domain: BoxDomain,
}

impl PointConfiguration {
    /// Validates dimensions, containment and pairwise distinctness.
    pub fn new(points: Vec<Point>, domain: BoxDomain) -> Result<Self> {
        let dim = domain.dim();
        for (index, p) in points.iter().enumerate() {
            p.check_dim(dim)?;
            if !p.is_finite() {
                return Err(Error::invalid("points", "coordinates must be finite"));
            }
            if !domain.contains(p) {
                return Err(Error::PointOutsideDomain { index });
            }
        }
        let tol2 = COINCIDENCE_TOLERANCE * COINCIDENCE_TOLERANCE;
        for j in 1..points.len() {
            if points[..j].iter().any(|q| q.distance_sq(&points[j]) <= tol2) {
                return Err(Error::CoincidentPoint { index: j });
            }
        }
        Ok(PointConfiguration { points, domain })
    }

    pub fn empty(domain: BoxDomain) -> Self {
        PointConfiguration {
            points: Vec::new(),
            domain,
        }
    }

    /// Callers guarantee the invariants (used by the samplers on hot paths).
    pub(crate) fn from_parts_unchecked(points: Vec<Point>, domain: BoxDomain) -> Self {
        PointConfiguration { points, domain }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `M_Λ(η)`: number of points in `window`.
    pub fn count_in(&self, window: &BoxDomain) -> usize {
        self.points.iter().filter(|p| window.contains(p)).count()
    }

    /// Whether some point of the configuration lies within the coincidence tolerance of `x`.
    pub fn has_point_near(&self, x: &Point) -> bool {
        let tol2 = COINCIDENCE_TOLERANCE * COINCIDENCE_TOLERANCE;
        self.points.iter().any(|p| p.distance_sq(x) <= tol2)
    }

    /// `η_Λ`: the points inside `window`, bounded by `window`.
    pub fn restrict(&self, window: &BoxDomain) -> PointConfiguration {
        PointConfiguration {
            points: self
                .points
                .iter()
                .filter(|p| window.contains(p))
                .cloned()
                .collect(),
            domain: window.clone(),
        }
    }

    /// Points within Euclidean distance `radius` of `window` (the configuration on `Λ + B(0, r)`).
    pub fn restrict_near(&self, window: &BoxDomain, radius: f64) -> PointConfiguration {
        PointConfiguration {
            points: self
                .points
                .iter()
                .filter(|p| window.distance_to(p) <= radius)
                .cloned()
                .collect(),
            domain: self.domain.clone(),
        }
    }

    /// `η + δ_x`.
    pub fn with_point(&self, x: Point) -> Result<PointConfiguration> {
        x.check_dim(self.dim())?;
        if !self.domain.contains(&x) {
            return Err(Error::PointOutsideDomain {
                index: self.points.len(),
            });
        }
        if self.has_point_near(&x) {
            return Err(Error::CoincidentPoint {
                index: self.points.len(),
            });
        }
        let mut points = self.points.clone();
        points.push(x);
        Ok(PointConfiguration {
            points,
            domain: self.domain.clone(),
        })
    }

    /// `η - δ_{x_index}`.
    pub fn without_point(&self, index: usize) -> PointConfiguration {
        let mut points = self.points.clone();
        points.remove(index);
        PointConfiguration {
            points,
            domain: self.domain.clone(),
        }
    }

    /// `τ_v η`: every point (and the bounding box) shifted by `v`.
    pub fn translate(&self, v: &Point) -> PointConfiguration {
        PointConfiguration {
            points: self.points.iter().map(|p| p + v).collect(),
            domain: self.domain.translate(v),
        }
    }

    /// Same points, larger bounding box. Fails if a point would fall outside.
    pub fn rebound(&self, domain: BoxDomain) -> Result<PointConfiguration> {
        PointConfiguration::new(self.points.clone(), domain)
    }

    /// Union of two configurations (e.g. window points plus boundary condition).
    pub fn union(&self, other: &PointConfiguration, domain: BoxDomain) -> Result<PointConfiguration> {
        let mut points = self.points.clone();
        points.extend(other.points.iter().cloned());
        PointConfiguration::new(points, domain)
    }

    pub(crate) fn points_mut(&mut self) -> &mut Vec<Point> {
        &mut self.points
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

    #[test]
    fn rejects_duplicates_and_outside_points() {
        let domain = BoxDomain::interval(0.0, 1.0).unwrap();
        let dup = PointConfiguration::new(vec![Point::from(0.5), Point::from(0.5)], domain.clone());
        assert_eq!(dup, Err(Error::CoincidentPoint { index: 1 }));
        let out = PointConfiguration::new(vec![Point::from(2.0)], domain.clone());
        assert_eq!(out, Err(Error::PointOutsideDomain { index: 0 }));
        let near = PointConfiguration::new(vec![Point::from(0.5), Point::from(0.5 + 1e-9)], domain);
        assert!(near.is_ok());
    }

    #[test]
    fn translate_shifts_points() {
        let c = line(&[0.0, 0.5]).translate(&Point::from(1.0));
        let xs: Vec<f64> = c.points().iter().map(|p| p[0]).collect();
        assert_eq!(xs, vec![1.0, 1.5]);
        let same = line(&[0.0, 0.5]).translate(&Point::from(0.0));
        assert_eq!(same, line(&[0.0, 0.5]));
    }

    #[test]
    fn counting_and_restriction() {
        let c = line(&[-2.0, 0.1, 0.2, 3.0]);
        let w = BoxDomain::interval(0.0, 1.0).unwrap();
        assert_eq!(c.count_in(&w), 2);
        assert_eq!(c.restrict(&w).len(), 2);
        assert_eq!(c.restrict_near(&w, 2.0).len(), 4);
        assert_eq!(c.restrict_near(&w, 1.5).len(), 2);
        assert!(c.with_point(Point::from(0.1)).is_err());
        assert_eq!(c.with_point(Point::from(0.15)).unwrap().len(), 5);
        assert_eq!(c.without_point(0).len(), 3);
    }
}
