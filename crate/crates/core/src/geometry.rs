//! Points and axis-aligned boxes in `R^d`.

use core::fmt;
use core::ops::{Add, Index, Sub};

use rand::Rng;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::num;

/// Two points closer than this (Euclidean) are treated as the same point.
pub const COINCIDENCE_TOLERANCE: f64 = 1e-12;

pub(crate) type Coords = SmallVec<[f64; 3]>;

/// A point of `R^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct Point(Coords);

impl Point {
    pub fn new(coords: impl IntoIterator<Item = f64>) -> Self {
        Point(coords.into_iter().collect())
    }

    pub fn origin(dim: usize) -> Self {
        Point(SmallVec::from_elem(0.0, dim))
    }

    /// `value * e_axis`.
    pub fn on_axis(dim: usize, axis: usize, value: f64) -> Self {
        let mut p = Point::origin(dim);
        p.0[axis] = value;
        p
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn coords_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum()
    }

    pub fn norm(&self) -> f64 {
        num::sqrt(self.norm_sq())
    }

    pub fn distance_sq(&self, other: &Point) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    pub fn distance(&self, other: &Point) -> f64 {
        num::sqrt(self.distance_sq(other))
    }

    pub fn scale(&self, factor: f64) -> Point {
        Point(self.0.iter().map(|c| c * factor).collect())
    }

    pub fn neg(&self) -> Point {
        self.scale(-1.0)
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() == dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: dim,
                found: self.dim(),
            })
        }
    }
}

impl Index<usize> for Point {
    type Output = f64;

    fn index(&self, axis: usize) -> &f64 {
        &self.0[axis]
    }
}

impl Add for &Point {
    type Output = Point;

    fn add(self, rhs: &Point) -> Point {
        Point(self.0.iter().zip(rhs.0.iter()).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Point {
    type Output = Point;

    fn sub(self, rhs: &Point) -> Point {
        Point(self.0.iter().zip(rhs.0.iter()).map(|(a, b)| a - b).collect())
    }
}

impl From<f64> for Point {
    fn from(x: f64) -> Self {
        Point::new([x])
    }
}

impl<const D: usize> From<[f64; D]> for Point {
    fn from(x: [f64; D]) -> Self {
        Point::new(x)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// Axis-aligned box given by its center and side lengths.
///
/// Membership is closed (`lo <= x <= hi`); the boundary has measure zero for
/// every statistic computed on boxes.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxDomain {
    center: Point,
    sides: Coords,
}

impl BoxDomain {
    pub fn new(center: Point, sides: impl IntoIterator<Item = f64>) -> Result<Self> {
        let sides: Coords = sides.into_iter().collect();
        center.check_dim(sides.len())?;
        if sides.is_empty() {
            return Err(Error::invalid("sides", "dimension must be at least 1"));
        }
        if !center.is_finite() {
            return Err(Error::invalid("center", "coordinates must be finite"));
        }
        if sides.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::invalid("sides", "side lengths must be positive and finite"));
        }
        Ok(BoxDomain { center, sides })
    }

    /// The centered cube `(-L/2, L/2)^d`.
    pub fn centered(length: f64, dim: usize) -> Result<Self> {
        BoxDomain::new(Point::origin(dim), core::iter::repeat_n(length, dim))
    }

    pub fn from_bounds(lo: &[f64], hi: &[f64]) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                found: hi.len(),
            });
        }
        let center = Point::new(lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)));
        BoxDomain::new(center, lo.iter().zip(hi).map(|(a, b)| b - a))
    }

    /// One-dimensional interval `[lo, hi]`.
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        BoxDomain::from_bounds(&[lo], &[hi])
    }

    pub fn dim(&self) -> usize {
        self.sides.len()
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn sides(&self) -> &[f64] {
        &self.sides
    }

    pub fn lower(&self, axis: usize) -> f64 {
        self.center[axis] - 0.5 * self.sides[axis]
    }

    pub fn upper(&self, axis: usize) -> f64 {
        self.center[axis] + 0.5 * self.sides[axis]
    }

    pub fn lower_corner(&self) -> Point {
        Point::new((0..self.dim()).map(|i| self.lower(i)))
    }

    pub fn upper_corner(&self) -> Point {
        Point::new((0..self.dim()).map(|i| self.upper(i)))
    }

    /// Lebesgue measure `|Λ|`.
    pub fn volume(&self) -> f64 {
        self.sides.iter().product()
    }

    pub fn diameter(&self) -> f64 {
        num::sqrt(self.sides.iter().map(|s| s * s).sum())
    }

    pub fn contains(&self, x: &Point) -> bool {
        x.dim() == self.dim()
            && (0..self.dim()).all(|i| x[i] >= self.lower(i) && x[i] <= self.upper(i))
    }

    /// Euclidean distance from `x` to the box (zero inside).
    pub fn distance_to(&self, x: &Point) -> f64 {
        let mut d2 = 0.0;
        for i in 0..self.dim() {
            let excess = (self.lower(i) - x[i]).max(x[i] - self.upper(i)).max(0.0);
            d2 += excess * excess;
        }
        num::sqrt(d2)
    }

    /// The box enlarged by `margin` on every side (a box containing `Λ + B(0, margin)`).
    pub fn padded(&self, margin: f64) -> Result<BoxDomain> {
        BoxDomain::new(self.center.clone(), self.sides.iter().map(|s| s + 2.0 * margin))
    }

    pub fn translate(&self, v: &Point) -> BoxDomain {
        BoxDomain {
            center: &self.center + v,
            sides: self.sides.clone(),
        }
    }

    /// `|Λ + B(0, r)|` by the Steiner formula for boxes:
    /// `Σ_k ω_k r^k e_{d-k}(sides)` with `e_j` the elementary symmetric polynomials.
    pub fn parallel_volume(&self, r: f64) -> f64 {
        let d = self.dim();
        // elementary symmetric polynomials e_0..e_d of the sides
        let mut e = alloc::vec![0.0; d + 1];
        e[0] = 1.0;
        for &s in self.sides.iter() {
            for j in (1..=d).rev() {
                e[j] += e[j - 1] * s;
            }
        }
        (0..=d)
            .map(|k| num::unit_ball_volume(k) * num::powi(r, k as i32) * e[d - k])
            .sum()
    }

    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        Point::new((0..self.dim()).map(|i| self.lower(i) + self.sides[i] * rng.random::<f64>()))
    }
}

impl fmt::Display for BoxDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim() {
            if i > 0 {
                f.write_str(" x ")?;
            }
            write!(f, "[{}, {}]", self.lower(i), self.upper(i))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_basics() {
        let b = BoxDomain::centered(2.0, 2).unwrap();
        assert_eq!(b.volume(), 4.0);
        assert!(b.contains(&Point::from([0.5, -1.0])));
        assert!(!b.contains(&Point::from([1.5, 0.0])));
        assert!((b.distance_to(&Point::from([2.0, 0.0])) - 1.0).abs() < 1e-15);
        assert!(BoxDomain::new(Point::origin(1), [0.0]).is_err());
        assert!(BoxDomain::new(Point::origin(2), [1.0]).is_err());
    }

    #[test]
    fn steiner_formula() {
        // 1D: |[a, b] + [-r, r]| = (b - a) + 2r
        let i = BoxDomain::interval(0.0, 1.0).unwrap();
        assert!((i.parallel_volume(1.0) - 3.0).abs() < 1e-14);
        // 2D square of side s: s^2 + 4 s r + pi r^2
        let sq = BoxDomain::centered(2.0, 2).unwrap();
        let expected = 4.0 + 4.0 * 2.0 * 0.5 + num::PI * 0.25;
        assert!((sq.parallel_volume(0.5) - expected).abs() < 1e-12);
        assert_eq!(sq.parallel_volume(0.0), sq.volume());
    }
}
