//! Symmetric windows `S` with membership, erosion and condition (S) checks.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::num;

/// Differences within this distance of the boundary of an open window count as outside.
pub const BOUNDARY_TOLERANCE: f64 = 1e-12;

/// Directions used when eroding star windows (over the full circle).
pub const EROSION_DIRECTIONS: usize = 720;

/// Interpolation of a star profile between angle knots.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Interpolation {
    Linear,
    /// `ρ(θ) = r_k` on `[θ_k, θ_{k+1})`.
    Step,
}

/// Radial function `ρ(θ)` on `[0, π)`, extended with period `π` so that `S = -S`.
#[derive(Clone, Debug, PartialEq)]
pub struct StarProfile {
    knots: Vec<(f64, f64)>,
    interpolation: Interpolation,
}

impl StarProfile {
    /// Knots `(angle, radius)` with strictly increasing angles in `[0, π)`.
    pub fn new(knots: Vec<(f64, f64)>, interpolation: Interpolation) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::invalid("profile", "needs at least one knot"));
        }
        for (k, &(a, r)) in knots.iter().enumerate() {
            if !(a.is_finite() && (0.0..num::PI).contains(&a)) {
                return Err(Error::invalid("profile", "angles must lie in [0, pi)"));
            }
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::invalid("profile", "radii must be positive and finite"));
            }
            if k > 0 && a <= knots[k - 1].0 {
                return Err(Error::invalid("profile", "angles must be strictly increasing"));
            }
        }
        Ok(StarProfile { knots, interpolation })
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interpolation
    }

    fn reduce(theta: f64) -> f64 {
        let t = theta % num::PI;
        if t < 0.0 {
            t + num::PI
        } else {
            t
        }
    }

    /// `ρ(θ)`.
    pub fn radius(&self, theta: f64) -> f64 {
        let t = Self::reduce(theta);
        let n = self.knots.len();
        // last knot at or before t (wrapping to the final knot)
        let idx = match self.knots.iter().rposition(|(a, _)| *a <= t) {
            Some(i) => i,
            None => n - 1,
        };
        match self.interpolation {
            Interpolation::Step => self.knots[idx].1,
            Interpolation::Linear => {
                let (a0, r0) = self.knots[idx];
                let (a0, (a1, r1)) = if idx + 1 < n {
                    (a0, self.knots[idx + 1])
                } else if a0 <= t {
                    (a0, (self.knots[0].0 + num::PI, self.knots[0].1))
                } else {
                    (a0 - num::PI, self.knots[0])
                };
                if a1 <= a0 {
                    return r0;
                }
                r0 + (r1 - r0) * (t - a0) / (a1 - a0)
            }
        }
    }

    /// `(liminf ρ, limsup ρ)` at `θ`.
    pub fn one_sided(&self, theta: f64) -> (f64, f64) {
        let here = self.radius(theta);
        match self.interpolation {
            Interpolation::Linear => (here, here),
            Interpolation::Step => {
                let t = Self::reduce(theta);
                let at_knot = self.knots.iter().position(|(a, _)| (a - t).abs() <= 1e-15);
                match at_knot {
                    Some(i) => {
                        let n = self.knots.len();
                        let before = self.knots[(i + n - 1) % n].1;
                        (here.min(before), here.max(before))
                    }
                    None => (here, here),
                }
            }
        }
    }

    fn min_radius(&self) -> f64 {
        self.knots.iter().map(|k| k.1).fold(f64::INFINITY, f64::min)
    }

    fn max_radius(&self) -> f64 {
        self.knots.iter().map(|k| k.1).fold(0.0, f64::max)
    }
}

/// The window's geometry.
#[derive(Clone, Debug, PartialEq)]
pub enum WindowShape {
    Ball { radius: f64 },
    Box { half_widths: Vec<f64> },
    /// Two-dimensional star set `{r e_θ : r < ρ(θ)}`.
    StarRadial(StarProfile),
}

/// Bounded symmetric set `S`; open unless `closed` is set.
#[derive(Clone, Debug, PartialEq)]
pub struct InteractionWindow {
    shape: WindowShape,
    dim: usize,
    closed: bool,
}

/// Outcome of the condition (S) check.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionReport {
    /// `(α, worst margin)` where the margin is `min_θ (inner extent - α · outer extent)`.
    pub margins: Vec<(f64, f64)>,
    pub holds: bool,
}

impl InteractionWindow {
    /// Open ball `B(0, r)`.
    pub fn ball(radius: f64, dim: usize) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::invalid("radius", "must be positive and finite"));
        }
        if dim == 0 {
            return Err(Error::invalid("dim", "must be at least 1"));
        }
        Ok(InteractionWindow {
            shape: WindowShape::Ball { radius },
            dim,
            closed: false,
        })
    }

    /// Open box `Π(-w_i, w_i)`.
    pub fn cube(half_widths: Vec<f64>) -> Result<Self> {
        if half_widths.is_empty() || half_widths.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::invalid("half_widths", "must be positive and finite"));
        }
        Ok(InteractionWindow {
            dim: half_widths.len(),
            shape: WindowShape::Box { half_widths },
            closed: false,
        })
    }

    /// Open planar star set.
    pub fn star(profile: StarProfile) -> Self {
        InteractionWindow {
            shape: WindowShape::StarRadial(profile),
            dim: 2,
            closed: false,
        }
    }

    /// Same shape, with the boundary included.
    pub fn closed(mut self) -> Self {
        self.closed = true;
        self
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn shape(&self) -> &WindowShape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `<` for open windows (with the boundary tolerance), `<=` for closed ones.
    fn inside(&self, value: f64, bound: f64) -> bool {
        if self.closed {
            value <= bound + BOUNDARY_TOLERANCE
        } else {
            value < bound - BOUNDARY_TOLERANCE
        }
    }

    pub fn contains(&self, x: &Point) -> bool {
        match &self.shape {
            WindowShape::Ball { radius } => self.inside(x.norm(), *radius),
            WindowShape::Box { half_widths } => {
                x.coords().iter().zip(half_widths).all(|(c, w)| self.inside(c.abs(), *w))
            }
            WindowShape::StarRadial(p) => {
                let r = x.norm();
                if r == 0.0 {
                    return true;
                }
                self.inside(r, p.radius(num::atan2(x[1], x[0])))
            }
        }
    }

    /// Distance from the origin to the complement.
    pub fn inradius(&self) -> f64 {
        match &self.shape {
            WindowShape::Ball { radius } => *radius,
            WindowShape::Box { half_widths } => half_widths.iter().copied().fold(f64::INFINITY, f64::min),
            WindowShape::StarRadial(p) => p.min_radius(),
        }
    }

    /// Radius of a ball containing the window.
    pub fn outer_radius(&self) -> f64 {
        match &self.shape {
            WindowShape::Ball { radius } => *radius,
            WindowShape::Box { half_widths } => num::sqrt(half_widths.iter().map(|w| w * w).sum()),
            WindowShape::StarRadial(p) => p.max_radius(),
        }
    }

    /// Whether every point of the closed box `[lo, hi]` lies in `S`.
    ///
    /// Exact for balls and boxes; for star windows the box boundary is sampled
    /// (a star set contains a box whenever it contains the box boundary).
    pub fn contains_closed_box(&self, lo: &[f64], hi: &[f64]) -> bool {
        match &self.shape {
            WindowShape::Ball { radius } => {
                let far: f64 = lo
                    .iter()
                    .zip(hi)
                    .map(|(a, b)| {
                        let m = a.abs().max(b.abs());
                        m * m
                    })
                    .sum();
                self.inside(num::sqrt(far), *radius)
            }
            WindowShape::Box { half_widths } => lo
                .iter()
                .zip(hi)
                .zip(half_widths)
                .all(|((a, b), w)| self.inside(a.abs().max(b.abs()), *w)),
            WindowShape::StarRadial(_) => {
                const SAMPLES: usize = 64;
                let corners = [(lo[0], lo[1]), (hi[0], lo[1]), (hi[0], hi[1]), (lo[0], hi[1])];
                (0..4).all(|e| {
                    let (x0, y0) = corners[e];
                    let (x1, y1) = corners[(e + 1) % 4];
                    (0..=SAMPLES).all(|k| {
                        let s = k as f64 / SAMPLES as f64;
                        self.contains(&Point::from([x0 + s * (x1 - x0), y0 + s * (y1 - y0)]))
                    })
                })
            }
        }
    }

    /// Checks `α · closure(S) ⊂ Int(S)` for each `α`.
    pub fn check_condition_s(&self, alphas: &[f64]) -> Result<ConditionReport> {
        if alphas.iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
            return Err(Error::invalid("alpha", "values must lie in (0, 1)"));
        }
        let margins: Vec<(f64, f64)> = alphas
            .iter()
            .map(|&alpha| {
                let margin = match &self.shape {
                    WindowShape::Ball { radius } => (1.0 - alpha) * radius,
                    WindowShape::Box { half_widths } => half_widths
                        .iter()
                        .map(|w| (1.0 - alpha) * w)
                        .fold(f64::INFINITY, f64::min),
                    WindowShape::StarRadial(p) => {
                        let mut angles: Vec<f64> = (0..EROSION_DIRECTIONS)
                            .map(|k| num::PI * k as f64 / EROSION_DIRECTIONS as f64)
                            .collect();
                        angles.extend(p.knots().iter().map(|k| k.0));
                        angles
                            .iter()
                            .map(|&t| {
                                let (inner, outer) = p.one_sided(t);
                                inner - alpha * outer
                            })
                            .fold(f64::INFINITY, f64::min)
                    }
                };
                (alpha, margin)
            })
            .collect();
        let holds = margins.iter().all(|(_, m)| *m > 0.0);
        Ok(ConditionReport { margins, holds })
    }

    /// `S_ε = {x : dist(x, S^c) > ε}`.
    pub fn erode(&self, epsilon: f64) -> Result<InteractionWindow> {
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(Error::invalid("epsilon", "must be nonnegative and finite"));
        }
        let inradius = self.inradius();
        if epsilon >= inradius {
            return Err(Error::EmptyWindow { epsilon, inradius });
        }
        let shape = match &self.shape {
            WindowShape::Ball { radius } => WindowShape::Ball {
                radius: radius - epsilon,
            },
            WindowShape::Box { half_widths } => WindowShape::Box {
                half_widths: half_widths.iter().map(|w| w - epsilon).collect(),
            },
            WindowShape::StarRadial(p) => {
                if epsilon == 0.0 {
                    WindowShape::StarRadial(p.clone())
                } else {
                    WindowShape::StarRadial(erode_star(p, epsilon)?)
                }
            }
        };
        Ok(InteractionWindow {
            shape,
            dim: self.dim,
            closed: self.closed,
        })
    }
}

/// Boundary samples of a star set, including the radial segments at jumps.
fn star_boundary(p: &StarProfile) -> Vec<(f64, f64)> {
    let fine = 4 * EROSION_DIRECTIONS;
    let mut pts = Vec::with_capacity(fine + 64);
    for k in 0..fine {
        let t = 2.0 * num::PI * k as f64 / fine as f64;
        let r = p.radius(t);
        pts.push((r * num::cos(t), r * num::sin(t)));
    }
    for &(a, _) in p.knots() {
        for t in [a, a + num::PI] {
            let (lo, hi) = p.one_sided(t);
            let steps = 32;
            for s in 0..=steps {
                let r = lo + (hi - lo) * s as f64 / steps as f64;
                pts.push((r * num::cos(t), r * num::sin(t)));
            }
        }
    }
    pts
}

fn erode_star(p: &StarProfile, epsilon: f64) -> Result<StarProfile> {
    let boundary = star_boundary(p);
    let dist_to_complement = |x: f64, y: f64| -> f64 {
        boundary
            .iter()
            .map(|(bx, by)| num::sqrt((x - bx) * (x - bx) + (y - by) * (y - by)))
            .fold(f64::INFINITY, f64::min)
    };
    let half = EROSION_DIRECTIONS / 2;
    let mut knots = Vec::with_capacity(half);
    for k in 0..half {
        let t = num::PI * k as f64 / half as f64;
        let (c, s) = (num::cos(t), num::sin(t));
        // largest r with dist(r e_θ, S^c) > ε, by bisection on [0, ρ(θ)]
        let mut lo = 0.0;
        let mut hi = p.radius(t);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if dist_to_complement(mid * c, mid * s) > epsilon {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if lo <= 0.0 {
            return Err(Error::EmptyWindow {
                epsilon,
                inradius: p.min_radius(),
            });
        }
        knots.push((t, lo));
    }
    StarProfile::new(knots, Interpolation::Linear)
}
