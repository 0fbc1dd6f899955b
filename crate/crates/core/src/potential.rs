//! Single-site potentials `u₀ ≤ 0`, their reflections `u(x) = -u₀(-x)`, and the
//! random potential field `V_η(x) = Σ_j u₀(x - x_j)`.

use crate::configuration::PointConfiguration;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::num;
use crate::profile::RadialTable;
use crate::quadrature;
use alloc::vec::Vec;

/// Shape of the well on `[0, radius]`, normalized to `1` at the origin
/// (except for tabulated shapes, which carry their own values).
#[derive(Clone, Debug, PartialEq)]
pub enum WellProfile {
    /// `1 - r/radius`.
    Triangular { radius: f64 },
    /// `cos(π r / (2 radius))`.
    Cosine { radius: f64 },
    /// Knot values of `u₀` itself (nonpositive).
    Tabulated(RadialTable),
}

impl WellProfile {
    /// Nonnegative well depth profile `g(r)` with `u₀ = -depth * g`.
    pub fn shape(&self, r: f64) -> f64 {
        let r = r.abs();
        match self {
            WellProfile::Triangular { radius } => (1.0 - r / radius).max(0.0),
            WellProfile::Cosine { radius } => {
                if r <= *radius {
                    num::cos(num::PI * r / (2.0 * radius)).max(0.0)
                } else {
                    0.0
                }
            }
            WellProfile::Tabulated(table) => -table.eval(r),
        }
    }

    pub fn radius(&self) -> f64 {
        match self {
            WellProfile::Triangular { radius } | WellProfile::Cosine { radius } => *radius,
            WellProfile::Tabulated(t) => t.support_radius(),
        }
    }

    pub fn lipschitz(&self) -> f64 {
        match self {
            WellProfile::Triangular { radius } => 1.0 / radius,
            WellProfile::Cosine { radius } => num::PI / (2.0 * radius),
            WellProfile::Tabulated(t) => t.lipschitz(),
        }
    }

    pub fn max_shape(&self) -> f64 {
        match self {
            WellProfile::Triangular { .. } | WellProfile::Cosine { .. } => 1.0,
            WellProfile::Tabulated(t) => t.max_abs(),
        }
    }

    pub(crate) fn breakpoints(&self) -> alloc::vec::Vec<f64> {
        match self {
            WellProfile::Tabulated(t) => t.breakpoints().collect(),
            _ => alloc::vec![0.0, self.radius()],
        }
    }
}

/// How a one-dimensional profile extends to `R^d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layout {
    /// `g(|x|)`.
    Radial,
    /// `Π_i g(|x_i|)`.
    Separable,
}

/// Continuous nonpositive single-site potential with compact support.
#[derive(Clone, Debug, PartialEq)]
pub struct SingleSitePotential {
    profile: WellProfile,
    depth: f64,
    layout: Layout,
    dim: usize,
}

impl SingleSitePotential {
    pub fn new(profile: WellProfile, depth: f64, layout: Layout, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dim", "must be at least 1"));
        }
        if !(depth.is_finite() && depth > 0.0) {
            return Err(Error::invalid("depth", "must be positive and finite"));
        }
        match &profile {
            WellProfile::Triangular { radius } | WellProfile::Cosine { radius } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::invalid("radius", "must be positive and finite"));
                }
            }
            WellProfile::Tabulated(t) => {
                if t.knots().iter().any(|(_, v)| *v > 0.0) {
                    return Err(Error::invalid("knots", "single-site potential values must be nonpositive"));
                }
            }
        }
        Ok(SingleSitePotential {
            profile,
            depth,
            layout,
            dim,
        })
    }

    /// `u₀(x) = -depth * max(0, 1 - |x|/radius)`.
    pub fn triangular(depth: f64, radius: f64, dim: usize) -> Result<Self> {
        SingleSitePotential::new(WellProfile::Triangular { radius }, depth, Layout::Radial, dim)
    }

    /// `u₀(x) = -depth * cos(π|x|/(2 radius))` on `|x| <= radius`.
    pub fn cosine(depth: f64, radius: f64, dim: usize) -> Result<Self> {
        SingleSitePotential::new(WellProfile::Cosine { radius }, depth, Layout::Radial, dim)
    }

    pub fn tabulated(table: RadialTable, layout: Layout, dim: usize) -> Result<Self> {
        SingleSitePotential::new(WellProfile::Tabulated(table), 1.0, layout, dim)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn profile(&self) -> &WellProfile {
        &self.profile
    }

    pub fn depth(&self) -> f64 {
        self.depth
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    /// Same shape with the depth multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        SingleSitePotential::new(self.profile.clone(), self.depth * factor, self.layout, self.dim)
    }

    pub fn value(&self, x: &Point) -> f64 {
        let shape = match self.layout {
            Layout::Radial => self.profile.shape(x.norm()),
            Layout::Separable => x.coords().iter().map(|c| self.profile.shape(*c)).product(),
        };
        -self.depth * shape
    }

    /// `u₀(0)`.
    pub fn at_origin(&self) -> f64 {
        self.value(&Point::origin(self.dim))
    }

    /// Half-width of the cube `[-w, w]^d` containing the support.
    pub fn support_half_width(&self) -> f64 {
        self.profile.radius()
    }

    /// Radius of a ball containing the support.
    pub fn support_radius(&self) -> f64 {
        match self.layout {
            Layout::Radial => self.profile.radius(),
            Layout::Separable => self.profile.radius() * num::sqrt(self.dim as f64),
        }
    }

    /// `max |u₀|`.
    pub fn max_abs(&self) -> f64 {
        match self.layout {
            Layout::Radial => self.depth * self.profile.max_shape(),
            Layout::Separable => self.depth * num::powi(self.profile.max_shape(), self.dim as i32),
        }
    }

    /// Lipschitz constant of `u₀` (Euclidean).
    pub fn lipschitz(&self) -> f64 {
        let l = self.depth * self.profile.lipschitz();
        match self.layout {
            Layout::Radial => l,
            Layout::Separable => {
                let m = self.profile.max_shape();
                l * num::powi(m, self.dim as i32 - 1) * num::sqrt(self.dim as f64)
            }
        }
    }

    /// `V_η(x) = Σ_j u₀(x - x_j)`.
    pub fn field_at(&self, x: &Point, config: &PointConfiguration) -> f64 {
        let reach = self.support_radius();
        let reach2 = reach * reach;
        config
            .points()
            .iter()
            .filter(|p| p.distance_sq(x) <= reach2)
            .map(|p| self.value(&(x - p)))
            .sum()
    }

    /// `u(x) = -u₀(-x)`.
    pub fn reflected(&self) -> ReflectedPotential {
        ReflectedPotential {
            inner: self.clone(),
        }
    }
}

/// Real-valued function on `R^d` with bounded support, as used by packing
/// norms and Laplace functionals.
pub trait SiteFunction {
    fn dim(&self) -> usize;

    fn value(&self, x: &Point) -> f64;

    /// Box `[lo, hi]` (per axis) containing the support.
    fn support_bounds(&self) -> (Point, Point);

    fn max_value(&self) -> f64;

    /// Lipschitz constant, or `f64::INFINITY` if unknown or discontinuous.
    fn lipschitz(&self) -> f64;

    /// `∫ g(f(x)) dx` over `R^d` for `g` with `g(0) = 0`.
    fn integral_of(&self, _g: &dyn Fn(f64) -> f64) -> Result<f64> {
        Err(Error::Unsupported("integral of this site function"))
    }
}

/// The nonnegative reflection `u(x) = -u₀(-x)` of a single-site potential.
#[derive(Clone, Debug, PartialEq)]
pub struct ReflectedPotential {
    inner: SingleSitePotential,
}

impl ReflectedPotential {
    pub fn potential(&self) -> &SingleSitePotential {
        &self.inner
    }

    /// `u(0) = -u₀(0)`.
    pub fn at_origin(&self) -> f64 {
        -self.inner.at_origin()
    }

    /// `Σ_j u(x_j)`.
    pub fn site_sum(&self, config: &PointConfiguration) -> f64 {
        config.points().iter().map(|p| SiteFunction::value(self, p)).sum()
    }
}

impl SiteFunction for ReflectedPotential {
    fn dim(&self) -> usize {
        self.inner.dim
    }

    fn value(&self, x: &Point) -> f64 {
        -self.inner.value(&x.neg())
    }

    fn support_bounds(&self) -> (Point, Point) {
        let w = self.inner.support_half_width();
        let d = self.inner.dim;
        (Point::new(core::iter::repeat_n(-w, d)), Point::new(core::iter::repeat_n(w, d)))
    }

    fn max_value(&self) -> f64 {
        self.inner.max_abs()
    }

    fn lipschitz(&self) -> f64 {
        self.inner.lipschitz()
    }

    fn integral_of(&self, g: &dyn Fn(f64) -> f64) -> Result<f64> {
        let p = &self.inner;
        let d = p.dim;
        let breaks = p.profile.breakpoints();
        let tol = quadrature::RELATIVE_TOLERANCE * 1e-2;
        match p.layout {
            Layout::Radial => {
                let surface = d as f64 * num::unit_ball_volume(d);
                let radial = quadrature::integrate(
                    |r| g(p.depth * p.profile.shape(r)) * num::powi(r, d as i32 - 1),
                    0.0,
                    p.profile.radius(),
                    &breaks,
                    tol,
                );
                Ok(surface * radial)
            }
            Layout::Separable => {
                if d > 3 {
                    return Err(Error::Unsupported("separable integrals above dimension 3"));
                }
                let w = p.profile.radius();
                let mut axis_breaks: Vec<f64> = breaks.iter().flat_map(|b| [*b, -*b]).collect();
                axis_breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let all = alloc::vec![axis_breaks; d];
                let lo = alloc::vec![-w; d];
                let hi = alloc::vec![w; d];
                Ok(quadrature::integrate_box(
                    |x| g(-p.value(&Point::new(x.iter().copied()))),
                    &lo,
                    &hi,
                    &all,
                    tol,
                ))
            }
        }
    }
}
