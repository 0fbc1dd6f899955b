//! Piecewise-constant upper approximations `u_n` on the cells `j/n + (0, 1/n]^d`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::num;
use crate::potential::SiteFunction;

/// Samples per axis when taking the sup over a closed cell.
pub const CELL_SAMPLES: usize = 9;

const MAX_CELLS: usize = 1 << 22;

/// `u_n = Σ_j u_{n,j} 1_{Λ_{n,j}}` with `u_{n,j}` the sampled sup of `u` over the closed cell.
#[derive(Clone, Debug, PartialEq)]
pub struct Staircase {
    n: usize,
    dim: usize,
    /// Index of the first cell per axis.
    first: Vec<i64>,
    /// Cells per axis.
    counts: Vec<usize>,
    /// Cell values, axis 0 fastest.
    values: Vec<f64>,
}

impl Staircase {
    pub fn new<F: SiteFunction + ?Sized>(u: &F, n: usize) -> Result<Self> {
        Self::build(u, n, 0.0)
    }

    /// As [`Staircase::new`], adding `Lip·√d/(16n)` to every cell so that the
    /// result dominates `u` for Lipschitz `u` regardless of sampling.
    pub fn with_slack<F: SiteFunction + ?Sized>(u: &F, n: usize) -> Result<Self> {
        let lip = u.lipschitz();
        if !lip.is_finite() {
            return Err(Error::invalid("u", "Lipschitz constant is unknown"));
        }
        let slack = lip * num::sqrt(u.dim() as f64) / (2.0 * (CELL_SAMPLES - 1) as f64 * n as f64);
        Self::build(u, n, slack)
    }

    fn build<F: SiteFunction + ?Sized>(u: &F, n: usize, slack: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", "must be positive"));
        }
        let dim = u.dim();
        if !(1..=3).contains(&dim) {
            return Err(Error::invalid("dim", "staircases support dimensions 1 to 3"));
        }
        let (lo, hi) = u.support_bounds();
        let nf = n as f64;
        let mut first = Vec::with_capacity(dim);
        let mut counts = Vec::with_capacity(dim);
        for i in 0..dim {
            let a = num::ceil(lo[i] * nf) as i64 - 1;
            let b = num::ceil(hi[i] * nf) as i64 - 1;
            first.push(a);
            counts.push((b - a + 1) as usize);
        }
        let total: usize = counts.iter().product();
        if total > MAX_CELLS {
            return Err(Error::TooLarge {
                what: "staircase cells",
                count: total,
                max: MAX_CELLS,
            });
        }
        let per_cell = num::powi(CELL_SAMPLES as f64, dim as i32) as usize;
        let mut values = Vec::with_capacity(total);
        let mut cell = [0i64; 3];
        let mut coords = [0.0f64; 3];
        for flat in 0..total {
            let mut rest = flat;
            for i in 0..dim {
                cell[i] = first[i] + (rest % counts[i]) as i64;
                rest /= counts[i];
            }
            let mut sup = 0.0f64;
            for s in 0..per_cell {
                let mut r = s;
                for i in 0..dim {
                    let k = r % CELL_SAMPLES;
                    r /= CELL_SAMPLES;
                    coords[i] = (cell[i] as f64 + k as f64 / (CELL_SAMPLES - 1) as f64) / nf;
                }
                sup = sup.max(u.value(&Point::new(coords[..dim].iter().copied())));
            }
            values.push(sup + slack);
        }
        Ok(Staircase {
            n,
            dim,
            first,
            counts,
            values,
        })
    }

    /// Cells per unit length.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cell_count(&self) -> usize {
        self.values.len()
    }

    pub fn cell_value(&self, index: usize) -> f64 {
        self.values[index]
    }

    /// Closed cell `[lo, hi]` of cell `index`.
    pub fn cell_bounds(&self, index: usize) -> (Vec<f64>, Vec<f64>) {
        let mut rest = index;
        let nf = self.n as f64;
        let mut lo = Vec::with_capacity(self.dim);
        let mut hi = Vec::with_capacity(self.dim);
        for i in 0..self.dim {
            let j = self.first[i] + (rest % self.counts[i]) as i64;
            rest /= self.counts[i];
            lo.push(j as f64 / nf);
            hi.push((j + 1) as f64 / nf);
        }
        (lo, hi)
    }

    /// Multi-index offset of cell `index` from the first cell.
    pub(crate) fn cell_offset(&self, index: usize) -> [usize; 3] {
        let mut rest = index;
        let mut out = [0; 3];
        for i in 0..self.dim {
            out[i] = rest % self.counts[i];
            rest /= self.counts[i];
        }
        out
    }

    fn locate(&self, x: &Point) -> Option<usize> {
        let mut flat = 0usize;
        let mut stride = 1usize;
        for i in 0..self.dim {
            let j = num::ceil(x[i] * self.n as f64) as i64 - 1 - self.first[i];
            if j < 0 || j as usize >= self.counts[i] {
                return None;
            }
            flat += j as usize * stride;
            stride *= self.counts[i];
        }
        Some(flat)
    }
}

impl SiteFunction for Staircase {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &Point) -> f64 {
        self.locate(x).map_or(0.0, |k| self.values[k])
    }

    fn support_bounds(&self) -> (Point, Point) {
        let nf = self.n as f64;
        let lo = (0..self.dim).map(|i| self.first[i] as f64 / nf);
        let hi = (0..self.dim).map(|i| (self.first[i] + self.counts[i] as i64) as f64 / nf);
        (Point::new(lo), Point::new(hi))
    }

    fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    fn lipschitz(&self) -> f64 {
        f64::INFINITY
    }

    fn integral_of(&self, g: &dyn Fn(f64) -> f64) -> Result<f64> {
        let vol = num::powi(1.0 / self.n as f64, self.dim as i32);
        Ok(self.values.iter().map(|&v| vol * g(v)).sum())
    }
}
