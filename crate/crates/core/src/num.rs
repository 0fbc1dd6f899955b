//! Floating point helpers usable without `std`.

use core::cmp::Ordering;
use core::fmt;
use core::iter::Sum;
use core::ops::{Add, AddAssign};

pub use core::f64::consts::PI;

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn ln_1p(x: f64) -> f64 {
    libm::log1p(x)
}

#[inline]
pub fn exp_m1(x: f64) -> f64 {
    libm::expm1(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn powi(x: f64, n: i32) -> f64 {
    libm::pow(x, n as f64)
}

#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub fn acos(x: f64) -> f64 {
    libm::acos(x)
}

#[inline]
pub fn atan2(y: f64, x: f64) -> f64 {
    libm::atan2(y, x)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

#[inline]
pub fn round(x: f64) -> f64 {
    libm::round(x)
}

/// `ln(n!)`, exact summation for small `n`.
pub fn ln_factorial(n: u64) -> f64 {
    if n < 64 {
        (2..=n).map(|k| ln(k as f64)).sum()
    } else {
        libm::lgamma(n as f64 + 1.0)
    }
}

/// Volume of the unit ball in `dim` dimensions.
pub fn unit_ball_volume(dim: usize) -> f64 {
    let half = dim as f64 / 2.0;
    powf(PI, half) / libm::tgamma(half + 1.0)
}

/// `ln Σ exp(x_i)` with max-shift stabilization. Empty input gives `-inf`.
pub fn log_sum_exp(values: impl IntoIterator<Item = f64> + Clone) -> f64 {
    let max = values
        .clone()
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    if max == f64::INFINITY {
        return max;
    }
    let sum: f64 = values.into_iter().map(|v| exp(v - max)).sum();
    max + ln(sum)
}

/// `ln(exp(a) + exp(b))`.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + ln_1p(exp(lo - hi))
}

/// Extended nonnegative energy: a finite value or `+inf` (hardcore).
///
/// Any sum involving `Infinite` is `Infinite`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Energy {
    Finite(f64),
    Infinite,
}

impl Energy {
    pub const ZERO: Energy = Energy::Finite(0.0);

    pub fn is_finite(self) -> bool {
        matches!(self, Energy::Finite(_))
    }

    pub fn is_infinite(self) -> bool {
        !self.is_finite()
    }

    /// Value as `f64`, with `Infinite` mapped to `f64::INFINITY`.
    pub fn value(self) -> f64 {
        match self {
            Energy::Finite(v) => v,
            Energy::Infinite => f64::INFINITY,
        }
    }

    /// Boltzmann weight `exp(-E)`; zero for infinite energy.
    pub fn boltzmann(self) -> f64 {
        match self {
            Energy::Finite(v) => exp(-v),
            Energy::Infinite => 0.0,
        }
    }

    pub fn scale(self, factor: f64) -> Energy {
        match self {
            Energy::Finite(v) => Energy::Finite(v * factor),
            Energy::Infinite if factor == 0.0 => Energy::ZERO,
            Energy::Infinite => Energy::Infinite,
        }
    }
}

impl Default for Energy {
    fn default() -> Self {
        Energy::ZERO
    }
}

impl From<f64> for Energy {
    fn from(v: f64) -> Self {
        if v == f64::INFINITY {
            Energy::Infinite
        } else {
            Energy::Finite(v)
        }
    }
}

impl Add for Energy {
    type Output = Energy;

    fn add(self, rhs: Energy) -> Energy {
        match (self, rhs) {
            (Energy::Finite(a), Energy::Finite(b)) => Energy::Finite(a + b),
            _ => Energy::Infinite,
        }
    }
}

impl AddAssign for Energy {
    fn add_assign(&mut self, rhs: Energy) {
        *self = *self + rhs;
    }
}

impl Sum for Energy {
    fn sum<I: Iterator<Item = Energy>>(iter: I) -> Energy {
        let mut total = Energy::ZERO;
        for e in iter {
            total += e;
            if total.is_infinite() {
                break;
            }
        }
        total
    }
}

impl PartialOrd for Energy {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value().partial_cmp(&other.value())
    }
}

impl fmt::Display for Energy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Energy::Finite(v) => write!(f, "{v}"),
            Energy::Infinite => f.write_str("inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinite_absorbs_sums() {
        let e = Energy::Finite(1.0) + Energy::Infinite;
        assert!(e.is_infinite());
        let total: Energy = [Energy::Finite(0.5), Energy::Finite(0.25)].into_iter().sum();
        assert_eq!(total, Energy::Finite(0.75));
        assert_eq!(Energy::Infinite.boltzmann(), 0.0);
        assert!(Energy::Finite(3.0) < Energy::Infinite);
    }

    #[test]
    fn factorials_and_ball_volumes() {
        assert!((ln_factorial(5) - ln(120.0)).abs() < 1e-12);
        assert_eq!(ln_factorial(0), 0.0);
        assert!((ln_factorial(100) - 363.739_375_555_563_5).abs() < 1e-9);
        assert!((unit_ball_volume(1) - 2.0).abs() < 1e-14);
        assert!((unit_ball_volume(2) - PI).abs() < 1e-14);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-14);
    }

    #[test]
    fn log_sum_exp_matches_direct() {
        let v = [0.1, -2.0, 3.5];
        let direct = ln(v.iter().map(|x| exp(*x)).sum::<f64>());
        assert!((log_sum_exp(v.iter().copied()) - direct).abs() < 1e-12);
        assert!((log_add_exp(1.0, 2.0) - ln(exp(1.0) + exp(2.0))).abs() < 1e-12);
        assert_eq!(log_sum_exp(core::iter::empty::<f64>()), f64::NEG_INFINITY);
    }
}
