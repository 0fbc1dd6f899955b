//! Adaptive Simpson quadrature on intervals and boxes.

use alloc::vec::Vec;


/// Default relative tolerance.
pub const RELATIVE_TOLERANCE: f64 = 1e-8;

const MAX_DEPTH: u32 = 48;

fn simpson_step<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    m: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)
}

fn simpson_piece<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fb, fm) = (f(a), f(b), f(m));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, fa, b, fb, m, fm, whole, tol, MAX_DEPTH)
}

/// `∫_a^b f` split at `breakpoints` (kinks of `f`), to relative tolerance `rel_tol`.
///
/// Each piece is also split in four up front so narrow features are not missed
/// by the first Simpson estimate.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, breakpoints: &[f64], rel_tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let mut cuts: Vec<f64> = Vec::with_capacity(breakpoints.len() + 2);
    cuts.push(a);
    cuts.extend(breakpoints.iter().copied().filter(|x| *x > a && *x < b));
    cuts.push(b);
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup();
    let mut pieces: Vec<(f64, f64)> = Vec::new();
    for w in cuts.windows(2) {
        let step = (w[1] - w[0]) / 4.0;
        for k in 0..4 {
            pieces.push((w[0] + k as f64 * step, w[0] + (k + 1) as f64 * step));
        }
    }
    // coarse magnitude for the absolute target
    let coarse: f64 = pieces
        .iter()
        .map(|&(x, y)| ((y - x) / 6.0 * (f(x) + 4.0 * f(0.5 * (x + y)) + f(y))).abs())
        .sum();
    let tol = (rel_tol * coarse).max(f64::MIN_POSITIVE) / pieces.len() as f64;
    pieces.iter().map(|&(x, y)| simpson_piece(&mut f, x, y, tol)).sum()
}

/// `∫_{[lo, hi]} f` over a box of dimension at most 3 by nested one-dimensional
/// integration, splitting each axis at its `breakpoints`.
pub fn integrate_box<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    lo: &[f64],
    hi: &[f64],
    breakpoints: &[Vec<f64>],
    rel_tol: f64,
) -> f64 {
    let dim = lo.len();
    let mut x = [0.0f64; 3];
    fn level<F: FnMut(&[f64]) -> f64>(
        f: &mut F,
        axis: usize,
        dim: usize,
        x: &mut [f64; 3],
        lo: &[f64],
        hi: &[f64],
        breaks: &[Vec<f64>],
        tol: f64,
    ) -> f64 {
        let empty = Vec::new();
        let bp = breaks.get(axis).unwrap_or(&empty);
        if axis + 1 == dim {
            integrate(
                |t| {
                    x[axis] = t;
                    f(&x[..dim])
                },
                lo[axis],
                hi[axis],
                bp,
                tol,
            )
        } else {
            let mut inner = *x;
            integrate(
                |t| {
                    inner[axis] = t;
                    level(f, axis + 1, dim, &mut inner, lo, hi, breaks, tol)
                },
                lo[axis],
                hi[axis],
                bp,
                tol,
            )
        }
    }
    assert!((1..=3).contains(&dim), "integrate_box supports dimensions 1 to 3");
    level(&mut f, 0, dim, &mut x, lo, hi, breakpoints, rel_tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num;
    use alloc::vec;

    #[test]
    fn polynomials_and_kinks() {
        let v = integrate(|x| x * x, 0.0, 3.0, &[], 1e-10);
        assert!((v - 9.0).abs() < 1e-9);
        let tri = integrate(|x| (1.0 - x.abs()).max(0.0), -2.0, 2.0, &[-1.0, 0.0, 1.0], 1e-10);
        assert!((tri - 1.0).abs() < 1e-12);
        let e = integrate(num::exp, 0.0, 1.0, &[], 1e-10);
        assert!((e - (core::f64::consts::E - 1.0)).abs() < 1e-9);
    }

    #[test]
    fn nested_box() {
        let v = integrate_box(|x| x[0] * x[1], &[0.0, 0.0], &[1.0, 2.0], &[], 1e-10);
        assert!((v - 1.0).abs() < 1e-9);
        let pyramid = integrate_box(
            |x| (1.0 - x[0].abs()).max(0.0) * (1.0 - x[1].abs()).max(0.0),
            &[-1.0, -1.0],
            &[1.0, 1.0],
            &[vec![0.0], vec![0.0]],
            1e-10,
        );
        assert!((pyramid - 1.0).abs() < 1e-9);
    }
}
