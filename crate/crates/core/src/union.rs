//! Lebesgue measure of a union of equal balls.

use alloc::vec::Vec;

use crate::geometry::Point;
use crate::num;

const QMC_POINTS: usize = 1 << 18;

/// `|∪_j B(c_j, r)|`: exact in one and two dimensions, exact pairwise
/// inclusion-exclusion in three dimensions when no three balls pairwise
/// overlap, Halton quasi-Monte Carlo otherwise.
pub(crate) fn union_volume(centers: &[&Point], r: f64, dim: usize) -> f64 {
    if centers.is_empty() {
        return 0.0;
    }
    match dim {
        1 => union_1d(centers, r),
        2 => union_2d(centers, r),
        3 => union_3d(centers, r),
        _ => union_qmc(centers, r, dim),
    }
}

fn union_1d(centers: &[&Point], r: f64) -> f64 {
    let mut xs: Vec<f64> = centers.iter().map(|p| p[0]).collect();
    xs.sort_by(f64::total_cmp);
    let mut total = 0.0;
    let (mut lo, mut hi) = (xs[0] - r, xs[0] + r);
    for &x in &xs[1..] {
        if x - r > hi {
            total += hi - lo;
            lo = x - r;
        }
        hi = hi.max(x + r);
    }
    total + hi - lo
}

/// Green's theorem over the uncovered boundary arcs of each disc.
fn union_2d(centers: &[&Point], r: f64) -> f64 {
    let two_pi = 2.0 * num::PI;
    let mut area = 0.0;
    for (i, c) in centers.iter().enumerate() {
        let mut covered: Vec<(f64, f64)> = Vec::new();
        let mut swallowed = false;
        for (j, o) in centers.iter().enumerate() {
            if i == j {
                continue;
            }
            let dx = o[0] - c[0];
            let dy = o[1] - c[1];
            let d = num::sqrt(dx * dx + dy * dy);
            if d >= 2.0 * r {
                continue;
            }
            if d == 0.0 {
                // identical discs: count only the first copy
                if j < i {
                    swallowed = true;
                    break;
                }
                continue;
            }
            let mid = num::atan2(dy, dx);
            let half = num::acos((d / (2.0 * r)).min(1.0));
            let mut a = mid - half;
            let mut b = mid + half;
            // normalize to [0, 2π)
            while a < 0.0 {
                a += two_pi;
                b += two_pi;
            }
            while a >= two_pi {
                a -= two_pi;
                b -= two_pi;
            }
            if b > two_pi {
                covered.push((a, two_pi));
                covered.push((0.0, b - two_pi));
            } else {
                covered.push((a, b));
            }
        }
        if swallowed {
            continue;
        }
        covered.sort_by(|x, y| x.0.total_cmp(&y.0));
        // walk uncovered arcs
        let mut cursor = 0.0;
        let mut arcs: Vec<(f64, f64)> = Vec::new();
        for (a, b) in covered {
            if a > cursor {
                arcs.push((cursor, a));
            }
            cursor = cursor.max(b);
        }
        if cursor < two_pi {
            arcs.push((cursor, two_pi));
        }
        for (t1, t2) in arcs {
            area += 0.5
                * (r * r * (t2 - t1) + c[0] * r * (num::sin(t2) - num::sin(t1))
                    - c[1] * r * (num::cos(t2) - num::cos(t1)));
        }
    }
    area
}

fn union_3d(centers: &[&Point], r: f64) -> f64 {
    let n = centers.len();
    let overlaps = |i: usize, j: usize| centers[i].distance(centers[j]) < 2.0 * r;
    for i in 0..n {
        for j in i + 1..n {
            if !overlaps(i, j) {
                continue;
            }
            for k in j + 1..n {
                if overlaps(i, k) && overlaps(j, k) {
                    return union_qmc(centers, r, 3);
                }
            }
        }
    }
    let ball = num::unit_ball_volume(3) * r * r * r;
    let mut total = ball * n as f64;
    for i in 0..n {
        for j in i + 1..n {
            let d = centers[i].distance(centers[j]);
            if d < 2.0 * r {
                // lens volume of two equal spheres
                total -= num::PI * (4.0 * r + d) * (2.0 * r - d) * (2.0 * r - d) / 12.0;
            }
        }
    }
    total
}

const PRIMES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn radical_inverse(mut index: u64, base: u32) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut x = 0.0;
    while index > 0 {
        x += (index % base as u64) as f64 * f;
        index /= base as u64;
        f *= inv;
    }
    x
}

fn union_qmc(centers: &[&Point], r: f64, dim: usize) -> f64 {
    let dim = dim.min(PRIMES.len());
    let mut lo = alloc::vec![f64::INFINITY; dim];
    let mut hi = alloc::vec![f64::NEG_INFINITY; dim];
    for c in centers {
        for a in 0..dim {
            lo[a] = lo[a].min(c[a] - r);
            hi[a] = hi[a].max(c[a] + r);
        }
    }
    let box_volume: f64 = (0..dim).map(|a| hi[a] - lo[a]).product();
    let r2 = r * r;
    let mut x = alloc::vec![0.0; dim];
    let mut hits = 0usize;
    for idx in 1..=QMC_POINTS as u64 {
        for a in 0..dim {
            x[a] = lo[a] + (hi[a] - lo[a]) * radical_inverse(idx, PRIMES[a]);
        }
        let inside = centers.iter().any(|c| {
            let mut d2 = 0.0;
            for a in 0..dim {
                let t = x[a] - c[a];
                d2 += t * t;
            }
            d2 <= r2
        });
        if inside {
            hits += 1;
        }
    }
    box_volume * hits as f64 / QMC_POINTS as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn pts(coords: &[&[f64]]) -> Vec<Point> {
        coords.iter().map(|c| Point::new(c.iter().copied())).collect()
    }

    #[test]
    fn one_dimensional_union() {
        let p = pts(&[&[0.0], &[0.5], &[5.0]]);
        let refs: Vec<&Point> = p.iter().collect();
        assert!((union_volume(&refs, 1.0, 1) - 4.5).abs() < 1e-15);
    }

    #[test]
    fn two_dimensional_union_matches_lens_formula() {
        let r: f64 = 1.0;
        let d: f64 = 1.2;
        let p = pts(&[&[0.0, 0.0], &[d, 0.0]]);
        let refs: Vec<&Point> = p.iter().collect();
        let lens = 2.0 * r * r * num::acos(d / (2.0 * r)) - 0.5 * d * num::sqrt(4.0 * r * r - d * d);
        let expected = 2.0 * num::PI - lens;
        assert!((union_volume(&refs, r, 2) - expected).abs() < 1e-12);
        let single = pts(&[&[3.0, -1.0]]);
        let refs: Vec<&Point> = single.iter().collect();
        assert!((union_volume(&refs, 0.5, 2) - num::PI * 0.25).abs() < 1e-13);
    }

    #[test]
    fn two_dimensional_triple_overlap_against_qmc() {
        let p = pts(&[&[0.0, 0.0], &[0.8, 0.1], &[0.3, 0.7], &[0.35, 0.25]]);
        let refs: Vec<&Point> = p.iter().collect();
        let exact = union_2d(&refs, 0.6);
        let approx = union_qmc(&refs, 0.6, 2);
        assert!((exact - approx).abs() / exact < 1e-3, "{exact} vs {approx}");
    }

    #[test]
    fn three_dimensional_pairs_against_qmc() {
        let p = pts(&[&[0.0, 0.0, 0.0], &[1.0, 0.2, 0.0]]);
        let refs: Vec<&Point> = p.iter().collect();
        let exact = union_3d(&refs, 0.8);
        let approx = union_qmc(&refs, 0.8, 3);
        assert!((exact - approx).abs() / exact < 2e-3, "{exact} vs {approx}");
        let _ = vec![0];
    }
}
