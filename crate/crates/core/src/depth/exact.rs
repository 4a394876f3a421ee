use std::cmp::Ordering;

use crate::data::Points;
use crate::plane::{angle_key, cross, dot, key_cmp, opposite_key};

/// Splits `pts − z` into the count of points equal to `z` and the nonzero
/// difference vectors.
fn centered(z: &[f64], pts: &Points) -> (usize, Vec<[f64; 2]>) {
    assert_eq!(pts.dim(), 2, "exact Tukey depth is bivariate");
    assert!(!pts.is_empty(), "empty sample");
    let mut at_z = 0;
    let mut v = Vec::with_capacity(pts.len());
    for x in pts.rows() {
        let d = [x[0] - z[0], x[1] - z[1]];
        if d == [0.0, 0.0] {
            at_z += 1;
        } else {
            v.push(d);
        }
    }
    (at_z, v)
}

/// Exact halfspace depth of `z` in a bivariate sample, as a multiple of
/// `1/m`: the smallest number of sample points in a closed halfplane whose
/// boundary passes through `z`.
///
/// Rotating-line sweep over the angularly sorted directions `x_i − z`;
/// `O(m log m)`. Angles are compared exactly by half-plane and cross
/// product.
pub fn exact_tukey_depth_2d(z: &[f64], pts: &Points) -> f64 {
    let m = pts.len();
    let (at_z, v) = centered(z, pts);
    if v.is_empty() {
        return 1.0;
    }
    let mut keys: Vec<(u8, f64)> = v.iter().map(|&u| angle_key(u)).collect();
    keys.sort_by(|a, b| key_cmp(*a, *b));
    // group collinear same-direction vectors
    let mut dirs: Vec<(u8, f64)> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    for k in keys {
        match dirs.last() {
            Some(&last) if key_cmp(last, k) == Ordering::Equal => {
                *counts.last_mut().unwrap() += 1;
            }
            _ => {
                dirs.push(k);
                counts.push(1);
            }
        }
    }
    let g = dirs.len();
    let mut prefix = vec![0usize; 2 * g + 1];
    for i in 0..2 * g {
        prefix[i + 1] = prefix[i] + counts[i % g];
    }
    let total = prefix[g];
    // position in the doubled sequence: (turn, key)
    let ext = |i: usize| (i / g, dirs[i % g]);
    let ext_cmp = |a: (usize, (u8, f64)), b: (usize, (u8, f64))| {
        a.0.cmp(&b.0).then(key_cmp(a.1, b.1))
    };
    let mut best = usize::MAX;
    let mut j = 1;
    for k in 0..g {
        let opp = opposite_key(dirs[k]);
        let target = (if dirs[k].0 == 0 { 0 } else { 1 }, opp);
        j = j.max(k + 1);
        while j < k + g && ext_cmp(ext(j), target) == Ordering::Less {
            j += 1;
        }
        let left = prefix[j] - prefix[k + 1];
        let opposite = if j < k + g && ext_cmp(ext(j), target) == Ordering::Equal {
            counts[j % g]
        } else {
            0
        };
        let right = total - counts[k] - opposite - left;
        let c = left.min(right) + counts[k].min(opposite);
        best = best.min(c);
    }
    (at_z + best) as f64 / m as f64
}

/// `O(m²)` reference: for every line through `z` and a sample point, counts
/// the two open sides and the two rays of the line directly.
pub fn exact_tukey_depth_2d_brute(z: &[f64], pts: &Points) -> f64 {
    let m = pts.len();
    let (at_z, v) = centered(z, pts);
    if v.is_empty() {
        return 1.0;
    }
    let mut best = usize::MAX;
    for &u in &v {
        let (mut left, mut right, mut same, mut opposite) = (0, 0, 0, 0);
        for &w in &v {
            let c = cross(u, w);
            if c > 0.0 {
                left += 1;
            } else if c < 0.0 {
                right += 1;
            } else if dot(u, w) > 0.0 {
                same += 1;
            } else {
                opposite += 1;
            }
        }
        best = best.min(left.min(right) + same.min(opposite));
    }
    (at_z + best) as f64 / m as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;
    use rand::Rng;

    /// Closed-halfplane counts at many normal angles, including tiny tilts
    /// around every critical angle.
    fn halfplane_scan(z: &[f64], pts: &Points) -> f64 {
        let mut angles = vec![];
        for x in pts.rows() {
            let a = (x[1] - z[1]).atan2(x[0] - z[0]);
            for base in [a + std::f64::consts::FRAC_PI_2, a - std::f64::consts::FRAC_PI_2] {
                for eps in [-1e-7, 0.0, 1e-7] {
                    angles.push(base + eps);
                }
            }
        }
        angles.push(0.3);
        let mut best = usize::MAX;
        for t in angles {
            let n = [t.cos(), t.sin()];
            let c = pts
                .rows()
                .filter(|x| n[0] * (x[0] - z[0]) + n[1] * (x[1] - z[1]) >= -1e-13)
                .count();
            best = best.min(c);
        }
        best as f64 / pts.len() as f64
    }

    #[test]
    fn triangle_centroid() {
        let s = 3f64.sqrt();
        let pts = Points::from_rows(&[[0.0, 0.0], [2.0, 0.0], [1.0, s]]);
        let c = [1.0, s / 3.0];
        assert!((exact_tukey_depth_2d(&c, &pts) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(exact_tukey_depth_2d(&[5.0, 5.0], &pts), 0.0);
    }

    #[test]
    fn degenerate_samples() {
        let pts = Points::from_rows(&[[1.0, 1.0], [1.0, 1.0]]);
        assert_eq!(exact_tukey_depth_2d(&[1.0, 1.0], &pts), 1.0);
        assert_eq!(exact_tukey_depth_2d(&[0.0, 1.0], &pts), 0.0);
        let line = Points::from_rows(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [3.0, 0.0]]);
        assert_eq!(exact_tukey_depth_2d(&[1.0, 0.0], &line), 0.5);
        assert_eq!(exact_tukey_depth_2d(&[1.5, 0.0], &line), 0.5);
        assert_eq!(exact_tukey_depth_2d(&[1.5, 0.1], &line), 0.0);
    }

    #[test]
    fn sweep_matches_brute_force_on_small_instances() {
        let mut rng = seed::rng(77);
        for _ in 0..3000 {
            let m = rng.random_range(1..=9);
            // small integer grid to force collinearities and coincidences
            let rows: Vec<[f64; 2]> = (0..m)
                .map(|_| [rng.random_range(-3..=3) as f64, rng.random_range(-3..=3) as f64])
                .collect();
            let pts = Points::from_rows(&rows);
            let z = if rng.random_bool(0.3) {
                rows[rng.random_range(0..m)]
            } else {
                [
                    rng.random_range(-6..=6) as f64 / 2.0,
                    rng.random_range(-6..=6) as f64 / 2.0,
                ]
            };
            let sweep = exact_tukey_depth_2d(&z, &pts);
            assert_eq!(sweep, exact_tukey_depth_2d_brute(&z, &pts), "{rows:?} {z:?}");
            assert_eq!(sweep, halfplane_scan(&z, &pts), "{rows:?} {z:?}");
        }
    }

    #[test]
    fn affine_invariance_on_integer_grid() {
        let mut rng = seed::rng(5);
        for _ in 0..300 {
            let m = rng.random_range(3..20);
            let rows: Vec<[f64; 2]> = (0..m)
                .map(|_| [rng.random_range(-5..=5) as f64, rng.random_range(-5..=5) as f64])
                .collect();
            let z = [rng.random_range(-5..=5) as f64, rng.random_range(-5..=5) as f64];
            // integer matrix and shift keep every operation exact
            let a = [[2.0, 1.0], [-1.0, 3.0]];
            let b = [4.0, -7.0];
            let f = |p: [f64; 2]| {
                [
                    a[0][0] * p[0] + a[0][1] * p[1] + b[0],
                    a[1][0] * p[0] + a[1][1] * p[1] + b[1],
                ]
            };
            let mapped: Vec<[f64; 2]> = rows.iter().map(|&p| f(p)).collect();
            assert_eq!(
                exact_tukey_depth_2d(&z, &Points::from_rows(&rows)),
                exact_tukey_depth_2d(&f(z), &Points::from_rows(&mapped))
            );
        }
    }
}
