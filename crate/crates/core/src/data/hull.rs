//! Convex-hull membership as a phase-1 simplex feasibility problem.
//!
//! `z ∈ conv(pts)` iff there are weights `λ ≥ 0` with `Σλ = 1` and
//! `Σ λ_i p_i = z`. The points are translated so that `z` is the origin and
//! each coordinate row is scaled by its largest magnitude before solving, so
//! the residual tolerance is relative to the data scale.

use super::Points;

const RESIDUAL_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-12;

/// `true` iff `z` lies in the closed convex hull of the rows of `pts`.
/// Boundary points count as inside.
pub fn point_in_convex_hull(z: &[f64], pts: &Points) -> bool {
    let m = pts.len();
    let d = pts.dim();
    if m == 0 {
        return false;
    }
    // Exact coincidence and bounding-box rejection avoid most LPs.
    if pts.rows().any(|p| p == z) {
        return true;
    }
    for j in 0..d {
        let (lo, hi) = pts
            .rows()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                (lo.min(p[j]), hi.max(p[j]))
            });
        if z[j] < lo || z[j] > hi {
            return false;
        }
    }
    if m == 1 {
        return false;
    }

    let rows = d + 1;
    let mut a = vec![vec![0.0; m]; rows];
    let mut b = vec![0.0; rows];
    for j in 0..d {
        let scale = pts
            .rows()
            .map(|p| (p[j] - z[j]).abs())
            .fold(0.0, f64::max);
        let scale = if scale > 0.0 { scale } else { 1.0 };
        for (i, p) in pts.rows().enumerate() {
            a[j][i] = (p[j] - z[j]) / scale;
        }
    }
    a[d].iter_mut().for_each(|v| *v = 1.0);
    b[d] = 1.0;
    phase_one(a, b) <= RESIDUAL_TOL
}

/// Minimizes the sum of artificials for `A λ = b, λ ≥ 0` with Bland's rule
/// and returns the optimal infeasibility.
fn phase_one(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> f64 {
    let rows = a.len();
    let m = a[0].len();
    for r in 0..rows {
        if b[r] < 0.0 {
            b[r] = -b[r];
            a[r].iter_mut().for_each(|v| *v = -*v);
        }
    }
    // Tableau columns: m structural then `rows` artificial.
    let ncols = m + rows;
    let mut t: Vec<Vec<f64>> = a
        .into_iter()
        .enumerate()
        .map(|(r, mut row)| {
            row.resize(ncols, 0.0);
            row[m + r] = 1.0;
            row
        })
        .collect();
    let mut basis: Vec<usize> = (m..ncols).collect();
    // Reduced costs of minimizing Σ artificials.
    let mut cost = vec![0.0; ncols];
    for j in 0..m {
        cost[j] = -(0..rows).map(|r| t[r][j]).sum::<f64>();
    }
    let max_iter = 50 * (ncols + rows);
    for _ in 0..max_iter {
        let Some(enter) = (0..ncols).find(|&j| cost[j] < -PIVOT_TOL) else {
            break;
        };
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for r in 0..rows {
            if t[r][enter] > PIVOT_TOL {
                let ratio = b[r] / t[r][enter];
                let better = match leave {
                    None => true,
                    Some(l) => ratio < best || (ratio == best && basis[r] < basis[l]),
                };
                if better {
                    best = ratio;
                    leave = Some(r);
                }
            }
        }
        let Some(pr) = leave else {
            // Unbounded direction cannot occur in phase 1; stop defensively.
            break;
        };
        let piv = t[pr][enter];
        t[pr].iter_mut().for_each(|v| *v /= piv);
        b[pr] /= piv;
        let prow = t[pr].clone();
        let pb = b[pr];
        for r in 0..rows {
            if r != pr {
                let f = t[r][enter];
                if f != 0.0 {
                    for (v, pv) in t[r].iter_mut().zip(&prow) {
                        *v -= f * pv;
                    }
                    b[r] -= f * pb;
                }
            }
        }
        let f = cost[enter];
        for (c, pv) in cost.iter_mut().zip(&prow) {
            *c -= f * pv;
        }
        basis[pr] = enter;
    }
    basis
        .iter()
        .zip(&b)
        .filter(|(&j, _)| j >= m)
        .map(|(_, v)| v.abs())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Points {
        Points::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    }

    #[test]
    fn vertex_is_inside() {
        assert!(point_in_convex_hull(&[1.0, 0.0], &square()));
    }

    #[test]
    fn mean_is_inside() {
        assert!(point_in_convex_hull(&[0.5, 0.5], &square()));
    }

    #[test]
    fn far_point_is_outside() {
        assert!(!point_in_convex_hull(&[2.0, 2.0], &square()));
    }

    #[test]
    fn inside_bbox_but_outside_triangle() {
        let tri = Points::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        assert!(!point_in_convex_hull(&[0.8, 0.8], &tri));
        assert!(point_in_convex_hull(&[0.5, 0.5], &tri));
        assert!(point_in_convex_hull(&[0.2, 0.2], &tri));
    }

    #[test]
    fn segment_in_three_dims() {
        let seg = Points::from_rows(&[[0.0, 0.0, 0.0], [2.0, 2.0, 2.0]]);
        assert!(point_in_convex_hull(&[1.0, 1.0, 1.0], &seg));
        assert!(!point_in_convex_hull(&[1.0, 1.0, 1.5], &seg));
    }

    #[test]
    fn single_point_hull() {
        let p = Points::from_rows(&[[3.0]]);
        assert!(point_in_convex_hull(&[3.0], &p));
        assert!(!point_in_convex_hull(&[3.5], &p));
    }
}
