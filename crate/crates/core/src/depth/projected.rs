use std::sync::Arc;

use super::DirectionSet;
use crate::data::Points;

/// One training class projected onto every direction of a [`DirectionSet`]:
/// per direction the sorted projections, their median and MAD.
///
/// Built once per model; queries binary-search the sorted lists, so the
/// depth of a point costs `O(k (d + log m))`.
#[derive(Clone, Debug)]
pub struct ProjectedClass {
    dirs: Arc<DirectionSet>,
    m: usize,
    /// Row `j` (length `m`) holds the sorted projections onto direction `j`.
    sorted: Vec<f64>,
    medians: Vec<f64>,
    mads: Vec<f64>,
}

/// Median with the midpoint rule for even counts.
pub fn median_sorted(xs: &[f64]) -> f64 {
    let m = xs.len();
    if m % 2 == 1 {
        xs[m / 2]
    } else {
        0.5 * (xs[m / 2 - 1] + xs[m / 2])
    }
}

/// Median absolute deviation from `med`, lower-median rule for even counts.
pub fn mad_sorted(xs: &[f64], med: f64, scratch: &mut Vec<f64>) -> f64 {
    scratch.clear();
    scratch.extend(xs.iter().map(|x| (x - med).abs()));
    let mid = (scratch.len() - 1) / 2;
    *scratch.select_nth_unstable_by(mid, f64::total_cmp).1
}

pub fn build_projected_class(pts: &Points, dirs: Arc<DirectionSet>) -> ProjectedClass {
    assert_eq!(pts.dim(), dirs.dim(), "dimension mismatch");
    assert!(!pts.is_empty(), "empty class");
    let m = pts.len();
    let k = dirs.len();
    let mut sorted = Vec::with_capacity(k * m);
    let mut medians = Vec::with_capacity(k);
    let mut mads = Vec::with_capacity(k);
    let mut scratch = Vec::with_capacity(m);
    for u in dirs.iter() {
        let start = sorted.len();
        sorted.extend(
            pts.rows()
                .map(|x| u.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()),
        );
        let col = &mut sorted[start..];
        col.sort_unstable_by(f64::total_cmp);
        let med = median_sorted(col);
        medians.push(med);
        mads.push(mad_sorted(col, med, &mut scratch));
    }
    ProjectedClass {
        dirs,
        m,
        sorted,
        medians,
        mads,
    }
}

impl ProjectedClass {
    pub fn directions(&self) -> &Arc<DirectionSet> {
        &self.dirs
    }

    /// Class size.
    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    /// Sorted projections onto direction `j`.
    pub fn sorted(&self, j: usize) -> &[f64] {
        &self.sorted[j * self.m..(j + 1) * self.m]
    }

    pub fn median(&self, j: usize) -> f64 {
        self.medians[j]
    }

    pub fn mad(&self, j: usize) -> f64 {
        self.mads[j]
    }

    /// Random Tukey depth from precomputed projections `u_j' z`.
    pub fn tukey_depth_projected(&self, zproj: &[f64]) -> f64 {
        let mut min = self.m;
        for (j, &t) in zproj.iter().enumerate() {
            let c = tukey_count(t, self.sorted(j));
            if c < min {
                min = c;
                if min == 0 {
                    break;
                }
            }
        }
        min as f64 / self.m as f64
    }

    /// Random Tukey depths of many points, looping over directions in the
    /// outer loop so each sorted list stays in cache. Equal to calling
    /// [`random_tukey_depth`] per row.
    pub fn tukey_depths(&self, queries: &Points) -> Vec<f64> {
        assert_eq!(queries.dim(), self.dirs.dim(), "dimension mismatch");
        let mut min = vec![self.m; queries.len()];
        for (j, u) in self.dirs.iter().enumerate() {
            let col = self.sorted(j);
            for (best, z) in min.iter_mut().zip(queries.rows()) {
                if *best > 0 {
                    let t: f64 = u.iter().zip(z).map(|(a, b)| a * b).sum();
                    *best = (*best).min(tukey_count(t, col));
                }
            }
        }
        min.into_iter().map(|c| c as f64 / self.m as f64).collect()
    }

    /// Random projection depth from precomputed projections `u_j' z`.
    pub fn projection_depth_projected(&self, zproj: &[f64]) -> f64 {
        let mut out = 0.0f64;
        for (j, &t) in zproj.iter().enumerate() {
            let dev = (t - self.medians[j]).abs();
            let mad = self.mads[j];
            let o = if mad > 0.0 {
                dev / mad
            } else if dev > 0.0 {
                f64::INFINITY
            } else {
                0.0
            };
            if o > out {
                out = o;
                if out == f64::INFINITY {
                    break;
                }
            }
        }
        1.0 / (1.0 + out)
    }
}

/// `min(#{x ≤ t}, #{x ≥ t})` over a non-decreasing sample.
fn tukey_count(t: f64, sorted: &[f64]) -> usize {
    let le = sorted.partition_point(|&x| x <= t);
    let ge = sorted.len() - sorted.partition_point(|&x| x < t);
    le.min(ge)
}

/// Univariate halfspace depth `min(#{x ≤ t}, #{x ≥ t}) / m`.
pub fn univariate_tukey_depth(t: f64, sorted_sample: &[f64]) -> f64 {
    assert!(!sorted_sample.is_empty(), "empty sample");
    tukey_count(t, sorted_sample) as f64 / sorted_sample.len() as f64
}

/// Minimum univariate Tukey depth of `z` over the stored directions.
pub fn random_tukey_depth(z: &[f64], proj: &ProjectedClass) -> f64 {
    proj.tukey_depth_projected(&proj.dirs.project(z))
}

/// `1 / (1 + max_j |u_j'z − med_j| / MAD_j)` over the stored directions.
/// A direction with zero MAD contributes infinite outlyingness unless `z`
/// projects exactly onto the median.
pub fn projection_depth_random(z: &[f64], proj: &ProjectedClass) -> f64 {
    proj.projection_depth_projected(&proj.dirs.project(z))
}

/// Random Tukey depth computed from scratch: every class point is
/// re-projected for every direction and counted by a linear scan.
/// Reference path for checking and timing the projected one.
pub fn random_tukey_depth_naive(z: &[f64], class: &Points, dirs: &DirectionSet) -> f64 {
    let m = class.len();
    let mut min = m;
    for u in dirs.iter() {
        let t: f64 = u.iter().zip(z).map(|(a, b)| a * b).sum();
        let mut le = 0;
        let mut ge = 0;
        for x in class.rows() {
            let p: f64 = u.iter().zip(x).map(|(a, b)| a * b).sum();
            if p <= t {
                le += 1;
            }
            if p >= t {
                ge += 1;
            }
        }
        min = min.min(le.min(ge));
    }
    min as f64 / m as f64
}
