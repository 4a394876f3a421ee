use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Label, Points};
use crate::estimators::whitening_root;
use crate::{linalg, seed, Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KnnMetric {
    Euclidean,
    /// Mahalanobis distance w.r.t. the covariance of the merged sample.
    #[default]
    Mahalanobis,
}

/// k-nearest-neighbor rule with `k` chosen by leave-one-out.
///
/// Distance ties go to the lower training index; vote ties are broken by a
/// pseudo-random bit derived from the seed and the neighbor set, so the
/// rule is deterministic and, under the Mahalanobis metric, affine
/// invariant.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KnnModel {
    pub k: usize,
    pub metric: KnnMetric,
    pub seed: u64,
    /// Training points, already whitened under the Mahalanobis metric.
    points: Points,
    labels: Vec<Label>,
    /// Rows of the whitening matrix.
    whitener: Option<Points>,
    /// Leave-one-out error count of every candidate `k = 1, 2, …`.
    pub loo_errors: Vec<usize>,
}

/// Largest candidate `k`: `min(n − 1, ⌊10 √n⌋)`.
pub fn default_k_max(n: usize) -> usize {
    ((10.0 * (n as f64).sqrt()).floor() as usize).min(n - 1).max(1)
}

fn transform(w: &Option<Points>, z: &[f64]) -> Vec<f64> {
    match w {
        None => z.to_vec(),
        Some(w) => w
            .rows()
            .map(|r| r.iter().zip(z).map(|(a, b)| a * b).sum())
            .collect(),
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Majority vote, ties broken by a bit hashed from the sorted neighbor
/// indices.
fn vote(ones: usize, twos: usize, neighbors: &[usize], s: u64) -> Label {
    use std::cmp::Ordering::*;
    match ones.cmp(&twos) {
        Greater => Label::One,
        Less => Label::Two,
        Equal => {
            let mut idx = neighbors.to_vec();
            idx.sort_unstable();
            let h = idx
                .iter()
                .fold(seed::derive(s, seed::stream::KNN_TIES), |h, &i| {
                    seed::mix(h ^ i as u64)
                });
            if h & 1 == 0 {
                Label::One
            } else {
                Label::Two
            }
        }
    }
}

/// Indices of `points` sorted by distance to `z`, ties by index; `skip` is
/// left out.
fn neighbor_order(points: &Points, z: &[f64], skip: Option<usize>, take: usize) -> Vec<usize> {
    let mut d: Vec<(f64, usize)> = points
        .rows()
        .enumerate()
        .filter(|&(j, _)| Some(j) != skip)
        .map(|(j, x)| (sq_dist(x, z), j))
        .collect();
    let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if take < d.len() {
        d.select_nth_unstable_by(take, cmp);
        d.truncate(take);
    }
    d.sort_by(cmp);
    d.into_iter().map(|(_, j)| j).collect()
}

fn whitened(ds: &Dataset, metric: KnnMetric) -> Result<(Option<Points>, Points)> {
    let whitener = match metric {
        KnnMetric::Euclidean => None,
        KnnMetric::Mahalanobis => {
            let (_, cov) = linalg::covariance(ds.points());
            let w = whitening_root(&cov)
                .map_err(|_| Error::SingularCovariance(Some("pooled sample".into())))?;
            let rows: Vec<Vec<f64>> = (0..w.nrows())
                .map(|i| w.row(i).iter().copied().collect())
                .collect();
            Some(Points::from_rows(&rows))
        }
    };
    let points = Points::from_rows(
        &ds.points()
            .rows()
            .map(|z| transform(&whitener, z))
            .collect::<Vec<_>>(),
    );
    Ok((whitener, points))
}

/// KNN rule with a given `k`; no leave-one-out scan (`loo_errors` is empty).
pub fn knn_train_fixed(ds: &Dataset, metric: KnnMetric, k: usize, s: u64) -> Result<KnnModel> {
    if k == 0 || k >= ds.len() {
        return Err(Error::InvalidArgument(format!("k = {k} outside 1..{}", ds.len())));
    }
    let (whitener, points) = whitened(ds, metric)?;
    Ok(KnnModel {
        k,
        metric,
        seed: s,
        points,
        labels: ds.labels().to_vec(),
        whitener,
        loo_errors: Vec::new(),
    })
}

pub fn knn_train(ds: &Dataset, metric: KnnMetric, k_max: Option<usize>, s: u64) -> Result<KnnModel> {
    let n = ds.len();
    if n < 3 {
        return Err(Error::InvalidArgument(format!("KNN needs at least 3 observations, got {n}")));
    }
    let (whitener, points) = whitened(ds, metric)?;
    let labels = ds.labels().to_vec();
    let k_max = k_max.unwrap_or_else(|| default_k_max(n)).clamp(1, n - 1);

    let loo_errors = {
        use rayon::prelude::*;
        (0..n)
            .into_par_iter()
            .map(|i| {
                let order = neighbor_order(&points, points.row(i), Some(i), k_max);
                let mut wrong = vec![0usize; k_max];
                let (mut ones, mut twos) = (0, 0);
                for k in 1..=k_max {
                    match labels[order[k - 1]] {
                        Label::One => ones += 1,
                        Label::Two => twos += 1,
                    }
                    if vote(ones, twos, &order[..k], s) != labels[i] {
                        wrong[k - 1] = 1;
                    }
                }
                wrong
            })
            .reduce(
                || vec![0usize; k_max],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        *x += y;
                    }
                    a
                },
            )
    };
    let k = (1..=k_max)
        .min_by_key(|&k| (loo_errors[k - 1], k % 2 == 0, k))
        .unwrap();
    Ok(KnnModel {
        k,
        metric,
        seed: s,
        points,
        labels,
        whitener,
        loo_errors,
    })
}

pub fn knn_classify(model: &KnnModel, z: &[f64]) -> Label {
    let t = transform(&model.whitener, z);
    let order = neighbor_order(&model.points, &t, None, model.k);
    let ones = order.iter().filter(|&&j| model.labels[j] == Label::One).count();
    vote(ones, order.len() - ones, &order, model.seed)
}
