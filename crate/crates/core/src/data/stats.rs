use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::{point_in_convex_hull, Dataset, Label};
#[cfg(test)]
use super::Points;
use crate::estimators::moment_estimates;
use crate::{Error, Result};

/// Number of observations that must be removed to make the remaining rows
/// pairwise distinct. Rows are compared by exact equality; labels are ignored.
pub fn count_ties(ds: &Dataset) -> usize {
    let mut keys: Vec<Vec<u64>> = ds
        .points()
        .rows()
        // `+ 0.0` folds -0.0 into +0.0 so the bit keys agree with `==`.
        .map(|r| r.iter().map(|v| (v + 0.0).to_bits()).collect())
        .collect();
    keys.sort_unstable();
    keys.dedup();
    ds.len() - keys.len()
}

/// Where Mahalanobis regions for outlier detection are centered.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutlierScope {
    /// Each point against its own class's moment region.
    #[default]
    PerClass,
    /// Every point against the moment region of the whole sample.
    Pooled,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OutlierReport {
    pub flags: Vec<bool>,
    pub fraction: f64,
    /// The squared-distance cutoff `χ²_d(quantile)`.
    pub cutoff: f64,
}

/// Flags points whose squared moment Mahalanobis distance exceeds the
/// `χ²_d(quantile)` cutoff.
pub fn detect_outliers(ds: &Dataset, quantile: f64, scope: OutlierScope) -> Result<OutlierReport> {
    if !(0.0..1.0).contains(&quantile) {
        return Err(Error::InvalidArgument(format!(
            "quantile must lie in [0, 1), got {quantile}"
        )));
    }
    let d = ds.dim();
    let cutoff = ChiSquared::new(d as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(quantile);
    let mut flags = vec![false; ds.len()];
    let groups: Vec<(Option<Label>, Vec<usize>)> = match scope {
        OutlierScope::PerClass => Label::BOTH
            .iter()
            .map(|&l| (Some(l), ds.class_indices(l)))
            .collect(),
        OutlierScope::Pooled => vec![(None, (0..ds.len()).collect())],
    };
    for (label, idx) in groups {
        let pts = ds.points().select(&idx);
        let est = moment_estimates(&pts).map_err(|_| {
            Error::SingularCovariance(Some(match label {
                Some(l) => format!("class {l}"),
                None => "pooled sample".to_string(),
            }))
        })?;
        for (k, &i) in idx.iter().enumerate() {
            flags[i] = est.squared_distance(pts.row(k)) > cutoff;
        }
    }
    let fraction = flags.iter().filter(|&&f| f).count() as f64 / ds.len() as f64;
    Ok(OutlierReport {
        flags,
        fraction,
        cutoff,
    })
}

/// Per-point outsider flags: point `i` is an outsider when, with it removed
/// from the sample, it lies in neither class's convex hull.
pub fn outsider_flags(ds: &Dataset) -> Vec<bool> {
    let classes: [Vec<usize>; 2] = [ds.class_indices(Label::One), ds.class_indices(Label::Two)];
    (0..ds.len())
        .into_par_iter()
        .map(|i| {
            let z = ds.point(i);
            !classes.iter().any(|idx| {
                let rest: Vec<usize> = idx.iter().copied().filter(|&j| j != i).collect();
                !rest.is_empty() && point_in_convex_hull(z, &ds.points().select(&rest))
            })
        })
        .collect()
}

/// Fraction of leave-one-out outsiders.
pub fn outsider_proneness(ds: &Dataset) -> f64 {
    let flags = outsider_flags(ds);
    flags.iter().filter(|&&f| f).count() as f64 / ds.len() as f64
}

/// Difficulty profile of one task.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub name: String,
    pub n_total: usize,
    pub log_class_ratio: f64,
    pub dim: usize,
    pub samples_per_dim: f64,
    pub tied_count: usize,
    pub outlier_fraction: f64,
    pub outsider_proneness: f64,
}

pub fn dataset_stats(ds: &Dataset, scope: OutlierScope) -> Result<DatasetStats> {
    let (n1, n2) = ds.class_sizes();
    let outliers = detect_outliers(ds, 0.975, scope)?;
    Ok(DatasetStats {
        name: ds.name.clone(),
        n_total: ds.len(),
        log_class_ratio: (n1 as f64 / n2 as f64).ln(),
        dim: ds.dim(),
        samples_per_dim: ds.len() as f64 / ds.dim() as f64,
        tied_count: count_ties(ds),
        outlier_fraction: outliers.fraction,
        outsider_proneness: outsider_proneness(ds),
    })
}

impl DatasetStats {
    /// Flat `key: value` report.
    pub fn to_text(&self) -> String {
        format!(
            "name: {}\nn_total: {}\nlog_class_ratio: {:.2}\ndim: {}\nsamples_per_dim: {:.1}\n\
             tied_count: {}\noutlier_fraction: {:.4}\noutsider_proneness: {:.4}\n",
            self.name,
            self.n_total,
            self.log_class_ratio,
            self.dim,
            self.samples_per_dim,
            self.tied_count,
            self.outlier_fraction,
            self.outsider_proneness
        )
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    fn ds(rows: &[&[f64]], labels: &[u8]) -> Dataset {
        let pts = Points::from_rows(rows);
        let labels = labels
            .iter()
            .map(|&l| Label::try_from(l).unwrap())
            .collect();
        Dataset::new("t", pts, labels).unwrap()
    }

    #[test]
    fn no_ties() {
        let d = ds(&[&[1.0, 2.0], &[2.0, 1.0], &[3.0, 3.0]], &[1, 2, 2]);
        assert_eq!(count_ties(&d), 0);
    }

    #[test]
    fn one_tie() {
        let d = ds(&[&[1.0, 1.0], &[1.0, 1.0], &[2.0, 2.0]], &[1, 2, 2]);
        assert_eq!(count_ties(&d), 1);
    }

    #[test]
    fn signed_zero_is_a_tie() {
        let d = ds(&[&[0.0], &[-0.0], &[1.0]], &[1, 2, 2]);
        assert_eq!(count_ties(&d), 1);
    }

    #[test]
    fn zero_spread_is_singular() {
        let d = ds(&[&[1.0, 1.0], &[1.0, 1.0], &[1.0, 1.0], &[5.0, 5.0], &[5.0, 5.0], &[5.0, 5.0]], &[1, 1, 1, 2, 2, 2]);
        let err = detect_outliers(&d, 0.975, OutlierScope::PerClass).unwrap_err();
        assert!(err.to_string().contains("class 1"), "{err}");
    }

    #[test]
    fn one_dimensional_outsiders() {
        let d = ds(&[&[0.0], &[1.0], &[2.0], &[10.0], &[11.0], &[12.0]], &[1, 1, 1, 2, 2, 2]);
        assert!((outsider_proneness(&d) - 4.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn duplicated_points_are_never_outsiders() {
        let d = ds(
            &[&[0.0, 0.0], &[0.0, 0.0], &[3.0, 1.0], &[3.0, 1.0], &[1.0, 5.0], &[1.0, 5.0]],
            &[1, 1, 2, 2, 1, 1],
        );
        assert_eq!(outsider_proneness(&d), 0.0);
    }
}
