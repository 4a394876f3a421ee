use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Label};
use crate::depth::mahalanobis_depth;
use crate::estimators::{EstimatorKind, LocationScatter};
use crate::{seed, Result};

/// `argmax_i π_i D^{Mah}(z | X_i)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MaxMahModel {
    pub class1: LocationScatter,
    pub class2: LocationScatter,
    pub priors: (f64, f64),
}

pub fn max_mahalanobis_train(ds: &Dataset, estimator: EstimatorKind, s: u64) -> Result<MaxMahModel> {
    let est = |l: Label| {
        estimator.estimate(
            &ds.class_points(l),
            seed::derive(s, l.index() as u64),
        )
    };
    Ok(MaxMahModel {
        class1: est(Label::One)?,
        class2: est(Label::Two)?,
        priors: ds.priors(),
    })
}

/// Prior-weighted maximal Mahalanobis depth; ties go to class 1.
pub fn max_mahalanobis_classify(
    z: &[f64],
    est1: &LocationScatter,
    est2: &LocationScatter,
    priors: (f64, f64),
) -> Label {
    if priors.0 * mahalanobis_depth(z, est1) >= priors.1 * mahalanobis_depth(z, est2) {
        Label::One
    } else {
        Label::Two
    }
}

impl MaxMahModel {
    pub fn classify(&self, z: &[f64]) -> Label {
        max_mahalanobis_classify(z, &self.class1, &self.class2, self.priors)
    }
}
