use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Label};
use crate::linalg::{self, Matrix, Vector};
use crate::{Error, Result};

/// Linear discriminant with pooled within-class covariance (divisor
/// `n − 2`) and class-proportion priors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LdaModel {
    #[serde(with = "linalg::serde_vector")]
    pub mean1: Vector,
    #[serde(with = "linalg::serde_vector")]
    pub mean2: Vector,
    pub priors: (f64, f64),
    /// `Σ⁻¹ (μ₁ − μ₂)`.
    #[serde(with = "linalg::serde_vector")]
    pub weights: Vector,
    /// Class 1 iff `w'z ≥ threshold`.
    pub threshold: f64,
}

/// Pooled within-class covariance with divisor `n − 2`.
pub fn pooled_covariance(ds: &Dataset) -> (Vector, Vector, Matrix) {
    let p1 = ds.class_points(Label::One);
    let p2 = ds.class_points(Label::Two);
    let m1 = linalg::mean(&p1);
    let m2 = linalg::mean(&p2);
    let s = linalg::scatter_about(&p1, &m1) + linalg::scatter_about(&p2, &m2);
    let s = linalg::symmetrize(s / (ds.len() as f64 - 2.0));
    (m1, m2, s)
}

pub fn lda_train(ds: &Dataset) -> Result<LdaModel> {
    if ds.len() < 3 {
        return Err(Error::SingularCovariance(Some("fewer than 3 observations".into())));
    }
    let (mean1, mean2, s) = pooled_covariance(ds);
    let (inv, _) = linalg::spd_inverse(&s)
        .map_err(|_| Error::SingularCovariance(Some("pooled covariance".into())))?;
    let priors = ds.priors();
    let diff = &mean1 - &mean2;
    let weights = &inv * &diff;
    let mid = (&mean1 + &mean2) * 0.5;
    let threshold = weights.dot(&mid) - (priors.0 / priors.1).ln();
    Ok(LdaModel {
        mean1,
        mean2,
        priors,
        weights,
        threshold,
    })
}

impl LdaModel {
    /// `w'z − threshold`; nonnegative means class 1.
    pub fn score(&self, z: &[f64]) -> f64 {
        self.weights.iter().zip(z).map(|(w, x)| w * x).sum::<f64>() - self.threshold
    }
}

pub fn lda_classify(model: &LdaModel, z: &[f64]) -> Label {
    if model.score(z) >= 0.0 {
        Label::One
    } else {
        Label::Two
    }
}
