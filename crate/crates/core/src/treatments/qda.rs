use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Label};
use crate::estimators::{moment_estimates, LocationScatter};
use crate::{Error, Result};

/// Gaussian discriminant with separate class covariances (divisor
/// `n_k − 1`).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QdaModel {
    pub class1: LocationScatter,
    pub class2: LocationScatter,
    pub priors: (f64, f64),
}

pub fn qda_train(ds: &Dataset) -> Result<QdaModel> {
    let est = |l: Label| {
        moment_estimates(&ds.class_points(l)).map_err(|_| {
            Error::SingularCovariance(Some(format!("class {} covariance", l.as_u8())))
        })
    };
    Ok(QdaModel {
        class1: est(Label::One)?,
        class2: est(Label::Two)?,
        priors: ds.priors(),
    })
}

impl QdaModel {
    /// Gaussian log-density plus log prior, up to a shared constant.
    pub fn discriminant(&self, z: &[f64], label: Label) -> f64 {
        let (e, p) = match label {
            Label::One => (&self.class1, self.priors.0),
            Label::Two => (&self.class2, self.priors.1),
        };
        -0.5 * e.log_det() - 0.5 * e.squared_distance(z) + p.ln()
    }
}

pub fn qda_classify(model: &QdaModel, z: &[f64]) -> Label {
    if model.discriminant(z, Label::One) >= model.discriminant(z, Label::Two) {
        Label::One
    } else {
        Label::Two
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{gaussian_task, random_affine};
    use crate::treatments::{lda_classify, lda_train};
    use std::f64::consts::PI;

    #[test]
    fn matches_density_ratio() {
        let ds = gaussian_task(40, 25, 2, 1.5, 3);
        let m = qda_train(&ds).unwrap();
        let density = |e: &LocationScatter, z: &[f64]| {
            let s = e.scatter();
            let det = s[(0, 0)] * s[(1, 1)] - s[(0, 1)] * s[(1, 0)];
            let inv = s.clone().try_inverse().unwrap();
            let dx = [z[0] - e.center()[0], z[1] - e.center()[1]];
            let q = dx[0] * (inv[(0, 0)] * dx[0] + inv[(0, 1)] * dx[1])
                + dx[1] * (inv[(1, 0)] * dx[0] + inv[(1, 1)] * dx[1]);
            (-0.5 * q).exp() / (2.0 * PI * det.sqrt())
        };
        let q = gaussian_task(100, 100, 2, 0.7, 4);
        for z in q.points().rows() {
            let r = m.priors.0 * density(&m.class1, z) - m.priors.1 * density(&m.class2, z);
            if r.abs() > 1e-12 {
                let expect = if r > 0.0 { Label::One } else { Label::Two };
                assert_eq!(qda_classify(&m, z), expect);
            }
        }
    }

    #[test]
    fn equal_covariances_reduce_to_lda() {
        // class 2 is a translate of class 1, so both covariances agree
        let c1 = gaussian_task(30, 2, 2, 0.0, 5).class_points(Label::One);
        let mut rows = c1.to_rows();
        rows.extend(c1.rows().map(|r| vec![r[0] + 2.0, r[1] - 1.0]));
        let labels = (0..60).map(|i| if i < 30 { Label::One } else { Label::Two }).collect();
        let ds = Dataset::new("t", crate::data::Points::from_rows(&rows), labels).unwrap();
        let q = qda_train(&ds).unwrap();
        let l = lda_train(&ds).unwrap();
        for i in 0..=30 {
            for j in 0..=30 {
                let z = [-3.0 + 0.25 * i as f64, -4.0 + 0.25 * j as f64];
                if l.score(&z).abs() > 1e-9 {
                    assert_eq!(qda_classify(&q, &z), lda_classify(&l, &z));
                }
            }
        }
    }

    #[test]
    fn affine_invariant_labels() {
        for s in 0..10 {
            let ds = gaussian_task(30, 25, 3, 1.0, s);
            let f = random_affine(3, 50 + s);
            let a = qda_train(&ds).unwrap();
            let b = qda_train(&ds.map_points(&f).unwrap()).unwrap();
            let q = gaussian_task(40, 40, 3, 0.5, 90 + s);
            for z in q.points().rows() {
                assert_eq!(qda_classify(&a, z), qda_classify(&b, &f(z)));
            }
        }
    }
}
