use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::svm::{default_iteration_cap, gaussian_gram, qp_hard_margin, QpOutcome};
use crate::data::{Dataset, Label, Points};
use crate::{Error, Result};

/// Logarithmic kernel-width grid `γ = 10^t`, `t = lg_min, lg_min + lg_step, …, lg_max`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaGrid {
    pub lg_min: f64,
    pub lg_max: f64,
    pub lg_step: f64,
}

impl Default for GammaGrid {
    fn default() -> Self {
        GammaGrid {
            lg_min: -6.0,
            lg_max: 6.0,
            lg_step: 0.25,
        }
    }
}

impl GammaGrid {
    pub fn values(&self) -> Vec<f64> {
        assert!(self.lg_step > 0.0 && self.lg_max >= self.lg_min, "invalid γ grid");
        let steps = ((self.lg_max - self.lg_min) / self.lg_step + 1e-9).floor() as usize;
        (0..=steps)
            .map(|i| 10f64.powf(self.lg_min + i as f64 * self.lg_step))
            .collect()
    }
}

/// Hard-margin Gaussian-kernel SVM on the points a DDα rule classifies
/// correctly, with the smallest separating kernel width.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SvmsModel {
    pub gamma: f64,
    /// Retained, de-duplicated training points.
    pub points: Points,
    /// `+1` for class 1, `−1` for class 2.
    pub y: Vec<f64>,
    pub lambda: Vec<f64>,
    pub bias: f64,
    pub objective: f64,
    pub margin: f64,
    pub support_vectors: usize,
    /// Training points dropped by the removal step.
    pub removed: usize,
}

/// Result of one kernel width in a γ scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaReport {
    pub gamma: f64,
    pub separated: bool,
    /// `ρ₀`, zero when not separated.
    pub margin: f64,
    /// Zero when not separated.
    pub support_vectors: usize,
}

fn label_sign(l: Label) -> f64 {
    match l {
        Label::One => 1.0,
        Label::Two => -1.0,
    }
}

fn decision(points: &Points, y: &[f64], lambda: &[f64], bias: f64, gamma: f64, z: &[f64]) -> f64 {
    let mut f = bias;
    for (i, x) in points.rows().enumerate() {
        if lambda[i] > 0.0 {
            let d: f64 = x.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum();
            f += lambda[i] * y[i] * (-gamma * d).exp();
        }
    }
    f
}

/// Points kept by the removal step, de-duplicated, with `±1` labels.
pub fn svms_retained(
    ds: &Dataset,
    rule: &(dyn Fn(&[f64]) -> Option<Label> + Sync),
) -> Result<(Points, Vec<f64>, usize)> {
    let verdict: Vec<Option<Label>> = (0..ds.len())
        .into_par_iter()
        .map(|i| rule(ds.point(i)))
        .collect();
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut points = Points::empty(ds.dim());
    let mut y = Vec::new();
    let mut removed = 0;
    let mut labels_of: Vec<(Vec<u64>, Label)> = Vec::new();
    for i in 0..ds.len() {
        if verdict[i] != Some(ds.label(i)) {
            removed += 1;
            continue;
        }
        let key: Vec<u64> = ds.point(i).iter().map(|v| (v + 0.0).to_bits()).collect();
        if seen.insert(key.clone()) {
            points.push(ds.point(i));
            y.push(label_sign(ds.label(i)));
            labels_of.push((key, ds.label(i)));
        } else {
            let first = labels_of.iter().find(|(k, _)| *k == key).map(|(_, l)| *l);
            assert_eq!(first, Some(ds.label(i)), "one coordinate vector, two retained labels");
        }
    }
    for l in Label::BOTH {
        if !y.contains(&label_sign(l)) {
            return Err(Error::EmptyClass(l.as_u8()));
        }
    }
    Ok((points, y, removed))
}

struct Fit {
    lambda: Vec<f64>,
    bias: f64,
    objective: f64,
    margin: f64,
    support_vectors: usize,
}

fn try_gamma(points: &Points, y: &[f64], gamma: f64) -> Option<Fit> {
    let k = gaussian_gram(points, gamma);
    let sol = match qp_hard_margin(&k, y, default_iteration_cap(y.len())) {
        Ok(QpOutcome::Solved(s)) => s,
        Ok(QpOutcome::Infeasible) => return None,
        Err(e) => {
            log::debug!("γ = {gamma}: {e}");
            return None;
        }
    };
    if sol.support_vectors == 0 || !(sol.margin.is_finite() && sol.margin > 0.0) {
        return None;
    }
    let n = y.len();
    let all_right = (0..n).all(|i| {
        let f: f64 = (0..n)
            .map(|j| sol.lambda[j] * y[j] * k[(j, i)])
            .sum::<f64>()
            + sol.bias;
        (f >= 0.0) == (y[i] > 0.0)
    });
    all_right.then_some(Fit {
        lambda: sol.lambda,
        bias: sol.bias,
        objective: sol.objective,
        margin: sol.margin,
        support_vectors: sol.support_vectors,
    })
}

/// Separation verdict for every grid value.
pub fn svms_scan(points: &Points, y: &[f64], grid: &GammaGrid) -> Vec<GammaReport> {
    grid.values()
        .into_par_iter()
        .map(|gamma| match try_gamma(points, y, gamma) {
            Some(f) => GammaReport {
                gamma,
                separated: true,
                margin: f.margin,
                support_vectors: f.support_vectors,
            },
            None => GammaReport {
                gamma,
                separated: false,
                margin: 0.0,
                support_vectors: 0,
            },
        })
        .collect()
}

/// Drops the training points `rule` misclassifies and fits the hard-margin
/// SVM with the smallest grid `γ` that separates the rest without error.
/// Grid values are tried in parallel batches, in increasing order.
pub fn svms_train(
    ds: &Dataset,
    rule: &(dyn Fn(&[f64]) -> Option<Label> + Sync),
    grid: &GammaGrid,
) -> Result<SvmsModel> {
    let (points, y, removed) = svms_retained(ds, rule)?;
    let gammas = grid.values();
    let batch = rayon::current_num_threads().max(1);
    for chunk in gammas.chunks(batch) {
        let fits: Vec<Option<Fit>> = chunk
            .par_iter()
            .map(|&g| try_gamma(&points, &y, g))
            .collect();
        if let Some((g, fit)) = chunk.iter().zip(fits).find_map(|(&g, f)| f.map(|f| (g, f))) {
            return Ok(SvmsModel {
                gamma: g,
                points,
                y,
                lambda: fit.lambda,
                bias: fit.bias,
                objective: fit.objective,
                margin: fit.margin,
                support_vectors: fit.support_vectors,
                removed,
            });
        }
    }
    Err(Error::NoSeparatingGamma)
}

impl SvmsModel {
    pub fn decision(&self, z: &[f64]) -> f64 {
        decision(&self.points, &self.y, &self.lambda, self.bias, self.gamma, z)
    }
}

/// Sign of the kernel expansion plus bias; zero goes to class 1.
pub fn svms_classify(model: &SvmsModel, z: &[f64]) -> Label {
    if model.decision(z) >= 0.0 {
        Label::One
    } else {
        Label::Two
    }
}
