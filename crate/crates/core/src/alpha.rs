//! The α-procedure: a stepwise search for an origin-through hyperplane in
//! the polynomially extended depth plot, minimizing the empirical
//! misclassification rate (EMR).
//!
//! A depth pair `(d₁, d₂)` is mapped to all monomials `d₁ᵃ d₂ᵇ` with
//! `1 ≤ a + b ≤ p`. Step 1 picks the best separating line over pairs of
//! monomials that together involve both depths and collapses the pair into a
//! synthesized axis; each further step pairs that axis with one remaining
//! monomial and is accepted only if the error count strictly drops.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Label;
use crate::plane::{angle_key, key_cmp};
use crate::{seed, Error, Result};

/// The monomial `d₁ᵃ d₂ᵇ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Monomial {
    pub a: u32,
    pub b: u32,
}

impl Monomial {
    pub fn degree(self) -> u32 {
        self.a + self.b
    }

    pub fn eval(self, d: [f64; 2]) -> f64 {
        d[0].powi(self.a as i32) * d[1].powi(self.b as i32)
    }
}

impl std::fmt::Display for Monomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let part = |f: &mut std::fmt::Formatter<'_>, v: &str, e: u32| match e {
            0 => Ok(()),
            1 => write!(f, "{v}"),
            _ => write!(f, "{v}^{e}"),
        };
        part(f, "d1", self.a)?;
        if self.a > 0 && self.b > 0 {
            f.write_str("*")?;
        }
        part(f, "d2", self.b)
    }
}

/// All monomials of total degree `1..=p` in graded lexicographic order:
/// `d₁, d₂, d₁², d₁d₂, d₂², …`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureBasis {
    degree: usize,
    monomials: Vec<Monomial>,
}

impl FeatureBasis {
    pub fn new(degree: usize) -> Self {
        assert!(degree >= 1, "degree must be at least 1");
        let mut monomials = Vec::new();
        for t in 1..=degree as u32 {
            for a in (0..=t).rev() {
                monomials.push(Monomial { a, b: t - a });
            }
        }
        FeatureBasis { degree, monomials }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }
}

pub fn extend(d: [f64; 2], basis: &FeatureBasis) -> Vec<f64> {
    basis.monomials.iter().map(|m| m.eval(d)).collect()
}

/// Which monomial pairs qualify for Step 1.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairRule {
    /// The two monomials together involve both `d₁` and `d₂`.
    #[default]
    Joint,
    /// One monomial is a pure power of `d₁`, the other a pure power of `d₂`.
    Crossed,
}

impl PairRule {
    pub fn admits(self, x: Monomial, y: Monomial) -> bool {
        match self {
            PairRule::Joint => (x.a > 0 || y.a > 0) && (x.b > 0 || y.b > 0),
            PairRule::Crossed => {
                (x.b == 0 && y.a == 0) || (x.a == 0 && y.b == 0)
            }
        }
    }
}

/// Best line through the origin of a planar point set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AngleFit {
    /// Unit normal `n`; points with `n·p ≥ 0` are assigned to class 1.
    pub normal: [f64; 2],
    /// Polar angle of `normal` in `(−π, π]`.
    pub angle: f64,
    pub errors: usize,
    pub emr: f64,
}

/// Minimizes the misclassification count over all lines through the origin
/// and both orientations.
///
/// Each nonzero point `p` is on the class-1 side for normals in a closed
/// half-circle bounded by `p` rotated by `∓π/2`. The sweep visits these
/// boundary normals in exact angular order and evaluates every open gap
/// between consecutive distinct boundaries; the midpoint normal of the first
/// optimal gap is returned. Points at the origin always count as class 1.
pub fn best_angle(points: &[[f64; 2]], labels: &[Label]) -> AngleFit {
    assert_eq!(points.len(), labels.len());
    assert!(!points.is_empty(), "best_angle needs at least one point");
    let m = points.len();
    let mut origin_errors = 0;
    // (normal, point index, entering class-1 side)
    let mut events: Vec<([f64; 2], usize, bool)> = Vec::with_capacity(2 * m);
    for (i, p) in points.iter().enumerate() {
        if p[0] == 0.0 && p[1] == 0.0 {
            if labels[i] == Label::Two {
                origin_errors += 1;
            }
            continue;
        }
        events.push(([p[1], -p[0]], i, true));
        events.push(([-p[1], p[0]], i, false));
    }
    if events.is_empty() {
        return AngleFit {
            normal: [1.0, 0.0],
            angle: 0.0,
            errors: origin_errors,
            emr: origin_errors as f64 / m as f64,
        };
    }
    let keys: Vec<(u8, f64)> = events.iter().map(|e| angle_key(e.0)).collect();
    let mut order: Vec<usize> = (0..events.len()).collect();
    order.sort_by(|&x, &y| key_cmp(keys[x], keys[y]));
    let keys: Vec<(u8, f64)> = order.iter().map(|&o| keys[o]).collect();
    let events: Vec<([f64; 2], usize, bool)> = order.iter().map(|&o| events[o]).collect();

    // group boundaries with identical angle
    let mut group_of = vec![0usize; events.len()];
    let mut group_first = vec![0usize];
    for e in 1..events.len() {
        let g = group_first.len() - 1;
        if key_cmp(keys[e - 1], keys[e]) == std::cmp::Ordering::Equal {
            group_of[e] = g;
        } else {
            group_of[e] = g + 1;
            group_first.push(e);
        }
    }
    let groups = group_first.len();
    let mut start_group = vec![0usize; m];
    let mut end_group = vec![0usize; m];
    for (e, &(_, i, enter)) in events.iter().enumerate() {
        if enter {
            start_group[i] = group_of[e];
        } else {
            end_group[i] = group_of[e];
        }
    }

    // Gap j lies after group j. In the wrap-around gap (j = groups − 1) a
    // point is on the class-1 side iff its arc wraps past angle 0.
    let mut errors = origin_errors;
    for &(_, i, enter) in &events {
        if !enter {
            continue;
        }
        let positive = start_group[i] > end_group[i];
        if positive != (labels[i] == Label::One) {
            errors += 1;
        }
    }
    let mut gap_errors = vec![0usize; groups];
    let mut e = 0;
    for (j, slot) in gap_errors.iter_mut().enumerate() {
        while e < events.len() && group_of[e] == j {
            let (_, i, enter) = events[e];
            let now_right = enter == (labels[i] == Label::One);
            if now_right {
                errors -= 1;
            } else {
                errors += 1;
            }
            e += 1;
        }
        *slot = errors;
    }
    let (best_gap, &best_errors) = gap_errors
        .iter()
        .enumerate()
        .min_by_key(|&(j, &c)| (c, j))
        .unwrap();
    let polar = |v: [f64; 2]| v[1].atan2(v[0]);
    let lo = polar(events[group_first[best_gap]].0);
    let mut hi = polar(events[group_first[(best_gap + 1) % groups]].0);
    if hi <= lo {
        hi += 2.0 * std::f64::consts::PI;
    }
    let mid = 0.5 * (lo + hi);
    let normal = [mid.cos(), mid.sin()];
    AngleFit {
        normal,
        angle: normal[1].atan2(normal[0]),
        errors: best_errors,
        emr: best_errors as f64 / m as f64,
    }
}

/// Trained α-separator: `w · φ(d₁, d₂) ≥ 0` means class 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaModel {
    pub basis: FeatureBasis,
    /// Monomials in the order they entered the separator.
    pub selected: Vec<Monomial>,
    /// One weight per basis monomial; unselected monomials have weight 0.
    pub weights: Vec<f64>,
    pub training_emr: f64,
    /// Number of accepted steps (Step 1 included).
    pub steps: usize,
    /// Minimal EMR after each accepted step.
    pub step_emrs: Vec<f64>,
}

impl AlphaModel {
    pub fn score(&self, d: [f64; 2]) -> f64 {
        self.basis
            .monomials
            .iter()
            .zip(&self.weights)
            .map(|(m, w)| w * m.eval(d))
            .sum()
    }

    pub fn feature_count(&self) -> usize {
        self.selected.len()
    }
}

/// Class by the sign of `w · φ(d)`, a zero score going to class 1.
pub fn alpha_classify(model: &AlphaModel, d: [f64; 2]) -> Label {
    if model.score(d) >= 0.0 {
        Label::One
    } else {
        Label::Two
    }
}

fn is_origin(d: [f64; 2]) -> bool {
    d[0] == 0.0 && d[1] == 0.0
}

/// Runs the α-procedure on a depth plot. Points at the exact origin are
/// ignored.
pub fn alpha_train(
    dpairs: &[[f64; 2]],
    labels: &[Label],
    basis: &FeatureBasis,
    rule: PairRule,
) -> Result<AlphaModel> {
    assert_eq!(dpairs.len(), labels.len());
    let keep: Vec<usize> = (0..dpairs.len()).filter(|&i| !is_origin(dpairs[i])).collect();
    if keep.is_empty() {
        return Err(Error::AllAtOrigin);
    }
    let labels: Vec<Label> = keep.iter().map(|&i| labels[i]).collect();
    let feats: Vec<Vec<f64>> = keep.iter().map(|&i| extend(dpairs[i], basis)).collect();
    let r = basis.len();
    let m = keep.len();
    let column = |c: usize| -> Vec<f64> { feats.iter().map(|f| f[c]).collect() };

    let mut pairs = Vec::new();
    for i in 0..r {
        for j in i + 1..r {
            if rule.admits(basis.monomials[i], basis.monomials[j]) {
                pairs.push((i, j));
            }
        }
    }
    if pairs.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "no admissible monomial pair at degree {}",
            basis.degree
        )));
    }
    let fits: Vec<AngleFit> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (ci, cj) = (column(i), column(j));
            let pts: Vec<[f64; 2]> = ci.iter().zip(&cj).map(|(&x, &y)| [x, y]).collect();
            best_angle(&pts, &labels)
        })
        .collect();
    let (best, fit) = fits
        .iter()
        .enumerate()
        .min_by_key(|&(k, f)| (f.errors, k))
        .unwrap();
    let (i0, j0) = pairs[best];
    let mut weights = vec![0.0; r];
    weights[i0] = fit.normal[0];
    weights[j0] = fit.normal[1];
    let mut selected = vec![basis.monomials[i0], basis.monomials[j0]];
    let mut remaining: Vec<usize> = (0..r).filter(|&c| c != i0 && c != j0).collect();
    let mut errors = fit.errors;
    let mut step_emrs = vec![fit.emr];

    while !remaining.is_empty() && errors > 0 {
        let axis: Vec<f64> = feats
            .iter()
            .map(|f| f.iter().zip(&weights).map(|(x, w)| x * w).sum())
            .collect();
        let fits: Vec<AngleFit> = remaining
            .par_iter()
            .map(|&c| {
                let pts: Vec<[f64; 2]> =
                    axis.iter().zip(&feats).map(|(&x, f)| [x, f[c]]).collect();
                best_angle(&pts, &labels)
            })
            .collect();
        let (k, fit) = fits
            .iter()
            .enumerate()
            .min_by_key(|&(k, f)| (f.errors, k))
            .unwrap();
        if fit.errors >= errors {
            break;
        }
        let c = remaining.remove(k);
        for w in weights.iter_mut() {
            *w *= fit.normal[0];
        }
        weights[c] += fit.normal[1];
        selected.push(basis.monomials[c]);
        errors = fit.errors;
        step_emrs.push(fit.emr);
    }

    let mut model = AlphaModel {
        basis: basis.clone(),
        selected,
        weights,
        training_emr: 0.0,
        steps: step_emrs.len(),
        step_emrs,
    };
    let wrong = keep
        .iter()
        .zip(&labels)
        .filter(|&(&i, &l)| alpha_classify(&model, dpairs[i]) != l)
        .count();
    model.training_emr = wrong as f64 / m as f64;
    Ok(model)
}

/// Settings of the α-procedure and of its degree selection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaConfig {
    /// Candidate degrees; a single entry skips cross-validation.
    pub degrees: Vec<usize>,
    pub folds: usize,
    #[serde(default)]
    pub pair_rule: PairRule,
}

impl Default for AlphaConfig {
    fn default() -> Self {
        AlphaConfig {
            degrees: vec![1, 2, 3],
            folds: 50,
            pair_rule: PairRule::Joint,
        }
    }
}

/// Fold index per observation: each class is shuffled separately and dealt
/// round-robin, continuing the count across classes.
pub fn stratified_folds(labels: &[Label], folds: usize, seed: u64) -> Vec<usize> {
    let mut rng = seed::rng(seed);
    let mut out = vec![0; labels.len()];
    let mut next = 0;
    for l in Label::BOTH {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == l).collect();
        idx.shuffle(&mut rng);
        for i in idx {
            out[i] = next % folds;
            next += 1;
        }
    }
    out
}

/// Depth-plot prediction used during degree selection: a single zero depth
/// decides for the other class, the α-rule handles the rest. `None` for the
/// origin.
pub fn depth_plot_predict(model: &AlphaModel, d: [f64; 2]) -> Option<Label> {
    match (d[0] == 0.0, d[1] == 0.0) {
        (true, true) => None,
        (true, false) => Some(Label::Two),
        (false, true) => Some(Label::One),
        (false, false) => Some(alpha_classify(model, d)),
    }
}

/// Cross-validation error count of every candidate degree.
pub fn degree_cv_errors(
    dpairs: &[[f64; 2]],
    labels: &[Label],
    config: &AlphaConfig,
    seed: u64,
) -> Vec<usize> {
    let n = dpairs.len();
    let mut folds = config.folds.max(2);
    if n < folds {
        log::warn!("{n} observations for {folds}-fold degree selection; using leave-one-out");
        folds = n;
    }
    let assignment = stratified_folds(labels, folds, seed);
    config
        .degrees
        .iter()
        .map(|&p| {
            let basis = FeatureBasis::new(p);
            (0..folds)
                .into_par_iter()
                .map(|f| {
                    let (mut tr_d, mut tr_l) = (Vec::new(), Vec::new());
                    for i in 0..n {
                        if assignment[i] != f {
                            tr_d.push(dpairs[i]);
                            tr_l.push(labels[i]);
                        }
                    }
                    let model = alpha_train(&tr_d, &tr_l, &basis, config.pair_rule).ok();
                    (0..n)
                        .filter(|&i| assignment[i] == f)
                        .filter(|&i| match &model {
                            Some(m) => depth_plot_predict(m, dpairs[i])
                                .is_some_and(|pred| pred != labels[i]),
                            None => !is_origin(dpairs[i]),
                        })
                        .count()
                })
                .sum()
        })
        .collect()
}

/// Degree with the fewest cross-validation errors, ties to the smaller
/// degree.
pub fn select_degree(dpairs: &[[f64; 2]], labels: &[Label], config: &AlphaConfig, seed: u64) -> usize {
    assert!(!config.degrees.is_empty(), "no candidate degrees");
    if config.degrees.len() == 1 {
        return config.degrees[0];
    }
    let errors = degree_cv_errors(dpairs, labels, config, seed);
    config
        .degrees
        .iter()
        .zip(&errors)
        .min_by_key(|&(&p, &e)| (e, p))
        .map(|(&p, _)| p)
        .unwrap()
}
