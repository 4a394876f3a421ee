//! Leave-one-out evaluation, aggregate indicators and benchmark reports.

mod benchmark;
mod indicators;
mod report;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use benchmark::{run_benchmark, BenchmarkReport, CellResult, Manifest, RosterEntry, TaskSpec};
pub use indicators::{
    aggregate, feature_count_stats, standardize_measures, AerTable, FeatureCountStats, IndicatorRow,
    MEASURE_NAMES,
};
pub use report::{render_text, TextTable};

use crate::data::{Dataset, Label};
use crate::ddalpha::{DDAlphaConfig, DDAlphaModel, Route};
use crate::estimators::EstimatorKind;
use crate::treatments::{
    knn_classify, knn_train, knn_train_fixed, lda_classify, lda_train, max_mahalanobis_train, qda_classify, qda_train,
    KnnMetric, KnnModel, LdaModel, MaxMahModel, QdaModel,
};
use crate::{seed, Error, Result};

fn euclidean() -> KnnMetric {
    KnnMetric::Euclidean
}

/// Where the KNN baseline picks `k` during leave-one-out evaluation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KSelection {
    /// Once, by leave-one-out over the whole task; folds reuse that `k`.
    #[default]
    WholeTask,
    /// Afresh inside every fold.
    PerFold,
}

/// A classifier that can be trained on any subset of a task.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ClassifierConfig {
    Lda,
    Qda,
    Knn {
        #[serde(default = "euclidean")]
        metric: KnnMetric,
        #[serde(default)]
        k_max: Option<usize>,
        #[serde(default)]
        k_selection: KSelection,
    },
    MaxMah {
        #[serde(default)]
        estimator: EstimatorKind,
    },
    Ddalpha {
        #[serde(flatten)]
        config: DDAlphaConfig,
        /// Select the α degree once per task instead of inside every fold.
        #[serde(default)]
        fast_degree: bool,
    },
}

impl ClassifierConfig {
    pub fn ddalpha(config: DDAlphaConfig) -> Self {
        ClassifierConfig::Ddalpha {
            config,
            fast_degree: false,
        }
    }

    pub fn default_name(&self) -> String {
        match self {
            ClassifierConfig::Lda => "LDA".into(),
            ClassifierConfig::Qda => "QDA".into(),
            ClassifierConfig::Knn { metric: KnnMetric::Euclidean, .. } => "KNN".into(),
            ClassifierConfig::Knn { metric: KnnMetric::Mahalanobis, .. } => "KNN-mah".into(),
            ClassifierConfig::MaxMah { estimator: EstimatorKind::Moment } => "MaxMah(moment)".into(),
            ClassifierConfig::MaxMah { estimator: EstimatorKind::Mcd { fraction, .. } } => {
                format!("MaxMah(mcd {fraction})")
            }
            ClassifierConfig::Ddalpha { config, .. } => config.label(),
        }
    }

    /// LDA, QDA and KNN count as the traditional reference.
    pub fn is_traditional(&self) -> bool {
        matches!(
            self,
            ClassifierConfig::Lda | ClassifierConfig::Qda | ClassifierConfig::Knn { .. }
        )
    }

    pub fn train(&self, ds: &Dataset, s: u64) -> Result<TrainedClassifier> {
        Ok(match self {
            ClassifierConfig::Lda => TrainedClassifier::Lda(lda_train(ds)?),
            ClassifierConfig::Qda => TrainedClassifier::Qda(qda_train(ds)?),
            ClassifierConfig::Knn { metric, k_max, .. } => {
                TrainedClassifier::Knn(knn_train(ds, *metric, *k_max, s)?)
            }
            ClassifierConfig::MaxMah { estimator } => {
                TrainedClassifier::MaxMah(max_mahalanobis_train(ds, *estimator, s)?)
            }
            ClassifierConfig::Ddalpha { config, .. } => {
                TrainedClassifier::DdAlpha(Box::new(DDAlphaModel::train(ds, config, s)?))
            }
        })
    }
}

pub enum TrainedClassifier {
    Lda(LdaModel),
    Qda(QdaModel),
    Knn(KnnModel),
    MaxMah(MaxMahModel),
    DdAlpha(Box<DDAlphaModel>),
}

impl TrainedClassifier {
    /// Label, plus the dispatch route for DDα models.
    pub fn classify(&self, z: &[f64]) -> Result<(Label, Option<Route>)> {
        Ok(match self {
            TrainedClassifier::Lda(m) => (lda_classify(m, z), None),
            TrainedClassifier::Qda(m) => (qda_classify(m, z), None),
            TrainedClassifier::Knn(m) => (knn_classify(m, z), None),
            TrainedClassifier::MaxMah(m) => (m.classify(z), None),
            TrainedClassifier::DdAlpha(m) => {
                let p = m.classify(z)?;
                (p.label, Some(p.route))
            }
        })
    }

    /// Number of α-features of a DDα model.
    pub fn feature_count(&self) -> Option<usize> {
        match self {
            TrainedClassifier::DdAlpha(m) => Some(m.alpha.feature_count()),
            _ => None,
        }
    }

    pub fn degree(&self) -> Option<usize> {
        match self {
            TrainedClassifier::DdAlpha(m) => Some(m.summary.degree),
            _ => None,
        }
    }
}

/// Outcome for one held-out observation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldRecord {
    pub index: usize,
    pub truth: Label,
    pub predicted: Label,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub route: Option<Route>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub features: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LooResult {
    pub n: usize,
    pub errors: usize,
    /// Average error rate in percent.
    pub aer: f64,
    pub folds: Vec<FoldRecord>,
}

impl LooResult {
    pub fn route_counts(&self) -> Vec<(Route, usize)> {
        let mut out: Vec<(Route, usize)> = Vec::new();
        for r in self.folds.iter().filter_map(|f| f.route) {
            match out.iter_mut().find(|(x, _)| *x == r) {
                Some((_, c)) => *c += 1,
                None => out.push((r, 1)),
            }
        }
        out
    }
}

/// Leave-one-out error of `config` on `ds`. Fold `i` trains on all points
/// but `i` with seed `derive(seed, i)`; folds run in parallel.
pub fn loo_cv(config: &ClassifierConfig, ds: &Dataset, seed: u64) -> Result<LooResult> {
    let n = ds.len();
    if n < 2 {
        return Err(Error::InvalidArgument("leave-one-out needs at least 2 observations".into()));
    }
    let fixed_k = match config {
        ClassifierConfig::Knn {
            metric,
            k_max,
            k_selection: KSelection::WholeTask,
        } => Some((*metric, knn_train(ds, *metric, *k_max, seed)?.k)),
        _ => None,
    };
    let config = match config {
        ClassifierConfig::Ddalpha {
            config,
            fast_degree: true,
        } if config.alpha.degrees.len() > 1 => {
            let full = DDAlphaModel::train(ds, config, seed)?;
            ClassifierConfig::ddalpha(config.clone().with_degrees(vec![full.summary.degree]))
        }
        c => c.clone(),
    };
    let fit = |train: &Dataset, s: u64| match fixed_k {
        Some((metric, k)) => Ok(TrainedClassifier::Knn(knn_train_fixed(train, metric, k, s)?)),
        None => config.train(train, s),
    };
    let folds: Vec<FoldRecord> = (0..n)
        .into_par_iter()
        .map(|i| -> Result<FoldRecord> {
            let fold = |e: Error| Error::Fold {
                fold: i,
                source: Box::new(e),
            };
            let train = ds.without(i).map_err(fold)?;
            let model = fit(&train, seed::derive(seed, i as u64)).map_err(fold)?;
            let (predicted, route) = model.classify(ds.point(i)).map_err(fold)?;
            Ok(FoldRecord {
                index: i,
                truth: ds.label(i),
                predicted,
                route,
                features: model.feature_count(),
                degree: model.degree(),
            })
        })
        .collect::<Result<_>>()?;
    let errors = folds.iter().filter(|f| f.predicted != f.truth).count();
    Ok(LooResult {
        n,
        errors,
        aer: 100.0 * errors as f64 / n as f64,
        folds,
    })
}
