//! Classical classifiers in the original space, used both as outsider
//! treatments and as baselines.

mod knn;
mod lda;
mod maxmah;
mod qda;
pub mod svm;
mod svms;

use serde::{Deserialize, Serialize};

pub use knn::{default_k_max, knn_classify, knn_train, knn_train_fixed, KnnMetric, KnnModel};
pub use lda::{lda_classify, lda_train, pooled_covariance, LdaModel};
pub use maxmah::{max_mahalanobis_classify, max_mahalanobis_train, MaxMahModel};
pub use qda::{qda_classify, qda_train, QdaModel};
pub use svm::{default_iteration_cap, gaussian_gram, qp_hard_margin, QpOutcome, QpSolution};
pub use svms::{svms_classify, svms_retained, svms_scan, svms_train, GammaGrid, GammaReport, SvmsModel};

use crate::data::{Dataset, Label};
use crate::estimators::{EstimatorKind, DEFAULT_MCD_FRACTION};
use crate::{Error, Result};

fn default_mcd_fraction() -> f64 {
    DEFAULT_MCD_FRACTION
}

/// Outsider treatment choice.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TreatmentConfig {
    Lda,
    Knn {
        #[serde(default)]
        metric: KnnMetric,
        #[serde(default)]
        k_max: Option<usize>,
    },
    MahMoment,
    MahMcd {
        #[serde(default = "default_mcd_fraction")]
        fraction: f64,
    },
    Svms {
        #[serde(default)]
        grid: GammaGrid,
        /// Classify every query with SVM-s instead of outsiders only.
        #[serde(default)]
        all_points: bool,
    },
}

impl TreatmentConfig {
    pub fn name(&self) -> &'static str {
        match self {
            TreatmentConfig::Lda => "lda",
            TreatmentConfig::Knn { .. } => "knn",
            TreatmentConfig::MahMoment => "mah-moment",
            TreatmentConfig::MahMcd { .. } => "mah-mcd",
            TreatmentConfig::Svms { .. } => "svms",
        }
    }
}

impl std::str::FromStr for TreatmentConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lda" => Ok(TreatmentConfig::Lda),
            "knn" => Ok(TreatmentConfig::Knn {
                metric: KnnMetric::Mahalanobis,
                k_max: None,
            }),
            "mah-moment" => Ok(TreatmentConfig::MahMoment),
            "mah-mcd" => Ok(TreatmentConfig::MahMcd {
                fraction: DEFAULT_MCD_FRACTION,
            }),
            "svms" => Ok(TreatmentConfig::Svms {
                grid: GammaGrid::default(),
                all_points: false,
            }),
            _ => Err(Error::InvalidArgument(format!(
                "unknown treatment `{s}` (expected lda, knn, mah-moment, mah-mcd or svms)"
            ))),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TreatmentModel {
    Lda(LdaModel),
    Knn(KnnModel),
    MaxMah(MaxMahModel),
    Svms { model: SvmsModel, all_points: bool },
}

/// Trains a treatment on the whole training sample. `rule` is the DDα rule
/// SVM-s filters with; the other treatments ignore it.
pub fn train_treatment(
    config: &TreatmentConfig,
    ds: &Dataset,
    seed: u64,
    rule: &(dyn Fn(&[f64]) -> Option<Label> + Sync),
) -> Result<TreatmentModel> {
    Ok(match *config {
        TreatmentConfig::Lda => TreatmentModel::Lda(lda_train(ds)?),
        TreatmentConfig::Knn { metric, k_max } => TreatmentModel::Knn(knn_train(ds, metric, k_max, seed)?),
        TreatmentConfig::MahMoment => {
            TreatmentModel::MaxMah(max_mahalanobis_train(ds, EstimatorKind::Moment, seed)?)
        }
        TreatmentConfig::MahMcd { fraction } => {
            TreatmentModel::MaxMah(max_mahalanobis_train(ds, EstimatorKind::mcd(fraction), seed)?)
        }
        TreatmentConfig::Svms { grid, all_points } => TreatmentModel::Svms {
            model: svms_train(ds, rule, &grid)?,
            all_points,
        },
    })
}

impl TreatmentModel {
    pub fn classify(&self, z: &[f64]) -> Label {
        match self {
            TreatmentModel::Lda(m) => lda_classify(m, z),
            TreatmentModel::Knn(m) => knn_classify(m, z),
            TreatmentModel::MaxMah(m) => m.classify(z),
            TreatmentModel::Svms { model, .. } => svms_classify(model, z),
        }
    }

    /// Whether this treatment replaces the depth rule for every query.
    pub fn handles_all_points(&self) -> bool {
        matches!(self, TreatmentModel::Svms { all_points: true, .. })
    }
}
