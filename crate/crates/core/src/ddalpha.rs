//! The DDα-classifier: depth transform, α-separation of the depth plot and
//! outsider dispatch.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alpha::{alpha_classify, alpha_train, select_degree, AlphaConfig, AlphaModel, FeatureBasis};
use crate::data::{Dataset, Label, Points};
use crate::depth::{DepthConfig, DepthSpace};
use crate::treatments::{train_treatment, TreatmentConfig, TreatmentModel};
use crate::{seed, Error, Result};

/// How a query point got its label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    /// Both depths positive: α-rule.
    Insider,
    /// Exactly one depth is zero: the class with positive depth.
    OneZero,
    /// Both depths zero: outsider treatment.
    Outsider,
    /// The treatment classifies every point (SVM-s "all points" mode).
    Direct,
}

impl Route {
    pub fn name(self) -> &'static str {
        match self {
            Route::Insider => "insider",
            Route::OneZero => "one-zero",
            Route::Outsider => "outsider",
            Route::Direct => "direct",
        }
    }
}

impl std::fmt::Display for Route {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: Label,
    pub route: Route,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DDAlphaConfig {
    pub depth: DepthConfig,
    #[serde(default)]
    pub alpha: AlphaConfig,
    #[serde(default)]
    pub treatment: Option<TreatmentConfig>,
}

impl DDAlphaConfig {
    pub fn new(depth: DepthConfig) -> Self {
        DDAlphaConfig {
            depth,
            alpha: AlphaConfig::default(),
            treatment: None,
        }
    }

    pub fn with_treatment(mut self, t: TreatmentConfig) -> Self {
        self.treatment = Some(t);
        self
    }

    pub fn with_degrees(mut self, degrees: Vec<usize>) -> Self {
        self.alpha.degrees = degrees;
        self
    }

    pub fn label(&self) -> String {
        match &self.treatment {
            Some(t) if self.depth.notion.vanishes_outside_hull() => {
                format!("DDa-{}+{}", self.depth.label(), t.name())
            }
            _ => format!("DDa-{}", self.depth.label()),
        }
    }
}

/// Training-sample facts reported after fitting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainingSummary {
    pub n: usize,
    /// α-rule EMR on the non-origin training points.
    pub emr: f64,
    pub degree: usize,
    pub selected_features: Vec<String>,
    /// Share of training points mapped to the depth-space origin.
    pub outsider_share: f64,
}

const FORMAT_TAG: &str = "ddalpha-model";
const FORMAT_VERSION: u32 = 1;

/// A trained DDα-classifier. Serializes to a self-contained JSON document
/// holding the configuration, seed, training points per class, location /
/// scatter estimates where used, α weights and treatment parameters; the
/// projections of the direction-based depths are re-derived on load.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DDAlphaModel {
    format: String,
    version: u32,
    pub config: DDAlphaConfig,
    pub seed: u64,
    pub feature_names: Vec<String>,
    pub label_names: [String; 2],
    pub space: DepthSpace,
    pub alpha: AlphaModel,
    pub treatment: Option<TreatmentModel>,
    pub summary: TrainingSummary,
}

/// Label from a depth pair alone; `None` at the origin.
fn depth_rule(alpha: &AlphaModel, d: [f64; 2]) -> Option<Prediction> {
    match (d[0] == 0.0, d[1] == 0.0) {
        (true, true) => None,
        (true, false) => Some(Prediction {
            label: Label::Two,
            route: Route::OneZero,
        }),
        (false, true) => Some(Prediction {
            label: Label::One,
            route: Route::OneZero,
        }),
        (false, false) => Some(Prediction {
            label: alpha_classify(alpha, d),
            route: Route::Insider,
        }),
    }
}

impl DDAlphaModel {
    pub fn train(ds: &Dataset, config: &DDAlphaConfig, seed: u64) -> Result<Self> {
        let vanishing = config.depth.notion.vanishes_outside_hull();
        let treatment_cfg = match (&config.treatment, vanishing) {
            (None, true) => return Err(Error::MissingTreatment),
            (Some(t), false) => {
                log::warn!(
                    "treatment {} ignored: {} depth has no outsiders",
                    t.name(),
                    config.depth.notion
                );
                None
            }
            (t, _) => *t,
        };
        let mut config = config.clone();
        config.treatment = treatment_cfg;
        config.depth.seed = seed;

        let space = DepthSpace::fit(ds, &config.depth)?;
        let plot = space.depth_plot(ds.points());
        let origin = plot.iter().filter(|d| d[0] == 0.0 && d[1] == 0.0).count();
        if origin == plot.len() {
            return Err(Error::AllAtOrigin);
        }
        let degree = select_degree(
            &plot,
            ds.labels(),
            &config.alpha,
            seed::derive(seed, seed::stream::DEGREE_CV),
        );
        let alpha = alpha_train(&plot, ds.labels(), &FeatureBasis::new(degree), config.alpha.pair_rule)?;

        let treatment = match &treatment_cfg {
            None => None,
            Some(t) => {
                let rule = |z: &[f64]| depth_rule(&alpha, space.depths(z)).map(|p| p.label);
                Some(train_treatment(
                    t,
                    ds,
                    seed::derive(seed, seed::stream::TREATMENT),
                    &rule,
                )?)
            }
        };
        let summary = TrainingSummary {
            n: ds.len(),
            emr: alpha.training_emr,
            degree,
            selected_features: alpha.selected.iter().map(|m| m.to_string()).collect(),
            outsider_share: origin as f64 / ds.len() as f64,
        };
        Ok(DDAlphaModel {
            format: FORMAT_TAG.into(),
            version: FORMAT_VERSION,
            config,
            seed,
            feature_names: ds.feature_names.clone(),
            label_names: ds.label_names.clone(),
            space,
            alpha,
            treatment,
            summary,
        })
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// `(D(z|X₁), D(z|X₂))`.
    pub fn depth_transform(&self, z: &[f64]) -> [f64; 2] {
        self.space.depths(z)
    }

    pub fn classify(&self, z: &[f64]) -> Result<Prediction> {
        if z.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: z.len(),
            });
        }
        if let Some(t) = &self.treatment {
            if t.handles_all_points() {
                return Ok(Prediction {
                    label: t.classify(z),
                    route: Route::Direct,
                });
            }
        }
        if let Some(p) = depth_rule(&self.alpha, self.depth_transform(z)) {
            return Ok(p);
        }
        match &self.treatment {
            Some(t) => Ok(Prediction {
                label: t.classify(z),
                route: Route::Outsider,
            }),
            None => Err(Error::NoTreatment),
        }
    }

    /// Classifies every row; order is preserved.
    pub fn classify_batch(&self, pts: &Points) -> Result<Vec<Prediction>> {
        (0..pts.len())
            .into_par_iter()
            .map(|i| self.classify(pts.row(i)))
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let m: DDAlphaModel = serde_json::from_str(s)?;
        if m.format != FORMAT_TAG || m.version != FORMAT_VERSION {
            return Err(Error::InvalidArgument(format!(
                "unsupported model file ({} v{})",
                m.format, m.version
            )));
        }
        Ok(m)
    }
}
