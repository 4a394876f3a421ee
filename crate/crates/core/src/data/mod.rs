//! Labeled two-class datasets, CSV ingestion and dataset-difficulty
//! statistics (ties, outliers, outsider proneness).

mod csv;
mod hull;
mod points;
mod stats;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use self::csv::{load_csv, load_csv_path, LabelColumn};
pub use hull::point_in_convex_hull;
pub use points::Points;
pub use stats::{
    count_ties, dataset_stats, detect_outliers, outsider_flags, outsider_proneness, DatasetStats,
    OutlierReport,
    OutlierScope,
};

/// Class label of a binary task.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Label {
    One,
    Two,
}

impl Label {
    pub const BOTH: [Label; 2] = [Label::One, Label::Two];

    /// Zero-based class index.
    pub fn index(self) -> usize {
        match self {
            Label::One => 0,
            Label::Two => 1,
        }
    }

    pub fn from_index(i: usize) -> Label {
        if i == 0 {
            Label::One
        } else {
            Label::Two
        }
    }

    pub fn other(self) -> Label {
        match self {
            Label::One => Label::Two,
            Label::Two => Label::One,
        }
    }

    /// `+1` for class 1, `-1` for class 2.
    pub fn sign(self) -> f64 {
        match self {
            Label::One => 1.0,
            Label::Two => -1.0,
        }
    }

    pub fn as_u8(self) -> u8 {
        self.index() as u8 + 1
    }
}

impl From<Label> for u8 {
    fn from(l: Label) -> u8 {
        l.as_u8()
    }
}

impl TryFrom<u8> for Label {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, Self::Error> {
        match v {
            1 => Ok(Label::One),
            2 => Ok(Label::Two),
            other => Err(format!("label must be 1 or 2, got {other}")),
        }
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

/// Labeled numeric observations of one binary task.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    pub feature_names: Vec<String>,
    /// Original label text for class 1 and class 2.
    pub label_names: [String; 2],
    points: Points,
    labels: Vec<Label>,
}

impl Dataset {
    /// Validates and builds a dataset. Both classes must be nonempty and all
    /// values finite.
    pub fn new(name: impl Into<String>, points: Points, labels: Vec<Label>) -> Result<Self> {
        let d = points.dim();
        let names = (1..=d).map(|j| format!("x{j}")).collect();
        Self::with_names(name, points, labels, names, ["1".into(), "2".into()])
    }

    pub fn with_names(
        name: impl Into<String>,
        points: Points,
        labels: Vec<Label>,
        feature_names: Vec<String>,
        label_names: [String; 2],
    ) -> Result<Self> {
        if points.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: points.len(),
                got: labels.len(),
            });
        }
        if points.dim() == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        if feature_names.len() != points.dim() {
            return Err(Error::DimensionMismatch {
                expected: points.dim(),
                got: feature_names.len(),
            });
        }
        if points.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite attribute value".into()));
        }
        for l in Label::BOTH {
            if !labels.contains(&l) {
                return Err(Error::EmptyClass(l.as_u8()));
            }
        }
        Ok(Dataset {
            name: name.into(),
            feature_names,
            label_names,
            points,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.dim()
    }

    pub fn points(&self) -> &Points {
        &self.points
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn point(&self, i: usize) -> &[f64] {
        self.points.row(i)
    }

    pub fn label(&self, i: usize) -> Label {
        self.labels[i]
    }

    /// `(n1, n2)`.
    pub fn class_sizes(&self) -> (usize, usize) {
        let n1 = self.labels.iter().filter(|&&l| l == Label::One).count();
        (n1, self.len() - n1)
    }

    pub fn class_indices(&self, label: Label) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.labels[i] == label).collect()
    }

    /// Points of one class, in dataset order.
    pub fn class_points(&self, label: Label) -> Points {
        self.points.select(&self.class_indices(label))
    }

    /// Training-class proportions `(π1, π2)`.
    pub fn priors(&self) -> (f64, f64) {
        let (n1, n2) = self.class_sizes();
        let n = self.len() as f64;
        (n1 as f64 / n, n2 as f64 / n)
    }

    /// The dataset with observation `i` removed.
    pub fn without(&self, i: usize) -> Result<Dataset> {
        let idx: Vec<usize> = (0..self.len()).filter(|&j| j != i).collect();
        self.subset(&idx)
    }

    pub fn subset(&self, idx: &[usize]) -> Result<Dataset> {
        Dataset::with_names(
            self.name.clone(),
            self.points.select(idx),
            idx.iter().map(|&i| self.labels[i]).collect(),
            self.feature_names.clone(),
            self.label_names.clone(),
        )
    }

    /// Applies `z -> A z + b` to every observation.
    pub fn map_points(&self, f: impl Fn(&[f64]) -> Vec<f64>) -> Result<Dataset> {
        let rows: Vec<Vec<f64>> = self.points.rows().map(f).collect();
        Dataset::with_names(
            self.name.clone(),
            Points::from_rows(&rows),
            self.labels.clone(),
            self.feature_names.clone(),
            self.label_names.clone(),
        )
    }

    pub fn label_name(&self, l: Label) -> &str {
        &self.label_names[l.index()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_single_class() {
        let pts = Points::from_rows(&[vec![0.0], vec![1.0]]);
        assert!(matches!(
            Dataset::new("t", pts, vec![Label::One, Label::One]),
            Err(Error::EmptyClass(2))
        ));
    }

    #[test]
    fn rejects_non_finite() {
        let pts = Points::from_rows(&[vec![0.0], vec![f64::NAN]]);
        assert!(Dataset::new("t", pts, vec![Label::One, Label::Two]).is_err());
    }

    #[test]
    fn label_serializes_as_number() {
        assert_eq!(serde_json::to_string(&Label::Two).unwrap(), "2");
        let l: Label = serde_json::from_str("1").unwrap();
        assert_eq!(l, Label::One);
        assert!(serde_json::from_str::<Label>("3").is_err());
    }
}
