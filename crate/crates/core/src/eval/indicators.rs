use log::warn;
use serde::{Deserialize, Serialize};

use super::LooResult;
use crate::{Error, Result};

/// Leave-one-out error rates (percent), tasks × classifiers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AerTable {
    pub tasks: Vec<String>,
    pub classifiers: Vec<String>,
    /// `aer[t][c]`.
    pub aer: Vec<Vec<f64>>,
}

impl AerTable {
    pub fn new(tasks: Vec<String>, classifiers: Vec<String>, aer: Vec<Vec<f64>>) -> Result<Self> {
        if aer.len() != tasks.len() || aer.iter().any(|r| r.len() != classifiers.len()) {
            return Err(Error::InvalidArgument("AER table shape does not match its labels".into()));
        }
        if let Some(v) = aer.iter().flatten().find(|v| !(0.0..=100.0).contains(*v)) {
            return Err(Error::InvalidArgument(format!("AER {v} outside [0, 100]")));
        }
        Ok(AerTable { tasks, classifiers, aer })
    }

    fn column(&self, name: &str) -> Option<usize> {
        self.classifiers.iter().position(|c| c == name)
    }
}

/// Aggregate indicators of one classifier. ARCE values are fractions;
/// the `count_ge` fields are shares of tasks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndicatorRow {
    pub classifier: String,
    pub ace: f64,
    pub arce_trd: f64,
    pub arce_bst: f64,
    pub count_ge_trd: f64,
    pub count_ge_bst: f64,
}

pub const MEASURE_NAMES: [&str; 5] = ["ACE", "ARCE_trd", "ARCE_bst", "#>=trd", "#>=bst"];

impl IndicatorRow {
    pub fn measures(&self) -> [f64; 5] {
        [self.ace, self.arce_trd, self.arce_bst, self.count_ge_trd, self.count_ge_bst]
    }
}

fn row_min(row: &[f64], cols: &[usize]) -> f64 {
    cols.iter().map(|&c| row[c]).fold(f64::INFINITY, f64::min)
}

fn arce(table: &AerTable, c: usize, reference: &[f64], which: &str) -> f64 {
    let mut sum = 0.0;
    let mut used = 0usize;
    for (t, row) in table.aer.iter().enumerate() {
        let r = reference[t] / 100.0;
        if r >= 1.0 {
            warn!(
                "task {}: reference AER ({which}) is 100%, excluded from ARCE",
                table.tasks[t]
            );
            continue;
        }
        let a = row[c] / 100.0;
        sum += ((1.0 - a) - (1.0 - r)) / (1.0 - r);
        used += 1;
    }
    if used == 0 {
        f64::NAN
    } else {
        sum / used as f64
    }
}

/// ACE, ARCE and not-worse-than counts against the best traditional
/// classifier and the best overall, per task.
pub fn aggregate(table: &AerTable, traditional: &[String]) -> Result<Vec<IndicatorRow>> {
    if table.tasks.is_empty() || table.classifiers.is_empty() {
        return Err(Error::Empty);
    }
    let trd: Vec<usize> = traditional
        .iter()
        .map(|n| {
            table
                .column(n)
                .ok_or_else(|| Error::InvalidArgument(format!("traditional classifier {n:?} not in table")))
        })
        .collect::<Result<_>>()?;
    if trd.is_empty() {
        return Err(Error::InvalidArgument("no traditional classifier given".into()));
    }
    let all: Vec<usize> = (0..table.classifiers.len()).collect();
    let ref_trd: Vec<f64> = table.aer.iter().map(|r| row_min(r, &trd)).collect();
    let ref_bst: Vec<f64> = table.aer.iter().map(|r| row_min(r, &all)).collect();
    let nt = table.tasks.len() as f64;
    Ok(all
        .iter()
        .map(|&c| {
            let col = || table.aer.iter().map(move |r| r[c]);
            let ge = |reference: &[f64]| {
                col().zip(reference).filter(|(a, r)| a <= *r).count() as f64 / nt
            };
            IndicatorRow {
                classifier: table.classifiers[c].clone(),
                ace: col().sum::<f64>() / nt,
                arce_trd: arce(table, c, &ref_trd, "traditional"),
                arce_bst: arce(table, c, &ref_bst, "best"),
                count_ge_trd: ge(&ref_trd),
                count_ge_bst: ge(&ref_bst),
            }
        })
        .collect())
}

/// Min-max scales each measure over classifiers so that 1 is best.
/// ACE is inverted; a constant column maps to 1.
pub fn standardize_measures(rows: &[IndicatorRow]) -> Result<Vec<[f64; 5]>> {
    if rows.len() < 2 {
        return Err(Error::InvalidArgument("standardization needs at least 2 classifiers".into()));
    }
    let mut out = vec![[0.0; 5]; rows.len()];
    for m in 0..5 {
        let vals: Vec<f64> = rows.iter().map(|r| r.measures()[m]).collect();
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for (o, v) in out.iter_mut().zip(&vals) {
            o[m] = if hi - lo <= 0.0 || !(hi - lo).is_finite() {
                1.0
            } else if m == 0 {
                (hi - v) / (hi - lo)
            } else {
                (v - lo) / (hi - lo)
            };
        }
    }
    Ok(out)
}

/// Percentages of folds whose α-model used 2, 3 or at least 4 features.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureCountStats {
    pub task: String,
    pub classifier: String,
    pub folds: usize,
    pub two: f64,
    pub three: f64,
    pub four_plus: f64,
}

/// `None` when no fold carries a feature count (non-DDα classifiers).
pub fn feature_count_stats(task: &str, classifier: &str, loo: &LooResult) -> Option<FeatureCountStats> {
    let counts: Vec<usize> = loo.folds.iter().filter_map(|f| f.features).collect();
    if counts.is_empty() {
        return None;
    }
    let n = counts.len() as f64;
    let pct = |f: &dyn Fn(usize) -> bool| 100.0 * counts.iter().filter(|&&c| f(c)).count() as f64 / n;
    Some(FeatureCountStats {
        task: task.to_string(),
        classifier: classifier.to_string(),
        folds: counts.len(),
        two: pct(&|c| c <= 2),
        three: pct(&|c| c == 3),
        four_plus: pct(&|c| c >= 4),
    })
}
