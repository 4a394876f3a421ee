use std::path::{Path, PathBuf};

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    aggregate, feature_count_stats, loo_cv, standardize_measures, AerTable, ClassifierConfig,
    FeatureCountStats, IndicatorRow,
};
use crate::data::{dataset_stats, load_csv_path, Dataset, DatasetStats, LabelColumn, OutlierScope};
use crate::ddalpha::Route;
use crate::{seed, Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub name: String,
    /// Relative paths resolve against the manifest's directory.
    pub path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label_column: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RosterEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(flatten)]
    pub config: ClassifierConfig,
    /// Overrides whether this entry is part of the traditional reference.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub traditional: Option<bool>,
}

impl RosterEntry {
    pub fn new(config: ClassifierConfig) -> Self {
        RosterEntry {
            name: None,
            config,
            traditional: None,
        }
    }

    pub fn display_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.config.default_name())
    }

    pub fn is_traditional(&self) -> bool {
        self.traditional.unwrap_or_else(|| self.config.is_traditional())
    }
}

/// Benchmark description: tasks, classifier roster and the master seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    #[serde(default)]
    pub seed: u64,
    pub tasks: Vec<TaskSpec>,
    pub classifiers: Vec<RosterEntry>,
    #[serde(default)]
    pub outlier_scope: OutlierScope,
}

impl Manifest {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub task: String,
    pub classifier: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aer: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub errors: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub routes: Vec<(Route, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub seed: u64,
    pub stats: Vec<DatasetStats>,
    /// Only tasks on which every classifier finished.
    pub aer_table: AerTable,
    pub cells: Vec<CellResult>,
    pub failures: Vec<String>,
    pub indicators: Vec<IndicatorRow>,
    pub standardized: Vec<[f64; 5]>,
    pub feature_counts: Vec<FeatureCountStats>,
    /// Share (percent) of all DDα folds that selected two features.
    pub two_feature_share: Option<f64>,
}

impl BenchmarkReport {
    pub fn has_failures(&self) -> bool {
        !self.failures.is_empty()
    }
}

/// Runs leave-one-out for every (task, classifier) pair and aggregates.
/// Task `t` uses seed `derive(manifest.seed, t)` for all classifiers.
/// Failures are recorded and the run continues.
pub fn run_benchmark(manifest: &Manifest, base_dir: &Path) -> Result<BenchmarkReport> {
    if manifest.tasks.is_empty() || manifest.classifiers.is_empty() {
        return Err(Error::InvalidArgument("manifest needs at least one task and one classifier".into()));
    }
    let names: Vec<String> = manifest.classifiers.iter().map(RosterEntry::display_name).collect();
    let mut failures = Vec::new();

    let mut loaded: Vec<(usize, Dataset)> = Vec::new();
    let mut stats = Vec::new();
    for (t, spec) in manifest.tasks.iter().enumerate() {
        let path = base_dir.join(&spec.path);
        let label = LabelColumn::from_option(spec.label_column.as_deref());
        match load_csv_path(&path, &label) {
            Ok(mut ds) => {
                ds.name = spec.name.clone();
                match dataset_stats(&ds, manifest.outlier_scope) {
                    Ok(s) => stats.push(s),
                    Err(e) => warn!("task {}: statistics unavailable: {e}", spec.name),
                }
                loaded.push((t, ds));
            }
            Err(e) => failures.push(format!("task {}: {e}", spec.name)),
        }
    }

    let jobs: Vec<(usize, usize)> = (0..loaded.len())
        .flat_map(|l| (0..manifest.classifiers.len()).map(move |c| (l, c)))
        .collect();
    let results: Vec<(CellResult, Option<FeatureCountStats>)> = jobs
        .par_iter()
        .map(|&(l, c)| {
            let (t, ds) = &loaded[l];
            let task = &manifest.tasks[*t].name;
            let cfg = &manifest.classifiers[c].config;
            match loo_cv(cfg, ds, seed::derive(manifest.seed, *t as u64)) {
                Ok(r) => {
                    let fc = feature_count_stats(task, &names[c], &r);
                    let cell = CellResult {
                        task: task.clone(),
                        classifier: names[c].clone(),
                        aer: Some(r.aer),
                        errors: Some(r.errors),
                        routes: r.route_counts(),
                        failure: None,
                    };
                    (cell, fc)
                }
                Err(e) => (
                    CellResult {
                        task: task.clone(),
                        classifier: names[c].clone(),
                        aer: None,
                        errors: None,
                        routes: Vec::new(),
                        failure: Some(e.to_string()),
                    },
                    None,
                ),
            }
        })
        .collect();

    let nc = manifest.classifiers.len();
    let mut tasks = Vec::new();
    let mut aer = Vec::new();
    for (l, (t, _)) in loaded.iter().enumerate() {
        let row = &results[l * nc..(l + 1) * nc];
        for (cell, _) in row {
            if let Some(f) = &cell.failure {
                failures.push(format!("task {} / {}: {f}", cell.task, cell.classifier));
            }
        }
        if row.iter().all(|(c, _)| c.aer.is_some()) {
            tasks.push(manifest.tasks[*t].name.clone());
            aer.push(row.iter().map(|(c, _)| c.aer.unwrap()).collect());
        }
    }
    let aer_table = AerTable::new(tasks, names.clone(), aer)?;

    let traditional: Vec<String> = manifest
        .classifiers
        .iter()
        .zip(&names)
        .filter(|(e, _)| e.is_traditional())
        .map(|(_, n)| n.clone())
        .collect();
    let indicators = if aer_table.tasks.is_empty() {
        Vec::new()
    } else if traditional.is_empty() {
        warn!("no traditional classifier in the roster; indicators skipped");
        Vec::new()
    } else {
        aggregate(&aer_table, &traditional)?
    };
    let standardized = if indicators.len() >= 2 {
        standardize_measures(&indicators)?
    } else {
        Vec::new()
    };

    let feature_counts: Vec<FeatureCountStats> = results.iter().filter_map(|(_, f)| f.clone()).collect();
    let total: usize = feature_counts.iter().map(|f| f.folds).sum();
    let two_feature_share = (total > 0).then(|| {
        feature_counts.iter().map(|f| f.two * f.folds as f64).sum::<f64>() / total as f64
    });

    Ok(BenchmarkReport {
        seed: manifest.seed,
        stats,
        aer_table,
        cells: results.into_iter().map(|(c, _)| c).collect(),
        failures,
        indicators,
        standardized,
        feature_counts,
        two_feature_share,
    })
}
