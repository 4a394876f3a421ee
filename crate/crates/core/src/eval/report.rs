use std::fmt::Write;

use super::{AerTable, BenchmarkReport, FeatureCountStats, IndicatorRow};
use crate::data::DatasetStats;

/// Column-aligned plain-text table: the first `left` columns are
/// left-aligned, the rest right-aligned.
#[derive(Clone, Debug, Default)]
pub struct TextTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub left: usize,
}

impl TextTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        TextTable {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
            left: 2,
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let ncol = self.header.len();
        let mut width = vec![0usize; ncol];
        for r in std::iter::once(&self.header).chain(&self.rows) {
            for (w, c) in width.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let mut out = String::new();
        for r in std::iter::once(&self.header).chain(&self.rows) {
            let cells: Vec<String> = r
                .iter()
                .zip(&width)
                .enumerate()
                .map(|(i, (c, &w))| if i < self.left { format!("{c:<w$}") } else { format!("{c:>w$}") })
                .collect();
            out.push_str(cells.join("  ").trim_end());
            out.push('\n');
        }
        out
    }
}

fn f2(v: f64) -> String {
    if v.is_nan() {
        "-".into()
    } else {
        format!("{v:.2}")
    }
}

pub fn stats_table(stats: &[DatasetStats]) -> TextTable {
    let mut t = TextTable::new(["No.", "Data set", "n1+n2", "ln(n1/n2)", "d", "(n1+n2)/d", "# tied", "% outl.", "% outs."]);
    for (i, s) in stats.iter().enumerate() {
        t.push(vec![
            (i + 1).to_string(),
            s.name.clone(),
            s.n_total.to_string(),
            f2(s.log_class_ratio),
            s.dim.to_string(),
            f2(s.samples_per_dim),
            s.tied_count.to_string(),
            f2(100.0 * s.outlier_fraction),
            f2(100.0 * s.outsider_proneness),
        ]);
    }
    t
}

pub fn aer_table(tbl: &AerTable) -> TextTable {
    let mut t = TextTable::new(["No.".to_string(), "Data set".to_string()].into_iter().chain(tbl.classifiers.iter().cloned()));
    for (i, (name, row)) in tbl.tasks.iter().zip(&tbl.aer).enumerate() {
        t.push([(i + 1).to_string(), name.clone()].into_iter().chain(row.iter().map(|&v| f2(v))).collect());
    }
    t
}

/// ARCE is shown in percent; the counts as numbers of tasks.
pub fn indicator_table(rows: &[IndicatorRow], n_tasks: usize) -> TextTable {
    let mut t = TextTable::new(["N", "Classifier", "ACE", "ARCE_trd", "ARCE_bst", "#>=trd", "#>=bst"]);
    let count = |share: f64| format!("{}", (share * n_tasks as f64).round() as usize);
    for (i, r) in rows.iter().enumerate() {
        t.push(vec![
            (i + 1).to_string(),
            r.classifier.clone(),
            f2(r.ace),
            f2(100.0 * r.arce_trd),
            f2(100.0 * r.arce_bst),
            count(r.count_ge_trd),
            count(r.count_ge_bst),
        ]);
    }
    t
}

pub fn standardized_table(rows: &[IndicatorRow], values: &[[f64; 5]]) -> TextTable {
    let mut t = TextTable::new(["N", "Classifier", "ACE", "ARCE_trd", "ARCE_bst", "#>=trd", "#>=bst"]);
    for (i, (r, v)) in rows.iter().zip(values).enumerate() {
        t.push([(i + 1).to_string(), r.classifier.clone()].into_iter().chain(v.iter().map(|&x| f2(x))).collect());
    }
    t
}

pub fn feature_table(stats: &[FeatureCountStats]) -> TextTable {
    let mut t = TextTable::new(["No.", "Dataset", "Classifier", "2 %", "3 %", ">=4 %"]);
    t.left = 3;
    for (i, s) in stats.iter().enumerate() {
        t.push(vec![
            (i + 1).to_string(),
            s.task.clone(),
            s.classifier.clone(),
            f2(s.two),
            f2(s.three),
            f2(s.four_plus),
        ]);
    }
    t
}

/// All report sections as aligned text.
pub fn render_text(report: &BenchmarkReport) -> String {
    let mut out = String::new();
    let mut section = |title: &str, t: TextTable| {
        let _ = writeln!(out, "== {title} ==");
        out.push_str(&t.render());
        out.push('\n');
    };
    section("Data sets", stats_table(&report.stats));
    section("Average error rate (%)", aer_table(&report.aer_table));
    if !report.indicators.is_empty() {
        section("Indicators", indicator_table(&report.indicators, report.aer_table.tasks.len()));
    }
    if !report.standardized.is_empty() {
        section("Standardized indicators", standardized_table(&report.indicators, &report.standardized));
    }
    if !report.feature_counts.is_empty() {
        section("Selected alpha-features", feature_table(&report.feature_counts));
    }
    if let Some(s) = report.two_feature_share {
        let _ = writeln!(out, "two-feature share over all folds: {:.2} %", s);
    }
    for f in &report.failures {
        let _ = writeln!(out, "failed: {f}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alignment() {
        let mut t = TextTable::new(["No.", "Data set", "LDA"]);
        t.push(vec!["1".into(), "iris".into(), f2(3.0)]);
        t.push(vec!["2".into(), "x".into(), f2(12.345)]);
        let s = t.render();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[1], "1    iris       3.00");
        assert_eq!(lines[2], "2    x         12.35");
    }
}
