use std::io::Read;
use std::path::Path;

use super::{Dataset, Label, Points};
use crate::{Error, Result};

/// Which column holds the class label.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum LabelColumn {
    #[default]
    Last,
    Named(String),
}

impl LabelColumn {
    pub fn from_option(name: Option<&str>) -> Self {
        match name {
            Some(n) => LabelColumn::Named(n.to_string()),
            None => LabelColumn::Last,
        }
    }
}

/// Reads a comma-separated table with one header row.
///
/// Labels are mapped to classes by first appearance: the first label text
/// seen becomes class 1. Row order is preserved.
pub fn load_csv<R: Read>(source: R, name: &str, label_column: &LabelColumn) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err(Error::Empty);
    }
    let label_idx = match label_column {
        LabelColumn::Last => header.len() - 1,
        LabelColumn::Named(n) => header
            .iter()
            .position(|h| h == n)
            .ok_or_else(|| Error::MissingColumn(n.clone()))?,
    };
    if header.len() < 2 {
        return Err(Error::InvalidArgument(
            "need at least one attribute column besides the label".into(),
        ));
    }
    let feature_names: Vec<String> = header
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != label_idx)
        .map(|(_, h)| h.clone())
        .collect();
    let d = feature_names.len();

    let mut label_names: Vec<String> = Vec::new();
    let mut labels = Vec::new();
    let mut data = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let raw = rec.get(label_idx).unwrap_or("").to_string();
        let idx = match label_names.iter().position(|l| *l == raw) {
            Some(i) => i,
            None => {
                label_names.push(raw);
                label_names.len() - 1
            }
        };
        labels.push(idx);
        for (j, cell) in rec.iter().enumerate() {
            if j == label_idx {
                continue;
            }
            data.push(parse_cell(cell, row + 1, &header[j])?);
        }
    }
    if labels.is_empty() {
        return Err(Error::Empty);
    }
    if label_names.len() != 2 {
        return Err(Error::NotBinary(label_names.len()));
    }
    let labels = labels.into_iter().map(Label::from_index).collect();
    let label_names = [label_names[0].clone(), label_names[1].clone()];
    Dataset::with_names(name, Points::new(data, d), labels, feature_names, label_names)
}

pub fn load_csv_path(path: &Path, label_column: &LabelColumn) -> Result<Dataset> {
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let f = std::fs::File::open(path)?;
    load_csv(f, &name, label_column)
}

pub(crate) fn parse_cell(cell: &str, row: usize, column: &str) -> Result<f64> {
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::NonNumeric {
            row,
            column: column.to_string(),
            value: cell.to_string(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_rows_two_labels() {
        let src = "x,y,class\n0,0,a\n1,0,a\n5,5,b\n6,5,b\n";
        let ds = load_csv(src.as_bytes(), "toy", &LabelColumn::Last).unwrap();
        assert_eq!(ds.class_sizes(), (2, 2));
        assert_eq!(ds.dim(), 2);
        assert_eq!(ds.label_names, ["a".to_string(), "b".to_string()]);
        assert_eq!(ds.point(2), &[5.0, 5.0]);
    }

    #[test]
    fn first_seen_label_is_class_one() {
        let src = "c,x\nzeta,1\nalpha,2\nzeta,3\n";
        let ds = load_csv(src.as_bytes(), "t", &LabelColumn::Named("c".into())).unwrap();
        assert_eq!(ds.labels(), &[Label::One, Label::Two, Label::One]);
        assert_eq!(ds.label_name(Label::One), "zeta");
    }

    #[test]
    fn three_labels_is_not_binary() {
        let src = "x,c\n1,a\n2,b\n3,c\n";
        let err = load_csv(src.as_bytes(), "t", &LabelColumn::Last).unwrap_err();
        assert!(matches!(err, Error::NotBinary(3)));
        assert!(err.to_string().contains("not a binary task"));
    }

    #[test]
    fn one_label_is_not_binary() {
        let src = "x,c\n1,a\n2,a\n";
        assert!(matches!(
            load_csv(src.as_bytes(), "t", &LabelColumn::Last),
            Err(Error::NotBinary(1))
        ));
    }

    #[test]
    fn non_numeric_cell() {
        let src = "x,y,c\n1,oops,a\n2,3,b\n";
        match load_csv(src.as_bytes(), "t", &LabelColumn::Last) {
            Err(Error::NonNumeric { row, column, value }) => {
                assert_eq!(row, 1);
                assert_eq!(column, "y");
                assert_eq!(value, "oops");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_file() {
        assert!(matches!(
            load_csv("".as_bytes(), "t", &LabelColumn::Last),
            Err(Error::Empty)
        ));
        assert!(matches!(
            load_csv("x,c\n".as_bytes(), "t", &LabelColumn::Last),
            Err(Error::Empty)
        ));
    }

    #[test]
    fn missing_named_column() {
        let src = "x,c\n1,a\n2,b\n";
        assert!(matches!(
            load_csv(src.as_bytes(), "t", &LabelColumn::Named("label".into())),
            Err(Error::MissingColumn(_))
        ));
    }
}
