#![allow(dead_code)]

use std::path::PathBuf;

use ddalpha_core::data::{load_csv, LabelColumn, Points};
use ddalpha_core::seed;
use ddalpha_core::{Dataset, Label};
use rand::Rng;
use rand_distr::StandardNormal;

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("data")
}

/// Binary iris task built from two of the three species.
pub fn iris_task(a: &str, b: &str) -> Dataset {
    let text = std::fs::read_to_string(data_dir().join("iris.csv")).unwrap();
    let mut lines = text.lines();
    let mut out = String::from(lines.next().unwrap());
    out.push('\n');
    for l in lines.filter(|l| l.ends_with(&format!("Iris-{a}")) || l.ends_with(&format!("Iris-{b}"))) {
        out.push_str(l);
        out.push('\n');
    }
    load_csv(out.as_bytes(), &format!("{a}-vs-{b}"), &LabelColumn::Last).unwrap()
}

pub const IRIS_TASKS: [(&str, &str); 3] = [
    ("setosa", "versicolor"),
    ("setosa", "virginica"),
    ("versicolor", "virginica"),
];

pub fn normal_rows(n: usize, mean: &[f64], chol: &[f64], rng: &mut impl Rng) -> Vec<Vec<f64>> {
    let d = mean.len();
    (0..n)
        .map(|_| {
            let e: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
            (0..d)
                .map(|i| mean[i] + (0..=i).map(|j| chol[i * d + j] * e[j]).sum::<f64>())
                .collect()
        })
        .collect()
}

/// Two Gaussian classes, class 2 shifted by `shift` along every axis and
/// stretched along the first.
pub fn gaussian_task(n1: usize, n2: usize, d: usize, shift: f64, s: u64) -> Dataset {
    let mut rng = seed::rng(s);
    let eye: Vec<f64> = (0..d * d).map(|k| if k % (d + 1) == 0 { 1.0 } else { 0.0 }).collect();
    let mut stretched = eye.clone();
    stretched[0] = 2.0;
    if d > 1 {
        stretched[d] = 0.8;
    }
    let mut rows = normal_rows(n1, &vec![0.0; d], &eye, &mut rng);
    rows.extend(normal_rows(n2, &vec![shift; d], &stretched, &mut rng));
    let labels = (0..n1 + n2).map(|i| if i < n1 { Label::One } else { Label::Two }).collect();
    Dataset::new("gauss", Points::from_rows(&rows), labels).unwrap()
}

/// Random affine map with singular values bounded away from zero.
pub fn random_affine(d: usize, s: u64) -> impl Fn(&[f64]) -> Vec<f64> + Clone {
    let mut rng = seed::rng(s);
    let mut a = vec![0.0; d * d];
    loop {
        for v in a.iter_mut() {
            *v = rng.random_range(-2.0..2.0);
        }
        if nalgebra::DMatrix::from_row_slice(d, d, &a).singular_values().min() > 0.2 {
            break;
        }
    }
    let b: Vec<f64> = (0..d).map(|_| rng.random_range(-5.0..5.0)).collect();
    move |z: &[f64]| {
        (0..d)
            .map(|i| (0..d).map(|j| a[i * d + j] * z[j]).sum::<f64>() + b[i])
            .collect()
    }
}
