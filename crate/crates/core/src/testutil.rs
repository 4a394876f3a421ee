//! Shared fixtures for unit tests.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::data::{Dataset, Label, Points};
use crate::seed;

/// Two Gaussian classes in `R^d`, class 2 shifted by `shift` along every
/// axis.
pub fn gaussian_task(n1: usize, n2: usize, d: usize, shift: f64, s: u64) -> Dataset {
    let mut rng = seed::rng(s);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (n, l, off) in [(n1, Label::One, 0.0), (n2, Label::Two, shift)] {
        for _ in 0..n {
            let r: Vec<f64> = (0..d)
                .map(|_| rng.sample::<f64, _>(StandardNormal) + off)
                .collect();
            rows.push(r);
            labels.push(l);
        }
    }
    Dataset::new("gauss", Points::from_rows(&rows), labels).unwrap()
}

/// A random well-conditioned affine map `z ↦ Az + b`.
pub fn random_affine(d: usize, s: u64) -> impl Fn(&[f64]) -> Vec<f64> + Clone {
    let mut rng = seed::rng(s);
    let mut a = vec![0.0; d * d];
    loop {
        for v in a.iter_mut() {
            *v = rng.random_range(-2.0..2.0);
        }
        let m = nalgebra::DMatrix::from_row_slice(d, d, &a);
        let sv = m.singular_values();
        if sv.min() > 0.2 {
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
