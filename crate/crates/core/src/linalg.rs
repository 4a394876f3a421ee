//! Small dense linear-algebra helpers over `nalgebra`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::data::Points;
use crate::{Error, Result};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Eigenvalues below this fraction of the largest one are treated as zero.
pub const RELATIVE_EIGEN_FLOOR: f64 = 1e-12;

/// Column mean of the rows of `points`.
pub fn mean(points: &Points) -> Vector {
    let mut mu = Vector::zeros(points.dim());
    for row in points.rows() {
        for (m, v) in mu.iter_mut().zip(row) {
            *m += v;
        }
    }
    mu / points.len() as f64
}

/// Sum of outer products of the rows centered at `center`.
pub fn scatter_about(points: &Points, center: &Vector) -> Matrix {
    let d = points.dim();
    let mut s = Matrix::zeros(d, d);
    let mut c = Vector::zeros(d);
    for row in points.rows() {
        for j in 0..d {
            c[j] = row[j] - center[j];
        }
        s.ger(1.0, &c, &c, 1.0);
    }
    s
}

/// Sample mean and covariance with divisor `n - 1`.
pub fn covariance(points: &Points) -> (Vector, Matrix) {
    let mu = mean(points);
    let s = scatter_about(points, &mu) / (points.len() as f64 - 1.0);
    (mu, symmetrize(s))
}

pub fn symmetrize(m: Matrix) -> Matrix {
    (&m + m.transpose()) * 0.5
}

/// Eigen-decomposition of a symmetric matrix that must be positive definite.
pub fn spd_eigen(m: &Matrix) -> Result<SymmetricEigen<f64, nalgebra::Dyn>> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularCovariance(Some("non-finite entries".into())));
    }
    let eig = SymmetricEigen::new(m.clone());
    let max = eig.eigenvalues.max();
    let min = eig.eigenvalues.min();
    if max <= 0.0 || min <= RELATIVE_EIGEN_FLOOR * max {
        return Err(Error::NotPositiveDefinite(min));
    }
    Ok(eig)
}

/// Inverse and log-determinant of a symmetric positive-definite matrix.
pub fn spd_inverse(m: &Matrix) -> Result<(Matrix, f64)> {
    let eig = spd_eigen(m)?;
    let inv_vals = eig.eigenvalues.map(|v| 1.0 / v);
    let inv = &eig.eigenvectors * Matrix::from_diagonal(&inv_vals) * eig.eigenvectors.transpose();
    let logdet = eig.eigenvalues.iter().map(|v| v.ln()).sum();
    Ok((symmetrize(inv), logdet))
}

/// Log-determinant of a symmetric matrix, `-inf` when not positive definite.
pub fn log_det_or_neg_inf(m: &Matrix) -> f64 {
    match spd_eigen(m) {
        Ok(eig) => eig.eigenvalues.iter().map(|v| v.ln()).sum(),
        Err(_) => f64::NEG_INFINITY,
    }
}

/// `(x - c)' A (x - c)`.
pub fn quad_form(a: &Matrix, x: &[f64], c: &Vector) -> f64 {
    let d = c.len();
    let mut acc = 0.0;
    for i in 0..d {
        let di = x[i] - c[i];
        let mut row = 0.0;
        for j in 0..d {
            row += a[(i, j)] * (x[j] - c[j]);
        }
        acc += di * row;
    }
    acc
}

/// Row-major (de)serialization for matrices so model files stay readable.
pub mod serde_rows {
    use super::Matrix;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &Matrix, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> = (0..m.nrows())
            .map(|i| m.row(i).iter().copied().collect())
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Matrix, D::Error> {
        let rows: Vec<Vec<f64>> = Vec::deserialize(d)?;
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(serde::de::Error::custom("ragged matrix rows"));
        }
        Ok(Matrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
    }
}

pub mod serde_vector {
    use super::Vector;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Vector, s: S) -> Result<S::Ok, S::Error> {
        v.as_slice().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vector, D::Error> {
        let v: Vec<f64> = Vec::deserialize(d)?;
        Ok(Vector::from_vec(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn covariance_of_square_corners() {
        let m = Points::from_rows(&[vec![0.0, 0.0], vec![2.0, 0.0], vec![0.0, 2.0], vec![2.0, 2.0]]);
        let (mu, s) = covariance(&m);
        assert_eq!(mu.as_slice(), &[1.0, 1.0]);
        assert!((s[(0, 0)] - 4.0 / 3.0).abs() < 1e-15);
        assert!(s[(0, 1)].abs() < 1e-15);
    }

    #[test]
    fn inverse_of_diagonal() {
        let m = Matrix::from_diagonal(&Vector::from_vec(vec![4.0, 9.0]));
        let (inv, logdet) = spd_inverse(&m).unwrap();
        assert!((inv[(0, 0)] - 0.25).abs() < 1e-15);
        assert!((inv[(1, 1)] - 1.0 / 9.0).abs() < 1e-15);
        assert!((logdet - 36f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn singular_rejected() {
        let m = Matrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(spd_inverse(&m).is_err());
    }
}
