//! Location/scatter estimation: classical moments and the minimum
//! covariance determinant (FAST-MCD style C-steps from random starts).

use rand::seq::index::sample;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::data::Points;
use crate::linalg::{self, Matrix, Vector};
use crate::{seed, Error, Result};

/// Default number of random starts for the MCD.
pub const DEFAULT_MCD_STARTS: usize = 500;
/// Default h-fraction (outlyingness parameter) for the MCD.
pub const DEFAULT_MCD_FRACTION: f64 = 0.75;

/// How a [`LocationScatter`] was estimated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EstimatorKind {
    #[default]
    Moment,
    Mcd {
        fraction: f64,
        #[serde(default)]
        reweight: bool,
    },
}

impl EstimatorKind {
    pub fn mcd(fraction: f64) -> Self {
        EstimatorKind::Mcd {
            fraction,
            reweight: false,
        }
    }

    /// Estimates location and scatter of `pts` with this estimator.
    pub fn estimate(&self, pts: &Points, seed: u64) -> Result<LocationScatter> {
        match *self {
            EstimatorKind::Moment => moment_estimates(pts),
            EstimatorKind::Mcd { fraction, reweight } => {
                let opts = McdOptions {
                    fraction,
                    reweight,
                    ..McdOptions::default()
                };
                Ok(mcd_estimates(pts, &opts, seed)?.estimate)
            }
        }
    }
}

/// Center and symmetric positive-definite scatter, with the derived
/// precision matrix and whitening root cached.
#[derive(Clone, Debug)]
pub struct LocationScatter {
    center: Vector,
    scatter: Matrix,
    kind: EstimatorKind,
    precision: Matrix,
    whitener: Matrix,
    log_det: f64,
}

impl LocationScatter {
    pub fn new(center: Vector, scatter: Matrix, kind: EstimatorKind) -> Result<Self> {
        if center.len() != scatter.nrows() || !scatter.is_square() {
            return Err(Error::DimensionMismatch {
                expected: center.len(),
                got: scatter.nrows(),
            });
        }
        let scatter = linalg::symmetrize(scatter);
        let eig = linalg::spd_eigen(&scatter).map_err(|_| Error::SingularCovariance(None))?;
        let vecs = &eig.eigenvectors;
        let inv = Matrix::from_diagonal(&eig.eigenvalues.map(|v| 1.0 / v));
        let inv_root = Matrix::from_diagonal(&eig.eigenvalues.map(|v| 1.0 / v.sqrt()));
        let precision = linalg::symmetrize(vecs * inv * vecs.transpose());
        let whitener = linalg::symmetrize(vecs * inv_root * vecs.transpose());
        let log_det = eig.eigenvalues.iter().map(|v| v.ln()).sum();
        Ok(LocationScatter {
            center,
            scatter,
            kind,
            precision,
            whitener,
            log_det,
        })
    }

    pub fn center(&self) -> &Vector {
        &self.center
    }

    pub fn scatter(&self) -> &Matrix {
        &self.scatter
    }

    pub fn precision(&self) -> &Matrix {
        &self.precision
    }

    /// Symmetric `Σ^{-1/2}`.
    pub fn whitener(&self) -> &Matrix {
        &self.whitener
    }

    pub fn log_det(&self) -> f64 {
        self.log_det
    }

    pub fn kind(&self) -> EstimatorKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// `(z − μ)' Σ^{-1} (z − μ)`.
    pub fn squared_distance(&self, z: &[f64]) -> f64 {
        linalg::quad_form(&self.precision, z, &self.center)
    }
}

#[derive(Serialize, Deserialize)]
struct LocationScatterRepr {
    #[serde(flatten)]
    kind: EstimatorKind,
    #[serde(with = "linalg::serde_vector")]
    center: Vector,
    #[serde(with = "linalg::serde_rows")]
    scatter: Matrix,
}

impl Serialize for LocationScatter {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LocationScatterRepr {
            kind: self.kind,
            center: self.center.clone(),
            scatter: self.scatter.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LocationScatter {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = LocationScatterRepr::deserialize(d)?;
        LocationScatter::new(r.center, r.scatter, r.kind).map_err(serde::de::Error::custom)
    }
}

/// Sample mean and covariance (divisor `m − 1`).
pub fn moment_estimates(pts: &Points) -> Result<LocationScatter> {
    let d = pts.dim();
    if pts.len() < d + 1 {
        return Err(Error::SingularCovariance(Some(format!(
            "{} points in dimension {d}",
            pts.len()
        ))));
    }
    let (mu, cov) = linalg::covariance(pts);
    LocationScatter::new(mu, cov, EstimatorKind::Moment)
}

/// Symmetric positive-definite `W` with `W Σ W = I`.
pub fn whitening_root(scatter: &Matrix) -> Result<Matrix> {
    let eig = linalg::spd_eigen(scatter)?;
    let inv_root = Matrix::from_diagonal(&eig.eigenvalues.map(|v| 1.0 / v.sqrt()));
    Ok(linalg::symmetrize(
        &eig.eigenvectors * inv_root * eig.eigenvectors.transpose(),
    ))
}

#[derive(Clone, Debug)]
pub struct McdOptions {
    pub fraction: f64,
    pub starts: usize,
    pub reweight: bool,
    /// Keep the log-determinant path of every start.
    pub record_paths: bool,
    pub max_csteps: usize,
}

impl Default for McdOptions {
    fn default() -> Self {
        McdOptions {
            fraction: DEFAULT_MCD_FRACTION,
            starts: DEFAULT_MCD_STARTS,
            reweight: false,
            record_paths: false,
            max_csteps: 500,
        }
    }
}

#[derive(Clone, Debug)]
pub struct McdFit {
    pub estimate: LocationScatter,
    /// Sorted indices of the optimal h-subset.
    pub subset: Vec<usize>,
    /// Log-determinant of the raw (uncorrected) covariance of `subset`.
    pub log_det: f64,
    /// Log-determinants after each C-step, per non-degenerate start.
    pub paths: Vec<Vec<f64>>,
}

/// `h = ⌈fraction · m⌉`.
pub fn mcd_subset_size(m: usize, fraction: f64) -> usize {
    ((fraction * m as f64).ceil() as usize).min(m)
}

/// Fisher-consistency factor for the covariance of an h-subset at the
/// normal model: `α / F_{χ²_{d+2}}(χ²_{d}(α))` with `α = h/m`.
pub fn mcd_consistency_factor(alpha: f64, d: usize) -> f64 {
    if alpha >= 1.0 {
        return 1.0;
    }
    let q = ChiSquared::new(d as f64).unwrap().inverse_cdf(alpha);
    alpha / ChiSquared::new(d as f64 + 2.0).unwrap().cdf(q)
}

struct Subset {
    idx: Vec<usize>,
    mean: Vector,
    cov: Matrix,
    log_det: f64,
}

fn subset_stats(pts: &Points, idx: &[usize]) -> Option<Subset> {
    let sub = pts.select(idx);
    let (mean, cov) = linalg::covariance(&sub);
    let log_det = linalg::log_det_or_neg_inf(&cov);
    if !log_det.is_finite() {
        return None;
    }
    Some(Subset {
        idx: idx.to_vec(),
        mean,
        cov,
        log_det,
    })
}

/// Indices of the `h` points closest to `s` in Mahalanobis distance, sorted.
/// Distance ties are broken by index.
fn closest(pts: &Points, s: &Subset, h: usize) -> Option<Vec<usize>> {
    let (prec, _) = linalg::spd_inverse(&s.cov).ok()?;
    let mut dist: Vec<(f64, usize)> = pts
        .rows()
        .enumerate()
        .map(|(i, r)| (linalg::quad_form(&prec, r, &s.mean), i))
        .collect();
    dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut idx: Vec<usize> = dist[..h].iter().map(|&(_, i)| i).collect();
    idx.sort_unstable();
    Some(idx)
}

/// Minimum covariance determinant estimate.
///
/// Each start draws a random `(d+1)`-subset (extended by random points while
/// its covariance is singular), takes the `h` closest points and iterates
/// C-steps until the subset is stable or the log-determinant stops
/// decreasing by more than `1e-12`. The best h-subset over all starts wins,
/// ties going to the lowest start index.
pub fn mcd_estimates(pts: &Points, opts: &McdOptions, seed: u64) -> Result<McdFit> {
    let m = pts.len();
    let d = pts.dim();
    if !(opts.fraction > 0.0 && opts.fraction <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "MCD fraction must lie in (0, 1], got {}",
            opts.fraction
        )));
    }
    let h = mcd_subset_size(m, opts.fraction);
    if h < d + 1 {
        return Err(Error::InvalidArgument(format!(
            "MCD subset size {h} is below d + 1 = {}",
            d + 1
        )));
    }

    let mut best: Option<Subset> = None;
    let mut paths = Vec::new();
    if h == m {
        best = subset_stats(pts, &(0..m).collect::<Vec<_>>());
    } else {
        for start in 0..opts.starts {
            let mut rng = seed::rng(seed::derive(seed, start as u64));
            let Some((fin, path)) = run_start(pts, h, opts.max_csteps, &mut rng) else {
                continue;
            };
            if opts.record_paths {
                paths.push(path);
            }
            if best.as_ref().is_none_or(|b| fin.log_det < b.log_det) {
                best = Some(fin);
            }
        }
    }
    let best = best.ok_or(Error::DegenerateSubsets)?;
    let alpha = h as f64 / m as f64;
    let factor = mcd_consistency_factor(alpha, d);
    let kind = EstimatorKind::Mcd {
        fraction: opts.fraction,
        reweight: opts.reweight,
    };
    let raw = LocationScatter::new(best.mean.clone(), &best.cov * factor, kind)?;
    let estimate = if opts.reweight {
        reweight(pts, &raw, kind)?
    } else {
        raw
    };
    Ok(McdFit {
        estimate,
        subset: best.idx,
        log_det: best.log_det,
        paths,
    })
}

fn run_start(
    pts: &Points,
    h: usize,
    max_csteps: usize,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Option<(Subset, Vec<f64>)> {
    let m = pts.len();
    let d = pts.dim();
    let perm = sample(rng, m, m).into_vec();
    let mut size = d + 1;
    let init = loop {
        let mut idx = perm[..size].to_vec();
        idx.sort_unstable();
        if let Some(s) = subset_stats(pts, &idx) {
            break s;
        }
        size += 1;
        if size > h {
            return None;
        }
    };
    let mut cur = subset_stats(pts, &closest(pts, &init, h)?)?;
    let mut path = vec![cur.log_det];
    for _ in 0..max_csteps {
        let next_idx = closest(pts, &cur, h)?;
        if next_idx == cur.idx {
            break;
        }
        let next = subset_stats(pts, &next_idx)?;
        let improved = next.log_det < cur.log_det;
        let small = (cur.log_det - next.log_det).abs() < 1e-12;
        path.push(next.log_det);
        if !improved {
            break;
        }
        cur = next;
        if small {
            break;
        }
    }
    Some((cur, path))
}

fn reweight(pts: &Points, raw: &LocationScatter, kind: EstimatorKind) -> Result<LocationScatter> {
    let d = pts.dim();
    let q = 0.975;
    let cut = ChiSquared::new(d as f64).unwrap().inverse_cdf(q);
    let keep: Vec<usize> = (0..pts.len())
        .filter(|&i| raw.squared_distance(pts.row(i)) <= cut)
        .collect();
    let sub = pts.select(&keep);
    if sub.len() < d + 1 {
        return Err(Error::DegenerateSubsets);
    }
    let (mu, cov) = linalg::covariance(&sub);
    let factor = mcd_consistency_factor(keep.len() as f64 / pts.len() as f64, d);
    LocationScatter::new(mu, cov * factor, kind)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn gaussian(m: usize, d: usize, seed: u64) -> Points {
        let mut rng = seed::rng(seed);
        let data: Vec<f64> = (0..m * d).map(|_| rng.sample(StandardNormal)).collect();
        Points::new(data, d)
    }

    #[test]
    fn square_moments() {
        let pts = Points::from_rows(&[[0.0, 0.0], [2.0, 0.0], [0.0, 2.0], [2.0, 2.0]]);
        let est = moment_estimates(&pts).unwrap();
        assert_eq!(est.center().as_slice(), &[1.0, 1.0]);
        let s = est.scatter();
        assert!((s[(0, 0)] - 4.0 / 3.0).abs() < 1e-14);
        assert!((s[(1, 1)] - 4.0 / 3.0).abs() < 1e-14);
        assert!(s[(0, 1)].abs() < 1e-14);
    }

    #[test]
    fn too_few_points_is_singular() {
        let pts = Points::from_rows(&[[0.0, 0.0], [1.0, 3.0]]);
        assert!(matches!(
            moment_estimates(&pts),
            Err(Error::SingularCovariance(_))
        ));
    }

    #[test]
    fn two_pass_oracle() {
        let pts = gaussian(50, 3, 11);
        let est = moment_estimates(&pts).unwrap();
        let mut mean = [0.0; 3];
        for r in pts.rows() {
            for j in 0..3 {
                mean[j] += r[j] / 50.0;
            }
        }
        for j in 0..3 {
            assert!((mean[j] - est.center()[j]).abs() < 1e-12);
            for k in 0..3 {
                let c: f64 = pts
                    .rows()
                    .map(|r| (r[j] - mean[j]) * (r[k] - mean[k]))
                    .sum::<f64>()
                    / 49.0;
                assert!((c - est.scatter()[(j, k)]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn whitening_identity_and_diagonal() {
        let w = whitening_root(&Matrix::identity(3, 3)).unwrap();
        assert!((w - Matrix::identity(3, 3)).abs().max() < 1e-15);
        let s = Matrix::from_diagonal(&Vector::from_vec(vec![4.0, 9.0]));
        let w = whitening_root(&s).unwrap();
        assert!((w[(0, 0)] - 0.5).abs() < 1e-15);
        assert!((w[(1, 1)] - 1.0 / 3.0).abs() < 1e-15);
        assert!(w[(0, 1)].abs() < 1e-15);
    }

    #[test]
    fn whitening_residual_random_spd() {
        let mut rng = seed::rng(3);
        let a = Matrix::from_fn(3, 3, |_, _| rng.random_range(-1.0..1.0));
        let s = &a * a.transpose() + Matrix::identity(3, 3) * 0.1;
        let w = whitening_root(&s).unwrap();
        let r = &w * &s * &w - Matrix::identity(3, 3);
        assert!(r.abs().max() < 1e-10);
    }

    #[test]
    fn whitening_rejects_indefinite() {
        let s = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(whitening_root(&s).is_err());
    }

    #[test]
    fn full_subset_equals_moments() {
        let pts = gaussian(30, 2, 5);
        let opts = McdOptions {
            fraction: 1.0,
            ..McdOptions::default()
        };
        let fit = mcd_estimates(&pts, &opts, 0).unwrap();
        let mom = moment_estimates(&pts).unwrap();
        assert!((fit.estimate.center() - mom.center()).abs().max() < 1e-14);
        assert!((fit.estimate.scatter() - mom.scatter()).abs().max() < 1e-14);
    }

    #[test]
    fn consistency_factor_exceeds_one() {
        let c = mcd_consistency_factor(0.75, 2);
        assert!(c > 1.0 && c < 3.0, "{c}");
        assert_eq!(mcd_consistency_factor(1.0, 4), 1.0);
    }

    #[test]
    fn mcd_is_deterministic() {
        let pts = gaussian(40, 3, 8);
        let opts = McdOptions {
            starts: 50,
            ..McdOptions::default()
        };
        let a = mcd_estimates(&pts, &opts, 42).unwrap();
        let b = mcd_estimates(&pts, &opts, 42).unwrap();
        assert_eq!(a.subset, b.subset);
        assert_eq!(a.estimate.scatter(), b.estimate.scatter());
    }

    #[test]
    fn mcd_resists_contamination() {
        // 80 clean points around the origin, 20 far at (50, 50).
        let clean = gaussian(80, 2, 21);
        let mut pts = clean.clone();
        let mut rng = seed::rng(99);
        for _ in 0..20 {
            let e: f64 = rng.sample(StandardNormal);
            let f: f64 = rng.sample(StandardNormal);
            pts.push(&[50.0 + e, 50.0 + f]);
        }
        let clean_mean = linalg::mean(&clean);
        let mom = moment_estimates(&pts).unwrap();
        let opts = McdOptions {
            starts: 100,
            ..McdOptions::default()
        };
        let mcd = mcd_estimates(&pts, &opts, 1).unwrap();
        assert!((mom.center() - &clean_mean).norm() > 1.0);
        assert!((mcd.estimate.center() - &clean_mean).norm() < 0.3);
        assert!(mcd.subset.iter().all(|&i| i < 80));
    }

    #[test]
    fn reweighted_variant_runs() {
        let pts = gaussian(60, 2, 4);
        let opts = McdOptions {
            starts: 30,
            reweight: true,
            ..McdOptions::default()
        };
        let fit = mcd_estimates(&pts, &opts, 0).unwrap();
        assert!(matches!(
            fit.estimate.kind(),
            EstimatorKind::Mcd { reweight: true, .. }
        ));
    }

    #[test]
    fn serde_round_trip() {
        let pts = gaussian(20, 2, 1);
        let est = moment_estimates(&pts).unwrap();
        let js = serde_json::to_string(&est).unwrap();
        let back: LocationScatter = serde_json::from_str(&js).unwrap();
        assert_eq!(back.center(), est.center());
        assert!((back.precision() - est.precision()).abs().max() < 1e-12);
    }
}
