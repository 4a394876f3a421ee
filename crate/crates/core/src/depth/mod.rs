//! Depth functions: Mahalanobis, spatial, random projection and random
//! Tukey depth, plus an exact bivariate Tukey depth for validation.

mod contour;
mod directions;
mod exact;
mod projected;

use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use contour::{depth_grid, GridSpec};
pub use directions::{generate_directions, DirectionSet};
pub use exact::{exact_tukey_depth_2d, exact_tukey_depth_2d_brute};
pub use projected::{
    build_projected_class, mad_sorted, median_sorted, projection_depth_random,
    random_tukey_depth, random_tukey_depth_naive, univariate_tukey_depth, ProjectedClass,
};

use crate::data::{Dataset, Label, Points};
use crate::estimators::{EstimatorKind, LocationScatter};
use crate::{seed, Error, Result};

/// Default number of random directions for the random Tukey depth.
pub const DEFAULT_TUKEY_DIRECTIONS: usize = 10_000;
/// The two direction-count presets for projection depth.
pub const PROJECTION_DIRECTION_PRESETS: [usize; 2] = [10_000, 100_000];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DepthNotion {
    Mahalanobis,
    Spatial,
    Projection,
    Tukey,
}

impl DepthNotion {
    /// Whether the notion is evaluated over random directions.
    pub fn uses_directions(self) -> bool {
        matches!(self, DepthNotion::Projection | DepthNotion::Tukey)
    }

    /// Whether the notion needs a location/scatter estimate.
    pub fn uses_estimator(self) -> bool {
        matches!(self, DepthNotion::Mahalanobis | DepthNotion::Spatial)
    }

    /// Whether the depth vanishes outside the convex hull of the class.
    pub fn vanishes_outside_hull(self) -> bool {
        self == DepthNotion::Tukey
    }

    pub fn name(self) -> &'static str {
        match self {
            DepthNotion::Mahalanobis => "mahalanobis",
            DepthNotion::Spatial => "spatial",
            DepthNotion::Projection => "projection",
            DepthNotion::Tukey => "tukey",
        }
    }
}

impl std::str::FromStr for DepthNotion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mahalanobis" | "mah" => Ok(DepthNotion::Mahalanobis),
            "spatial" | "spa" => Ok(DepthNotion::Spatial),
            "projection" | "prj" => Ok(DepthNotion::Projection),
            "tukey" | "halfspace" | "hs" => Ok(DepthNotion::Tukey),
            _ => Err(Error::InvalidArgument(format!("unknown depth notion `{s}`"))),
        }
    }
}

impl std::fmt::Display for DepthNotion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepthConfig {
    pub notion: DepthNotion,
    /// Used by Mahalanobis and spatial depth.
    #[serde(default)]
    pub estimator: EstimatorKind,
    /// Used by projection and Tukey depth.
    #[serde(default = "default_directions")]
    pub directions: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_directions() -> usize {
    DEFAULT_TUKEY_DIRECTIONS
}

impl DepthConfig {
    pub fn new(notion: DepthNotion) -> Self {
        DepthConfig {
            notion,
            estimator: EstimatorKind::Moment,
            directions: DEFAULT_TUKEY_DIRECTIONS,
            seed: 0,
        }
    }

    pub fn mahalanobis(estimator: EstimatorKind) -> Self {
        DepthConfig {
            estimator,
            ..Self::new(DepthNotion::Mahalanobis)
        }
    }

    pub fn spatial(estimator: EstimatorKind) -> Self {
        DepthConfig {
            estimator,
            ..Self::new(DepthNotion::Spatial)
        }
    }

    pub fn projection(directions: usize) -> Self {
        DepthConfig {
            directions,
            ..Self::new(DepthNotion::Projection)
        }
    }

    pub fn tukey(directions: usize) -> Self {
        DepthConfig {
            directions,
            ..Self::new(DepthNotion::Tukey)
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.notion.uses_directions() && self.directions == 0 {
            return Err(Error::InvalidArgument(
                "the number of directions must be at least 1".into(),
            ));
        }
        if let EstimatorKind::Mcd { fraction, .. } = self.estimator {
            if !(fraction > 0.0 && fraction <= 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "MCD fraction must lie in (0, 1], got {fraction}"
                )));
            }
        }
        Ok(())
    }

    /// Short human-readable tag, e.g. `tukey(k=1000)` or `spatial(mcd 0.75)`.
    pub fn label(&self) -> String {
        match self.notion {
            DepthNotion::Mahalanobis | DepthNotion::Spatial => match self.estimator {
                EstimatorKind::Moment => format!("{}(moment)", self.notion),
                EstimatorKind::Mcd { fraction, .. } => format!("{}(mcd {fraction})", self.notion),
            },
            _ => format!("{}(k={})", self.notion, self.directions),
        }
    }
}

/// `(1 + (z − μ)' Σ^{-1} (z − μ))^{-1}`.
pub fn mahalanobis_depth(z: &[f64], est: &LocationScatter) -> f64 {
    1.0 / (1.0 + est.squared_distance(z))
}

/// `1 − ‖mean_i v(W(z − x_i))‖` with `v(y) = y/‖y‖`, `v(0) = 0` and `W` the
/// whitening root of the estimated scatter.
pub fn spatial_depth(z: &[f64], pts: &Points, est: &LocationScatter) -> f64 {
    SpatialClass::new(pts, est).depth(z)
}

/// A class whitened once for repeated spatial-depth queries.
#[derive(Clone, Debug)]
pub struct SpatialClass {
    whitened: Points,
    whitener: crate::linalg::Matrix,
}

impl SpatialClass {
    pub fn new(pts: &Points, est: &LocationScatter) -> Self {
        let w = est.whitener().clone();
        let mut whitened = Points::empty(pts.dim());
        for x in pts.rows() {
            whitened.push(&apply(&w, x));
        }
        SpatialClass {
            whitened,
            whitener: w,
        }
    }

    pub fn depth(&self, z: &[f64]) -> f64 {
        let d = self.whitened.dim();
        let wz = apply(&self.whitener, z);
        let mut acc = vec![0.0; d];
        let mut diff = vec![0.0; d];
        for wx in self.whitened.rows() {
            let mut norm2 = 0.0;
            for ((o, a), b) in diff.iter_mut().zip(&wz).zip(wx) {
                *o = a - b;
                norm2 += *o * *o;
            }
            if norm2 > 0.0 {
                let inv = 1.0 / norm2.sqrt();
                for (a, o) in acc.iter_mut().zip(&diff) {
                    *a += o * inv;
                }
            }
        }
        let m = self.whitened.len() as f64;
        let norm = acc.iter().map(|a| (a / m) * (a / m)).sum::<f64>().sqrt();
        (1.0 - norm).clamp(0.0, 1.0)
    }
}

fn apply(w: &crate::linalg::Matrix, x: &[f64]) -> Vec<f64> {
    let d = x.len();
    (0..d)
        .map(|r| (0..d).map(|c| w[(r, c)] * x[c]).sum())
        .collect()
}

/// Depth with respect to one training class, with precomputed state.
#[derive(Clone, Debug)]
pub enum ClassDepth {
    Mahalanobis(LocationScatter),
    Spatial(LocationScatter, SpatialClass),
    Projection(ProjectedClass),
    Tukey(ProjectedClass),
}

impl ClassDepth {
    pub fn estimate(&self) -> Option<&LocationScatter> {
        match self {
            ClassDepth::Mahalanobis(e) | ClassDepth::Spatial(e, _) => Some(e),
            _ => None,
        }
    }

    /// Depth of `z`; `zproj` must hold the projections of `z` onto the
    /// shared directions for the direction-based notions.
    fn depth_with(&self, z: &[f64], zproj: &[f64]) -> f64 {
        match self {
            ClassDepth::Mahalanobis(e) => mahalanobis_depth(z, e),
            ClassDepth::Spatial(_, s) => s.depth(z),
            ClassDepth::Projection(p) => p.projection_depth_projected(zproj),
            ClassDepth::Tukey(p) => p.tukey_depth_projected(zproj),
        }
    }
}

/// The two-class depth map `z ↦ (D(z|X₁), D(z|X₂))` of a training set.
///
/// One direction set is shared by both classes and reused for every query.
#[derive(Clone, Debug)]
pub struct DepthSpace {
    config: DepthConfig,
    classes: [Points; 2],
    dirs: Option<Arc<DirectionSet>>,
    state: [ClassDepth; 2],
}

/// Seed of the direction set for a depth configuration.
pub fn directions_seed(config: &DepthConfig) -> u64 {
    seed::derive(config.seed, seed::stream::DIRECTIONS)
}

/// Seed of the MCD run for one class.
pub fn estimator_seed(config: &DepthConfig, label: Label) -> u64 {
    seed::derive(
        seed::derive(config.seed, seed::stream::MCD),
        label.index() as u64,
    )
}

impl DepthSpace {
    pub fn fit(ds: &Dataset, config: &DepthConfig) -> Result<Self> {
        config.validate()?;
        let classes = [ds.class_points(Label::One), ds.class_points(Label::Two)];
        for l in Label::BOTH {
            if classes[l.index()].is_empty() {
                return Err(Error::EmptyClass(l.as_u8()));
            }
        }
        let estimates = if config.notion.uses_estimator() {
            let e1 = config
                .estimator
                .estimate(&classes[0], estimator_seed(config, Label::One))
                .map_err(|e| class_error(e, Label::One))?;
            let e2 = config
                .estimator
                .estimate(&classes[1], estimator_seed(config, Label::Two))
                .map_err(|e| class_error(e, Label::Two))?;
            Some([e1, e2])
        } else {
            None
        };
        Self::assemble(*config, classes, estimates)
    }

    fn assemble(
        config: DepthConfig,
        classes: [Points; 2],
        estimates: Option<[LocationScatter; 2]>,
    ) -> Result<Self> {
        let d = classes[0].dim();
        let (dirs, state) = match config.notion {
            DepthNotion::Mahalanobis | DepthNotion::Spatial => {
                let [e1, e2] = estimates.ok_or_else(|| {
                    Error::InvalidArgument("missing location/scatter estimates".into())
                })?;
                for e in [&e1, &e2] {
                    if e.dim() != d {
                        return Err(Error::DimensionMismatch {
                            expected: d,
                            got: e.dim(),
                        });
                    }
                }
                let state = if config.notion == DepthNotion::Mahalanobis {
                    [ClassDepth::Mahalanobis(e1), ClassDepth::Mahalanobis(e2)]
                } else {
                    let s1 = SpatialClass::new(&classes[0], &e1);
                    let s2 = SpatialClass::new(&classes[1], &e2);
                    [ClassDepth::Spatial(e1, s1), ClassDepth::Spatial(e2, s2)]
                };
                (None, state)
            }
            DepthNotion::Projection | DepthNotion::Tukey => {
                let dirs = Arc::new(generate_directions(
                    d,
                    config.directions,
                    directions_seed(&config),
                ));
                let p1 = build_projected_class(&classes[0], dirs.clone());
                let p2 = build_projected_class(&classes[1], dirs.clone());
                let state = if config.notion == DepthNotion::Tukey {
                    [ClassDepth::Tukey(p1), ClassDepth::Tukey(p2)]
                } else {
                    [ClassDepth::Projection(p1), ClassDepth::Projection(p2)]
                };
                (Some(dirs), state)
            }
        };
        Ok(DepthSpace {
            config,
            classes,
            dirs,
            state,
        })
    }

    pub fn config(&self) -> &DepthConfig {
        &self.config
    }

    pub fn dim(&self) -> usize {
        self.classes[0].dim()
    }

    pub fn class_points(&self, label: Label) -> &Points {
        &self.classes[label.index()]
    }

    pub fn class_depth(&self, label: Label) -> &ClassDepth {
        &self.state[label.index()]
    }

    pub fn directions(&self) -> Option<&Arc<DirectionSet>> {
        self.dirs.as_ref()
    }

    /// `(D(z|X₁), D(z|X₂))`.
    pub fn depths(&self, z: &[f64]) -> [f64; 2] {
        let mut buf = Vec::new();
        self.depths_with_buffer(z, &mut buf)
    }

    /// As [`DepthSpace::depths`], reusing `buf` for the projections.
    pub fn depths_with_buffer(&self, z: &[f64], buf: &mut Vec<f64>) -> [f64; 2] {
        if let Some(dirs) = &self.dirs {
            dirs.project_into(z, buf);
        }
        [
            self.state[0].depth_with(z, buf),
            self.state[1].depth_with(z, buf),
        ]
    }

    /// Depth-plot coordinates of every row of `pts`.
    pub fn depth_plot(&self, pts: &Points) -> Vec<[f64; 2]> {
        use rayon::prelude::*;
        if let [ClassDepth::Tukey(a), ClassDepth::Tukey(b)] = &self.state {
            const CHUNK: usize = 512;
            let idx: Vec<usize> = (0..pts.len()).collect();
            return idx
                .par_chunks(CHUNK)
                .flat_map_iter(|c| {
                    let q = pts.select(c);
                    let (da, db) = (a.tukey_depths(&q), b.tukey_depths(&q));
                    da.into_iter().zip(db).map(|(x, y)| [x, y])
                })
                .collect();
        }
        (0..pts.len())
            .into_par_iter()
            .map_init(Vec::new, |buf, i| self.depths_with_buffer(pts.row(i), buf))
            .collect()
    }
}

fn class_error(e: Error, label: Label) -> Error {
    match e {
        Error::SingularCovariance(None) => {
            Error::SingularCovariance(Some(format!("class {}", label.as_u8())))
        }
        Error::SingularCovariance(Some(msg)) => {
            Error::SingularCovariance(Some(format!("class {}: {msg}", label.as_u8())))
        }
        other => other,
    }
}

#[derive(Serialize, Deserialize)]
struct DepthSpaceRepr {
    config: DepthConfig,
    class1: Points,
    class2: Points,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    estimates: Option<[LocationScatter; 2]>,
}

impl Serialize for DepthSpace {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let estimates = match (self.state[0].estimate(), self.state[1].estimate()) {
            (Some(a), Some(b)) => Some([a.clone(), b.clone()]),
            _ => None,
        };
        DepthSpaceRepr {
            config: self.config,
            class1: self.classes[0].clone(),
            class2: self.classes[1].clone(),
            estimates,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DepthSpace {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = DepthSpaceRepr::deserialize(d)?;
        DepthSpace::assemble(r.config, [r.class1, r.class2], r.estimates)
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::moment_estimates;
    use crate::linalg::{Matrix, Vector};
    use rand::Rng;

    fn identity_est(d: usize) -> LocationScatter {
        LocationScatter::new(Vector::zeros(d), Matrix::identity(d, d), EstimatorKind::Moment)
            .unwrap()
    }

    fn random_points(m: usize, d: usize, s: u64) -> Points {
        let mut rng = seed::rng(s);
        let rows: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..d).map(|_| rng.random_range(-2.0..2.0)).collect())
            .collect();
        Points::from_rows(&rows)
    }

    #[test]
    fn mahalanobis_examples() {
        let e = identity_est(2);
        assert_eq!(mahalanobis_depth(&[0.0, 0.0], &e), 1.0);
        assert_eq!(mahalanobis_depth(&[1.0, 0.0], &e), 0.5);
    }

    #[test]
    fn mahalanobis_matches_explicit_inverse() {
        let pts = random_points(30, 3, 2);
        let e = moment_estimates(&pts).unwrap();
        let inv = e.scatter().clone().try_inverse().unwrap();
        let z = Vector::from_vec(vec![0.3, -1.0, 2.0]);
        let diff = &z - e.center();
        let q = (diff.transpose() * inv * &diff)[(0, 0)];
        let expect = 1.0 / (1.0 + q);
        assert!((mahalanobis_depth(z.as_slice(), &e) - expect).abs() < 1e-12);
    }

    #[test]
    fn spatial_examples() {
        let e = identity_est(2);
        let pts = Points::from_rows(&[[-1.0, 0.0], [1.0, 0.0]]);
        assert!((spatial_depth(&[0.0, 0.0], &pts, &e) - 1.0).abs() < 1e-15);
        let lone = Points::from_rows(&[[3.0, 4.0]]);
        assert_eq!(spatial_depth(&[3.0, 4.0], &lone, &e), 1.0);
        let pts = random_points(40, 2, 3);
        assert!(spatial_depth(&[1e6, 0.0], &pts, &e) < 1e-3);
    }

    #[test]
    fn projection_depth_nested_directions() {
        let mut rng = seed::rng(9);
        let pts = random_points(60, 2, 8);
        let big = Arc::new(generate_directions(2, 100_000, 4));
        let small = Arc::new(generate_directions(2, 1_000, 4));
        let pb = build_projected_class(&pts, big);
        let ps = build_projected_class(&pts, small);
        for _ in 0..20 {
            let z = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
            assert!(projection_depth_random(&z, &pb) <= projection_depth_random(&z, &ps));
            assert!(random_tukey_depth(&z, &pb) <= random_tukey_depth(&z, &ps));
        }
    }

    #[test]
    fn depth_space_roundtrip() {
        let pts = random_points(40, 2, 5);
        let labels = (0..40).map(|i| Label::from_index(i % 2)).collect();
        let ds = Dataset::new("t", pts.clone(), labels).unwrap();
        for cfg in [
            DepthConfig::mahalanobis(EstimatorKind::Moment),
            DepthConfig::spatial(EstimatorKind::mcd(0.75)),
            DepthConfig::projection(300),
            DepthConfig::tukey(300).with_seed(7),
        ] {
            let space = DepthSpace::fit(&ds, &cfg).unwrap();
            let json = serde_json::to_string(&space).unwrap();
            let back: DepthSpace = serde_json::from_str(&json).unwrap();
            for z in pts.rows() {
                assert_eq!(space.depths(z), back.depths(z));
            }
            let plot = space.depth_plot(&pts);
            for (i, z) in pts.rows().enumerate() {
                assert_eq!(plot[i], space.depths(z));
            }
        }
    }

    #[test]
    fn notion_parsing() {
        assert_eq!("tukey".parse::<DepthNotion>().unwrap(), DepthNotion::Tukey);
        assert_eq!("Spatial".parse::<DepthNotion>().unwrap(), DepthNotion::Spatial);
        assert!("zonoid".parse::<DepthNotion>().is_err());
    }

    #[test]
    fn zero_directions_rejected() {
        assert!(DepthConfig::tukey(0).validate().is_err());
    }
}
