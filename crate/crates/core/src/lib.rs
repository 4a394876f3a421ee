//! Depth-based supervised classification for two-class problems.
//!
//! The DDα-classifier maps every observation to its pair of depths with
//! respect to the two training classes and separates the resulting depth
//! plot with the α-procedure, a stepwise search for an origin-through
//! hyperplane in a polynomially extended depth space. Depths that vanish
//! outside the convex hull of a class (the random Tukey depth) leave some
//! points with zero depth in both classes; those *outsiders* are handed to a
//! classical treatment trained in the original space.
//!
//! Module map:
//!
//! * [`data`]: datasets, CSV ingestion and difficulty statistics.
//! * [`estimators`]: moment and MCD location/scatter.
//! * [`depth`]: Mahalanobis, spatial, projection and Tukey depths.
//! * [`alpha`]: the α-procedure in the extended depth space.
//! * [`ddalpha`]: the end-to-end classifier with outsider dispatch.
//! * [`treatments`]: LDA, QDA, KNN, max-Mahalanobis and SVM-simplified.
//! * [`eval`]: leave-one-out evaluation, aggregate indicators and reports.

pub mod alpha;
pub mod data;
pub mod ddalpha;
pub mod depth;
mod error;
pub mod estimators;
pub mod eval;
pub mod linalg;
mod plane;
#[cfg(test)]
mod testutil;
pub mod seed;
pub mod treatments;

pub use error::{Error, Result};

pub use data::{Dataset, DatasetStats, Label};
pub use ddalpha::{DDAlphaConfig, DDAlphaModel, Route};
pub use depth::{DepthConfig, DepthNotion, DirectionSet};
pub use estimators::{EstimatorKind, LocationScatter};
