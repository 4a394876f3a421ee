use super::DepthSpace;
use crate::{Error, Result};

/// Rectangular evaluation grid `[x_min, x_max] × [y_min, y_max]` with
/// `nx × ny` nodes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::InvalidArgument("grid needs at least 2 nodes per axis".into()));
        }
        if !(self.x_min < self.x_max && self.y_min < self.y_max) {
            return Err(Error::InvalidArgument("empty grid bounds".into()));
        }
        Ok(())
    }

    pub fn node(&self, i: usize, j: usize) -> [f64; 2] {
        let tx = i as f64 / (self.nx - 1) as f64;
        let ty = j as f64 / (self.ny - 1) as f64;
        [
            self.x_min + tx * (self.x_max - self.x_min),
            self.y_min + ty * (self.y_max - self.y_min),
        ]
    }
}

/// Depths of every grid node w.r.t. both classes as rows `[x, y, d1, d2]`,
/// `x` varying fastest.
pub fn depth_grid(space: &DepthSpace, grid: &GridSpec) -> Result<Vec<[f64; 4]>> {
    use rayon::prelude::*;
    grid.validate()?;
    if space.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: space.dim(),
        });
    }
    Ok((0..grid.nx * grid.ny)
        .into_par_iter()
        .map_init(Vec::new, |buf, idx| {
            let p = grid.node(idx % grid.nx, idx / grid.nx);
            let [d1, d2] = space.depths_with_buffer(&p, buf);
            [p[0], p[1], d1, d2]
        })
        .collect())
}
