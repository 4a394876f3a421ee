use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::data::Points;
use crate::seed;

/// A seed-reproducible set of `k` unit vectors on the unit sphere of `R^d`.
///
/// Serialized as `(dim, k, seed)`; the vectors are regenerated on load.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectionSet {
    dirs: Points,
    seed: u64,
}

/// Draws `k` i.i.d. uniform directions as normalized standard Gaussian
/// vectors. A set with the same seed and a smaller `k` is a prefix of this
/// one.
pub fn generate_directions(d: usize, k: usize, seed: u64) -> DirectionSet {
    assert!(d >= 1 && k >= 1, "need d >= 1 and k >= 1");
    let mut rng = seed::rng(seed);
    let mut data = Vec::with_capacity(d * k);
    let mut u = vec![0.0; d];
    for _ in 0..k {
        loop {
            for v in u.iter_mut() {
                *v = rng.sample(StandardNormal);
            }
            let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 1e-150 {
                data.extend(u.iter().map(|v| v / norm));
                break;
            }
        }
    }
    DirectionSet {
        dirs: Points::new(data, d),
        seed,
    }
}

impl DirectionSet {
    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dirs.dim()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn direction(&self, i: usize) -> &[f64] {
        self.dirs.row(i)
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.dirs.rows()
    }

    /// `u_j' z` for every direction `j`.
    pub fn project(&self, z: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        self.project_into(z, &mut out);
        out
    }

    pub fn project_into(&self, z: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(
            self.dirs
                .rows()
                .map(|u| u.iter().zip(z).map(|(a, b)| a * b).sum::<f64>()),
        );
    }
}

impl Serialize for DirectionSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            dim: usize,
            k: usize,
            seed: u64,
        }
        Repr {
            dim: self.dim(),
            k: self.len(),
            seed: self.seed,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DirectionSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            dim: usize,
            k: usize,
            seed: u64,
        }
        let r = Repr::deserialize(d)?;
        if r.dim == 0 || r.k == 0 {
            return Err(serde::de::Error::custom("direction set needs dim >= 1 and k >= 1"));
        }
        Ok(generate_directions(r.dim, r.k, r.seed))
    }
}
