//! Exact angular comparisons of planar vectors.

use std::cmp::Ordering;

pub fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

pub fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// 0 for polar angles in [0, π), 1 for [π, 2π).
fn half(v: [f64; 2]) -> u8 {
    if v[1] > 0.0 || (v[1] == 0.0 && v[0] > 0.0) {
        0
    } else {
        1
    }
}

/// Sort key of a nonzero vector, non-decreasing in its polar angle in
/// [0, 2π). Within a half-turn the key is `−x/y` of the vector folded into
/// the upper half-plane; being one correctly rounded division, it is equal
/// for positive multiples of the same vector, and unlike a cross-product
/// comparison it always yields a total order.
pub fn angle_key(v: [f64; 2]) -> (u8, f64) {
    let h = half(v);
    let w = if h == 0 { v } else { [-v[0], -v[1]] };
    let s = if w[1] == 0.0 {
        f64::NEG_INFINITY
    } else {
        -w[0] / w[1]
    };
    (h, s + 0.0)
}

/// Key of the vector rotated by π.
pub fn opposite_key(k: (u8, f64)) -> (u8, f64) {
    (1 - k.0, k.1)
}

pub fn key_cmp(a: (u8, f64), b: (u8, f64)) -> Ordering {
    a.0.cmp(&b.0).then(a.1.total_cmp(&b.1))
}

#[cfg(test)]
fn angle_cmp(a: [f64; 2], b: [f64; 2]) -> Ordering {
    key_cmp(angle_key(a), angle_key(b))
}
