//! Angular cutoffs φ^l_{l̄} localizing 1 − x·ξ/(t|ξ|) at scale 2^l.

use serde::{Deserialize, Serialize};

use super::dyadic::{chi_band, chi_ge, chi_scaled};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicIndex {
    pub k: i32,
    pub l: i32,
    pub l_bar: i32,
    pub m: i32,
}

impl DyadicIndex {
    /// l̄ = −m − k; l must lie in [l̄, 2].
    pub fn new(k: i32, l: i32, m: i32) -> Result<DyadicIndex> {
        let l_bar = -m - k;
        if l < l_bar || l > 2 {
            return Err(Error::Precondition(format!("l = {l} outside [{l_bar}, 2]")));
        }
        Ok(DyadicIndex { k, l, l_bar, m })
    }

    /// All admissible l for this (k, m).
    pub fn family(k: i32, m: i32) -> Vec<DyadicIndex> {
        let l_bar = -m - k;
        (l_bar.min(2)..=2).map(|l| DyadicIndex { k, l, l_bar: l_bar.min(2), m }).collect()
    }
}

/// 1 − x·ξ/(t|ξ|)
pub fn angular_argument(xi: [f64; 3], x: [f64; 3], t: f64) -> f64 {
    let nxi = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
    1.0 - (x[0] * xi[0] + x[1] * xi[1] + x[2] * xi[2]) / (t * nxi)
}

pub fn angular_cutoff(idx: DyadicIndex, xi: [f64; 3], x: [f64; 3], t: f64) -> Result<f64> {
    if t == 0.0 {
        return Err(Error::Precondition("t = 0".into()));
    }
    if xi == [0.0; 3] {
        return Err(Error::Precondition("xi = 0".into()));
    }
    let a = angular_argument(xi, x, t);
    let (l, lb) = (idx.l, idx.l_bar);
    Ok(if lb >= 2 {
        1.0
    } else if l == lb {
        chi_scaled(lb, a)
    } else if l == 2 {
        chi_ge(2, a)
    } else {
        chi_band(l, a)
    })
}
