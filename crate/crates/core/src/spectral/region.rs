use serde::{Deserialize, Serialize};

use super::field::ScalarField;
use crate::error::{Error, Result};
use crate::par::*;

/// Subsets of a time slice. Cone shells carry the coefficients c_j of their
/// cone radius r = √(Σ c_j x_j²), so membership stays a pure predicate of (t, x).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Region {
    All,
    /// |x| ≤ t − margin
    InteriorCone { margin: f64 },
    /// |x| ≥ t
    ExteriorCone,
    Ball { radius: f64 },
    /// q_min ≤ t − r_i(x) < q_max
    ConeShell { coeffs: [f64; 3], q_min: f64, q_max: f64 },
}

impl Region {
    #[inline]
    pub fn contains(&self, t: f64, x: [f64; 3]) -> bool {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        match *self {
            Region::All => true,
            Region::InteriorCone { margin } => r <= t - margin,
            Region::ExteriorCone => r >= t,
            Region::Ball { radius } => r <= radius,
            Region::ConeShell { coeffs, q_min, q_max } => {
                let ri = (coeffs[0] * x[0] * x[0] + coeffs[1] * x[1] * x[1] + coeffs[2] * x[2] * x[2]).sqrt();
                let q = t - ri;
                q >= q_min && q < q_max
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormKind {
    L2,
    Linf,
}

/// Lattice (trapezoid) norm over a region. Partial sums are formed per x-slab and
/// combined in slab order, so the result does not depend on the thread count.
pub fn norm(f: &ScalarField, weight: Option<&ScalarField>, region: Region, kind: NormKind) -> Result<f64> {
    let grid = *f.grid();
    if let Some(w) = weight {
        f.check_same_grid(w)?;
    }
    let t = f.time();
    let n = grid.n();
    let slab = n * n;
    let parts: Vec<(f64, usize)> = f
        .data()
        .par_chunks(slab)
        .enumerate()
        .map(|(ix, chunk)| {
            let mut acc = 0.0f64;
            let mut count = 0usize;
            for (j, &v) in chunk.iter().enumerate() {
                let idx = ix * slab + j;
                let x = grid.point(idx);
                if !region.contains(t, x) {
                    continue;
                }
                count += 1;
                let w = weight.map_or(1.0, |w| w.data()[idx]);
                match kind {
                    NormKind::L2 => acc += w * v * v,
                    NormKind::Linf => acc = acc.max((w * v).abs()),
                }
            }
            (acc, count)
        })
        .collect();
    let count: usize = parts.iter().map(|p| p.1).sum();
    if count == 0 {
        return Err(Error::EmptyRegion);
    }
    Ok(match kind {
        NormKind::L2 => (parts.iter().map(|p| p.0).sum::<f64>() * grid.cell_volume()).sqrt(),
        NormKind::Linf => parts.iter().fold(0.0, |m, p| m.max(p.0)),
    })
}

/// Lattice integral h³ Σ f over a region.
pub fn integrate(f: &ScalarField, region: Region) -> f64 {
    let grid = *f.grid();
    let t = f.time();
    let slab = grid.n() * grid.n();
    let parts: Vec<f64> = f
        .data()
        .par_chunks(slab)
        .enumerate()
        .map(|(ix, chunk)| {
            let mut acc = 0.0;
            for (j, &v) in chunk.iter().enumerate() {
                if region.contains(t, grid.point(ix * slab + j)) {
                    acc += v;
                }
            }
            acc
        })
        .collect();
    parts.iter().sum::<f64>() * grid.cell_volume()
}
