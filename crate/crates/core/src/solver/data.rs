//! Initial data generators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::spectral::{Grid, ScalarField};

/// A Gaussian bump times a random polynomial in x/σ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PacketSpec {
    pub sigma: f64,
    pub center: [f64; 3],
    /// total degree of the random polynomial factors
    pub degree: u32,
    /// relative size of the velocity profile
    pub velocity: f64,
}

impl Default for PacketSpec {
    fn default() -> Self {
        PacketSpec { sigma: 1.0, center: [0.0; 3], degree: 1, velocity: 1.0 }
    }
}

pub fn gaussian_bump(grid: Grid, t: f64, sigma: f64, center: [f64; 3]) -> ScalarField {
    ScalarField::from_fn(grid, t, |x| {
        let d = [x[0] - center[0], x[1] - center[1], x[2] - center[2]];
        (-(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) / (sigma * sigma)).exp()
    })
}

fn exponents(degree: u32) -> Vec<[i32; 3]> {
    let mut out = Vec::new();
    for a in 0..=degree as i32 {
        for b in 0..=(degree as i32 - a) {
            for c in 0..=(degree as i32 - a - b) {
                out.push([a, b, c]);
            }
        }
    }
    out
}

/// (φ₀, φ₁) for one component; `stream` separates components under one seed.
pub fn seeded_packet(grid: Grid, t: f64, spec: &PacketSpec, seed: u64, stream: u64) -> (ScalarField, ScalarField) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let ex = exponents(spec.degree);
    let mut coeffs = |first: f64| -> Vec<f64> {
        ex.iter().enumerate().map(|(i, _)| if i == 0 { first } else { rng.gen_range(-1.0..1.0) }).collect()
    };
    let p = coeffs(1.0);
    let q = coeffs(spec.velocity);
    let bump = gaussian_bump(grid, t, spec.sigma, spec.center);
    let poly = |c: &[f64]| {
        let c = c.to_vec();
        let ex = ex.clone();
        let (s, o) = (spec.sigma, spec.center);
        bump.map_with_x(move |x, v| {
            let y = [(x[0] - o[0]) / s, (x[1] - o[1]) / s, (x[2] - o[2]) / s];
            let mut acc = 0.0;
            for (e, k) in ex.iter().zip(&c) {
                acc += k * y[0].powi(e[0]) * y[1].powi(e[1]) * y[2].powi(e[2]);
            }
            acc * v
        })
    };
    (poly(&p), poly(&q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_and_separated() {
        let g = Grid::new(16, 8.0).unwrap();
        let spec = PacketSpec::default();
        let a = seeded_packet(g, 1.0, &spec, 7, 0);
        let b = seeded_packet(g, 1.0, &spec, 7, 0);
        let c = seeded_packet(g, 1.0, &spec, 7, 1);
        assert_eq!(a.0.data(), b.0.data());
        assert_ne!(a.1.data(), c.1.data());
        let z = gaussian_bump(g, 1.0, 1.0, [0.0; 3]);
        assert!(z.max_abs() <= 1.0);
    }
}
