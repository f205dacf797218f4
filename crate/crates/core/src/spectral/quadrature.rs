//! Gauss–Legendre rules and a split lattice/polar integrator for integrands with
//! removable r⁻² and r⁻⁴ singularities at the origin.

use std::f64::consts::PI;

use super::field::ScalarField;
use super::interp::PointEvaluator;
use super::ops::{Jet, LatticeJets};
use crate::par::*;

/// Nodes and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Radial partition η(r) = e^{−u}(1 + u), u = r²/s². 1 − η vanishes to fourth order
/// at the origin, so (1 − η)·P/r⁴ is smooth for smooth P vanishing to order 0.
#[derive(Debug, Clone, Copy)]
pub struct SplitQuadrature {
    /// core radius in units of the grid spacing
    pub core: f64,
    pub radial_nodes: usize,
    pub polar_nodes: usize,
    pub azimuth_nodes: usize,
    /// relative cutoff for trigonometric interpolation coefficients
    pub prune: f64,
}

impl Default for SplitQuadrature {
    fn default() -> Self {
        SplitQuadrature { core: 2.5, radial_nodes: 40, polar_nodes: 28, azimuth_nodes: 56, prune: 1e-15 }
    }
}

#[inline]
fn eta(u: f64) -> f64 {
    (-u).exp() * (1.0 + u)
}

#[inline]
fn one_minus_eta(u: f64) -> f64 {
    if u < 1e-3 {
        // series: u²/2 − u³/3 + u⁴/8
        u * u * (0.5 - u / 3.0 + u * u / 8.0)
    } else {
        -(-u).exp_m1() - u * (-u).exp()
    }
}

impl SplitQuadrature {
    /// ∫ G(x, jet φ(x)) dx over the box.
    pub fn integrate<G>(&self, f: &ScalarField, integrand: G) -> f64
    where
        G: Fn([f64; 3], &Jet) -> f64 + Sync,
    {
        self.integrate_with_evaluator(f, &PointEvaluator::new(f, self.prune), integrand)
    }

    pub fn integrate_with_evaluator<G>(&self, f: &ScalarField, pe: &PointEvaluator, integrand: G) -> f64
    where
        G: Fn([f64; 3], &Jet) -> f64 + Sync,
    {
        self.integrate_many(f, pe, |x, j| [integrand(x, j)])[0]
    }

    /// Several integrands sharing one jet evaluation per point.
    pub fn integrate_many<const K: usize, G>(&self, f: &ScalarField, pe: &PointEvaluator, integrand: G) -> [f64; K]
    where
        G: Fn([f64; 3], &Jet) -> [f64; K] + Sync,
    {
        let grid = *f.grid();
        let s = self.core * grid.h();
        let jets = LatticeJets::of(f);
        let slab = grid.n() * grid.n();
        let parts: Vec<[f64; K]> = (0..grid.n())
            .into_par_iter()
            .map(|ix| {
                let mut acc = [0.0; K];
                for j in 0..slab {
                    let idx = ix * slab + j;
                    let x = grid.point(idx);
                    let u = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (s * s);
                    let w = one_minus_eta(u);
                    for (a, v) in acc.iter_mut().zip(integrand(x, &jets.jet(idx))) {
                        *a += w * v;
                    }
                }
                acc
            })
            .collect();
        let core = self.core_part(s, pe, &integrand);
        let mut out = [0.0; K];
        for (k, o) in out.iter_mut().enumerate() {
            *o = parts.iter().map(|p| p[k]).sum::<f64>() * grid.cell_volume() + core[k];
        }
        out
    }

    fn core_part<const K: usize, G>(&self, s: f64, pe: &PointEvaluator, integrand: &G) -> [f64; K]
    where
        G: Fn([f64; 3], &Jet) -> [f64; K] + Sync,
    {
        let rmax = s * 45f64.sqrt();
        let (rx, rw) = gauss_legendre(self.radial_nodes);
        let (cx, cw) = gauss_legendre(self.polar_nodes);
        let nphi = self.azimuth_nodes;
        let mut pts = Vec::with_capacity(self.radial_nodes * self.polar_nodes * nphi);
        let mut wts = Vec::with_capacity(pts.capacity());
        for (a, &ra) in rx.iter().enumerate() {
            let r = 0.5 * rmax * (ra + 1.0);
            let wr = 0.5 * rmax * rw[a] * r * r * eta(r * r / (s * s));
            for (b, &c) in cx.iter().enumerate() {
                let sn = (1.0 - c * c).sqrt();
                for k in 0..nphi {
                    let ph = 2.0 * PI * (k as f64 + 0.5) / nphi as f64;
                    pts.push([r * sn * ph.cos(), r * sn * ph.sin(), r * c]);
                    wts.push(wr * cw[b] * 2.0 * PI / nphi as f64);
                }
            }
        }
        let vals: Vec<[f64; K]> = pts.par_iter().map(|&p| integrand(p, &pe.jet(p))).collect();
        let mut out = [0.0; K];
        for (v, w) in vals.iter().zip(&wts) {
            for k in 0..K {
                out[k] += v[k] * w;
            }
        }
        out
    }
}
