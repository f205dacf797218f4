//! Weighted Sobolev, exterior energy and interior ellipticity inequalities.

use serde::{Deserialize, Serialize};

use super::bochner::integrate_jets;
use super::report::IdentityReport;
use super::weights::WeightSpec;
use crate::cutoffs::chi_scaled;
use crate::par::*;
use crate::spectral::{gradient, laplacian, LatticeJets, PointEvaluator, ScalarField, SplitQuadrature};
use crate::vectorfield::{gamma_energy, CommutedLattice};
use crate::{Error, Result};

/// Left and right sides of an inequality lhs ≲ rhs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub lhs: f64,
    pub rhs: f64,
}

impl Measurement {
    pub fn ratio(&self) -> f64 {
        if self.lhs == 0.0 {
            0.0
        } else {
            self.lhs / self.rhs
        }
    }

    pub fn report(&self, check: &str, resolution: usize, constant: f64, tol: f64) -> IdentityReport {
        IdentityReport::inequality(check, resolution, self.lhs, self.rhs, constant, tol)
    }

    /// The entry with the largest ratio.
    pub fn worst(ms: &[Measurement]) -> Option<Measurement> {
        ms.iter().copied().max_by(|a, b| a.ratio().total_cmp(&b.ratio()))
    }
}

#[inline]
fn r2_of(x: [f64; 3]) -> f64 {
    x[0] * x[0] + x[1] * x[1] + x[2] * x[2]
}

fn japanese(x: f64) -> f64 {
    (1.0 + x * x).sqrt()
}

/// |φ(t,x₀)|·δ|x₀|·min{t, ⟨t − |x₀|⟩}^{1/2−2δ} against
/// ‖∂_r^{≤2}φ‖^δ (‖φ‖ + ‖ωr²∇̸²φ‖)^{(1+δ)/2} (‖φ‖ + ‖ω⟨t − r⟩∂_rφ‖)^{(1−3δ)/2}
/// with ω = χ_{≤s}((r − |x₀|)/min{⟨t − |x₀|⟩, t}).
pub fn sobolev_embedding_check(
    phi: &ScalarField,
    x0: [f64; 3],
    delta: f64,
    scale: i32,
    quad: Option<&SplitQuadrature>,
) -> Result<Measurement> {
    let t = phi.time();
    let r0 = r2_of(x0).sqrt();
    if r0 < t / 32.0 {
        return Err(Error::Precondition(format!("|x0| = {r0} below t/32 = {}", t / 32.0)));
    }
    if !(delta > 0.0 && delta <= 0.1) {
        return Err(Error::Precondition(format!("delta = {delta} outside (0, 0.1]")));
    }
    let weight = WeightSpec::ConeCutoff { x0, scale, paper_form: true };
    let value = PointEvaluator::new(phi, 0.0).value(x0);
    let [l2, radial, angular, cone] = integrate_jets(phi, quad, |x, j| {
        let r2 = r2_of(x);
        let r = r2.sqrt();
        let w = weight.value(t, r);
        let e = j.euler(x);
        let dr2 = e * e / r2;
        let drr = j.drr(x);
        // r⁴|∇̸²φ|² = (r²𝛥̸φ)² − r²|∇̸φ|²
        let r2sl = r2 * j.lap() - j.xhx(x) - 2.0 * e;
        let hess_r4 = r2sl * r2sl - (r2 * j.grad_sq() - e * e);
        let q = japanese(t - r);
        [j.v * j.v, j.v * j.v + dr2 + drr * drr, w * w * hess_r4, w * w * q * q * dr2]
    });
    let m = t.min(japanese(t - r0));
    let lhs = value.abs() * delta * r0 * m.powf(0.5 - 2.0 * delta);
    let n0 = l2.sqrt();
    let rhs = radial.sqrt().powf(delta)
        * (n0 + angular.max(0.0).sqrt()).powf((1.0 + delta) / 2.0)
        * (n0 + cone.sqrt()).powf((1.0 - 3.0 * delta) / 2.0);
    Ok(Measurement { lhs, rhs })
}

/// ∫|∇²u|²χ_{≤s}(|x|/t) against t⁻²‖∂Γ^{≤1}u‖² + ‖□u‖².
pub fn interior_elliptic_check(lattice: &CommutedLattice, box_u: Option<&ScalarField>, scale: i32) -> Result<Measurement> {
    let t = lattice.time();
    let u = &lattice.base().psi;
    let [lhs] = integrate_jets(u, None, |x, j| [j.hess_sq() * chi_scaled(scale, r2_of(x).sqrt() / t)]);
    let e1 = gamma_energy(lattice, 1)?;
    let src = box_u.map_or(0.0, |f| f.data().iter().map(|v| v * v).sum::<f64>() * f.grid().cell_volume());
    Ok(Measurement { lhs, rhs: e1 * e1 / (t * t) + src })
}

/// A time slice of a solution of the standard wave equation □φ = f.
#[derive(Debug, Clone)]
pub struct ExteriorSample {
    pub phi: ScalarField,
    pub phi_t: ScalarField,
    /// (f, ∂_t f)
    pub forcing: Option<(ScalarField, ScalarField)>,
}

impl ExteriorSample {
    pub fn time(&self) -> f64 {
        self.phi.time()
    }

    /// |∂²φ|² over all space-time index pairs, with ∂_t²φ = Δφ − f.
    fn second_derivative_sq(&self) -> Vec<f64> {
        let jets = LatticeJets::of(&self.phi);
        let gt = gradient(&self.phi_t);
        let mut dtt = laplacian(&self.phi);
        if let Some((f, _)) = &self.forcing {
            dtt = dtt.axpy(-1.0, f);
        }
        (0..self.phi.grid().len())
            .into_par_iter()
            .map(|i| {
                let mixed: f64 = gt.iter().map(|g| g.data()[i] * g.data()[i]).sum();
                dtt.data()[i].powi(2) + 2.0 * mixed + jets.jet(i).hess_sq()
            })
            .collect()
    }

    /// ∫_{r ≥ t} |u|²|∂²φ|², u = t − r
    fn exterior_lhs(&self) -> f64 {
        let t = self.time();
        let grid = *self.phi.grid();
        let d2 = self.second_derivative_sq();
        (0..grid.len())
            .into_par_iter()
            .map(|i| {
                let r = r2_of(grid.point(i)).sqrt();
                if r >= t {
                    (t - r).powi(2) * d2[i]
                } else {
                    0.0
                }
            })
            .sum::<f64>()
            * grid.cell_volume()
    }

    /// ∫ r²|∂²φ|²
    fn data_norm(&self) -> f64 {
        let grid = *self.phi.grid();
        let d2 = self.second_derivative_sq();
        (0..grid.len()).into_par_iter().map(|i| r2_of(grid.point(i)) * d2[i]).sum::<f64>() * grid.cell_volume()
    }

    /// ‖u∂f‖_{L²(r ≥ t)}
    fn forcing_norm(&self) -> f64 {
        let Some((f, ft)) = &self.forcing else { return 0.0 };
        let t = self.time();
        let grid = *f.grid();
        let g = gradient(f);
        let s: f64 = (0..grid.len())
            .into_par_iter()
            .map(|i| {
                let r = r2_of(grid.point(i)).sqrt();
                if r < t {
                    return 0.0;
                }
                let d = ft.data()[i].powi(2) + g.iter().map(|c| c.data()[i].powi(2)).sum::<f64>();
                (t - r).powi(2) * d
            })
            .sum();
        (s * grid.cell_volume()).sqrt()
    }
}

/// For each sample time t: ∫_{r≥t}|u|²|∂²φ|² against ∫_{Σ_{t₀}} r²|∂²φ|² + (∫_{t₀}^t ‖u∂f‖)²,
/// with the time integral taken by the trapezoid rule over the samples.
pub fn exterior_energy_check(samples: &[ExteriorSample]) -> Result<Vec<(f64, Measurement)>> {
    let first = samples.first().ok_or_else(|| Error::Precondition("no samples".into()))?;
    if samples.windows(2).any(|w| w[1].time() <= w[0].time()) {
        return Err(Error::Precondition("sample times must increase".into()));
    }
    let data = first.data_norm();
    let mut forcing = 0.0;
    let mut prev = (first.time(), first.forcing_norm());
    let mut out = Vec::with_capacity(samples.len());
    for (k, s) in samples.iter().enumerate() {
        if k > 0 {
            let cur = (s.time(), s.forcing_norm());
            forcing += 0.5 * (cur.0 - prev.0) * (cur.1 + prev.1);
            prev = cur;
        }
        out.push((s.time(), Measurement { lhs: s.exterior_lhs(), rhs: data + forcing * forcing }));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{exact_linear_step, SpeedTriple};
    use crate::spectral::Grid;
    use crate::vectorfield::{populate_lattice, CommutedLattice, LatticeLevel};

    fn gauss(x: [f64; 3], c: [f64; 3], s2: f64) -> f64 {
        (-((x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2) + (x[2] - c[2]).powi(2)) / s2).exp()
    }

    #[test]
    fn sobolev_zero_and_preconditions() {
        let g = Grid::new(32, 16.0).unwrap();
        let z = ScalarField::zeros(g, 4.0);
        let m = sobolev_embedding_check(&z, [3.0, 0.0, 0.0], 0.05, 0, None).unwrap();
        assert_eq!(m.ratio(), 0.0);
        assert!(sobolev_embedding_check(&z, [0.05, 0.0, 0.0], 0.05, 0, None).is_err());
        assert!(sobolev_embedding_check(&z, [3.0, 0.0, 0.0], 0.2, 0, None).is_err());
        let p = ScalarField::from_fn(g, 4.0, |x| gauss(x, [3.0, 1.0, 0.0], 2.0));
        let m = sobolev_embedding_check(&p, [3.0, 1.0, 0.0], 0.05, 0, None).unwrap();
        assert!(m.ratio() > 0.0 && m.ratio().is_finite());
    }

    #[test]
    fn interior_elliptic_harmonic_polynomial() {
        // u = (x₁² − x₂²)·w with a wide window, static; □u = Δu exactly from the closed form
        let g = Grid::new(48, 24.0).unwrap();
        let t = 8.0;
        let s2 = 36.0;
        let w = |x: [f64; 3]| gauss(x, [0.0; 3], s2);
        let u = ScalarField::from_fn(g, t, |x| (x[0] * x[0] - x[1] * x[1]) * w(x));
        // Δ(Pw) = 2∇P·∇w + PΔw with ∇w = −2x w/s², Δw = (4r²/s⁴ − 6/s²)w
        let box_u = ScalarField::from_fn(g, t, |x| {
            let p = x[0] * x[0] - x[1] * x[1];
            let r2 = r2_of(x);
            let grad_dot = 2.0 * x[0] * (-2.0 * x[0] / s2) - 2.0 * x[1] * (-2.0 * x[1] / s2);
            (2.0 * grad_dot + p * (4.0 * r2 / (s2 * s2) - 6.0 / s2)) * w(x)
        });
        let su = crate::spectral::euler(&u);
        let zero = ScalarField::zeros(g, t);
        let lat = CommutedLattice::new(
            [1.0; 3],
            vec![LatticeLevel { psi: u.clone(), psi_t: zero.clone() }, LatticeLevel { psi: su, psi_t: zero }],
        )
        .unwrap();
        let m = interior_elliptic_check(&lat, Some(&box_u), -5).unwrap();
        assert!(m.lhs > 0.0 && m.ratio() < 10.0, "{m:?}");
        let z = ScalarField::zeros(g, t);
        let lat0 = populate_lattice(&z, &z, [1.0; 3], 1).unwrap();
        assert_eq!(interior_elliptic_check(&lat0, None, -5).unwrap().ratio(), 0.0);
    }

    #[test]
    fn exterior_free_annulus() {
        let g = Grid::new(40, 24.0).unwrap();
        let s = SpeedTriple::isotropic();
        let shell = |x: [f64; 3]| {
            let r = r2_of(x).sqrt();
            (1.0 + 0.3 * x[0]) * (-(r - 3.0).powi(2) / 1.5).exp()
        };
        let p0 = ScalarField::from_fn(g, 1.0, shell);
        let v0 = p0.scale(0.5);
        let mut samples = Vec::new();
        for k in 0..=6 {
            let dt = k as f64;
            let (p, v) = exact_linear_step(&p0, &v0, dt, &s);
            samples.push(ExteriorSample { phi: p.with_time(1.0 + dt), phi_t: v.with_time(1.0 + dt), forcing: None });
        }
        let series = exterior_energy_check(&samples).unwrap();
        assert_eq!(series.len(), 7);
        let worst = Measurement::worst(&series.iter().map(|p| p.1).collect::<Vec<_>>()).unwrap();
        assert!(worst.ratio() > 0.0 && worst.ratio() < 10.0, "{worst:?}");
        let z = ScalarField::zeros(g, 1.0);
        let zs = exterior_energy_check(&[ExteriorSample { phi: z.clone(), phi_t: z, forcing: None }]).unwrap();
        assert_eq!(zs[0].1.ratio(), 0.0);
    }
}
