//! S, L, F and the Γ-energy.

use super::lattice::CommutedLattice;
use crate::par::*;
use crate::spectral::ops::LatticeJets;
use crate::spectral::{aniso_laplacian, euler, laplacian, Grid, ScalarField, Spectrum};
use crate::{Error, Result};

/// t-dependent coefficient fields of L.
#[derive(Debug, Clone)]
pub struct OperatorCoefficients {
    t: f64,
    /// 1 − r²/t²
    pub degeneracy: ScalarField,
    /// r²/t²
    pub r2_over_t2: ScalarField,
    pub inv_t2: f64,
}

impl OperatorCoefficients {
    pub fn new(grid: Grid, t: f64) -> Result<Self> {
        check_time(t)?;
        let r2 = ScalarField::from_fn(grid, t, |x| (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (t * t));
        Ok(OperatorCoefficients { t, degeneracy: r2.map(|v| 1.0 - v), r2_over_t2: r2, inv_t2: 1.0 / (t * t) })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Recompute when the time moves.
    pub fn at(&self, t: f64) -> Result<Self> {
        if t == self.t {
            return Ok(self.clone());
        }
        Self::new(*self.degeneracy.grid(), t)
    }
}

fn check_time(t: f64) -> Result<()> {
    if t < 1.0 {
        return Err(Error::Precondition(format!("t = {t} < 1")));
    }
    Ok(())
}

fn l2(f: &ScalarField) -> f64 {
    let s: f64 = f.data().par_iter().map(|v| v * v).sum();
    (s * f.grid().cell_volume()).sqrt()
}

/// Sφ = t∂_tφ + x·∇φ
pub fn apply_s(phi: &ScalarField, phi_t: &ScalarField) -> ScalarField {
    euler(phi).axpy(phi.time(), phi_t)
}

/// ∂_t^p φ for p = 0..=3 at one time, known in closed form.
#[derive(Debug, Clone)]
pub struct TimeJet {
    pub d: [ScalarField; 4],
}

impl TimeJet {
    pub fn time(&self) -> f64 {
        self.d[0].time()
    }
}

/// ‖□Sφ − S□φ − 2□φ‖ / ‖□φ‖ for □ = −∂_t² + Σ ε_j∂_j².
pub fn commutator_residual(state: &TimeJet, eps: [f64; 3]) -> f64 {
    let t = state.time();
    let [p0, p1, p2, p3] = &state.d;
    let box_phi = aniso_laplacian(p0, eps).axpy(-1.0, p2);
    // S(□φ) = t∂_t□φ + D□φ with ∂_t□φ = −∂_t³φ + Δ_ε∂_tφ
    let dt_box = aniso_laplacian(p1, eps).axpy(-1.0, p3);
    let s_box = euler(&box_phi).axpy(t, &dt_box);
    // □(Sφ) with ∂_t²(Sφ) = 2∂_t²φ + t∂_t³φ + D∂_t²φ
    let s_phi = apply_s(p0, p1);
    let dtt_s = euler(p2).axpy(2.0, p2).axpy(t, p3);
    let box_s = aniso_laplacian(&s_phi, eps).axpy(-1.0, &dtt_s);
    let res = box_s.axpy(-1.0, &s_box).axpy(-2.0, &box_phi);
    let den = l2(&box_phi);
    if den == 0.0 {
        l2(&res)
    } else {
        l2(&res) / den
    }
}

/// Lφ = 𝛥̸φ + (1 − r²/t²)(∂_r² + (2/r)∂_r)φ, evaluated as Δφ − t^{−2}(xᵀHx + 2x·∇φ),
/// which has no 1/r factor.
pub fn l_apply(phi: &ScalarField, t: f64) -> Result<ScalarField> {
    check_time(t)?;
    let it2 = 1.0 / (t * t);
    Ok(LatticeJets::of(phi).map(|x, j| j.lap() - it2 * (j.xhx(x) + 2.0 * j.euler(x))))
}

#[derive(Debug, Clone)]
pub struct FForms {
    /// t^{−2}(2t∂_tSφ − S²φ − Sφ)
    pub first: ScalarField,
    /// t^{−2}(S²φ − 2r∂_rSφ − Sφ)
    pub second: ScalarField,
    pub discrepancy: f64,
}

pub fn f_apply(lattice: &CommutedLattice) -> Result<FForms> {
    if lattice.order() < 2 {
        return Err(Error::Order { have: lattice.order(), need: 2 });
    }
    let t = lattice.time();
    check_time(t)?;
    let s1 = lattice.level(1);
    let s2 = &lattice.level(2).psi;
    let it2 = 1.0 / (t * t);
    let first = s1.psi_t.scale(2.0 * t).axpy(-1.0, s2).axpy(-1.0, &s1.psi).scale(it2);
    let second = s2.axpy(-2.0, &euler(&s1.psi)).axpy(-1.0, &s1.psi).scale(it2);
    let discrepancy = first.data().iter().zip(second.data()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(FForms { first, second, discrepancy })
}

/// ∂_t²φ from the lattice alone: t∂_t²φ = ∂_tSφ − ∂_tφ − x·∇∂_tφ.
pub fn second_time_derivative(lattice: &CommutedLattice) -> Result<ScalarField> {
    if lattice.order() < 1 {
        return Err(Error::Order { have: lattice.order(), need: 1 });
    }
    let b = lattice.base();
    let t = lattice.time();
    Ok(lattice.level(1).psi_t.axpy(-1.0, &b.psi_t).axpy(-1.0, &euler(&b.psi_t)).scale(1.0 / t))
}

/// ‖Lφ − F[φ] − □φ‖ / ‖Lφ‖ with □ = −∂_t² + Δ.
pub fn main_formula_residual(lattice: &CommutedLattice) -> Result<f64> {
    let t = lattice.time();
    let phi = &lattice.base().psi;
    let lphi = l_apply(phi, t)?;
    let f = f_apply(lattice)?;
    let box_phi = laplacian(phi).axpy(-1.0, &second_time_derivative(lattice)?);
    let res = lphi.axpy(-1.0, &f.first).axpy(-1.0, &box_phi);
    let den = l2(&lphi);
    Ok(if den == 0.0 { l2(&res) } else { l2(&res) / den })
}

/// Σ_{|α| ≤ m} k^{2α}
pub fn energy_weight(m: u32, k: [f64; 3]) -> f64 {
    let a = [k[0] * k[0], k[1] * k[1], k[2] * k[2]];
    let mut total = 0.0;
    let mut pa = 1.0;
    for i in 0..=m {
        let mut pb = 1.0;
        for j in 0..=(m - i) {
            let mut pc = 1.0;
            for _ in 0..=(m - i - j) {
                total += pa * pb * pc;
                pc *= a[2];
            }
            pb *= a[1];
        }
        pa *= a[0];
    }
    total
}

/// Per-mode density Σ_j (|∂̂_tψ_j|² + Σ_i w_i k_i²|ψ̂_j|²) W_{k−j}(ξ), on the half spectrum.
/// Levels are (S^jφ, ∂_tS^jφ) spectra.
pub fn gamma_density(levels: &[(Spectrum, Spectrum)], spatial: [f64; 3], k: usize) -> Vec<f64> {
    let grid = *levels[0].0.grid();
    let n = grid.n();
    let nh = n / 2 + 1;
    let kx = grid.k_axis();
    let kz = grid.k_half();
    let mut out = vec![0.0; n * n * nh];
    out.par_chunks_mut(n * nh).enumerate().for_each(|(ix, slab)| {
        for iy in 0..n {
            for iz in 0..nh {
                let kv = [kx[ix], kx[iy], kz[iz]];
                let grad = spatial[0] * kv[0] * kv[0] + spatial[1] * kv[1] * kv[1] + spatial[2] * kv[2] * kv[2];
                let idx = (ix * n + iy) * nh + iz;
                let mut acc = 0.0;
                for (j, (s, st)) in levels.iter().enumerate().take(k + 1) {
                    let w = energy_weight((k - j) as u32, kv);
                    acc += (st.data()[idx].norm_sqr() + grad * s.data()[idx].norm_sqr()) * w;
                }
                slab[iy * nh + iz] = acc;
            }
        }
    });
    out
}

/// √(Σ_{|α|+j ≤ k} ‖∂ ∂^αS^jφ‖²) from level spectra, with ‖∂ψ‖² = ‖∂_tψ‖² + Σ_i w_i‖∂_iψ‖².
pub fn gamma_energy_of_spectra(levels: &[(Spectrum, Spectrum)], spatial: [f64; 3], k: usize) -> Result<f64> {
    if levels.len() < k + 1 {
        return Err(Error::Order { have: levels.len().saturating_sub(1), need: k });
    }
    let grid = *levels[0].0.grid();
    let n = grid.n();
    let nh = n / 2 + 1;
    let dens = gamma_density(levels, spatial, k);
    let sum: f64 = dens
        .par_chunks(nh)
        .map(|col| col.iter().enumerate().map(|(iz, v)| if iz == 0 || iz == n / 2 { *v } else { 2.0 * v }).sum::<f64>())
        .sum();
    let n3 = (n * n * n) as f64;
    Ok((sum * grid.cell_volume() / n3).sqrt())
}

/// Speed-weighted Γ-energy of order k; for isotropic speeds this is √Σ‖(∂_t, ∇)Γ^Jφ‖².
pub fn gamma_energy(lattice: &CommutedLattice, k: usize) -> Result<f64> {
    if k > lattice.order() {
        return Err(Error::Order { have: lattice.order(), need: k });
    }
    let levels: Vec<(Spectrum, Spectrum)> =
        lattice.levels()[..=k].par_iter().map(|l| (Spectrum::of(&l.psi), Spectrum::of(&l.psi_t))).collect();
    gamma_energy_of_spectra(&levels, lattice.eps(), k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::ops::{spectral_derivative, UNIT};
    use crate::vectorfield::lattice::populate_lattice;
    use crate::vectorfield::word::monomials;

    fn gauss_jet(g: Grid, t: f64) -> TimeJet {
        // φ = exp(−|x|² − (t − 2)²)
        let s = t - 2.0;
        let e = (-s * s).exp();
        let gt = [e, -2.0 * s * e, (4.0 * s * s - 2.0) * e, (-8.0 * s * s * s + 12.0 * s) * e];
        let base = ScalarField::from_fn(g, t, |x| (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])).exp());
        TimeJet { d: gt.map(|c| base.scale(c)) }
    }

    #[test]
    fn s_on_homogeneous_fields() {
        // φ = x₁w(r)/t: Sφ = x₁ r w′(r)/t, w = exp(−(r²/36)²)
        let g = Grid::new(64, 32.0).unwrap();
        let t = 2.0;
        let w = |r2: f64| (-(r2 / 36.0).powi(2)).exp();
        let phi = ScalarField::from_fn(g, t, |x| x[0] * w(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / t);
        let phi_t = phi.scale(-1.0 / t);
        let s = apply_s(&phi, &phi_t);
        let want = ScalarField::from_fn(g, t, |x| {
            let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
            // r w′ = −4 (r²)² / 36² · w
            x[0] * (-4.0 * r2 * r2 / 1296.0) * w(r2) / t
        });
        let err = s.data().iter().zip(want.data()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-7, "{err}");
    }

    #[test]
    fn time_derivative_recovered_from_s() {
        let g = Grid::new(32, 10.0).unwrap();
        let phi = ScalarField::from_fn(g, 3.0, |x| (-(x[0] * x[0] + 2.0 * x[1] * x[1] + x[2] * x[2])).exp());
        let phi_t = phi.map_with_x(|x, v| x[2] * v);
        let s = apply_s(&phi, &phi_t);
        let back = s.axpy(-1.0, &euler(&phi)).scale(1.0 / 3.0);
        let err = back.data().iter().zip(phi_t.data()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-13);
    }

    #[test]
    fn commutator_gaussian() {
        let g = Grid::new(64, 16.0).unwrap();
        let st = gauss_jet(g, 2.0);
        assert!(commutator_residual(&st, [1.0; 3]) < 1e-8);
        assert!(commutator_residual(&st, [1.0, 4.0, 9.0]) < 1e-8);
        let st = gauss_jet(g, 2.7);
        assert!(commutator_residual(&st, [1.0, 4.0, 9.0]) < 1e-8);
        let z = ScalarField::zeros(g, 2.0);
        let zero = TimeJet { d: [z.clone(), z.clone(), z.clone(), z] };
        assert_eq!(commutator_residual(&zero, [1.0; 3]), 0.0);
    }

    #[test]
    fn word_order_matters() {
        // ‖S∂₁φ − ∂₁Sφ + ∂₁φ‖ on an analytic state
        let g = Grid::new(64, 16.0).unwrap();
        let st = gauss_jet(g, 2.5);
        let d1 = spectral_derivative(&st.d[0], UNIT[0]);
        let d1t = spectral_derivative(&st.d[1], UNIT[0]);
        let s_d1 = apply_s(&d1, &d1t);
        let d1_s = spectral_derivative(&apply_s(&st.d[0], &st.d[1]), UNIT[0]);
        let r = s_d1.axpy(-1.0, &d1_s).axpy(1.0, &d1);
        assert!(r.max_abs() < 1e-9);
        assert!(s_d1.axpy(-1.0, &d1_s).max_abs() > 0.1);
    }

    #[test]
    fn l_on_windowed_r2() {
        let g = Grid::new(64, 32.0).unwrap();
        let t = 3.0;
        let phi = ScalarField::from_fn(g, t, |x| {
            let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
            r2 * (-(r2 / 36.0).powi(2)).exp()
        });
        let lphi = l_apply(&phi, t).unwrap();
        // f = r²e^{−u}, u = r⁴/36²; Lf = (1 − r²/t²)(f″ + 2f′/r), which is 6(1 − r²/t²) + O(r⁴/36²)
        for i in 0..g.len() {
            let x = g.point(i);
            let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
            let r = r2.sqrt();
            if r <= 8.0 {
                let e = (-(r2 * r2) / 1296.0).exp();
                let du = 4.0 * r2 * r / 1296.0;
                let f1 = e * (2.0 * r - 4.0 * r2 * r2 * r / 1296.0);
                let f2 = e * (2.0 - 20.0 * r2 * r2 / 1296.0) - du * f1;
                let want = (1.0 - r2 / (t * t)) * (f2 + 2.0 * f1 / r);
                assert!((lphi.data()[i] - want).abs() < 1e-8, "{} {}", lphi.data()[i], want);
                if r2 < 0.2 {
                    assert!((lphi.data()[i] - 6.0 * (1.0 - r2 / (t * t))).abs() < 2e-3);
                }
            }
        }
        let c = ScalarField::from_fn(g, t, |_| 2.0);
        assert!(l_apply(&c, t).unwrap().max_abs() < 1e-12);
        assert!(l_apply(&c, 0.5).is_err());
    }

    #[test]
    fn l_on_cone_is_angular() {
        // on r = t the radial coefficient vanishes
        let g = Grid::new(64, 16.0).unwrap();
        let phi = ScalarField::from_fn(g, 1.0, |x| (x[0] + x[1] * x[2]) * (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])).exp());
        let t = 1.0;
        let lphi = l_apply(&phi, t).unwrap();
        let sl = crate::spectral::slashed_laplacian(&phi);
        let mut checked = 0;
        for i in 0..g.len() {
            let x = g.point(i);
            let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
            if (r - t).abs() < 1e-12 {
                checked += 1;
                assert!((lphi.data()[i] - sl.data()[i]).abs() < 1e-9);
            }
        }
        // also check the identity Lφ − 𝛥̸φ = (1 − r²/t²)(∂_r² + 2∂_r/r)φ everywhere off the origin
        let j = LatticeJets::of(&phi);
        let rad = j.map(|x, jt| {
            let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
            (1.0 - r2 / (t * t)) * (jt.drr(x) + 2.0 * jt.dr(x) / r2.sqrt())
        });
        let diff = lphi.axpy(-1.0, &sl).axpy(-1.0, &rad);
        assert!(diff.max_abs() < 1e-7, "{} {checked}", diff.max_abs());
    }

    #[test]
    fn f_forms_agree_and_need_order() {
        let g = Grid::new(48, 12.0).unwrap();
        let a = ScalarField::from_fn(g, 1.0, |x| (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])).exp());
        let b = a.map_with_x(|x, v| x[0] * v);
        let lat = populate_lattice(&a, &b, [1.0; 3], 2).unwrap();
        let f = f_apply(&lat).unwrap();
        assert!(f.discrepancy < 1e-9, "{}", f.discrepancy);
        let lat1 = populate_lattice(&a, &b, [1.0; 3], 1).unwrap();
        assert!(f_apply(&lat1).is_err());
        let z = ScalarField::zeros(g, 1.0);
        let lz = populate_lattice(&z, &z, [1.0; 3], 2).unwrap();
        assert_eq!(f_apply(&lz).unwrap().first.max_abs(), 0.0);
    }

    #[test]
    fn main_formula_at_initial_time() {
        // ∂_t²φ from the lattice equals Δφ at t₀, so the residual is pure discretisation
        let g = Grid::new(64, 16.0).unwrap();
        let a = ScalarField::from_fn(g, 1.0, |x| (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / 0.8).exp());
        let b = a.map_with_x(|x, v| (x[0] - x[1]) * v);
        let lat = populate_lattice(&a, &b, [1.0; 3], 2).unwrap();
        assert!(main_formula_residual(&lat).unwrap() < 1e-8);
    }

    #[test]
    fn weights_and_energy() {
        assert_eq!(energy_weight(0, [3.0, 4.0, 5.0]), 1.0);
        assert_eq!(energy_weight(1, [1.0, 2.0, 3.0]), 1.0 + 1.0 + 4.0 + 9.0);
        // m = 2 over (1,1,1): 1 + 3 + 6
        assert_eq!(energy_weight(2, [1.0, 1.0, 1.0]), 10.0);
        // k = 0 is the plain energy
        let g = Grid::new(32, 10.0).unwrap();
        let a = ScalarField::from_fn(g, 1.0, |x| (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])).exp());
        let b = a.map_with_x(|x, v| x[1] * v);
        let lat = populate_lattice(&a, &b, [1.0; 3], 1).unwrap();
        let e0 = gamma_energy(&lat, 0).unwrap();
        let grad = crate::spectral::gradient(&a);
        let direct = (l2(&b).powi(2) + grad.iter().map(|f| l2(f).powi(2)).sum::<f64>()).sqrt();
        assert!((e0 - direct).abs() < 1e-12 * direct);
        // k = 1 sums the monomials ∂^α S^j with |α| + j ≤ 1
        let e1 = gamma_energy(&lat, 1).unwrap();
        let mut acc = 0.0;
        for m in monomials(1) {
            let (p, pt) = lat.monomial(m).unwrap();
            let gp = crate::spectral::gradient(&p);
            acc += l2(&pt).powi(2) + gp.iter().map(|f| l2(f).powi(2)).sum::<f64>();
        }
        assert!((e1 - acc.sqrt()).abs() < 1e-10 * e1);
        assert!(gamma_energy(&lat, 2).is_err());
    }
}
