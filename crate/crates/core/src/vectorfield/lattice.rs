//! The commuted lattice.
//!
//! Only the S-powers S^jφ are stored (with their time derivatives). Every word
//! Γ^J is recovered from its normal form Σ c ∂^α S^j by spectral differentiation,
//! so the whole family Γ^{≤k}φ costs k + 1 evolved pairs per component.

use super::word::{binomial, stirling2, Monomial, MultiIndex};
use crate::par::*;
use crate::spectral::ops::{derivative_of_spectrum, euler, spectral_derivative, UNIT};
use crate::spectral::{aniso_laplacian, Grid, ScalarField, Spectrum};
use crate::{Error, Result};

/// (S^jφ, ∂_t S^jφ)
#[derive(Debug, Clone)]
pub struct LatticeLevel {
    pub psi: ScalarField,
    pub psi_t: ScalarField,
}

#[derive(Debug, Clone)]
pub struct CommutedLattice {
    eps: [f64; 3],
    levels: Vec<LatticeLevel>,
}

impl CommutedLattice {
    pub fn new(eps: [f64; 3], levels: Vec<LatticeLevel>) -> Result<CommutedLattice> {
        let first = levels.first().ok_or_else(|| Error::Precondition("lattice needs the base level".into()))?;
        let t = first.psi.time();
        for l in &levels {
            first.psi.check_same_grid(&l.psi)?;
            first.psi.check_same_grid(&l.psi_t)?;
            if l.psi.time() != t || l.psi_t.time() != t {
                return Err(Error::Precondition("lattice levels at different times".into()));
            }
        }
        Ok(CommutedLattice { eps, levels })
    }

    pub fn order(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn time(&self) -> f64 {
        self.levels[0].psi.time()
    }

    pub fn grid(&self) -> &Grid {
        self.levels[0].psi.grid()
    }

    pub fn eps(&self) -> [f64; 3] {
        self.eps
    }

    pub fn base(&self) -> &LatticeLevel {
        &self.levels[0]
    }

    pub fn level(&self, j: usize) -> &LatticeLevel {
        &self.levels[j]
    }

    pub fn levels(&self) -> &[LatticeLevel] {
        &self.levels
    }

    pub fn into_levels(self) -> Vec<LatticeLevel> {
        self.levels
    }

    /// (∂^α S^jφ, ∂_t ∂^α S^jφ)
    pub fn monomial(&self, m: Monomial) -> Result<(ScalarField, ScalarField)> {
        let lv = self.levels.get(m.j as usize).ok_or(Error::Order { have: self.order(), need: m.j as usize })?;
        if m.alpha == [0; 3] {
            return Ok((lv.psi.clone(), lv.psi_t.clone()));
        }
        Ok((spectral_derivative(&lv.psi, m.alpha), spectral_derivative(&lv.psi_t, m.alpha)))
    }

    /// (Γ^Jφ, ∂_t Γ^Jφ)
    pub fn get(&self, word: &MultiIndex) -> Result<(ScalarField, ScalarField)> {
        if word.order() > self.order() {
            return Err(Error::Order { have: self.order(), need: word.order() });
        }
        let grid = *self.grid();
        let t = self.time();
        let mut psi = ScalarField::zeros(grid, t);
        let mut psi_t = ScalarField::zeros(grid, t);
        for (m, &c) in &word.normal_form().terms {
            let (a, b) = self.monomial(*m)?;
            psi.add_assign_scaled(c as f64, &a);
            psi_t.add_assign_scaled(c as f64, &b);
        }
        Ok((psi, psi_t))
    }

    /// Rows of X^q ∂_μφ for X = S, q ≤ order: S^q ∂_μ φ = ∂_μ (S − 1)^q φ.
    pub fn scaling_table(&self, order: usize) -> Result<Vec<[ScalarField; 4]>> {
        if order > self.order() {
            return Err(Error::Order { have: self.order(), need: order });
        }
        let spectra: Vec<(Spectrum, Spectrum)> =
            self.levels[..=order].par_iter().map(|l| (Spectrum::of(&l.psi), Spectrum::of(&l.psi_t))).collect();
        Ok(scaling_rows(&spectra, self.time()))
    }
}

/// (S − 1)^q = Σ_r C(q,r)(−1)^{q−r} S^r
pub fn shifted_power_coeffs(q: usize, shift: f64) -> Vec<f64> {
    (0..=q).map(|r| binomial(q as u32, r as u32) * shift.powi((q - r) as i32)).collect()
}

/// Σ c_i s_i
pub fn combine_spectra(spectra: &[&Spectrum], coeffs: &[f64]) -> Spectrum {
    let mut out = Spectrum::zeros(*spectra[0].grid());
    for (s, &c) in spectra.iter().zip(coeffs) {
        if c == 0.0 {
            continue;
        }
        out.data_mut().par_iter_mut().zip(s.data().par_iter()).for_each(|(o, v)| *o += v * c);
    }
    out
}

/// From spectra of (S^rφ, ∂_t S^rφ), r ≤ q, the physical rows ∂_μ (S − 1)^q φ with μ = t, 1, 2, 3.
pub fn scaling_rows(spectra: &[(Spectrum, Spectrum)], t: f64) -> Vec<[ScalarField; 4]> {
    (0..spectra.len())
        .into_par_iter()
        .map(|q| {
            let c = shifted_power_coeffs(q, -1.0);
            let psi = combine_spectra(&spectra[..=q].iter().map(|s| &s.0).collect::<Vec<_>>(), &c);
            let psi_t = combine_spectra(&spectra[..=q].iter().map(|s| &s.1).collect::<Vec<_>>(), &c);
            [
                psi_t.into_field(t),
                derivative_of_spectrum(&psi, UNIT[0], t),
                derivative_of_spectrum(&psi, UNIT[1], t),
                derivative_of_spectrum(&psi, UNIT[2], t),
            ]
        })
        .collect()
}

/// The derivation applied repeatedly to the source: ∂_t (for initial towers) or S (for commuted sources).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Derivation {
    Time,
    Scaling,
}

/// A right-hand side f_c of □^{(c)}φ_c = f_c.
///
/// `table[c][q][μ]` holds X^q ∂_μ φ_c (μ = 0 is ∂_t) for q ≤ order; `powers` returns
/// X^p f_c for every component and p ≤ order.
pub trait Source: Sync {
    fn components(&self) -> usize;

    fn powers(&self, x: Derivation, t: f64, table: &[Vec<[ScalarField; 4]>], order: usize) -> Result<Vec<Vec<ScalarField>>>;
}

/// Source known in closed form: the closure returns X^p f_c for all c.
pub struct AnalyticSource<F> {
    components: usize,
    f: F,
}

impl<F> AnalyticSource<F>
where
    F: Fn(Derivation, usize, f64) -> Vec<ScalarField> + Sync,
{
    pub fn new(components: usize, f: F) -> Self {
        AnalyticSource { components, f }
    }
}

impl<F> Source for AnalyticSource<F>
where
    F: Fn(Derivation, usize, f64) -> Vec<ScalarField> + Sync,
{
    fn components(&self) -> usize {
        self.components
    }

    fn powers(&self, x: Derivation, t: f64, _table: &[Vec<[ScalarField; 4]>], order: usize) -> Result<Vec<Vec<ScalarField>>> {
        let per_p: Vec<Vec<ScalarField>> = (0..=order).map(|p| (self.f)(x, p, t)).collect();
        let mut out = vec![Vec::with_capacity(order + 1); self.components];
        for row in per_p {
            if row.len() != self.components {
                return Err(Error::Shape { expected: self.components, got: row.len() });
            }
            for (c, f) in row.into_iter().enumerate() {
                out[c].push(f);
            }
        }
        Ok(out)
    }
}

/// Fraction of L² mass in the outer third of the resolved band.
pub fn spectral_tail(f: &ScalarField) -> f64 {
    let s = Spectrum::of(f);
    let kmax = std::f64::consts::PI / f.grid().h();
    let cut = 2.0 * kmax / 3.0;
    let total = s.weighted_sum_sq(|_| 1.0);
    if total == 0.0 {
        return 0.0;
    }
    let tail = s.weighted_sum_sq(|k| if k.iter().any(|v| v.abs() > cut) { 1.0 } else { 0.0 });
    (tail / total).sqrt()
}

const TAIL_TOL: f64 = 1e-4;

fn check_data(f: &ScalarField, what: &str) -> Result<()> {
    if f.data().iter().any(|v| !v.is_finite()) {
        return Err(Error::Precondition(format!("{what} is not finite")));
    }
    let tail = spectral_tail(f);
    if tail > TAIL_TOL {
        return Err(Error::Precondition(format!("{what} is under-resolved (spectral tail {tail:.2e})")));
    }
    Ok(())
}

/// Single free component.
pub fn populate_lattice(phi0: &ScalarField, phi1: &ScalarField, eps: [f64; 3], order: usize) -> Result<CommutedLattice> {
    let mut v = populate_system(&[(phi0.clone(), phi1.clone())], &[eps], None, order)?;
    Ok(v.remove(0))
}

/// S^jφ_c and ∂_t S^jφ_c at t₀ for j ≤ order, with every ∂_t² replaced through the equation.
pub fn populate_system(
    data: &[(ScalarField, ScalarField)],
    eps: &[[f64; 3]],
    source: Option<&dyn Source>,
    order: usize,
) -> Result<Vec<CommutedLattice>> {
    if data.len() != eps.len() {
        return Err(Error::Shape { expected: data.len(), got: eps.len() });
    }
    if let Some(s) = source {
        if s.components() != data.len() {
            return Err(Error::Shape { expected: data.len(), got: s.components() });
        }
    }
    let t0 = data[0].0.time();
    if t0 < 1.0 {
        return Err(Error::Precondition(format!("initial time {t0} < 1")));
    }
    for (a, b) in data {
        check_data(a, "initial position")?;
        check_data(b, "initial velocity")?;
    }
    // tower[c][p] = ∂_t^p φ_c for p ≤ order + 1
    let mut tower: Vec<Vec<ScalarField>> = data.iter().map(|(a, b)| vec![a.clone(), b.clone()]).collect();
    for p in 0..order {
        let f_p = match source {
            None => None,
            Some(s) => {
                let table: Vec<Vec<[ScalarField; 4]>> = tower
                    .iter()
                    .map(|tw| {
                        (0..=p)
                            .map(|q| {
                                [
                                    tw[q + 1].clone(),
                                    spectral_derivative(&tw[q], UNIT[0]),
                                    spectral_derivative(&tw[q], UNIT[1]),
                                    spectral_derivative(&tw[q], UNIT[2]),
                                ]
                            })
                            .collect()
                    })
                    .collect();
                Some(s.powers(Derivation::Time, t0, &table, p)?)
            }
        };
        for (c, tw) in tower.iter_mut().enumerate() {
            let mut next = aniso_laplacian(&tw[p], eps[c]);
            if let Some(f) = &f_p {
                next.add_assign_scaled(-1.0, &f[c][p]);
            }
            tw.push(next);
        }
    }
    tower
        .into_par_iter()
        .zip(eps.par_iter())
        .map(|(tw, &e)| {
            // d[a][q] = D^a ∂_t^q φ, a + q ≤ order + 1
            let mut d: Vec<Vec<ScalarField>> = vec![tw];
            for a in 1..=order {
                let prev = &d[a - 1];
                let row: Vec<ScalarField> = prev[..prev.len() - 1].par_iter().map(euler).collect();
                d.push(row);
            }
            let grid = *d[0][0].grid();
            // S^i ∂_t^s φ = Σ_m C(i,m) Σ_p S2(m,p) t^p D^{i−m} ∂_t^{p+s} φ
            let s_power = |i: usize, s: usize| {
                let mut out = ScalarField::zeros(grid, t0);
                for m in 0..=i {
                    for p in 0..=m {
                        let c = binomial(i as u32, m as u32) * stirling2(m as u32, p as u32) * t0.powi(p as i32);
                        if c != 0.0 {
                            out.add_assign_scaled(c, &d[i - m][p + s]);
                        }
                    }
                }
                out
            };
            let levels = (0..=order)
                .map(|j| {
                    let psi = s_power(j, 0);
                    // ∂_t S^j = (S + 1)^j ∂_t
                    let mut psi_t = ScalarField::zeros(grid, t0);
                    for i in 0..=j {
                        psi_t.add_assign_scaled(binomial(j as u32, i as u32), &s_power(i, 1));
                    }
                    LatticeLevel { psi, psi_t }
                })
                .collect();
            CommutedLattice::new(e, levels)
        })
        .collect()
}

/// □S^jφ = (S + 2)^j f: combine S^p f into the level-j source.
pub fn commuted_source(s_powers: &[ScalarField], j: usize) -> ScalarField {
    let c = shifted_power_coeffs(j, 2.0);
    let mut out = ScalarField::zeros(*s_powers[0].grid(), s_powers[0].time());
    for (p, &cp) in c.iter().enumerate() {
        out.add_assign_scaled(cp, &s_powers[p]);
    }
    out
}

/// Same as [`commuted_source`] on spectra.
pub fn commuted_source_spectrum(s_powers: &[Spectrum], j: usize) -> Spectrum {
    let c = shifted_power_coeffs(j, 2.0);
    combine_spectra(&s_powers[..=j].iter().collect::<Vec<_>>(), &c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vectorfield::word::Letter;

    fn max_err(a: &ScalarField, b: &ScalarField) -> f64 {
        a.data().iter().zip(b.data()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn plane_wave_s_level() {
        // φ = cos(ξ·x − ωt) with ξ on the lattice; Sφ = (tω − ξ·x) sin(ξ·x − ωt).
        // Sφ is not periodic but only enters through pointwise products with x.
        let g = Grid::new(16, 2.0 * std::f64::consts::PI).unwrap();
        let xi: [f64; 3] = [1.0, 2.0, 0.0];
        let eps = [1.0, 1.0, 1.0];
        let w: f64 = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
        let t0 = 1.5;
        let ph = |x: [f64; 3]| xi[0] * x[0] + xi[1] * x[1] - w * t0;
        let phi0 = ScalarField::from_fn(g, t0, |x| ph(x).cos());
        let phi1 = ScalarField::from_fn(g, t0, |x| w * ph(x).sin());
        let lat = populate_lattice(&phi0, &phi1, eps, 1).unwrap();
        let want = ScalarField::from_fn(g, t0, |x| (t0 * w - (xi[0] * x[0] + xi[1] * x[1])) * ph(x).sin());
        assert!(max_err(&lat.level(1).psi, &want) < 1e-9, "{}", max_err(&lat.level(1).psi, &want));
        // ∂_t[(tω − ξ·x) sin(ph)] = ω sin(ph) − ω(tω − ξ·x) cos(ph)
        let want_t =
            ScalarField::from_fn(g, t0, |x| w * ph(x).sin() - w * (t0 * w - (xi[0] * x[0] + xi[1] * x[1])) * ph(x).cos());
        assert!(max_err(&lat.level(1).psi_t, &want_t) < 1e-9);
    }

    #[test]
    fn order_zero_is_base() {
        let g = Grid::new(32, 8.0).unwrap();
        let a = ScalarField::from_fn(g, 1.0, |x| (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])).exp());
        let b = a.scale(0.5);
        let lat = populate_lattice(&a, &b, [1.0; 3], 0).unwrap();
        assert_eq!(lat.order(), 0);
        assert_eq!(lat.base().psi.data(), a.data());
        assert_eq!(lat.base().psi_t.data(), b.data());
    }

    #[test]
    fn rejects_bad_data() {
        let g = Grid::new(16, 8.0).unwrap();
        let mut a = ScalarField::zeros(g, 1.0);
        a.data_mut()[3] = f64::NAN;
        assert!(populate_lattice(&a, &ScalarField::zeros(g, 1.0), [1.0; 3], 1).is_err());
        // white noise is not resolved
        let b = ScalarField::from_fn(g, 1.0, |x| ((x[0] * 12.9898 + x[1] * 78.233 + x[2] * 37.719).sin() * 43758.5453).fract());
        assert!(populate_lattice(&b, &ScalarField::zeros(g, 1.0), [1.0; 3], 1).is_err());
        let early = ScalarField::zeros(g, 0.5);
        assert!(populate_lattice(&early, &early, [1.0; 3], 1).is_err());
    }

    #[test]
    fn words_through_normal_form() {
        // Γ^J for J = S d1 on a Gaussian at t0: S∂₁φ = ∂₁Sφ − ∂₁φ
        let g = Grid::new(48, 12.0).unwrap();
        let a = ScalarField::from_fn(g, 1.0, |x| (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])).exp());
        let b = a.map_with_x(|x, v| x[1] * v);
        let lat = populate_lattice(&a, &b, [1.0, 4.0, 9.0], 2).unwrap();
        let (sd1, _) = lat.get(&MultiIndex(vec![Letter::S, Letter::D1])).unwrap();
        let d1s = spectral_derivative(&lat.level(1).psi, UNIT[0]);
        let d1 = spectral_derivative(&a, UNIT[0]);
        assert!(max_err(&sd1, &d1s.axpy(-1.0, &d1)) < 1e-12);
        assert!(lat.get(&MultiIndex(vec![Letter::S; 3])).is_err());
    }

    #[test]
    fn source_shift_coefficients() {
        assert_eq!(shifted_power_coeffs(2, 2.0), vec![4.0, 4.0, 1.0]);
        assert_eq!(shifted_power_coeffs(3, -1.0), vec![-1.0, 3.0, -3.0, 1.0]);
    }
}
