//! Integrated Böchner identities and the weighted Böchner ratio.

use serde::{Deserialize, Serialize};

use super::report::IdentityReport;
use super::weights::WeightSpec;
use crate::par::*;
use crate::spectral::{Jet, LatticeJets, PointEvaluator, ScalarField, SplitQuadrature};
use crate::vectorfield::{monomials, CommutedLattice};
use crate::{Error, Result};

const SUPPORT_TOL: f64 = 1e-10;

/// Errors when |f| on the outer lattice faces exceeds 1e−10 of its interior maximum.
pub fn check_support(f: &ScalarField) -> Result<()> {
    let n = f.grid().n();
    let d = f.data();
    let mut edge: f64 = 0.0;
    let mut interior: f64 = 0.0;
    for ix in 0..n {
        for iy in 0..n {
            for iz in 0..n {
                let v = d[(ix * n + iy) * n + iz].abs();
                let on_face = [ix, iy, iz].iter().any(|&i| i == 0 || i == n - 1);
                if on_face {
                    edge = edge.max(v);
                } else {
                    interior = interior.max(v);
                }
            }
        }
    }
    if edge > SUPPORT_TOL * interior {
        return Err(Error::Support { edge, interior });
    }
    Ok(())
}

/// ∫ G(x, jet) over the box: plain lattice sum, or the split rule when a quadrature
/// is given (needed when G carries r⁻² singularities).
pub fn integrate_jets<const K: usize, G>(f: &ScalarField, quad: Option<&SplitQuadrature>, g: G) -> [f64; K]
where
    G: Fn([f64; 3], &Jet) -> [f64; K] + Sync,
{
    if let Some(q) = quad {
        return q.integrate_many(f, &PointEvaluator::new(f, q.prune), g);
    }
    let grid = *f.grid();
    let jets = LatticeJets::of(f);
    let slab = grid.n() * grid.n();
    let parts: Vec<[f64; K]> = (0..grid.n())
        .into_par_iter()
        .map(|ix| {
            let mut acc = [0.0; K];
            for j in 0..slab {
                let idx = ix * slab + j;
                for (a, v) in acc.iter_mut().zip(g(grid.point(idx), &jets.jet(idx))) {
                    *a += v;
                }
            }
            acc
        })
        .collect();
    let mut out = [0.0; K];
    for (k, o) in out.iter_mut().enumerate() {
        *o = parts.iter().map(|p| p[k]).sum::<f64>() * grid.cell_volume();
    }
    out
}

#[inline]
fn r2_of(x: [f64; 3]) -> f64 {
    x[0] * x[0] + x[1] * x[1] + x[2] * x[2]
}

/// Integrated pieces of the second-order identity at time t.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BochnerTerms {
    /// ∫|Lφ|²
    pub l_sq: f64,
    /// ∫|𝛥̸φ|²
    pub slashed_lap_sq: f64,
    /// ∫r⁻²|∇̸φ|²
    pub ang_grad_over_r2: f64,
    /// ∫(1 − r²/t²)|∇̸∂_rφ|²
    pub mixed: f64,
    /// ∫|(1 − r²/t²)r⁻²∂_r(r²∂_rφ)|²
    pub radial: f64,
}

impl BochnerTerms {
    /// ∫|∇̸²φ|² through ∫|𝛥̸φ|² = ∫|∇̸²φ|² + ∫r⁻²|∇̸φ|².
    pub fn slashed_hessian_sq(&self) -> f64 {
        self.slashed_lap_sq - self.ang_grad_over_r2
    }

    /// ∫|∇̸²φ|² + 2(1 − r²/t²)|∇̸∂_rφ|² + |(1 − r²/t²)r⁻²∂_r(r²∂_rφ)|² − r⁻²|∇̸φ|².
    /// The curvature term of the sphere Böchner formula leaves one copy of r⁻²|∇̸φ|².
    pub fn rhs(&self) -> f64 {
        self.slashed_hessian_sq() + 2.0 * self.mixed + self.radial - self.ang_grad_over_r2
    }

    /// The same sum with the coefficient −2 on r⁻²|∇̸φ|².
    pub fn rhs_coefficient_two(&self) -> f64 {
        self.rhs() - self.ang_grad_over_r2
    }
}

pub fn bochner_terms(phi: &ScalarField, quad: &SplitQuadrature) -> Result<BochnerTerms> {
    check_support(phi)?;
    let t = phi.time();
    if t < 1.0 {
        return Err(Error::Precondition(format!("t = {t} < 1")));
    }
    let it2 = 1.0 / (t * t);
    let [l_sq, slashed_lap_sq, ang_grad_over_r2, mixed, radial] = integrate_jets(phi, Some(quad), |x, j| {
        let r2 = r2_of(x);
        let a = 1.0 - r2 * it2;
        let euler = j.euler(x);
        let xhx = j.xhx(x);
        let l = j.lap() - (xhx + 2.0 * euler) * it2;
        let sl = j.slashed_lap(x);
        let rad = a * (xhx + 2.0 * euler) / r2;
        [l * l, sl * sl, j.ang_grad_sq(x) / r2, a * j.ang_grad_dr_sq(x), rad * rad]
    });
    Ok(BochnerTerms { l_sq, slashed_lap_sq, ang_grad_over_r2, mixed, radial })
}

/// ∫|Lφ|² against its Böchner expansion; the divergence integrates to zero for
/// fields decaying inside the box.
pub fn bochner_integrated(phi: &ScalarField, quad: &SplitQuadrature, tol: f64) -> Result<IdentityReport> {
    let terms = bochner_terms(phi, quad)?;
    Ok(IdentityReport::identity("integrated_bochner", phi.grid().n(), terms.l_sq, terms.rhs(), tol))
}

/// ∫(−Lφ)φ = ∫|∇̸φ|² + (1 − r²/t²)|∂_rφ|² + 3t⁻²|φ|²
pub fn first_order_integrated(phi: &ScalarField, quad: &SplitQuadrature, tol: f64) -> Result<IdentityReport> {
    check_support(phi)?;
    let t = phi.time();
    let it2 = 1.0 / (t * t);
    let [lhs, rhs] = integrate_jets(phi, Some(quad), |x, j| {
        let r2 = r2_of(x);
        let l = j.lap() - (j.xhx(x) + 2.0 * j.euler(x)) * it2;
        let e = j.euler(x);
        [-l * j.v, j.ang_grad_sq(x) + (1.0 - r2 * it2) * e * e / r2 + 3.0 * it2 * j.v * j.v]
    });
    Ok(IdentityReport::identity("first_order_bochner", phi.grid().n(), lhs, rhs, tol))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedTerms {
    pub lhs: f64,
    /// ∫t⁻⁴ω|Γ^{≤2}φ|²
    pub gamma2: f64,
    /// ∫(t⁻² + r⁻²)⟨r/t⟩²ω|∂_rΓ^{≤1}φ|²
    pub radial: f64,
    /// ∫ω|f|²
    pub source: f64,
    /// ∫ω̃²ω⁻¹|φ|²
    pub tilde: f64,
}

impl WeightedTerms {
    pub fn rhs(&self) -> f64 {
        self.gamma2 + self.radial + self.source + self.tilde
    }

    pub fn ratio(&self) -> f64 {
        if self.lhs == 0.0 {
            0.0
        } else {
            self.lhs / self.rhs()
        }
    }
}

/// Both sides of the weighted Böchner inequality for a radial weight. `quad` selects the
/// split rule; plain lattice sums are exact enough when ω vanishes like r⁴ at the origin.
pub fn weighted_bochner_terms(
    lattice: &CommutedLattice,
    f: Option<&ScalarField>,
    weight: &WeightSpec,
    quad: Option<&SplitQuadrature>,
) -> Result<WeightedTerms> {
    if lattice.order() < 2 {
        return Err(Error::Order { have: lattice.order(), need: 2 });
    }
    let t = lattice.time();
    let it2 = 1.0 / (t * t);
    let phi = &lattice.base().psi;
    let grid = *phi.grid();
    for idx in 0..grid.len() {
        let r = r2_of(grid.point(idx)).sqrt();
        weight.tilde_ratio(t, r)?;
    }
    let [lhs, tilde] = integrate_jets(phi, quad, |x, j| {
        let r2 = r2_of(x);
        let r = r2.sqrt();
        let w = weight.value(t, r);
        let a = 1.0 - r2 * it2;
        let sl = j.slashed_lap(x);
        let hess = sl * sl - j.ang_grad_sq(x) / r2;
        let drr = j.drr(x);
        let lhs = w * (hess + a * j.ang_grad_dr_sq(x) + a * a * drr * drr);
        [lhs, weight.tilde_ratio(t, r).unwrap_or(f64::NAN) * j.v * j.v]
    });
    if !tilde.is_finite() {
        return Err(Error::WeightRatio(f64::NAN));
    }
    let weighted_sq = |g: &ScalarField| -> f64 {
        let d = g.data();
        (0..grid.len())
            .into_par_iter()
            .map(|i| weight.value(t, r2_of(grid.point(i)).sqrt()) * d[i] * d[i])
            .sum::<f64>()
            * grid.cell_volume()
    };
    let mut gamma2 = 0.0;
    for m in monomials(2) {
        gamma2 += weighted_sq(&lattice.monomial(m)?.0);
    }
    gamma2 *= it2 * it2;
    let mut radial = 0.0;
    for m in monomials(1) {
        let g = lattice.monomial(m)?.0;
        let [v] = integrate_jets(&g, quad, |x, j| {
            let r2 = r2_of(x);
            let w = weight.value(t, r2.sqrt());
            let e = j.euler(x);
            [(it2 + 1.0 / r2) * (1.0 + r2 * it2) * w * e * e / r2]
        });
        radial += v;
    }
    let source = f.map_or(0.0, weighted_sq);
    Ok(WeightedTerms { lhs, gamma2, radial, source, tilde })
}

/// LHS/RHS of the weighted inequality, compared against `constant`.
pub fn weighted_bochner_ratio(
    lattice: &CommutedLattice,
    f: Option<&ScalarField>,
    weight: &WeightSpec,
    quad: Option<&SplitQuadrature>,
    constant: f64,
    tol: f64,
) -> Result<IdentityReport> {
    let w = weighted_bochner_terms(lattice, f, weight, quad)?;
    Ok(IdentityReport::inequality("weighted_bochner", lattice.grid().n(), w.lhs, w.rhs(), constant, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;
    use crate::vectorfield::populate_lattice;

    fn quad() -> SplitQuadrature {
        SplitQuadrature { radial_nodes: 24, polar_nodes: 20, azimuth_nodes: 40, ..SplitQuadrature::default() }
    }

    fn gauss(x: [f64; 3]) -> f64 {
        (-r2_of(x)).exp()
    }

    #[test]
    fn radial_field_has_no_angular_part() {
        let g = Grid::new(48, 16.0).unwrap();
        let phi = ScalarField::from_fn(g, 4.0, gauss);
        let terms = bochner_terms(&phi, &quad()).unwrap();
        assert!(terms.slashed_lap_sq.abs() < 1e-10 * terms.l_sq);
        assert!(terms.ang_grad_over_r2.abs() < 1e-10 * terms.l_sq);
        assert!((terms.l_sq - terms.radial).abs() < 1e-8 * terms.l_sq, "{terms:?}");
    }

    #[test]
    fn dipole_closes_with_one_curvature_copy() {
        let g = Grid::new(48, 16.0).unwrap();
        let phi = ScalarField::from_fn(g, 4.0, |x| x[0] * gauss(x));
        let terms = bochner_terms(&phi, &quad()).unwrap();
        let rel = (terms.l_sq - terms.rhs()).abs() / terms.l_sq;
        assert!(rel < 1e-6, "{rel} {terms:?}");
        let rel2 = (terms.l_sq - terms.rhs_coefficient_two()).abs() / terms.l_sq;
        assert!(rel2 > 1e-2, "{rel2}");
    }

    #[test]
    fn bridge_matches_projected_hessian() {
        let g = Grid::new(48, 16.0).unwrap();
        let phi = ScalarField::from_fn(g, 4.0, |x| (x[0] * x[1] + 0.5 * x[2]) * gauss(x));
        let [bridge, direct] = integrate_jets(&phi, Some(&quad()), |x, j| {
            let r2 = r2_of(x);
            let sl = j.slashed_lap(x);
            [sl * sl - j.ang_grad_sq(x) / r2, j.slashed_hessian_sq(x)]
        });
        assert!((bridge - direct).abs() < 1e-8 * direct, "{bridge} {direct}");
    }

    #[test]
    fn first_order_identity_and_scaling() {
        let g = Grid::new(48, 16.0).unwrap();
        let phi = ScalarField::from_fn(g, 4.0, |x| (1.0 + x[1]) * gauss(x));
        let a = first_order_integrated(&phi, &SplitQuadrature::default(), 1e-8).unwrap();
        assert!(a.pass, "{a:?}");
        let b = first_order_integrated(&phi.scale(2.0), &SplitQuadrature::default(), 1e-8).unwrap();
        assert!((b.lhs - 4.0 * a.lhs).abs() < 1e-12 * b.lhs.abs());
        let z = first_order_integrated(&ScalarField::zeros(g, 4.0), &quad(), 1e-8).unwrap();
        assert_eq!((z.lhs, z.rhs, z.pass), (0.0, 0.0, true));
    }

    #[test]
    fn support_must_stay_inside() {
        let g = Grid::new(16, 4.0).unwrap();
        let phi = ScalarField::from_fn(g, 2.0, gauss);
        assert!(matches!(bochner_integrated(&phi, &quad(), 1e-6), Err(Error::Support { .. })));
    }

    #[test]
    fn weighted_ratio_is_finite_and_zero_for_zero() {
        let g = Grid::new(40, 16.0).unwrap();
        let p = ScalarField::from_fn(g, 3.0, |x| (x[0] + x[2]) * (-r2_of(x) / 2.0).exp());
        let lat = populate_lattice(&p, &p.scale(0.2), [1.0; 3], 2).unwrap();
        for w in WeightSpec::paper_pair([2.5, 0.0, 0.0], -20, 0) {
            let terms = weighted_bochner_terms(&lat, None, &w, None).unwrap();
            assert!(terms.ratio() > 0.0 && terms.ratio().is_finite(), "{w:?} {terms:?}");
        }
        let z = ScalarField::zeros(g, 3.0);
        let lat0 = populate_lattice(&z, &z, [1.0; 3], 2).unwrap();
        let r = weighted_bochner_ratio(&lat0, None, &WeightSpec::PowerR { alpha: 4.0 }, None, 1.0, 0.05).unwrap();
        assert_eq!((r.lhs, r.ratio()), (0.0, 0.0));
    }
}
