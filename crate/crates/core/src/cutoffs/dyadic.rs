//! Dyadic rescalings of χ and the Littlewood–Paley projections P_k.

use rustfft::num_complex::Complex64;

use super::chi::{chi, chi_jet};
use crate::spectral::{ScalarField, Spectrum};

#[inline]
fn scale(k: i32) -> f64 {
    2f64.powi(-k)
}

/// χ_{≤k}(x) = χ(2^{−k}x)
pub fn chi_scaled(k: i32, x: f64) -> f64 {
    chi(scale(k) * x)
}

/// (value, d/dx, d²/dx²) of χ_{≤k}.
pub fn chi_scaled_jet(k: i32, x: f64) -> (f64, f64, f64) {
    let s = scale(k);
    let (v, d1, d2) = chi_jet(s * x);
    (v, s * d1, s * s * d2)
}

/// χ_k = χ_{≤k} − χ_{≤k−1}
pub fn chi_band(k: i32, x: f64) -> f64 {
    chi_scaled(k, x) - chi_scaled(k - 1, x)
}

/// χ_{[k1,k2]} = Σ_{k1 ≤ k ≤ k2} χ_k
pub fn chi_range(k1: i32, k2: i32, x: f64) -> f64 {
    assert!(k1 <= k2, "chi_range needs k1 <= k2");
    (k1..=k2).map(|k| chi_band(k, x)).sum()
}

/// χ_{≥k} = 1 − χ_{≤k−1}
pub fn chi_ge(k: i32, x: f64) -> f64 {
    1.0 - chi_scaled(k - 1, x)
}

/// P_k f: multiply the spectrum by χ_k(|ξ|).
pub fn pk_project(f: &ScalarField, k: i32) -> ScalarField {
    Spectrum::of(f)
        .apply(|xi| {
            let r = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
            Complex64::new(chi_band(k, r), 0.0)
        })
        .into_field(f.time())
}

/// P_{≤k} f
pub fn p_le_project(f: &ScalarField, k: i32) -> ScalarField {
    Spectrum::of(f)
        .apply(|xi| {
            let r = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
            Complex64::new(chi_scaled(k, r), 0.0)
        })
        .into_field(f.time())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    #[test]
    fn telescoping() {
        for i in 0..2000 {
            let x = -40.0 + 0.04 * i as f64;
            let s = chi_range(-3, 4, x);
            assert!((s - (chi_scaled(4, x) - chi_scaled(-4, x))).abs() < 1e-12);
        }
        assert_eq!(chi_scaled(3, 8.0), 1.0);
    }

    #[test]
    fn bands_are_nonnegative() {
        for i in 0..20000 {
            let y = -7.0 + 7e-4 * i as f64;
            assert!(chi(y / 2.0) >= chi(y));
            for k in -3..4 {
                let b = chi_band(k, y);
                assert!((0.0..=1.0).contains(&b));
            }
        }
    }

    #[test]
    fn band_support_spans_log2_6() {
        // χ_k lives on (2^{k-1}, 3·2^k): bands two apart overlap, three apart do not
        assert!(chi_band(0, 2.5) > 0.0 && chi_band(2, 2.5) > 0.0);
        for i in 0..5000 {
            let r = 1e-3 * i as f64 * 2.0;
            assert_eq!(chi_band(0, r) * chi_band(3, r), 0.0);
        }
    }

    #[test]
    fn projection_weights() {
        let g = Grid::new(16, 2.0 * std::f64::consts::PI).unwrap();
        // |ξ0| = 3 ∈ (2^{1}, 2^{2}): weight χ_2(3)
        let f = ScalarField::from_fn(g, 0.0, |x| (3.0 * x[0]).cos());
        let p = pk_project(&f, 2);
        let w = chi_band(2, 3.0);
        assert!(w > 0.0 && w <= 1.0);
        for (a, b) in p.data().iter().zip(f.data()) {
            assert!((a - w * b).abs() < 1e-12);
        }
        // Σ_k P_k f over k ∈ [-3, 4] equals P_{≤4} − P_{≤-4}
        let h = ScalarField::from_fn(g, 0.0, |x| (-(x[0] * x[0] + 2.0 * x[1] * x[1] + x[2] * x[2])).exp());
        let mut sum = ScalarField::zeros(g, 0.0);
        for k in -3..=4 {
            sum.add_assign_scaled(1.0, &pk_project(&h, k));
        }
        let want = p_le_project(&h, 4).axpy(-1.0, &p_le_project(&h, -4));
        for (a, b) in sum.data().iter().zip(want.data()) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
