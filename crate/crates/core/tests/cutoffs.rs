use std::f64::consts::PI;

use aniso_core::cutoffs::{
    angular_cutoff, chi, chi_band, chi_ge, chi_jet, chi_range, skl_measure_quad, theta_set, DyadicIndex, PhaseSetSpec, Sign,
};
use proptest::prelude::*;

proptest! {
    #[test]
    fn chi_is_a_plateau_cutoff(x in -6.0f64..6.0) {
        let v = chi(x);
        prop_assert!((0.0..=1.0).contains(&v));
        if x.abs() <= 1.0 { prop_assert_eq!(v, 1.0); }
        if x.abs() >= 3.0 { prop_assert_eq!(v, 0.0); }
        prop_assert_eq!(v, chi(-x));
    }

    #[test]
    fn chi_is_c2_across_points(x in -3.5f64..3.5) {
        let h = 1e-6;
        let (v, d1, d2) = chi_jet(x);
        let (vp, d1p, _) = chi_jet(x + h);
        let (vm, d1m, _) = chi_jet(x - h);
        prop_assert!(((vp - vm) / (2.0 * h) - d1).abs() < 1e-5);
        prop_assert!(((d1p - d1m) / (2.0 * h) - d2).abs() < 1e-3);
        prop_assert!(v.is_finite());
    }

    #[test]
    fn bands_telescope(x in 0.0f64..1e4, k1 in -8i32..0, k2 in 0i32..8) {
        let sum: f64 = (k1..=k2).map(|k| chi_band(k, x)).sum();
        prop_assert!((sum - chi_range(k1, k2, x)).abs() <= 1e-12);
        prop_assert!((0..=8).all(|k| chi_band(k, x) >= 0.0));
        prop_assert!((0.0..=1.0).contains(&chi_ge(k1, x)));
    }

    #[test]
    fn angular_cutoff_is_bounded(k in -3i32..3, l in -6i32..1, m in -4i32..4,
                                 xi in prop::array::uniform3(-8.0f64..8.0), x in prop::array::uniform3(-8.0f64..8.0), t in 1.0f64..20.0) {
        if let Ok(idx) = DyadicIndex::new(k, l, m) {
            let v = angular_cutoff(idx, xi, x, t).unwrap_or(0.0);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&v));
        }
    }

    #[test]
    fn theta_sets_are_ordered_subintervals(b in -12.0f64..12.0, l in -20i32..3) {
        let set = theta_set(b, l);
        let mut last = 0.0;
        for (lo, hi) in set {
            prop_assert!(lo >= last - 1e-15 && lo <= hi && hi <= PI + 1e-15);
            last = hi;
        }
    }

    #[test]
    fn measure_grows_with_l_and_fits_the_shell(beta in 0.0f64..3.0, k in -3i32..3, l in -12i32..1, plus in any::<bool>()) {
        let mu = if plus { Sign::Plus } else { Sign::Minus };
        let small = skl_measure_quad(&PhaseSetSpec::from_beta(beta, k, l, mu), 64, 64).unwrap();
        let big = PhaseSetSpec::from_beta(beta, k, l + 1, mu);
        let large = skl_measure_quad(&big, 64, 64).unwrap();
        prop_assert!(small >= 0.0 && small <= large * (1.0 + 1e-9) + 1e-300);
        prop_assert!(large <= big.shell_volume() * (1.0 + 1e-9));
    }
}
