use aniso_core::solver::{exact_linear_step, linear_energy, Propagator, SpeedTriple};
use aniso_core::spectral::{Grid, ScalarField, Spectrum};
use proptest::prelude::*;

fn data(g: Grid, c: [f64; 3]) -> (ScalarField, ScalarField) {
    let phi = ScalarField::from_fn(g, 1.0, |x| (-((x[0] - c[0]).powi(2) + x[1] * x[1] + (x[2] - c[2]).powi(2))).exp());
    let phi_t = phi.map_with_x(|x, v| x[1] * v);
    (phi, phi_t)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn steps_compose(eps in prop::array::uniform3(0.3f64..9.0), a in 0.0f64..3.0, b in 0.0f64..3.0, c in prop::array::uniform3(-1.0f64..1.0)) {
        let g = Grid::new(24, 12.0).unwrap();
        let s = SpeedTriple::new(eps).unwrap();
        let (phi, phi_t) = data(g, c);
        let (p1, v1) = exact_linear_step(&phi, &phi_t, a, &s);
        let (p2, v2) = exact_linear_step(&p1, &v1, b, &s);
        let (q, w) = exact_linear_step(&phi, &phi_t, a + b, &s);
        prop_assert!(p2.axpy(-1.0, &q).max_abs() < 1e-11);
        prop_assert!(v2.axpy(-1.0, &w).max_abs() < 1e-10);
    }

    #[test]
    fn backward_step_inverts(eps in prop::array::uniform3(0.3f64..9.0), t in 0.0f64..5.0) {
        let g = Grid::new(24, 12.0).unwrap();
        let s = SpeedTriple::new(eps).unwrap();
        let (phi, phi_t) = data(g, [0.0; 3]);
        let (p, v) = exact_linear_step(&phi, &phi_t, t, &s);
        let (p0, v0) = exact_linear_step(&p, &v, -t, &s);
        prop_assert!(p0.axpy(-1.0, &phi).max_abs() < 1e-11);
        prop_assert!(v0.axpy(-1.0, &phi_t).max_abs() < 1e-11);
    }

    #[test]
    fn propagator_conserves_energy(eps in prop::array::uniform3(0.3f64..9.0), steps in 1usize..40) {
        let g = Grid::new(24, 12.0).unwrap();
        let s = SpeedTriple::new(eps).unwrap();
        let (phi, phi_t) = data(g, [0.5, 0.0, -0.5]);
        let (mut a, mut b) = (Spectrum::of(&phi), Spectrum::of(&phi_t));
        let e0 = linear_energy(&a, &b, &s);
        let prop = Propagator::new(g, &s, 0.1);
        for _ in 0..steps {
            prop.apply(&mut a, &mut b);
        }
        prop_assert!(((linear_energy(&a, &b, &s) - e0) / e0).abs() < 1e-12);
    }

    #[test]
    fn cone_radius_is_a_norm(eps in prop::array::uniform3(0.3f64..9.0), x in prop::array::uniform3(-5.0f64..5.0), k in -3.0f64..3.0) {
        let s = SpeedTriple::new(eps).unwrap();
        let r = s.cone_radius(x);
        prop_assert!((s.cone_radius(x.map(|v| k * v)) - k.abs() * r).abs() <= 1e-12 * (1.0 + r));
        prop_assert!(r >= 0.0);
    }
}

#[test]
fn nonpositive_speeds_are_rejected() {
    assert!(SpeedTriple::new([1.0, 0.0, 1.0]).is_err());
    assert!(SpeedTriple::new([1.0, f64::NAN, 1.0]).is_err());
}
