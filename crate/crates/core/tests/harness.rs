use std::path::PathBuf;

use aniso_core::harness::constants::NAMES;
use aniso_core::harness::{decay_fit, last_octave, CalibratedConstants, Config, Verdict, CHECK_IDS};
use proptest::prelude::*;

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

proptest! {
    #[test]
    fn power_laws_fit_exactly(p in -3.0f64..1.0, c in 1e-6f64..1e3, t_end in 16.0f64..64.0) {
        let series: Vec<(f64, f64)> = (0..200).map(|i| { let t = 1.0 + i as f64 * (t_end - 1.0) / 199.0; (t, c * t.powf(p)) }).collect();
        let f = decay_fit(&series, last_octave(&series)).unwrap();
        prop_assert!((f.exponent - p).abs() < 1e-10);
        prop_assert!((f.r2 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn constants_allow_five_percent(f in 0.0f64..2.0) {
        let c = CalibratedConstants::bundled();
        for n in NAMES {
            let stored = c.get(n).unwrap();
            prop_assert_eq!(c.check(n, stored * f).unwrap().pass, stored * f <= 1.05 * stored);
        }
    }
}

#[test]
fn fits_reject_nonpositive_samples() {
    let series: Vec<(f64, f64)> = (1..=20).map(|i| (i as f64, if i == 15 { 0.0 } else { 1.0 / i as f64 })).collect();
    assert!(decay_fit(&series, (8.0, 20.0)).is_err());
    assert!(decay_fit(&series[..3], (1.0, 3.0)).is_err());
}

#[test]
fn shipped_configs_parse_and_hash_stably() {
    for entry in std::fs::read_dir(configs()).unwrap() {
        let p = entry.unwrap().path();
        let a = Config::parse(&std::fs::read_to_string(&p).unwrap()).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        let b = Config::parse(&std::fs::read_to_string(&p).unwrap()).unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}

#[test]
fn unknown_keys_are_rejected() {
    assert!(Config::parse("seed = 1\n[grid]\nn = 32\nL = 10.0\nsize = 3\n").is_err());
    assert!(Config::parse("seed = 1\n[run]\nt0 = 0.5\n").is_err());
}

#[test]
fn verdicts_carry_every_check() {
    let mut v = Verdict::default();
    assert!(!v.any_failed());
    v.set("commutation", false, 1.0, 1e-8);
    assert!(v.any_failed());
    let json: serde_json::Value = serde_json::from_str(&v.to_json()).unwrap();
    for id in CHECK_IDS {
        assert!(json.get(id).is_some(), "{id}");
    }
}
