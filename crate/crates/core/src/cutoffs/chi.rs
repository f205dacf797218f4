//! The C² cutoff χ: 1 on [−1, 1], 0 outside [−3, 3], even, degree-11 polynomial
//! transitions, with hand-differentiated branch derivatives.

/// Branches on the negative half line, left to right.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Zero,
    Rise,
    Shoulder,
    One,
}

/// (value, first, second derivative) of one branch polynomial at x, regardless of
/// whether x lies in that branch. Used to check the junctions.
pub fn branch_jet(b: Branch, x: f64) -> (f64, f64, f64) {
    match b {
        Branch::Zero => (0.0, 0.0, 0.0),
        Branch::One => (1.0, 0.0, 0.0),
        Branch::Rise => {
            let s = x + 3.0;
            let s9 = s.powi(9);
            (0.25 * s9 * s * s, 2.75 * s9 * s, 27.5 * s9)
        }
        Branch::Shoulder => {
            let s = x + 1.0;
            let s8 = s.powi(8);
            let s9 = s8 * s;
            let s10 = s9 * s;
            (
                0.25 * (-19.0 * s10 * s - 22.0 * s10 + 4.0),
                0.25 * (-209.0 * s10 - 220.0 * s9),
                0.25 * (-2090.0 * s9 - 1980.0 * s8),
            )
        }
    }
}

fn branch_of(y: f64) -> Branch {
    // y ≤ 0
    if y <= -3.0 {
        Branch::Zero
    } else if y <= -2.0 {
        Branch::Rise
    } else if y <= -1.0 {
        Branch::Shoulder
    } else {
        Branch::One
    }
}

/// (χ, χ′, χ″) at x.
pub fn chi_jet(x: f64) -> (f64, f64, f64) {
    let y = -x.abs();
    let (v, d1, d2) = branch_jet(branch_of(y), y);
    if x > 0.0 {
        (v, -d1, d2)
    } else {
        (v, d1, d2)
    }
}

pub fn chi(x: f64) -> f64 {
    chi_jet(x).0
}

pub fn chi_d1(x: f64) -> f64 {
    chi_jet(x).1
}

pub fn chi_d2(x: f64) -> f64 {
    chi_jet(x).2
}

/// sup of (|χ′|² + |χ″|²)/χ over `samples` equispaced points of [a, b] where χ > 0.
pub fn chi_smoothness_sup_on(samples: usize, a: f64, b: f64) -> f64 {
    let mut best = 0.0f64;
    for i in 0..samples {
        let x = a + (b - a) * i as f64 / (samples - 1).max(1) as f64;
        let (v, d1, d2) = chi_jet(x);
        if v > 0.0 {
            best = best.max((d1 * d1 + d2 * d2) / v);
        }
    }
    best
}

/// The smoothness constant on [−3, 3].
pub fn chi_smoothness_sup(samples: usize) -> f64 {
    chi_smoothness_sup_on(samples, -3.0, 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values() {
        assert_eq!(chi(0.0), 1.0);
        assert_eq!(chi(-3.0), 0.0);
        assert_eq!(chi(-2.0), 0.25);
        assert_eq!(chi(-1.5), 0.9969482421875);
        assert_eq!(chi(1.5), chi(-1.5));
        assert_eq!(chi(7.0), 0.0);
        assert_eq!(chi(0.7), 1.0);
    }

    #[test]
    fn junctions() {
        let pairs = [(-3.0, Branch::Zero, Branch::Rise), (-2.0, Branch::Rise, Branch::Shoulder), (-1.0, Branch::Shoulder, Branch::One)];
        for (x, a, b) in pairs {
            let (va, da, sa) = branch_jet(a, x);
            let (vb, db, sb) = branch_jet(b, x);
            assert!((va - vb).abs() < 1e-12);
            assert!((da - db).abs() < 1e-10);
            assert!((sa - sb).abs() < 1e-10);
        }
        // second derivative at -2 from both sides equals 110/4
        assert_eq!(branch_jet(Branch::Rise, -2.0).2, 27.5);
        assert_eq!(branch_jet(Branch::Shoulder, -2.0).2, 27.5);
        // reflection at 0: odd derivative vanishes
        assert_eq!(chi_d1(0.0), 0.0);
    }

    #[test]
    fn derivatives_match_differences() {
        for &x in &[-2.7, -2.3, -1.8, -1.2, 1.3, 2.5] {
            let e = 1e-5;
            let fd1 = (chi(x + e) - chi(x - e)) / (2.0 * e);
            let fd2 = (chi(x + e) - 2.0 * chi(x) + chi(x - e)) / (e * e);
            assert!((fd1 - chi_d1(x)).abs() < 1e-7);
            assert!((fd2 - chi_d2(x)).abs() < 1e-3);
        }
    }

    #[test]
    fn smoothness_constant() {
        assert_eq!(chi_smoothness_sup_on(10_000, -1.0, 1.0), 0.0);
        let lo = chi_smoothness_sup(10_000);
        let hi = chi_smoothness_sup(1_000_001);
        assert!(hi.is_finite() && hi >= lo - 1e-6);
        assert!((hi - lo).abs() <= 0.01 * hi);
    }
}
