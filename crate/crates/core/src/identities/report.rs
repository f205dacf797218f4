use serde::{Deserialize, Serialize};

/// One identity or inequality evaluation. For identities `residual = |lhs − rhs|`;
/// for inequalities `residual = max(0, lhs − C·rhs)` with the stored constant C.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub check: String,
    pub resolution: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub constant: Option<f64>,
    pub tolerance_used: f64,
    pub pass: bool,
}

impl IdentityReport {
    /// Passes when |lhs − rhs| ≤ tol · max(|lhs|, |rhs|).
    pub fn identity(check: &str, resolution: usize, lhs: f64, rhs: f64, tol: f64) -> IdentityReport {
        let residual = (lhs - rhs).abs();
        let scale = lhs.abs().max(rhs.abs());
        IdentityReport {
            check: check.into(),
            resolution,
            lhs,
            rhs,
            residual,
            constant: None,
            tolerance_used: tol,
            pass: residual <= tol * scale && residual.is_finite(),
        }
    }

    /// Passes when lhs ≤ (1 + tol)·C·rhs.
    pub fn inequality(check: &str, resolution: usize, lhs: f64, rhs: f64, constant: f64, tol: f64) -> IdentityReport {
        IdentityReport {
            check: check.into(),
            resolution,
            lhs,
            rhs,
            residual: (lhs - constant * rhs).max(0.0),
            constant: Some(constant),
            tolerance_used: tol,
            pass: lhs <= (1.0 + tol) * constant * rhs && lhs.is_finite(),
        }
    }

    /// |lhs − rhs| / max(|lhs|, |rhs|), zero when both vanish.
    pub fn relative(&self) -> f64 {
        let scale = self.lhs.abs().max(self.rhs.abs());
        if scale == 0.0 {
            0.0
        } else {
            self.residual / scale
        }
    }

    /// lhs/rhs, zero when lhs vanishes.
    pub fn ratio(&self) -> f64 {
        if self.lhs == 0.0 {
            0.0
        } else {
            self.lhs / self.rhs
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_inequality() {
        let a = IdentityReport::identity("x", 64, 1.0, 1.0 + 1e-9, 1e-8);
        assert!(a.pass && a.relative() < 2e-9);
        let z = IdentityReport::identity("z", 64, 0.0, 0.0, 1e-8);
        assert!(z.pass && z.relative() == 0.0 && z.ratio() == 0.0);
        let b = IdentityReport::inequality("y", 64, 2.1, 1.0, 2.0, 0.05);
        assert!(b.pass && (b.residual - 0.1).abs() < 1e-15);
        assert!(!IdentityReport::inequality("y", 64, 2.2, 1.0, 2.0, 0.05).pass);
    }
}
