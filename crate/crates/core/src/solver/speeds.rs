use serde::{Deserialize, Serialize};

use crate::spectral::Region;
use crate::{Error, Result};

/// Coefficients of □ = −∂_t² + Σ_j ε_j ∂_j².
///
/// The cone radius is r(x) = √(Σ_j ε_j^p x_j²). The formula as usually displayed has
/// p = −2; the characteristic cone of □ itself has p = −1. Both are available.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedTriple {
    pub eps: [f64; 3],
    pub cone_exponent: f64,
}

pub const DEFAULT_CONE_EXPONENT: f64 = -2.0;

impl SpeedTriple {
    pub fn new(eps: [f64; 3]) -> Result<SpeedTriple> {
        if eps.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return Err(Error::Config(format!("speed coefficients must be positive, got {eps:?}")));
        }
        Ok(SpeedTriple { eps, cone_exponent: DEFAULT_CONE_EXPONENT })
    }

    pub fn isotropic() -> SpeedTriple {
        SpeedTriple { eps: [1.0; 3], cone_exponent: DEFAULT_CONE_EXPONENT }
    }

    pub fn with_cone_exponent(mut self, p: f64) -> SpeedTriple {
        self.cone_exponent = p;
        self
    }

    #[inline]
    pub fn omega(&self, k: [f64; 3]) -> f64 {
        (self.eps[0] * k[0] * k[0] + self.eps[1] * k[1] * k[1] + self.eps[2] * k[2] * k[2]).sqrt()
    }

    /// Largest propagation speed, √max ε_j.
    pub fn max_speed(&self) -> f64 {
        self.eps.iter().cloned().fold(0.0, f64::max).sqrt()
    }

    pub fn cone_coeffs(&self) -> [f64; 3] {
        self.eps.map(|e| e.powf(self.cone_exponent))
    }

    #[inline]
    pub fn cone_radius(&self, x: [f64; 3]) -> f64 {
        let c = self.cone_coeffs();
        (c[0] * x[0] * x[0] + c[1] * x[1] * x[1] + c[2] * x[2] * x[2]).sqrt()
    }

    /// {q_lo ≤ t − r(x) < q_hi}
    pub fn cone_shell(&self, q_lo: f64, q_hi: f64) -> Region {
        Region::ConeShell { coeffs: self.cone_coeffs(), q_min: q_lo, q_max: q_hi }
    }
}
