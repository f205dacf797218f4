//! Radial weights ω(t, r) and the companion ω̃.

use std::fmt;
use std::sync::Arc;

use crate::cutoffs::chi_scaled_jet;
use crate::{Error, Result};

pub type RadialFn = Arc<dyn Fn(f64, f64) -> (f64, f64, f64) + Send + Sync>;

#[derive(Clone)]
pub enum WeightSpec {
    /// r^α
    PowerR { alpha: f64 },
    /// χ_{≤s}((r − |x₀|)/d) with d = min{⟨t − |x₀|⟩, t} in the paper form and
    /// d = ⟨t − |x₀|⟩ otherwise
    ConeCutoff { x0: [f64; 3], scale: i32, paper_form: bool },
    /// r^α χ_{≤s}((r − |x₀|)/⟨t − |x₀|⟩)
    Product { alpha: f64, x0: [f64; 3], scale: i32 },
    /// r^α χ²_{≥s}(r/t)
    InteriorPower { alpha: f64, scale: i32 },
    /// (t, r) ↦ (ω, ∂_rω, ∂_r²ω)
    Custom(RadialFn),
}

impl fmt::Debug for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

fn japanese(x: f64) -> f64 {
    (1.0 + x * x).sqrt()
}

fn norm3(x: [f64; 3]) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

/// (r^α)^{(0,1,2)}
fn power_jet(alpha: f64, r: f64) -> (f64, f64, f64) {
    if alpha == 0.0 {
        return (1.0, 0.0, 0.0);
    }
    (r.powf(alpha), alpha * r.powf(alpha - 1.0), alpha * (alpha - 1.0) * r.powf(alpha - 2.0))
}

fn product(a: (f64, f64, f64), b: (f64, f64, f64)) -> (f64, f64, f64) {
    (a.0 * b.0, a.1 * b.0 + a.0 * b.1, a.2 * b.0 + 2.0 * a.1 * b.1 + a.0 * b.2)
}

/// χ_{≤s}((r − c)/d) as a function of r.
fn shifted_chi(scale: i32, c: f64, d: f64, r: f64) -> (f64, f64, f64) {
    let (v, d1, d2) = chi_scaled_jet(scale, (r - c) / d);
    (v, d1 / d, d2 / (d * d))
}

impl WeightSpec {
    pub fn label(&self) -> String {
        match self {
            WeightSpec::PowerR { alpha } => format!("r^{alpha}"),
            WeightSpec::ConeCutoff { x0, scale, paper_form } => {
                format!("chi_le{scale}((r-{:.3})/{})", norm3(*x0), if *paper_form { "min(<t-|x0|>,t)" } else { "<t-|x0|>" })
            }
            WeightSpec::Product { alpha, x0, scale } => format!("r^{alpha} chi_le{scale}((r-{:.3})/<t-|x0|>)", norm3(*x0)),
            WeightSpec::InteriorPower { alpha, scale } => format!("r^{alpha} chi_ge{scale}(r/t)^2"),
            WeightSpec::Custom(_) => "custom".into(),
        }
    }

    /// (ω, ∂_rω, ∂_r²ω) at (t, r).
    pub fn jet(&self, t: f64, r: f64) -> (f64, f64, f64) {
        match self {
            WeightSpec::PowerR { alpha } => power_jet(*alpha, r),
            WeightSpec::ConeCutoff { x0, scale, paper_form } => {
                let c = norm3(*x0);
                let d = if *paper_form { japanese(t - c).min(t) } else { japanese(t - c) };
                shifted_chi(*scale, c, d, r)
            }
            WeightSpec::Product { alpha, x0, scale } => {
                let c = norm3(*x0);
                product(power_jet(*alpha, r), shifted_chi(*scale, c, japanese(t - c), r))
            }
            WeightSpec::InteriorPower { alpha, scale } => {
                // χ_{≥s} = 1 − χ_{≤s−1}
                let (v, d1, d2) = chi_scaled_jet(scale - 1, r / t);
                let g = (1.0 - v, -d1 / t, -d2 / (t * t));
                product(power_jet(*alpha, r), product(g, g))
            }
            WeightSpec::Custom(f) => f(t, r),
        }
    }

    pub fn value(&self, t: f64, r: f64) -> f64 {
        self.jet(t, r).0
    }

    /// ω̃ = (2/r)∂_rω − (1/2r²)∂_r(r²∂_rω(1 − r²/t²))
    pub fn tilde(&self, t: f64, r: f64) -> f64 {
        let (_, w1, w2) = self.jet(t, r);
        let a = 1.0 - r * r / (t * t);
        2.0 * w1 / r - w1 * a / r - 0.5 * w2 * a + r * w1 / (t * t)
    }

    /// ω̃²/ω; zero where both vanish.
    pub fn tilde_ratio(&self, t: f64, r: f64) -> Result<f64> {
        let w = self.value(t, r);
        let wt = self.tilde(t, r);
        if w > 0.0 {
            Ok(wt * wt / w)
        } else if wt == 0.0 {
            Ok(0.0)
        } else {
            Err(Error::WeightRatio(r))
        }
    }

    /// sup of (|∂_rω|² + |∂_r²ω|²)/ω over {ω > 0} on a uniform sample of (0, r_max].
    pub fn smoothness_sup(&self, t: f64, r_max: f64, samples: usize) -> f64 {
        (1..=samples)
            .map(|i| r_max * i as f64 / samples as f64)
            .filter_map(|r| {
                let (w, w1, w2) = self.jet(t, r);
                (w > 0.0).then(|| (w1 * w1 + w2 * w2) / w)
            })
            .fold(0.0, f64::max)
    }

    /// The two weights of the interior argument: r⁴χ²_{≥s}(r/t) and r⁴χ_{≤s}((r − |x₀|)/⟨t − |x₀|⟩).
    pub fn paper_pair(x0: [f64; 3], interior_scale: i32, cone_scale: i32) -> [WeightSpec; 2] {
        [
            WeightSpec::InteriorPower { alpha: 4.0, scale: interior_scale },
            WeightSpec::Product { alpha: 4.0, x0, scale: cone_scale },
        ]
    }
}
