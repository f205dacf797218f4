//! Log-log decay fits.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub exponent: f64,
    pub stderr: f64,
    pub intercept: f64,
    pub window: (f64, f64),
    pub r2: f64,
    pub samples: usize,
}

/// Least-squares slope of log v against log t over t ∈ [lo, hi].
pub fn decay_fit(series: &[(f64, f64)], window: (f64, f64)) -> Result<FitResult> {
    let pts: Vec<(f64, f64)> =
        series.iter().cloned().filter(|(t, _)| *t >= window.0 - 1e-12 && *t <= window.1 + 1e-12).collect();
    if pts.len() < 6 {
        return Err(Error::FitWindow(pts.len()));
    }
    if let Some(&(t, value)) = pts.iter().find(|(t, v)| *t <= 0.0 || *v <= 0.0 || !v.is_finite()) {
        return Err(Error::NonPositive { t, value });
    }
    let xy: Vec<(f64, f64)> = pts.iter().map(|(t, v)| (t.ln(), v.ln())).collect();
    let (slope, intercept, stderr, r2) = linear_regression(&xy);
    Ok(FitResult { exponent: slope, stderr, intercept, window, r2, samples: xy.len() })
}

/// (slope, intercept, slope standard error, r²)
pub fn linear_regression(xy: &[(f64, f64)]) -> (f64, f64, f64, f64) {
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = xy.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xy.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let stderr = if xy.len() > 2 { (sse / (n - 2.0) / sxx).sqrt() } else { f64::NAN };
    let r2 = if syy == 0.0 { 1.0 } else { 1.0 - sse / syy };
    (slope, intercept, stderr, r2)
}

/// The last dyadic octave [t_end/2, t_end].
pub fn last_octave(series: &[(f64, f64)]) -> (f64, f64) {
    let t_end = series.iter().map(|p| p.0).fold(f64::MIN, f64::max);
    (t_end / 2.0, t_end)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let s: Vec<(f64, f64)> = (1..=40).map(|i| i as f64).map(|t| (t, 5.0 / t)).collect();
        let f = decay_fit(&s, (1.0, 40.0)).unwrap();
        assert!((f.exponent + 1.0).abs() < 1e-12);
        assert!(f.stderr < 1e-12);
        assert!((f.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn late_window_sees_t_inverse() {
        // t^{−1/2}⟨t − 10⟩^{−1/2}
        let s: Vec<(f64, f64)> =
            (1..=4000).map(|i| i as f64 * 0.5).map(|t| (t, t.powf(-0.5) * (1.0 + (t - 10.0).powi(2)).powf(-0.25))).collect();
        let early = decay_fit(&s, (100.0, 200.0)).unwrap().exponent;
        let late = decay_fit(&s, (1000.0, 2000.0)).unwrap().exponent;
        assert!((late + 1.0).abs() < (early + 1.0).abs());
        assert!((late + 1.0).abs() < 0.01);
    }

    #[test]
    fn errors() {
        let s: Vec<(f64, f64)> = (1..=10).map(|i| (i as f64, 1.0)).collect();
        assert!(matches!(decay_fit(&s, (1.0, 3.0)), Err(Error::FitWindow(3))));
        let mut z = s.clone();
        z[4].1 = 0.0;
        assert!(matches!(decay_fit(&z, (1.0, 10.0)), Err(Error::NonPositive { .. })));
        assert_eq!(last_octave(&s), (5.0, 10.0));
    }
}
