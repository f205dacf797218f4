use rustfft::num_complex::Complex64;

use super::halfwave::{profile_distance, profile_spectrum};
use super::speeds::SpeedTriple;
use super::stepper::SystemState;
use crate::harness::DiagnosticsRow;
use crate::spectral::{Grid, Spectrum};
use crate::{Error, Result};

/// Half-wave profiles V̂_c of every component at one time.
#[derive(Debug, Clone)]
pub struct ProfileSnapshot {
    pub t: f64,
    pub v: Vec<Vec<Complex64>>,
}

impl ProfileSnapshot {
    pub fn of(state: &SystemState, speeds: &[SpeedTriple]) -> ProfileSnapshot {
        let v = state
            .comps
            .iter()
            .zip(speeds)
            .map(|(levels, s)| profile_spectrum(&levels[0].0, &levels[0].1, s, state.time(), true))
            .collect();
        ProfileSnapshot { t: state.time(), v }
    }

    /// V_c − V_c^free, where the free pairs were advanced by the same propagators. The
    /// free profile is constant, so differences between times equal those of V_c, while
    /// the phase roundoff common to both cancels.
    pub fn against_free(state: &SystemState, free: &[(Spectrum, Spectrum)], speeds: &[SpeedTriple]) -> ProfileSnapshot {
        let t = state.time();
        let v = state
            .comps
            .iter()
            .zip(free)
            .zip(speeds)
            .map(|((levels, (fa, fb)), s)| {
                let mut a = profile_spectrum(&levels[0].0, &levels[0].1, s, t, true);
                let b = profile_spectrum(fa, fb, s, t, true);
                a.iter_mut().zip(&b).for_each(|(x, y)| *x -= y);
                a
            })
            .collect();
        ProfileSnapshot { t, v }
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub grid: Grid,
    pub rows: Vec<DiagnosticsRow>,
    pub profiles: Vec<ProfileSnapshot>,
    /// |∂φ| > 1 was seen during the run
    pub warning: bool,
    pub max_gradient: f64,
}

impl Trajectory {
    pub fn new(grid: Grid) -> Trajectory {
        Trajectory { grid, rows: Vec::new(), profiles: Vec::new(), warning: false, max_gradient: 0.0 }
    }

    pub fn push(&mut self, row: DiagnosticsRow) -> Result<()> {
        if let Some(last) = self.rows.last() {
            if row.t <= last.t {
                return Err(Error::Precondition(format!("trajectory time {} after {}", row.t, last.t)));
            }
        }
        if row.t < 1.0 {
            return Err(Error::Precondition(format!("trajectory starts at t = {} < 1", row.t)));
        }
        self.rows.push(row);
        Ok(())
    }

    fn profile_at(&self, t: f64) -> Result<&ProfileSnapshot> {
        self.profiles
            .iter()
            .find(|p| (p.t - t).abs() < 1e-9)
            .ok_or_else(|| Error::Precondition(format!("no half-wave profile stored at t = {t}")))
    }
}

/// ‖V_i(t2) − V_i(t1)‖_{L²}
pub fn scattering_drift(traj: &Trajectory, i: usize, t1: f64, t2: f64) -> Result<f64> {
    if t1 < 1.0 || t2 < t1 {
        return Err(Error::Precondition(format!("drift needs t2 ≥ t1 ≥ 1, got ({t1}, {t2})")));
    }
    if t1 == t2 {
        return Ok(0.0);
    }
    let a = traj.profile_at(t1)?;
    let b = traj.profile_at(t2)?;
    Ok(profile_distance(&traj.grid, &a.v[i], &b.v[i]))
}
