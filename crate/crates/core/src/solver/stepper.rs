//! System state and the Strang-split semilinear integrator.

use super::linear::Propagator;
use super::speeds::SpeedTriple;
use crate::par::*;
use crate::spectral::{Grid, ScalarField, Spectrum};
use crate::vectorfield::{
    commuted_source_spectrum, scaling_rows, CommutedLattice, Derivation, LatticeLevel, Source,
};
use crate::{Error, Result};

/// Spectra of (S^jφ_c, ∂_tS^jφ_c) for every component c and level j.
#[derive(Debug, Clone)]
pub struct SystemState {
    grid: Grid,
    t: f64,
    pub comps: Vec<Vec<(Spectrum, Spectrum)>>,
}

impl SystemState {
    pub fn from_lattices(lattices: &[CommutedLattice]) -> Result<SystemState> {
        let first = lattices.first().ok_or_else(|| Error::Precondition("no components".into()))?;
        let grid = *first.grid();
        let t = first.time();
        let order = first.order();
        for l in lattices {
            if l.order() != order || l.time() != t || *l.grid() != grid {
                return Err(Error::Precondition("component lattices disagree in order, time or grid".into()));
            }
        }
        let comps = lattices
            .iter()
            .map(|l| l.levels().par_iter().map(|lv| (Spectrum::of(&lv.psi), Spectrum::of(&lv.psi_t))).collect())
            .collect();
        Ok(SystemState { grid, t, comps })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn order(&self) -> usize {
        self.comps[0].len() - 1
    }

    pub fn m(&self) -> usize {
        self.comps.len()
    }

    /// (φ_c, ∂_tφ_c)
    pub fn base(&self, c: usize) -> (ScalarField, ScalarField) {
        let (a, b) = &self.comps[c][0];
        (a.to_field(self.t), b.to_field(self.t))
    }

    pub fn lattice(&self, c: usize, speeds: &SpeedTriple) -> Result<CommutedLattice> {
        let levels = self.comps[c]
            .par_iter()
            .map(|(a, b)| LatticeLevel { psi: a.to_field(self.t), psi_t: b.to_field(self.t) })
            .collect();
        CommutedLattice::new(speeds.eps, levels)
    }

    /// Rows ∂_μ(S − 1)^qφ_c, q ≤ order.
    pub fn scaling_table(&self, order: usize) -> Vec<Vec<[ScalarField; 4]>> {
        self.comps.iter().map(|lv| scaling_rows(&lv[..=order], self.t)).collect()
    }
}

/// max over the grid and components of |(∂_tφ, ∇φ)|
pub fn max_gradient(table: &[Vec<[ScalarField; 4]>]) -> f64 {
    table
        .iter()
        .map(|rows| {
            let r = &rows[0];
            (0..r[0].data().len())
                .into_par_iter()
                .map(|i| (0..4).map(|mu| r[mu].data()[i].powi(2)).sum::<f64>().sqrt())
                .par_reduce(|| 0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

pub struct Stepper<'a> {
    speeds: Vec<SpeedTriple>,
    source: Option<&'a dyn Source>,
    dt: f64,
    half: Vec<Propagator>,
    /// set once |∂φ| > 1 has been seen at a source evaluation
    pub warning: bool,
    pub max_gradient: f64,
}

impl<'a> Stepper<'a> {
    pub fn new(grid: Grid, speeds: &[SpeedTriple], source: Option<&'a dyn Source>, dt: f64) -> Result<Stepper<'a>> {
        if !(dt > 0.0 && dt <= 0.1) {
            return Err(Error::Precondition(format!("dt = {dt} outside (0, 0.1]")));
        }
        if let Some(s) = source {
            if s.components() != speeds.len() {
                return Err(Error::Shape { expected: speeds.len(), got: s.components() });
            }
        }
        let half = speeds.par_iter().map(|s| Propagator::new(grid, s, dt / 2.0)).collect();
        Ok(Stepper { speeds: speeds.to_vec(), source, dt, half, warning: false, max_gradient: 0.0 })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn speeds(&self) -> &[SpeedTriple] {
        &self.speeds
    }

    fn linear_half(&self, state: &mut SystemState) {
        for (c, levels) in state.comps.iter_mut().enumerate() {
            for (a, b) in levels.iter_mut() {
                self.half[c].apply(a, b);
            }
        }
    }

    /// One step of the free flow on (φ_c, ∂_tφ_c), through the same half propagators
    /// as the coupled step.
    pub fn free_step(&self, pairs: &mut [(Spectrum, Spectrum)]) {
        for (c, (a, b)) in pairs.iter_mut().enumerate() {
            self.half[c].apply(a, b);
            self.half[c].apply(a, b);
        }
    }

    /// Level sources □S^jφ_c = (S + 2)^j N_c as spectra.
    pub fn source_spectra(&mut self, state: &SystemState, t: f64) -> Result<Option<Vec<Vec<Spectrum>>>> {
        let Some(src) = self.source else { return Ok(None) };
        let k = state.order();
        let table = state.scaling_table(k);
        let g = max_gradient(&table);
        self.max_gradient = self.max_gradient.max(g);
        if g > 1.0 {
            self.warning = true;
        }
        let powers = src.powers(Derivation::Scaling, t, &table, k)?;
        Ok(Some(
            powers
                .into_iter()
                .map(|pc| {
                    let spectra: Vec<Spectrum> = pc.par_iter().map(Spectrum::of).collect();
                    (0..=k).map(|j| commuted_source_spectrum(&spectra, j)).collect()
                })
                .collect(),
        ))
    }

    fn kick(state: &mut SystemState, src: &[Vec<Spectrum>], h: f64) {
        for (levels, sc) in state.comps.iter_mut().zip(src) {
            for ((_, b), s) in levels.iter_mut().zip(sc) {
                b.data_mut().par_iter_mut().zip(s.data().par_iter()).for_each(|(v, f)| *v -= f * h);
            }
        }
    }

    /// Half linear step, midpoint kick on ∂_t, half linear step.
    pub fn step(&mut self, state: &mut SystemState) -> Result<()> {
        self.linear_half(state);
        let tm = state.t + self.dt / 2.0;
        state.t = tm;
        if let Some(src0) = self.source_spectra(state, tm)? {
            let mut mid = state.clone();
            Self::kick(&mut mid, &src0, self.dt / 2.0);
            let src1 = self.source_spectra(&mid, tm)?.expect("source present");
            Self::kick(state, &src1, self.dt);
        }
        self.linear_half(state);
        state.t = tm + self.dt / 2.0;
        Ok(())
    }
}

/// Step from the state's time to `t_end`. `observe` sees every step; its flag marks
/// output steps (the start, every `output_every` steps and the end).
pub fn integrate<F>(stepper: &mut Stepper<'_>, state: &mut SystemState, t_end: f64, output_every: usize, mut observe: F) -> Result<()>
where
    F: FnMut(&SystemState, &Stepper<'_>, bool) -> Result<()>,
{
    let t0 = state.time();
    let steps = ((t_end - t0) / stepper.dt()).round() as usize;
    let every = output_every.max(1);
    observe(state, stepper, true)?;
    for s in 1..=steps {
        stepper.step(state)?;
        // pin the clock to the step count so output times are exact multiples
        state.t = t0 + s as f64 * stepper.dt();
        observe(state, stepper, s % every == 0 || s == steps)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vectorfield::{populate_lattice, populate_system, AnalyticSource};

    fn gauss(g: Grid, t: f64, s2: f64) -> ScalarField {
        ScalarField::from_fn(g, t, |x| (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / s2).exp())
    }

    #[test]
    fn zero_source_is_linear_flow() {
        let g = Grid::new(40, 12.0).unwrap();
        let s = SpeedTriple::new([1.0, 4.0, 9.0]).unwrap();
        let a = gauss(g, 1.0, 1.0);
        let b = a.scale(0.3);
        let lat = populate_lattice(&a, &b, s.eps, 0).unwrap();
        let mut st = SystemState::from_lattices(&[lat]).unwrap();
        let mut stepper = Stepper::new(g, &[s], None, 0.1).unwrap();
        for _ in 0..10 {
            stepper.step(&mut st).unwrap();
        }
        let (p, _) = super::super::linear::exact_linear_step(&a, &b, 1.0, &s);
        assert!(st.base(0).0.axpy(-1.0, &p).max_abs() < 1e-12);
        assert!(!stepper.warning);
    }

    fn manufactured_error(dt: f64) -> f64 {
        // φ* = cos(t) e^{−r²}, N = □φ* = cos(t)(g + Δg), Δg = (4r² − 6)g
        let g = Grid::new(40, 12.0).unwrap();
        let e = [1.0; 3];
        let gg = gauss(g, 1.0, 1.0);
        let box_g = gg.map_with_x(|x, v| v + (4.0 * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) - 6.0) * v);
        let t0: f64 = 1.0;
        let lat = populate_lattice(&gg.scale(t0.cos()), &gg.scale(-t0.sin()), e, 0).unwrap();
        let src = AnalyticSource::new(1, |_, _, t: f64| vec![box_g.scale(t.cos()).with_time(t)]);
        let mut st = SystemState::from_lattices(&[lat]).unwrap();
        let mut stepper = Stepper::new(g, &[SpeedTriple::isotropic()], Some(&src), dt).unwrap();
        integrate(&mut stepper, &mut st, 2.0, 1000, |_, _, _| Ok(())).unwrap();
        st.base(0).0.axpy(-2f64.cos(), &gg).max_abs()
    }

    #[test]
    fn manufactured_second_order() {
        let e1 = manufactured_error(0.1);
        let e2 = manufactured_error(0.05);
        let rate = e1 / e2;
        assert!(rate > 3.6 && rate < 4.4, "{e1} {e2} {rate}");
    }

    #[test]
    fn populate_with_source_is_consistent() {
        let (e1, e2) = (s2_level_error(0.02), s2_level_error(0.01));
        assert!(e1 < 1e-3, "{e1}");
        assert!(e1 / e2 > 3.6 && e1 / e2 < 4.4, "{e1} {e2}");
    }

    fn s2_level_error(dt: f64) -> f64 {
        // the same manufactured solution with a lattice of order 2: the S-levels must
        // track S^jφ* computed directly from the closed form
        let g = Grid::new(48, 16.0).unwrap();
        let gg = gauss(g, 1.0, 1.0);
        let box_g = gg.map_with_x(|x, v| v + (4.0 * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) - 6.0) * v);
        let dg = crate::spectral::euler(&gg);
        let t0: f64 = 1.0;
        // S(cos t · q) = −t sin t · q + cos t · Dq ; all S-powers are built by the closure recursively
        let s_pow = move |q: &ScalarField, p: usize, t: f64| -> ScalarField {
            // S^p (a(t) q(x)) with a = cos: expand with T = t∂_t acting on cos and D on q
            let mut out = ScalarField::zeros(*q.grid(), t);
            let mut dq = vec![q.clone()];
            for i in 1..=p {
                dq.push(crate::spectral::euler(&dq[i - 1]));
            }
            // T^m cos(t) via (t∂_t)^m = Σ S2(m,r) t^r ∂_t^r
            let tcos = |m: usize| -> f64 {
                (0..=m)
                    .map(|r| {
                        crate::vectorfield::word::stirling2(m as u32, r as u32)
                            * t.powi(r as i32)
                            * match r % 4 {
                                0 => t.cos(),
                                1 => -t.sin(),
                                2 => -t.cos(),
                                _ => t.sin(),
                            }
                    })
                    .sum()
            };
            for m in 0..=p {
                out.add_assign_scaled(crate::vectorfield::word::binomial(p as u32, m as u32) * tcos(m), &dq[p - m]);
            }
            out
        };
        let bg = box_g.clone();
        let src = AnalyticSource::new(1, move |d, p, t: f64| match d {
            Derivation::Scaling => vec![s_pow(&bg, p, t)],
            Derivation::Time => {
                let c = match p % 4 {
                    0 => t.cos(),
                    1 => -t.sin(),
                    2 => -t.cos(),
                    _ => t.sin(),
                };
                vec![bg.scale(c).with_time(t)]
            }
        });
        let lats = populate_system(&[(gg.scale(t0.cos()), gg.scale(-t0.sin()))], &[[1.0; 3]], Some(&src), 2).unwrap();
        let want1 = gg.scale(-t0.sin() * t0).axpy(t0.cos(), &dg);
        assert!(lats[0].level(1).psi.axpy(-1.0, &want1).max_abs() < 1e-9);
        let mut st = SystemState::from_lattices(&lats).unwrap();
        let mut stepper = Stepper::new(g, &[SpeedTriple::isotropic()], Some(&src), dt).unwrap();
        integrate(&mut stepper, &mut st, 1.5, 1000, |_, _, _| Ok(())).unwrap();
        let t: f64 = 1.5;
        let want2 = {
            let d2g = crate::spectral::euler(&dg);
            // S²(cos t g) = (T² cos) g + 2 (T cos) Dg + cos D²g, T cos = −t sin, T² cos = −t sin − t² cos
            gg.scale(-t * t.sin() - t * t * t.cos()).axpy(-2.0 * t * t.sin(), &dg).axpy(t.cos(), &d2g)
        };
        st.lattice(0, &SpeedTriple::isotropic()).unwrap().level(2).psi.axpy(-1.0, &want2).max_abs()
    }

    #[test]
    fn rejects_large_dt() {
        let g = Grid::new(8, 4.0).unwrap();
        assert!(Stepper::new(g, &[SpeedTriple::isotropic()], None, 0.2).is_err());
    }
}
