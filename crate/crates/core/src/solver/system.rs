//! Coupled systems □^{(i)}φ_i = N_i with trilinear first-derivative nonlinearities.

use serde::{Deserialize, Serialize};

use super::speeds::SpeedTriple;
use crate::par::*;
use crate::spectral::{Grid, ScalarField};
use crate::vectorfield::{Derivation, Source};
use crate::{Error, Result};

/// ∂_μ with μ = t, x, y, z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slot {
    T,
    X,
    Y,
    Z,
}

impl Slot {
    pub fn index(self) -> usize {
        match self {
            Slot::T => 0,
            Slot::X => 1,
            Slot::Y => 2,
            Slot::Z => 3,
        }
    }
}

/// ∂_μ φ_c
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    pub c: usize,
    pub d: Slot,
}

/// coeff · ∂φ_{a₁} ∂φ_{a₂} ∂φ_{a₃}, contributing to N_target
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub target: usize,
    pub coeff: f64,
    pub factors: [Factor; 3],
}

impl Term {
    pub fn self_interacting(&self) -> bool {
        let [a, b, c] = self.factors.map(|f| f.c);
        a == b || b == c || a == c
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trilinear {
    pub components: usize,
    pub terms: Vec<Term>,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|v| v as f64).product()
}

impl Trilinear {
    pub fn new(components: usize, terms: Vec<Term>) -> Result<Trilinear> {
        for t in &terms {
            if t.target >= components || t.factors.iter().any(|f| f.c >= components) {
                return Err(Error::Config(format!("nonlinearity term refers to a component ≥ {components}")));
            }
            if !t.coeff.is_finite() {
                return Err(Error::Config("non-finite nonlinearity coefficient".into()));
            }
        }
        Ok(Trilinear { components, terms })
    }

    pub fn zero(components: usize) -> Trilinear {
        Trilinear { components, terms: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.coeff == 0.0)
    }

    /// K with |N_i| ≤ K Σ_a |∂φ_a|³, from AM-GM on each product.
    pub fn cubic_bound(&self) -> f64 {
        (0..self.components)
            .map(|i| self.terms.iter().filter(|t| t.target == i).map(|t| t.coeff.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn scaled(&self, lambda: f64) -> Trilinear {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.coeff *= lambda;
        }
        out
    }

    /// N_i at a point from ∂φ; `d[c][μ]`.
    pub fn eval_point(&self, d: &[[f64; 4]]) -> Vec<f64> {
        let mut out = vec![0.0; self.components];
        for t in &self.terms {
            let v: f64 = t.factors.iter().map(|f| d[f.c][f.d.index()]).product();
            out[t.target] += t.coeff * v;
        }
        out
    }

    /// X^p N_c by Leibniz, and optionally the product-rule variation ∂_t X^p N_c when
    /// `dtable` holds ∂_t of every table entry.
    fn leibniz(
        &self,
        target: usize,
        p: usize,
        grid: Grid,
        t: f64,
        table: &[Vec<[ScalarField; 4]>],
        dtable: Option<&[Vec<[ScalarField; 4]>]>,
    ) -> ScalarField {
        let mut splits = Vec::new();
        for p1 in 0..=p {
            for p2 in 0..=(p - p1) {
                let p3 = p - p1 - p2;
                splits.push(([p1, p2, p3], factorial(p) / (factorial(p1) * factorial(p2) * factorial(p3))));
            }
        }
        let terms: Vec<&Term> = self.terms.iter().filter(|x| x.target == target && x.coeff != 0.0).collect();
        type Slices<'a> = Vec<([&'a [f64]; 3], Option<[&'a [f64]; 3]>, f64)>;
        let mut work: Slices = Vec::new();
        for term in &terms {
            for (ps, mult) in &splits {
                fn get<'b>(tb: &'b [Vec<[ScalarField; 4]>], term: &Term, ps: &[usize; 3], k: usize) -> &'b [f64] {
                    let f = term.factors[k];
                    tb[f.c][ps[k]][f.d.index()].data()
                }
                let a = [get(table, term, ps, 0), get(table, term, ps, 1), get(table, term, ps, 2)];
                let da = dtable.map(|d| [get(d, term, ps, 0), get(d, term, ps, 1), get(d, term, ps, 2)]);
                work.push((a, da, term.coeff * mult));
            }
        }
        let data = (0..grid.len())
            .into_par_iter()
            .map(|i| {
                let mut acc = 0.0;
                for (a, da, c) in &work {
                    let (x, y, z) = (a[0][i], a[1][i], a[2][i]);
                    acc += c * match da {
                        None => x * y * z,
                        Some(d) => d[0][i] * y * z + x * d[1][i] * z + x * y * d[2][i],
                    };
                }
                acc
            })
            .collect();
        ScalarField::new(grid, data, t).expect("shape")
    }

    /// ∂_t X^p N_c for p ≤ order.
    pub fn powers_dt(
        &self,
        t: f64,
        table: &[Vec<[ScalarField; 4]>],
        dtable: &[Vec<[ScalarField; 4]>],
        order: usize,
    ) -> Result<Vec<Vec<ScalarField>>> {
        let grid = *table[0][0][0].grid();
        Ok((0..self.components)
            .map(|c| (0..=order).map(|p| self.leibniz(c, p, grid, t, table, Some(dtable))).collect())
            .collect())
    }
}

impl Source for Trilinear {
    fn components(&self) -> usize {
        self.components
    }

    fn powers(&self, _x: Derivation, t: f64, table: &[Vec<[ScalarField; 4]>], order: usize) -> Result<Vec<Vec<ScalarField>>> {
        if table.len() != self.components {
            return Err(Error::Shape { expected: self.components, got: table.len() });
        }
        if table.iter().any(|rows| rows.len() <= order) {
            return Err(Error::Order { have: table.iter().map(|r| r.len()).min().unwrap_or(0).saturating_sub(1), need: order });
        }
        let grid = *table[0][0][0].grid();
        Ok((0..self.components)
            .map(|c| (0..=order).map(|p| self.leibniz(c, p, grid, t, table, None)).collect())
            .collect())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flags {
    pub separation_required: bool,
    pub no_self_interaction: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub speeds: Vec<SpeedTriple>,
    pub nonlinearity: Trilinear,
    pub flags: Flags,
    /// lower bound for min |r_i − r_j| / max(r_i, r_j)
    pub separation_margin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Validation {
    pub min_separation: f64,
    pub cubic_bound: f64,
}

impl SystemSpec {
    pub fn new(speeds: Vec<SpeedTriple>, nonlinearity: Trilinear, flags: Flags) -> Result<SystemSpec> {
        if speeds.len() != nonlinearity.components {
            return Err(Error::Config(format!(
                "{} speed triples for {} components",
                speeds.len(),
                nonlinearity.components
            )));
        }
        Ok(SystemSpec { speeds, nonlinearity, flags, separation_margin: 0.1 })
    }

    pub fn m(&self) -> usize {
        self.speeds.len()
    }

    pub fn source(&self) -> Option<&dyn Source> {
        if self.nonlinearity.is_zero() {
            None
        } else {
            Some(&self.nonlinearity)
        }
    }

    /// min over lattice points x ≠ 0 and pairs i ≠ j of |r_i − r_j| / max(r_i, r_j).
    pub fn min_separation(&self, grid: &Grid) -> f64 {
        if self.m() < 2 {
            return 1.0;
        }
        (0..grid.len())
            .into_par_iter()
            .map(|idx| {
                let x = grid.point(idx);
                let r: Vec<f64> = self.speeds.iter().map(|s| s.cone_radius(x)).collect();
                let mut best = f64::INFINITY;
                for i in 0..r.len() {
                    for j in (i + 1)..r.len() {
                        let d = (r[i] - r[j]).abs() / r[i].max(r[j]);
                        best = best.min(d);
                    }
                }
                best
            })
            .par_reduce(|| f64::INFINITY, f64::min)
    }

    pub fn validate(&self, grid: &Grid) -> Result<Validation> {
        if self.flags.no_self_interaction {
            if let Some(t) = self.nonlinearity.terms.iter().find(|t| t.coeff != 0.0 && t.self_interacting()) {
                return Err(Error::Config(format!("self-interacting term {t:?} with no_self_interaction set")));
            }
        }
        let min_separation = self.min_separation(grid);
        if self.flags.separation_required && min_separation < self.separation_margin {
            return Err(Error::Config(format!(
                "cones not separated: min |r_i − r_j|/max = {min_separation:.3} < {}",
                self.separation_margin
            )));
        }
        Ok(Validation { min_separation, cubic_bound: self.nonlinearity.cubic_bound() })
    }
}

/// Pure trilinear coupling for m = 3: every term takes one factor from each component,
/// so no component meets itself.
pub fn no_self_interaction_coupling(c: f64) -> Trilinear {
    let f = |c: usize, d: Slot| Factor { c, d };
    let terms = vec![
        Term { target: 0, coeff: c, factors: [f(0, Slot::T), f(1, Slot::T), f(2, Slot::T)] },
        Term { target: 1, coeff: c, factors: [f(0, Slot::X), f(1, Slot::T), f(2, Slot::T)] },
        Term { target: 2, coeff: c, factors: [f(0, Slot::T), f(1, Slot::T), f(2, Slot::X)] },
    ];
    Trilinear { components: 3, terms }
}

/// N_i = c (∂_tφ_i)³ + c ∂_tφ_i (∂_tφ_j)² for two components.
pub fn generic_cubic(c: f64) -> Trilinear {
    let f = |c: usize, d: Slot| Factor { c, d };
    let terms = vec![
        Term { target: 0, coeff: c, factors: [f(0, Slot::T), f(0, Slot::T), f(0, Slot::T)] },
        Term { target: 0, coeff: c, factors: [f(0, Slot::X), f(1, Slot::T), f(1, Slot::T)] },
        Term { target: 1, coeff: c, factors: [f(1, Slot::T), f(1, Slot::T), f(1, Slot::T)] },
        Term { target: 1, coeff: c, factors: [f(1, Slot::X), f(0, Slot::T), f(0, Slot::T)] },
    ];
    Trilinear { components: 2, terms }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_and_bounds() {
        let nl = no_self_interaction_coupling(1.0);
        assert!(nl.terms.iter().all(|t| !t.self_interacting()));
        assert_eq!(nl.cubic_bound(), 1.0);
        let g = generic_cubic(2.0);
        assert_eq!(g.cubic_bound(), 4.0);
        let speeds = vec![SpeedTriple::isotropic(); 2];
        let flags = Flags { separation_required: false, no_self_interaction: true };
        let spec = SystemSpec::new(speeds, g, flags).unwrap();
        let grid = Grid::new(8, 4.0).unwrap();
        assert!(spec.validate(&grid).is_err());
        assert!(Trilinear::new(2, vec![Term {
            target: 3,
            coeff: 1.0,
            factors: [Factor { c: 0, d: Slot::T }; 3]
        }])
        .is_err());
    }

    #[test]
    fn separation() {
        let grid = Grid::new(16, 8.0).unwrap();
        let same = SystemSpec::new(vec![SpeedTriple::isotropic(); 3], no_self_interaction_coupling(1.0), Flags {
            separation_required: true,
            no_self_interaction: true,
        })
        .unwrap();
        assert!(same.min_separation(&grid) < 1e-12);
        assert!(same.validate(&grid).is_err());
        let sep = SystemSpec::new(
            vec![
                SpeedTriple::new([1.0, 0.9, 0.8]).unwrap(),
                SpeedTriple::new([0.36, 0.3, 0.25]).unwrap(),
                SpeedTriple::new([0.09, 0.08, 0.07]).unwrap(),
            ],
            no_self_interaction_coupling(1.0),
            Flags { separation_required: true, no_self_interaction: true },
        )
        .unwrap();
        let v = sep.validate(&grid).unwrap();
        assert!(v.min_separation > 0.5, "{}", v.min_separation);
    }

    #[test]
    fn point_eval() {
        let nl = no_self_interaction_coupling(2.0);
        let d = [[1.0, 2.0, 0.0, 0.0], [3.0, 0.0, 0.0, 0.0], [5.0, 7.0, 0.0, 0.0]];
        assert_eq!(nl.eval_point(&d), vec![30.0, 60.0, 42.0]);
    }
}
