//! Words over {∂₁, ∂₂, ∂₃, S} and their normal form Σ c ∂^α S^j.
//!
//! Normal ordering uses S∂^α = ∂^α(S − |α|), which follows from [S, ∂_i] = −∂_i.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    D1,
    D2,
    D3,
    S,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::D1, Letter::D2, Letter::D3, Letter::S];

    pub fn axis(self) -> Option<usize> {
        match self {
            Letter::D1 => Some(0),
            Letter::D2 => Some(1),
            Letter::D3 => Some(2),
            Letter::S => None,
        }
    }
}

/// A word Γ^J; the rightmost letter acts first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<Letter>);

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for l in &self.0 {
            let s = match l {
                Letter::D1 => "d1",
                Letter::D2 => "d2",
                Letter::D3 => "d3",
                Letter::S => "S",
            };
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// ∂^α S^j
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Monomial {
    pub alpha: [u32; 3],
    pub j: u32,
}

impl Monomial {
    pub fn order(&self) -> u32 {
        self.alpha.iter().sum::<u32>() + self.j
    }

    pub fn spatial_order(&self) -> u32 {
        self.alpha.iter().sum()
    }
}

/// All monomials with |α| + j ≤ k, ordered by (j, α).
pub fn monomials(k: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    for j in 0..=k {
        for a in 0..=(k - j) {
            for b in 0..=(k - j - a) {
                for c in 0..=(k - j - a - b) {
                    out.push(Monomial { alpha: [a, b, c], j });
                }
            }
        }
    }
    out.sort();
    out
}

/// Σ coeff · ∂^α S^j
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NormalForm {
    pub terms: BTreeMap<Monomial, i64>,
}

impl NormalForm {
    pub fn identity() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial { alpha: [0; 3], j: 0 }, 1);
        NormalForm { terms }
    }

    /// Left-multiply by a letter; `shift` replaces S by S + shift.
    fn left_mul(&self, letter: Letter, shift: i64) -> Self {
        let mut out: BTreeMap<Monomial, i64> = BTreeMap::new();
        for (m, &c) in &self.terms {
            match letter.axis() {
                Some(i) => {
                    let mut a = m.alpha;
                    a[i] += 1;
                    *out.entry(Monomial { alpha: a, j: m.j }).or_default() += c;
                }
                None => {
                    // (S + shift) ∂^α S^j = ∂^α S^{j+1} + (shift − |α|) ∂^α S^j
                    *out.entry(Monomial { alpha: m.alpha, j: m.j + 1 }).or_default() += c;
                    let lower = shift - m.spatial_order() as i64;
                    if lower != 0 {
                        *out.entry(*m).or_default() += lower * c;
                    }
                }
            }
        }
        out.retain(|_, c| *c != 0);
        NormalForm { terms: out }
    }
}

impl MultiIndex {
    pub fn empty() -> Self {
        MultiIndex(Vec::new())
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    /// Every word of length ≤ k (4^0 + … + 4^k of them).
    pub fn all_words(k: usize) -> Vec<MultiIndex> {
        let mut out = vec![MultiIndex::empty()];
        let mut frontier = vec![MultiIndex::empty()];
        for _ in 0..k {
            let mut next = Vec::new();
            for w in &frontier {
                for l in Letter::ALL {
                    let mut v = vec![l];
                    v.extend_from_slice(&w.0);
                    next.push(MultiIndex(v));
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }

    /// Γ^J as Σ c ∂^α S^j.
    pub fn normal_form(&self) -> NormalForm {
        self.0.iter().rev().fold(NormalForm::identity(), |nf, &l| nf.left_mul(l, 0))
    }

    /// The operator with □Γ^J φ = Γ̃^J □φ: every S becomes S + 2.
    pub fn source_form(&self) -> NormalForm {
        self.0.iter().rev().fold(NormalForm::identity(), |nf, &l| nf.left_mul(l, 2))
    }
}

pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r.round()
}

/// Stirling numbers of the second kind; (t∂_t)^m = Σ_p S(m,p) t^p ∂_t^p.
pub fn stirling2(m: u32, p: u32) -> f64 {
    if m == 0 && p == 0 {
        return 1.0;
    }
    if m == 0 || p == 0 || p > m {
        return 0.0;
    }
    p as f64 * stirling2(m - 1, p) + stirling2(m - 1, p - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mono(a: [u32; 3], j: u32) -> Monomial {
        Monomial { alpha: a, j }
    }

    #[test]
    fn commutator_rule() {
        // S ∂1 = ∂1 S − ∂1
        let nf = MultiIndex(vec![Letter::S, Letter::D1]).normal_form();
        assert_eq!(nf.terms.get(&mono([1, 0, 0], 1)), Some(&1));
        assert_eq!(nf.terms.get(&mono([1, 0, 0], 0)), Some(&-1));
        // ∂1 S is already normal
        let nf = MultiIndex(vec![Letter::D1, Letter::S]).normal_form();
        assert_eq!(nf.terms.len(), 1);
        // S S ∂1∂2 = ∂1∂2 (S − 2)²
        let nf = MultiIndex(vec![Letter::S, Letter::S, Letter::D1, Letter::D2]).normal_form();
        assert_eq!(nf.terms.get(&mono([1, 1, 0], 2)), Some(&1));
        assert_eq!(nf.terms.get(&mono([1, 1, 0], 1)), Some(&-4));
        assert_eq!(nf.terms.get(&mono([1, 1, 0], 0)), Some(&4));
    }

    #[test]
    fn source_shift() {
        // □ S φ = (S + 2) □φ
        let nf = MultiIndex(vec![Letter::S]).source_form();
        assert_eq!(nf.terms.get(&mono([0; 3], 1)), Some(&1));
        assert_eq!(nf.terms.get(&mono([0; 3], 0)), Some(&2));
        // □ S ∂1 φ = (S + 2) ∂1 □φ = ∂1 (S + 1) □φ
        let nf = MultiIndex(vec![Letter::S, Letter::D1]).source_form();
        assert_eq!(nf.terms.get(&mono([1, 0, 0], 0)), Some(&1));
    }

    #[test]
    fn counts() {
        assert_eq!(monomials(4).len(), 70);
        assert_eq!(monomials(0).len(), 1);
        assert_eq!(MultiIndex::all_words(2).len(), 1 + 4 + 16);
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(stirling2(4, 2), 7.0);
        assert_eq!(stirling2(3, 3), 1.0);
    }
}
