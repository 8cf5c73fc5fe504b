//! Truncated noncommutative power-series arithmetic and the Magnus expansion.
//!
//! Series live in `Z<<x_1, ..., x_m>>` truncated above a degree bound, with
//! arbitrary-precision integer coefficients. The Magnus expansion sends a
//! free-group generator `x` to `1 + x` and `x^-1` to `1 - x + x^2 - ...`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::words::{ClassId, Generator, Word};

/// A noncommutative monomial: the sequence of 1-based variable indices.
pub type Monomial = Vec<u8>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MagnusError {
    #[error("monomial degree {degree} exceeds series bound {bound}")]
    DegreeExceeded { degree: usize, bound: usize },
    #[error("series has constant term {0}, not a unit")]
    NonUnit(BigInt),
    #[error("degree bounds differ: {0} vs {1}")]
    DegreeMismatch(usize, usize),
}

/// A polynomial over noncommuting variables, truncated above `degree_bound`.
///
/// Zero coefficients are never stored; the constant term is the coefficient
/// of the empty monomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    degree_bound: usize,
    terms: BTreeMap<Monomial, BigInt>,
}

impl TruncatedSeries {
    pub fn zero(degree_bound: usize) -> Self {
        TruncatedSeries { degree_bound, terms: BTreeMap::new() }
    }

    pub fn one(degree_bound: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Vec::new(), BigInt::one());
        TruncatedSeries { degree_bound, terms }
    }

    /// `1 + x_i`, the Magnus image of a generator.
    pub fn one_plus_var(degree_bound: usize, var: u8) -> Self {
        let mut s = TruncatedSeries::one(degree_bound);
        if degree_bound >= 1 {
            s.terms.insert(vec![var], BigInt::one());
        }
        s
    }

    /// `1 - x + x^2 - ...`, the Magnus image of an inverse generator.
    pub fn geometric_inverse(degree_bound: usize, var: u8) -> Self {
        let mut s = TruncatedSeries::one(degree_bound);
        let mut sign = BigInt::one();
        for d in 1..=degree_bound {
            sign = -sign;
            s.terms.insert(vec![var; d], sign.clone());
        }
        s
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn constant_term(&self) -> BigInt {
        self.terms.get(&Vec::new() as &Monomial).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Stored coefficient of `monomial`, or 0.
    pub fn coefficient(&self, monomial: &[u8]) -> Result<BigInt, MagnusError> {
        if monomial.len() > self.degree_bound {
            return Err(MagnusError::DegreeExceeded {
                degree: monomial.len(),
                bound: self.degree_bound,
            });
        }
        Ok(self.terms.get(monomial).cloned().unwrap_or_else(BigInt::zero))
    }

    fn insert(&mut self, monomial: Monomial, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(monomial) {
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, rhs: &TruncatedSeries) -> Result<TruncatedSeries, MagnusError> {
        self.check_bounds(rhs)?;
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.insert(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn negate(&self) -> TruncatedSeries {
        TruncatedSeries {
            degree_bound: self.degree_bound,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    fn check_bounds(&self, rhs: &TruncatedSeries) -> Result<(), MagnusError> {
        if self.degree_bound != rhs.degree_bound {
            return Err(MagnusError::DegreeMismatch(self.degree_bound, rhs.degree_bound));
        }
        Ok(())
    }

    /// Truncated product.
    pub fn mul(&self, rhs: &TruncatedSeries) -> Result<TruncatedSeries, MagnusError> {
        self.check_bounds(rhs)?;
        let bound = self.degree_bound;
        let mut out = TruncatedSeries::zero(bound);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                if m1.len() + m2.len() > bound {
                    continue;
                }
                let mut m = m1.clone();
                m.extend_from_slice(m2);
                out.insert(m, c1 * c2);
            }
        }
        Ok(out)
    }

    /// Inverse of a series with constant term +1 or -1.
    pub fn invert(&self) -> Result<TruncatedSeries, MagnusError> {
        let c = self.constant_term();
        if !c.abs().is_one() {
            return Err(MagnusError::NonUnit(c));
        }
        // s = c(1 + p) with p of positive degree; s^-1 = c - p*c... computed as
        // c * sum_k (-c*p)^k, truncated.
        let mut p = self.clone();
        p.terms.remove(&Vec::new() as &Monomial);
        let neg_cp = if c.is_one() { p.negate() } else { p };
        let mut acc = TruncatedSeries::one(self.degree_bound);
        let mut power = TruncatedSeries::one(self.degree_bound);
        for _ in 1..=self.degree_bound {
            power = power.mul(&neg_cp)?;
            if power.terms.is_empty() {
                break;
            }
            acc = acc.add(&power)?;
        }
        if c.is_one() {
            Ok(acc)
        } else {
            Ok(acc.negate())
        }
    }

    pub fn pow(&self, k: &BigInt) -> Result<TruncatedSeries, MagnusError> {
        let base = if k.is_negative() { self.invert()? } else { self.clone() };
        let mut e = k.abs();
        let mut acc = TruncatedSeries::one(self.degree_bound);
        let mut sq = base;
        let two = BigInt::from(2);
        while !e.is_zero() {
            if (&e % &two).is_one() {
                acc = acc.mul(&sq)?;
            }
            e /= &two;
            if !e.is_zero() {
                sq = sq.mul(&sq)?;
            }
        }
        Ok(acc)
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.constant_term().is_one()
    }

    /// Retruncates to a smaller degree bound.
    pub fn truncated(&self, bound: usize) -> TruncatedSeries {
        TruncatedSeries {
            degree_bound: bound,
            terms: self.terms.iter().filter(|(m, _)| m.len() <= bound).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    /// The nonzero term of smallest degree (then lexicographically least
    /// monomial), ignoring the constant term.
    pub fn lowest_term(&self) -> Option<(Monomial, BigInt)> {
        self.terms
            .iter()
            .filter(|(m, _)| !m.is_empty())
            .min_by(|(m1, _), (m2, _)| m1.len().cmp(&m2.len()).then_with(|| m1.cmp(m2)))
            .map(|(m, c)| (m.clone(), c.clone()))
    }

    /// All (monomial, coefficient) pairs of the given degree.
    pub fn degree_part(&self, degree: usize) -> Vec<(Monomial, BigInt)> {
        self.terms
            .iter()
            .filter(|(m, _)| m.len() == degree)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect()
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut entries: Vec<_> = self.terms.iter().collect();
        entries.sort_by(|(m1, _), (m2, _)| m1.len().cmp(&m2.len()).then_with(|| m1.cmp(m2)));
        let mut first = true;
        for (m, c) in entries {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if m.is_empty() {
                write!(f, "{c}")?;
            } else {
                let mono: String = m.iter().map(|v| v.to_string()).collect();
                if c.is_one() {
                    write!(f, "[{mono}]")?;
                } else {
                    write!(f, "{c}[{mono}]")?;
                }
            }
        }
        Ok(())
    }
}

/// Maps generators to series variable indices.
///
/// The canonical convention indexes component classes by their component
/// number and sends the omega class to `m + 1`, so a knot uses `a -> 1`,
/// `v -> 2`.
#[derive(Clone, Copy, Debug)]
pub struct VarMap {
    components: u32,
}

impl VarMap {
    pub fn for_components(components: u32) -> Self {
        VarMap { components }
    }

    /// Map for the alphabet of a class-collapsed word: components first,
    /// omega last.
    pub fn index(&self, g: Generator) -> u8 {
        match g.class {
            ClassId::Component(i) => {
                debug_assert!(i <= self.components);
                i as u8
            }
            ClassId::Omega => (self.components + 1) as u8,
        }
    }

    pub fn alphabet_size(&self) -> u8 {
        (self.components + 1) as u8
    }
}

/// Magnus expansion of a word, truncated above `degree_bound`. Generators are
/// mapped to variables class-wise via `vars`.
pub fn expand(word: &Word, degree_bound: usize, vars: &VarMap) -> TruncatedSeries {
    let mut acc = TruncatedSeries::one(degree_bound);
    for l in word.letters() {
        let var = vars.index(l.gen);
        let factor = if l.exp == 1 {
            TruncatedSeries::one_plus_var(degree_bound, var)
        } else {
            TruncatedSeries::geometric_inverse(degree_bound, var)
        };
        acc = acc.mul(&factor).expect("bounds agree");
    }
    acc
}

/// Expansion of a rank-2 word over `{a, v}` with `a -> 1`, `v -> 2`.
pub fn expand_rank2(word: &Word, degree_bound: usize) -> TruncatedSeries {
    expand(word, degree_bound, &VarMap::for_components(1))
}

/// Tests membership in the lower central series term `F_q`: true iff every
/// Magnus coefficient of degree 1 through `q - 1` vanishes.
pub fn in_lcs(word: &Word, q: usize, vars: &VarMap) -> bool {
    assert!(q >= 1);
    series_in_lcs(&expand(word, q - 1, vars), q)
}

/// Rank-2 convenience wrapper for [`in_lcs`].
pub fn in_lcs_rank2(word: &Word, q: usize) -> bool {
    in_lcs(word, q, &VarMap::for_components(1))
}

/// Series-level membership test: all coefficients in degrees `1..q` vanish.
pub fn series_in_lcs(series: &TruncatedSeries, q: usize) -> bool {
    assert!(series.degree_bound() >= q.saturating_sub(1));
    series.terms().all(|(m, _)| m.is_empty() || m.len() >= q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::parse_word;

    fn w(s: &str) -> Word {
        parse_word(s).unwrap()
    }

    #[test]
    fn expand_generator() {
        let s = expand_rank2(&w("a"), 3);
        assert_eq!(s.coefficient(&[]).unwrap(), BigInt::one());
        assert_eq!(s.coefficient(&[1]).unwrap(), BigInt::one());
        assert_eq!(s.coefficient(&[1, 1]).unwrap(), BigInt::zero());
    }

    #[test]
    fn expand_inverse_generator() {
        // a^-1 -> 1 - a + a^2
        let s = expand_rank2(&w("a^-1"), 2);
        assert_eq!(s.coefficient(&[1]).unwrap(), BigInt::from(-1));
        assert_eq!(s.coefficient(&[1, 1]).unwrap(), BigInt::one());
    }

    #[test]
    fn expand_commutator_va() {
        // [v,a] -> 1 + va - av + higher order
        let c = Word::commutator(&w("v"), &w("a"));
        let s = expand_rank2(&c, 2);
        assert_eq!(s.coefficient(&[2, 1]).unwrap(), BigInt::one());
        assert_eq!(s.coefficient(&[1, 2]).unwrap(), BigInt::from(-1));
        assert_eq!(s.coefficient(&[1]).unwrap(), BigInt::zero());
        assert_eq!(s.coefficient(&[2]).unwrap(), BigInt::zero());
        assert_eq!(s.coefficient(&[]).unwrap(), BigInt::one());
    }

    #[test]
    fn coefficient_degree_guard() {
        let s = expand_rank2(&w("a"), 2);
        assert!(matches!(s.coefficient(&[1, 1, 1]), Err(MagnusError::DegreeExceeded { .. })));
    }

    #[test]
    fn invert_one_plus_a() {
        let s = TruncatedSeries::one_plus_var(4, 1);
        let inv = s.invert().unwrap();
        assert_eq!(inv, TruncatedSeries::geometric_inverse(4, 1));
        assert!(s.mul(&inv).unwrap().is_one());
    }

    #[test]
    fn invert_requires_unit() {
        let s = TruncatedSeries::zero(3);
        assert!(matches!(s.invert(), Err(MagnusError::NonUnit(_))));
    }

    #[test]
    fn mul_identity() {
        let s = expand_rank2(&w("v a v^-1 a^-1"), 5);
        assert_eq!(s.mul(&TruncatedSeries::one(5)).unwrap(), s);
        assert!(s.invert().unwrap().mul(&s).unwrap().is_one());
    }

    #[test]
    fn in_lcs_weight2_commutator() {
        let c = Word::commutator(&w("v"), &w("a"));
        assert!(in_lcs_rank2(&c, 2));
        assert!(!in_lcs_rank2(&c, 3));
    }

    #[test]
    fn in_lcs_weight5_left_normed() {
        let ws: Vec<Word> = ["v", "a", "a", "a", "a"].iter().map(|s| w(s)).collect();
        let c = Word::left_normed(&ws);
        assert!(in_lcs_rank2(&c, 5));
        assert!(in_lcs_rank2(&Word::empty(), 9));
    }

    #[test]
    fn expand_is_homomorphism() {
        use rand::prelude::*;
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for _ in 0..50 {
            let mk = |rng: &mut rand::rngs::StdRng| {
                let letters: Vec<_> = (0..rng.random_range(0..10))
                    .map(|_| {
                        let g = if rng.random_bool(0.5) {
                            crate::words::Generator::omega()
                        } else {
                            crate::words::Generator::component(1, 1)
                        };
                        crate::words::Letter::new(g, if rng.random_bool(0.5) { 1 } else { -1 })
                    })
                    .collect();
                Word::from_letters(letters)
            };
            let u = mk(&mut rng);
            let t = mk(&mut rng);
            let d = 4;
            let lhs = expand_rank2(&u.mul(&t), d);
            let rhs = expand_rank2(&u, d).mul(&expand_rank2(&t, d)).unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}
