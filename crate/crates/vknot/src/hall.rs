//! Basic commutators on two generators and the collection process: a normal
//! form for words modulo a term of the lower central series.
//!
//! The basis is the one produced by the standard nilpotent-quotient
//! generator scheme on `{a, v}`: every element is a left-normed commutator
//! `[v, a, x_3, ..., x_w]`, generated weight by weight as children
//! `[c, a], [c, v]` of the previous layer, with the dependent children
//! (`[v,a,a,v]` at weight 4 and three more at weight 6) dropped. Exponents
//! are extracted degree by degree from the Magnus expansion by solving the
//! integer system against the re-expanded basis, so collection is correct by
//! construction whenever the input expands a genuine group element.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::magnus::{expand_rank2, TruncatedSeries};
use crate::words::{ClassId, Generator, Word};

/// Largest supported commutator weight (normal forms modulo `F_q` need
/// weights up to `q - 1`, so `q` up to 8).
pub const MAX_WEIGHT: usize = 7;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HallError {
    #[error("only rank 2 (alphabet {{a, v}}) is supported, got {0}")]
    UnsupportedRank(u32),
    #[error("weight {0} exceeds the supported maximum {MAX_WEIGHT}")]
    UnsupportedWeight(usize),
    #[error("word contains a letter outside the alphabet {{a, v}}")]
    BadAlphabet,
    #[error("series is not the expansion of a group element")]
    NotGroupLike,
}

/// One letter of the rank-2 alphabet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ab {
    A,
    V,
}

impl Ab {
    fn generator(self) -> Generator {
        match self {
            Ab::A => Generator::component(1, 1),
            Ab::V => Generator::omega(),
        }
    }

    fn var(self) -> u8 {
        match self {
            Ab::A => 1,
            Ab::V => 2,
        }
    }
}

/// A basic commutator, stored as its left-normed generator sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasicCommutator {
    /// 1-based position in the canonical ordering.
    pub index: usize,
    pub weight: usize,
    /// `[seq[0], seq[1], ..., seq[w-1]]`, left-normed.
    pub seq: Vec<Ab>,
}

impl BasicCommutator {
    /// The commutator as a free-group word over `{a, v}`.
    pub fn word(&self) -> Word {
        let gens: Vec<Word> = self.seq.iter().map(|x| Word::generator(x.generator())).collect();
        Word::left_normed(&gens)
    }

    /// Leading (degree = weight) Magnus coefficients, dense over the 2^w
    /// monomials in lexicographic order.
    fn lead(&self) -> Vec<BigInt> {
        let w = self.weight;
        let series = expand_rank2(&self.word(), w);
        let mut dense = vec![BigInt::zero(); 1 << w];
        for (m, c) in series.degree_part(w) {
            dense[monomial_col(&m)] = c;
        }
        dense
    }
}

impl fmt::Display for BasicCommutator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.weight == 1 {
            return match self.seq[0] {
                Ab::A => write!(f, "a"),
                Ab::V => write!(f, "v"),
            };
        }
        let inner: Vec<&str> =
            self.seq.iter().map(|x| if *x == Ab::A { "a" } else { "v" }).collect();
        write!(f, "[{}]", inner.join(","))
    }
}

fn monomial_col(m: &[u8]) -> usize {
    m.iter().fold(0, |acc, &v| (acc << 1) | (v as usize - 1))
}

/// The canonical basic-commutator list for the rank-2 alphabet, up to
/// `max_weight <= 7`.
pub fn basic_commutators(rank: u32, max_weight: usize) -> Result<Vec<BasicCommutator>, HallError> {
    if rank != 2 {
        return Err(HallError::UnsupportedRank(rank));
    }
    if max_weight > MAX_WEIGHT {
        return Err(HallError::UnsupportedWeight(max_weight));
    }
    Ok(full_basis().iter().filter(|c| c.weight <= max_weight).cloned().collect())
}

fn full_basis() -> &'static [BasicCommutator] {
    static BASIS: OnceLock<Vec<BasicCommutator>> = OnceLock::new();
    BASIS.get_or_init(build_basis)
}

fn build_basis() -> Vec<BasicCommutator> {
    // children of [v,a,<suffix>] dropped by the consistency relations
    let dropped: [&[Ab]; 4] = [
        &[Ab::A, Ab::V],
        &[Ab::A, Ab::A, Ab::A, Ab::V],
        &[Ab::A, Ab::A, Ab::V, Ab::V],
        &[Ab::V, Ab::A, Ab::V, Ab::V],
    ];
    let mut list = vec![
        BasicCommutator { index: 1, weight: 1, seq: vec![Ab::A] },
        BasicCommutator { index: 2, weight: 1, seq: vec![Ab::V] },
        BasicCommutator { index: 3, weight: 2, seq: vec![Ab::V, Ab::A] },
    ];
    let mut layer: Vec<Vec<Ab>> = vec![vec![]]; // suffixes after [v, a]
    for weight in 3..=MAX_WEIGHT {
        let mut next_layer = Vec::new();
        for suffix in &layer {
            for x in [Ab::A, Ab::V] {
                let mut child = suffix.clone();
                child.push(x);
                if dropped.iter().any(|d| *d == child.as_slice()) {
                    continue;
                }
                next_layer.push(child);
            }
        }
        for suffix in &next_layer {
            let mut seq = vec![Ab::V, Ab::A];
            seq.extend_from_slice(suffix);
            list.push(BasicCommutator { index: list.len() + 1, weight, seq });
        }
        layer = next_layer;
    }
    list
}

/// A word written as `g_1^{e_1} ... g_t^{e_t}` modulo `F_q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    pub q: usize,
    /// Nonzero exponents keyed by basic-commutator index.
    pub exponents: BTreeMap<usize, BigInt>,
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponents.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, e) in &self.exponents {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            if e.is_one() {
                write!(f, "g{i}")?;
            } else {
                write!(f, "g{i}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Per-weight integer solver against the re-expanded basis leads.
struct WeightSolver {
    basis_start: usize, // index into full_basis()
    count: usize,
    lead: Vec<Vec<BigInt>>,          // count x 2^w
    pivot_cols: Vec<usize>,          // count columns
    inverse: Vec<Vec<BigRational>>,  // count x count, inverse of lead[:, pivots]
}

impl WeightSolver {
    fn solve(&self, target: &[BigInt]) -> Option<Vec<BigInt>> {
        // e = inverse * target[pivots]; verify e * lead == target over Z
        let mut e = Vec::with_capacity(self.count);
        for row in &self.inverse {
            let mut acc = BigRational::zero();
            for (c, &col) in row.iter().zip(&self.pivot_cols) {
                acc += c * BigRational::from(target[col].clone());
            }
            if !acc.denom().is_one() {
                return None;
            }
            e.push(acc.to_integer());
        }
        for col in 0..target.len() {
            let mut acc = BigInt::zero();
            for (i, row) in self.lead.iter().enumerate() {
                acc += &e[i] * &row[col];
            }
            if acc != target[col] {
                return None;
            }
        }
        Some(e)
    }
}

fn weight_solvers() -> &'static [WeightSolver] {
    static SOLVERS: OnceLock<Vec<WeightSolver>> = OnceLock::new();
    SOLVERS.get_or_init(|| {
        let basis = full_basis();
        (1..=MAX_WEIGHT)
            .map(|w| {
                let start = basis.iter().position(|c| c.weight == w).expect("weight present");
                let elems: Vec<&BasicCommutator> =
                    basis.iter().filter(|c| c.weight == w).collect();
                let lead: Vec<Vec<BigInt>> = elems.iter().map(|c| c.lead()).collect();
                let (pivot_cols, inverse) = invert_on_pivots(&lead);
                WeightSolver { basis_start: start, count: elems.len(), lead, pivot_cols, inverse }
            })
            .collect()
    })
}

/// Finds an invertible column subset of a full-row-rank integer matrix and
/// inverts that square submatrix over the rationals.
fn invert_on_pivots(rows: &[Vec<BigInt>]) -> (Vec<usize>, Vec<Vec<BigRational>>) {
    let k = rows.len();
    let ncols = rows[0].len();
    // Gaussian elimination to find pivot columns
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| r.iter().map(|x| BigRational::from(x.clone())).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row == k {
            break;
        }
        if let Some(r) = (row..k).find(|&r| !m[r][col].is_zero()) {
            m.swap(row, r);
            let inv = m[row][col].recip();
            for c in col..ncols {
                let v = &m[row][c] * &inv;
                m[row][c] = v;
            }
            for r in 0..k {
                if r != row && !m[r][col].is_zero() {
                    let factor = m[r][col].clone();
                    for c in col..ncols {
                        let v = &m[r][c] - &factor * &m[row][c];
                        m[r][c] = v;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
    }
    assert_eq!(row, k, "basis leads are linearly dependent");
    // invert the k x k pivot submatrix
    let mut aug: Vec<Vec<BigRational>> = (0..k)
        .map(|i| {
            let mut r: Vec<BigRational> =
                pivots.iter().map(|&c| BigRational::from(rows[i][c].clone())).collect();
            for j in 0..k {
                r.push(if i == j { BigRational::one() } else { BigRational::zero() });
            }
            r
        })
        .collect();
    for col in 0..k {
        let piv = (col..k).find(|&r| !aug[r][col].is_zero()).expect("invertible");
        aug.swap(col, piv);
        let inv = aug[col][col].recip();
        for c in 0..2 * k {
            let v = &aug[col][c] * &inv;
            aug[col][c] = v;
        }
        for r in 0..k {
            if r != col && !aug[r][col].is_zero() {
                let factor = aug[r][col].clone();
                for c in 0..2 * k {
                    let v = &aug[r][c] - &factor * &aug[col][c];
                    aug[r][c] = v;
                }
            }
        }
    }
    // we need e with e * A = target, i.e. A^T e = t; the computed inverse is
    // of A[:, pivots]; transpose orientation is handled by the caller using
    // rows of A directly, so return the inverse transposed.
    let mut inv_t = vec![vec![BigRational::zero(); k]; k];
    for i in 0..k {
        for j in 0..k {
            inv_t[i][j] = aug[j][k + i].clone();
        }
    }
    (pivots, inv_t)
}

/// Writes `u` in normal form modulo `F_q`. The word must use only the
/// rank-2 alphabet `{a, v}` (class representatives).
pub fn collect(u: &Word, q: usize) -> Result<NormalForm, HallError> {
    if u.letters().iter().any(|l| {
        !(l.gen.class == ClassId::Omega
            || (l.gen.class == ClassId::Component(1) && l.gen.arc == 1))
    }) {
        return Err(HallError::BadAlphabet);
    }
    collect_series(&expand_rank2(u, q - 1), q)
}

/// Normal form from a Magnus expansion. The series must be the expansion of
/// a group element over `{a, v}` at degree bound at least `q - 1`.
pub fn collect_series(series: &TruncatedSeries, q: usize) -> Result<NormalForm, HallError> {
    assert!(q >= 2);
    if q - 1 > MAX_WEIGHT {
        return Err(HallError::UnsupportedWeight(q - 1));
    }
    if !series.constant_term().is_one() {
        return Err(HallError::NotGroupLike);
    }
    let bound = q - 1;
    let mut residual = series.truncated(bound);
    let basis = full_basis();
    let solvers = weight_solvers();
    let mut exponents = BTreeMap::new();
    for w in 1..=bound {
        // lower degrees must have been cleared by the previous stages
        if residual.terms().any(|(m, _)| !m.is_empty() && m.len() < w) {
            return Err(HallError::NotGroupLike);
        }
        let mut target = vec![BigInt::zero(); 1 << w];
        for (m, c) in residual.degree_part(w) {
            target[monomial_col(&m)] = c;
        }
        if target.iter().all(|c| c.is_zero()) {
            continue;
        }
        let solver = &solvers[w - 1];
        let e = solver.solve(&target).ok_or(HallError::NotGroupLike)?;
        // divide the layer out on the left: (g_i^{e_i} ...)^-1 * residual
        let mut correction = TruncatedSeries::one(bound);
        for (i, exp) in e.iter().enumerate().rev() {
            if exp.is_zero() {
                continue;
            }
            let g = &basis[solver.basis_start + i];
            let gs = expand_rank2(&g.word(), bound);
            correction = correction.mul(&gs.pow(&-exp).expect("unit")).expect("bounds");
        }
        residual = correction.mul(&residual).expect("bounds");
        for (i, exp) in e.into_iter().enumerate() {
            if !exp.is_zero() {
                exponents.insert(solver.basis_start + i + 1, exp);
            }
        }
    }
    if !residual.is_one() && residual.terms().any(|(m, _)| !m.is_empty() && m.len() <= bound) {
        return Err(HallError::NotGroupLike);
    }
    Ok(NormalForm { q, exponents })
}

/// Re-expands a normal form: the Magnus expansion of
/// `g_1^{e_1} ... g_t^{e_t}` at degree bound `q - 1`.
pub fn expand_normal_form(nf: &NormalForm) -> TruncatedSeries {
    let bound = nf.q - 1;
    let basis = full_basis();
    let mut acc = TruncatedSeries::one(bound);
    for (i, e) in &nf.exponents {
        let g = expand_rank2(&basis[i - 1].word(), bound);
        acc = acc.mul(&g.pow(e).expect("unit")).expect("bounds");
    }
    acc
}

/// Parses a normal-form display string such as `g4^4 g5^-2` back into a
/// [`NormalForm`] (used by tests and reports).
pub fn parse_normal_form(text: &str, q: usize) -> Option<NormalForm> {
    let mut exponents = BTreeMap::new();
    for tok in text.split_whitespace() {
        if tok == "1" {
            continue;
        }
        let rest = tok.strip_prefix('g')?;
        let (idx, exp) = match rest.split_once('^') {
            Some((i, e)) => (i.parse().ok()?, e.parse::<BigInt>().ok()?),
            None => (rest.parse().ok()?, BigInt::one()),
        };
        if idx == 0 || exp.is_zero() {
            return None;
        }
        exponents.insert(idx, exp);
    }
    Some(NormalForm { q, exponents })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::parse_word;

    #[test]
    fn basis_matches_published_low_weights() {
        let basis = basic_commutators(2, 5).unwrap();
        let display: Vec<String> = basis.iter().map(|c| c.to_string()).collect();
        assert_eq!(
            display,
            vec![
                "a",
                "v",
                "[v,a]",
                "[v,a,a]",
                "[v,a,v]",
                "[v,a,a,a]",
                "[v,a,v,a]",
                "[v,a,v,v]",
                "[v,a,a,a,a]",
                "[v,a,a,a,v]",
                "[v,a,v,a,a]",
                "[v,a,v,a,v]",
                "[v,a,v,v,a]",
                "[v,a,v,v,v]",
            ]
        );
        let weights: Vec<usize> = basis.iter().map(|c| c.weight).collect();
        assert_eq!(weights, vec![1, 1, 2, 3, 3, 4, 4, 4, 5, 5, 5, 5, 5, 5]);
    }

    #[test]
    fn weight7_sublist_indices() {
        let basis = basic_commutators(2, 7).unwrap();
        let disp = |i: usize| basis[i - 1].to_string();
        assert_eq!(disp(25), "[v,a,a,a,a,a,v]");
        assert_eq!(disp(26), "[v,a,a,a,v,a,a]");
        assert_eq!(disp(27), "[v,a,a,a,v,a,v]");
        assert_eq!(disp(28), "[v,a,v,a,a,a,a]");
        assert_eq!(disp(29), "[v,a,v,a,a,a,v]");
        assert_eq!(disp(32), "[v,a,v,a,v,a,a]");
        assert_eq!(disp(33), "[v,a,v,a,v,a,v]");
        assert_eq!(disp(34), "[v,a,v,v,a,a,a]");
        assert_eq!(disp(35), "[v,a,v,v,a,a,v]");
        assert_eq!(disp(36), "[v,a,v,v,a,v,a]");
        assert_eq!(disp(37), "[v,a,v,v,a,v,v]");
        assert_eq!(disp(38), "[v,a,v,v,v,a,a]");
        assert_eq!(disp(39), "[v,a,v,v,v,a,v]");
        assert_eq!(disp(40), "[v,a,v,v,v,v,a]");
        assert_eq!(basis.len(), 41);
    }

    fn witt(w: usize) -> usize {
        // number of basic commutators of weight w on 2 generators
        let moebius = |n: usize| -> i64 {
            match n {
                1 => 1,
                2 | 3 | 5 | 7 => -1,
                4 => 0,
                6 => 1,
                _ => unreachable!(),
            }
        };
        let mut sum: i64 = 0;
        for d in 1..=w {
            if w % d == 0 {
                sum += moebius(d) * (1i64 << (w / d));
            }
        }
        (sum / w as i64) as usize
    }

    #[test]
    fn counts_match_witt_formula() {
        let basis = basic_commutators(2, 7).unwrap();
        for w in 1..=7 {
            let count = basis.iter().filter(|c| c.weight == w).count();
            assert_eq!(count, witt(w), "weight {w}");
        }
        assert_eq!(basis.iter().filter(|c| c.weight == 2).count(), 1);
        assert_eq!(basis.iter().filter(|c| c.weight == 4).count(), 3);
    }

    #[test]
    fn rank_and_weight_guards() {
        assert_eq!(basic_commutators(3, 4), Err(HallError::UnsupportedRank(3)));
        assert_eq!(basic_commutators(2, 8), Err(HallError::UnsupportedWeight(8)));
    }

    #[test]
    fn collect_empty_word() {
        let nf = collect(&Word::empty(), 5).unwrap();
        assert!(nf.exponents.is_empty());
        assert_eq!(nf.to_string(), "1");
    }

    #[test]
    fn collect_longitude_of_three_crossing_knot() {
        // [v,a,a]^4 [v,a,v]^4 mod F_4
        let lam = parse_word("v^2 a^-1 v^-2 a^-1 v^-2 a^-1 v^2 a^3").unwrap();
        let nf = collect(&lam, 4).unwrap();
        assert_eq!(nf.to_string(), "g4^4 g5^4");
    }

    #[test]
    fn collect_is_sound_on_random_words() {
        use rand::prelude::*;
        let mut rng = rand::rngs::StdRng::seed_from_u64(23);
        for _ in 0..60 {
            let letters: Vec<_> = (0..rng.random_range(0..12))
                .map(|_| {
                    let g = if rng.random_bool(0.5) {
                        Generator::omega()
                    } else {
                        Generator::component(1, 1)
                    };
                    crate::words::Letter::new(g, if rng.random_bool(0.5) { 1 } else { -1 })
                })
                .collect();
            let w = Word::from_letters(letters);
            for q in [2, 4, 6] {
                let nf = collect(&w, q).unwrap();
                assert_eq!(expand_normal_form(&nf), expand_rank2(&w, q - 1));
            }
        }
    }

    #[test]
    fn collect_rejects_non_rank2_words() {
        let w = parse_word("a2 v").unwrap();
        assert_eq!(collect(&w, 3), Err(HallError::BadAlphabet));
    }

    #[test]
    fn normal_form_parser_roundtrip() {
        let nf = parse_normal_form("g4^4 g5^-2 g11", 6).unwrap();
        assert_eq!(nf.to_string(), "g4^4 g5^-2 g11");
    }

    /// Independent basis oracle: the Lyndon-word basis of the free Lie ring.
    mod lyndon {
        use super::*;

        fn is_lyndon(w: &[u8]) -> bool {
            for k in 1..w.len() {
                let rot: Vec<u8> = w[k..].iter().chain(&w[..k]).copied().collect();
                if rot.as_slice() <= w {
                    return false;
                }
            }
            true
        }

        fn lyndon_words(len: usize) -> Vec<Vec<u8>> {
            let mut out = Vec::new();
            for bits in 0..(1u32 << len) {
                let w: Vec<u8> =
                    (0..len).map(|i| if bits >> (len - 1 - i) & 1 == 1 { 2 } else { 1 }).collect();
                if len == 1 || is_lyndon(&w) {
                    out.push(w);
                }
            }
            out
        }

        fn bracketing(w: &[u8]) -> Word {
            if w.len() == 1 {
                let g = if w[0] == 1 { Generator::component(1, 1) } else { Generator::omega() };
                return Word::generator(g);
            }
            // standard factorization: v is the longest proper Lyndon suffix
            for k in 1..w.len() {
                if is_lyndon(&w[k..]) {
                    return Word::commutator(&bracketing(&w[..k]), &bracketing(&w[k..]));
                }
            }
            unreachable!("every Lyndon word of length > 1 factors");
        }

        fn lead_of(word: &Word, w: usize) -> Vec<BigInt> {
            let series = expand_rank2(word, w);
            let mut dense = vec![BigInt::zero(); 1 << w];
            for (m, c) in series.degree_part(w) {
                dense[monomial_col(&m)] = c;
            }
            dense
        }

        /// Solves e * rows = target over the rationals; returns integer e
        /// when it exists.
        fn solve_int(rows: &[Vec<BigInt>], target: &[BigInt]) -> Option<Vec<BigInt>> {
            let (pivots, inverse) = invert_on_pivots(rows);
            let solver = WeightSolver {
                basis_start: 0,
                count: rows.len(),
                lead: rows.to_vec(),
                pivot_cols: pivots,
                inverse,
            };
            solver.solve(target)
        }

        #[test]
        fn basis_spans_the_same_lattice_as_lyndon() {
            let basis = full_basis();
            for w in 1..=MAX_WEIGHT {
                let ours: Vec<Vec<BigInt>> =
                    basis.iter().filter(|c| c.weight == w).map(|c| c.lead()).collect();
                let theirs: Vec<Vec<BigInt>> =
                    lyndon_words(w).iter().map(|lw| lead_of(&bracketing(lw), w)).collect();
                assert_eq!(ours.len(), theirs.len(), "weight {w}");
                // mutual integer solvability = equal lattices
                for t in &theirs {
                    assert!(solve_int(&ours, t).is_some(), "lyndon not in ours at weight {w}");
                }
                for o in &ours {
                    assert!(solve_int(&theirs, o).is_some(), "ours not in lyndon at weight {w}");
                }
            }
        }
    }
}
