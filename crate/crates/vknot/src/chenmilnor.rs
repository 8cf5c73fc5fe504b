//! The maps `p^(q)` and `phi^(q)` on serial Wirtinger-type presentations,
//! evaluated along two interchangeable paths: explicit free-group words and
//! direct truncated-series evaluation.
//!
//! The recursion is `p^(1)(c_{i,j}) = c_{i,j}`, `p^(q)(c_{i,1}) = c_{i,1}`,
//! `p^(q+1)(c_{i,j+1}) = p^(q)(l_{i,j}^-1 c_{i,1} l_{i,j})` with
//! `l_{i,j} = w_{i,1} ... w_{i,j}`, and `phi^(q)` composes with the collapse
//! of every generator to its class representative.
//!
//! The series path never materializes words; it iterates the substitution on
//! per-generator truncated series to a fixpoint modulo the degree bound. The
//! word path is exact but exponential in `q`; it is kept as a cross-check
//! and for human-readable output at small `q`.

use std::collections::BTreeMap;

use crate::magnus::{TruncatedSeries, VarMap};
use crate::presentation::{MeridianLongitudePair, PresentationError, SerialPresentation};
use crate::words::{ClassId, Generator, Word};

/// Per-generator images of `phi^(k)` as words over class representatives.
type WordTable = BTreeMap<Generator, Word>;

fn eval_word(table: &WordTable, w: &Word) -> Word {
    let mut out = Word::empty();
    for l in w.letters() {
        let img = &table[&l.gen];
        out = if l.exp == 1 { out.mul(img) } else { out.mul(&img.inverse()) };
    }
    out
}

fn word_table_init(p: &SerialPresentation) -> WordTable {
    let mut table = BTreeMap::new();
    for g in p.generators() {
        table.insert(g, Word::generator(Generator::class_rep(g.class)));
    }
    table
}

fn word_table_step(p: &SerialPresentation, table: &WordTable) -> WordTable {
    // p^(q+1) is defined through p^(q), so the whole table updates from the
    // previous level simultaneously.
    let mut next = word_table_init(p);
    for class in &p.classes {
        let rep = Word::generator(Generator::class_rep(class.class));
        let mut prefix = Word::empty();
        for (j, w) in class.words.iter().enumerate() {
            let arc = j as u32 + 2;
            if arc > class.size {
                // the return word of a cyclic class feeds the longitude only
                break;
            }
            prefix = prefix.mul(&eval_word(table, w));
            let img = prefix.inverse().mul(&rep).mul(&prefix);
            next.insert(Generator { class: class.class, arc }, img);
        }
    }
    next
}

fn phi_word_table(p: &SerialPresentation, q: usize) -> WordTable {
    assert!(q >= 1);
    let mut table = word_table_init(p);
    for _ in 1..q {
        table = word_table_step(p, &table);
    }
    table
}

/// `phi^(q)` of the parallel word of a component class (no exponent
/// correction), as a word over class representatives and `v`.
pub fn phi_parallel_word(
    p: &SerialPresentation,
    class: ClassId,
    q: usize,
) -> Result<Word, PresentationError> {
    assert!(q >= 2);
    let pair = p.longitude_pair(class)?;
    let table = phi_word_table(p, q);
    Ok(eval_word(&table, &pair.parallel))
}

/// `phi^(q)` of the longitude: the parallel image followed by the trailing
/// meridian power that makes the class exponent sum zero.
pub fn phi_longitude_word(
    p: &SerialPresentation,
    class: ClassId,
    q: usize,
) -> Result<Word, PresentationError> {
    let pair = p.longitude_pair(class)?;
    let word = phi_parallel_word(p, class, q)?;
    Ok(append_correction(&word, &pair))
}

fn append_correction(word: &Word, pair: &MeridianLongitudePair) -> Word {
    let k = -pair.parallel.exponent_sum(pair.meridian.class);
    word.mul(&Word::generator(pair.meridian).pow(k))
}

/// Per-generator truncated series with cached inverses.
#[derive(Clone, PartialEq, Eq)]
struct SeriesTable {
    entries: BTreeMap<Generator, (TruncatedSeries, TruncatedSeries)>,
}

impl SeriesTable {
    fn eval(&self, w: &Word) -> TruncatedSeries {
        let bound = self
            .entries
            .values()
            .next()
            .map(|(s, _)| s.degree_bound())
            .unwrap_or(0);
        let mut acc = TruncatedSeries::one(bound);
        for l in w.letters() {
            let (s, inv) = &self.entries[&l.gen];
            let factor = if l.exp == 1 { s } else { inv };
            acc = acc.mul(factor).expect("bounds agree");
        }
        acc
    }
}

fn series_table_init(p: &SerialPresentation, vars: &VarMap, bound: usize) -> SeriesTable {
    let mut entries = BTreeMap::new();
    for g in p.generators() {
        let var = vars.index(Generator::class_rep(g.class));
        let s = TruncatedSeries::one_plus_var(bound, var);
        let inv = TruncatedSeries::geometric_inverse(bound, var);
        entries.insert(g, (s, inv));
    }
    SeriesTable { entries }
}

fn series_table_step(
    p: &SerialPresentation,
    vars: &VarMap,
    bound: usize,
    table: &SeriesTable,
) -> SeriesTable {
    let mut next = series_table_init(p, vars, bound);
    for class in &p.classes {
        let rep_var = vars.index(Generator::class_rep(class.class));
        let rep = TruncatedSeries::one_plus_var(bound, rep_var);
        let mut prefix = TruncatedSeries::one(bound);
        let mut prefix_inv = TruncatedSeries::one(bound);
        for (j, w) in class.words.iter().enumerate() {
            let arc = j as u32 + 2;
            if arc > class.size {
                break;
            }
            prefix = prefix.mul(&table.eval(w)).expect("bounds agree");
            prefix_inv = table.eval(&w.inverse()).mul(&prefix_inv).expect("bounds agree");
            let img = prefix_inv.mul(&rep).expect("bounds").mul(&prefix).expect("bounds");
            let inv = prefix_inv
                .mul(&TruncatedSeries::geometric_inverse(bound, rep_var))
                .expect("bounds")
                .mul(&prefix)
                .expect("bounds");
            next.entries.insert(Generator { class: class.class, arc }, (img, inv));
        }
    }
    next
}

fn phi_series_table(p: &SerialPresentation, q: usize) -> (SeriesTable, VarMap) {
    assert!(q >= 2);
    let bound = q - 1;
    let vars = VarMap::for_components(p.components);
    let mut table = series_table_init(p, &vars, bound);
    let mut converged = false;
    // q - 1 substitutions reach phi^(q); the table must be stationary at
    // this degree bound by then, which the extra iteration checks.
    for _ in 0..q {
        let next = series_table_step(p, &vars, bound, &table);
        if next == table {
            converged = true;
            break;
        }
        table = next;
    }
    assert!(converged, "phi substitution did not stabilize at degree {bound}");
    (table, vars)
}

/// Magnus expansion of `phi^(q)` of the longitude of `class`, at degree
/// bound `q - 1`, computed without materializing the word.
pub fn phi_longitude_series(
    p: &SerialPresentation,
    class: ClassId,
    q: usize,
) -> Result<TruncatedSeries, PresentationError> {
    let pair = p.longitude_pair(class)?;
    let (table, vars) = phi_series_table(p, q);
    Ok(longitude_series_from_table(&table, &vars, &pair))
}

fn longitude_series_from_table(
    table: &SeriesTable,
    vars: &VarMap,
    pair: &MeridianLongitudePair,
) -> TruncatedSeries {
    let s = table.eval(&pair.parallel);
    let k = -pair.parallel.exponent_sum(pair.meridian.class);
    let rep = TruncatedSeries::one_plus_var(s.degree_bound(), vars.index(pair.meridian));
    s.mul(&rep.pow(&k.into()).expect("unit")).expect("bounds agree")
}

/// Longitude series of every component class, sharing one fixpoint
/// computation. The omega class is absent (its longitude is trivial).
pub fn longitude_series_all(
    p: &SerialPresentation,
    q: usize,
) -> BTreeMap<ClassId, TruncatedSeries> {
    let (table, vars) = phi_series_table(p, q);
    let mut out = BTreeMap::new();
    for class in &p.classes {
        if class.class == ClassId::Omega {
            continue;
        }
        let pair = p.longitude_pair(class.class).expect("component class");
        out.insert(class.class, longitude_series_from_table(&table, &vars, &pair));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::GaussDiagram;
    use crate::magnus::{expand, expand_rank2};
    use crate::presentation::extended_presentation;
    use crate::words::parse_word;

    fn three_five() -> SerialPresentation {
        extended_presentation(&GaussDiagram::parse("O1-O2-O3-U1-U2-U3-").unwrap())
    }

    #[test]
    fn parallel_word_is_stable_in_q() {
        let p = three_five();
        let expect = parse_word("v^2 a^-1 v^-2 a^-1 v^-2 a^-1 v^2").unwrap();
        for q in [2, 3, 4] {
            assert_eq!(phi_parallel_word(&p, ClassId::Component(1), q).unwrap(), expect);
        }
    }

    #[test]
    fn longitude_word_of_three_crossing_knot() {
        let p = three_five();
        let lw = phi_longitude_word(&p, ClassId::Component(1), 4).unwrap();
        assert_eq!(lw, parse_word("v^2 a^-1 v^-2 a^-1 v^-2 a^-1 v^2 a^3").unwrap());
    }

    #[test]
    fn unknot_longitude_is_trivial() {
        let p = extended_presentation(&GaussDiagram::unknot());
        for q in [2, 4, 6] {
            assert!(phi_longitude_word(&p, ClassId::Component(1), q).unwrap().is_empty());
            assert!(phi_longitude_series(&p, ClassId::Component(1), q).unwrap().is_one());
        }
    }

    #[test]
    fn series_path_matches_word_path() {
        let codes = [
            "O1-O2-O3-U1-U2-U3-",
            "O1+U2+O3+U1+O2+U3+",
            "L:O1-O2-U1-O3+U2-U3+",
            "O1-O2-U1-U2-",
        ];
        for code in codes {
            let d = GaussDiagram::parse(code).unwrap();
            let p = extended_presentation(&d);
            for q in [2, 3, 4, 5] {
                let w = phi_longitude_word(&p, ClassId::Component(1), q).unwrap();
                let s = phi_longitude_series(&p, ClassId::Component(1), q).unwrap();
                assert_eq!(expand_rank2(&w, q - 1), s, "code {code} q {q}");
            }
        }
    }

    #[test]
    fn series_path_on_links_matches_words() {
        let d = GaussDiagram::parse("O3+,O1-O2-U1-U2-U3+").unwrap();
        let p = extended_presentation(&d);
        let vars = VarMap::for_components(2);
        for class in [ClassId::Component(1), ClassId::Component(2)] {
            for q in [2, 3, 4] {
                let w = phi_longitude_word(&p, class, q).unwrap();
                let s = phi_longitude_series(&p, class, q).unwrap();
                assert_eq!(expand(&w, q - 1, &vars), s);
            }
        }
    }

    #[test]
    fn longitude_has_zero_v_exponent() {
        for code in ["O1-O2-O3-U1-U2-U3-", "O1+U2+O3+U1+O2+U3+", "O1-O2-U1-U2-"] {
            let p = extended_presentation(&GaussDiagram::parse(code).unwrap());
            let lw = phi_longitude_word(&p, ClassId::Component(1), 4).unwrap();
            assert_eq!(lw.exponent_sum(ClassId::Omega), 0);
            assert_eq!(lw.exponent_sum(ClassId::Component(1)), 0);
        }
    }
}
