//! Free-group word arithmetic over an indexed generator alphabet.
//!
//! Words are kept freely reduced at all times; all values are immutable.

use std::fmt;

use thiserror::Error;

/// Conjugacy-class tag of a generator: either the class of a link component
/// or the distinguished auxiliary class `v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassId {
    /// 1-based component index.
    Component(u32),
    /// The auxiliary generator class (written `v`).
    Omega,
}

impl ClassId {
    fn letter(self) -> Option<char> {
        match self {
            // 'v' is reserved for Omega, components use a, b, c, ...
            ClassId::Component(i) if (1..=20).contains(&i) => {
                Some((b'a' + (i - 1) as u8) as char)
            }
            ClassId::Component(_) => None,
            ClassId::Omega => Some('v'),
        }
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.letter() {
            Some(c) => write!(f, "{c}"),
            None => match self {
                ClassId::Component(i) => write!(f, "c{i}"),
                ClassId::Omega => write!(f, "v"),
            },
        }
    }
}

/// A single free-group generator `c_{i,j}`: class (component or `v`) plus arc index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Generator {
    pub class: ClassId,
    /// 1-based arc index within the class; always 1 for the `v` class.
    pub arc: u32,
}

impl Generator {
    pub fn component(component: u32, arc: u32) -> Self {
        assert!(component >= 1 && arc >= 1);
        Generator { class: ClassId::Component(component), arc }
    }

    pub fn omega() -> Self {
        Generator { class: ClassId::Omega, arc: 1 }
    }

    /// The class representative `c_{i,1}`.
    pub fn class_rep(class: ClassId) -> Self {
        Generator { class, arc: 1 }
    }

    pub fn is_omega(&self) -> bool {
        self.class == ClassId::Omega
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.arc == 1 && matches!(self.class, ClassId::Omega) {
            write!(f, "v")
        } else {
            write!(f, "{}{}", self.class, self.arc)
        }
    }
}

/// One letter of a word: a generator with exponent +1 or -1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub gen: Generator,
    pub exp: i8,
}

impl Letter {
    pub fn new(gen: Generator, exp: i8) -> Self {
        assert!(exp == 1 || exp == -1);
        Letter { gen, exp }
    }

    pub fn inverse(self) -> Self {
        Letter { gen: self.gen, exp: -self.exp }
    }
}

/// A freely reduced word over [`Generator`]s.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn empty() -> Self {
        Word { letters: Vec::new() }
    }

    pub fn generator(g: Generator) -> Self {
        Word { letters: vec![Letter::new(g, 1)] }
    }

    pub fn letter(g: Generator, exp: i8) -> Self {
        Word { letters: vec![Letter::new(g, exp)] }
    }

    /// Builds a word from letters, performing free reduction.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut stack: Vec<Letter> = Vec::new();
        for l in letters {
            match stack.last() {
                Some(top) if top.gen == l.gen && top.exp == -l.exp => {
                    stack.pop();
                }
                _ => stack.push(l),
            }
        }
        Word { letters: stack }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn mul(&self, rhs: &Word) -> Word {
        Word::from_letters(self.letters.iter().chain(rhs.letters.iter()).copied())
    }

    pub fn inverse(&self) -> Word {
        Word { letters: self.letters.iter().rev().map(|l| l.inverse()).collect() }
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k >= 0 { self.clone() } else { self.inverse() };
        let mut out = Word::empty();
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// `[x, y] = x^-1 y^-1 x y`.
    pub fn commutator(x: &Word, y: &Word) -> Word {
        x.inverse().mul(&y.inverse()).mul(x).mul(y)
    }

    /// Left-normed commutator `[x1, x2, ..., xk] = [[x1, ..., x_{k-1}], xk]`.
    pub fn left_normed(xs: &[Word]) -> Word {
        let mut it = xs.iter();
        let mut acc = match it.next() {
            Some(w) => w.clone(),
            None => return Word::empty(),
        };
        for x in it {
            acc = Word::commutator(&acc, x);
        }
        acc
    }

    /// Sum of exponents over all generators in the given class.
    pub fn exponent_sum(&self, class: ClassId) -> i64 {
        self.letters
            .iter()
            .filter(|l| l.gen.class == class)
            .map(|l| l.exp as i64)
            .sum()
    }

    /// Applies a generator map and re-reduces.
    pub fn map_generators(&self, f: impl Fn(Generator) -> Generator) -> Word {
        Word::from_letters(self.letters.iter().map(|l| Letter::new(f(l.gen), l.exp)))
    }

    /// Collapses every generator to its class representative.
    pub fn class_collapse(&self) -> Word {
        self.map_generators(|g| Generator::class_rep(g.class))
    }

    /// Deletes all letters of the given class and re-reduces.
    pub fn delete_class(&self, class: ClassId) -> Word {
        Word::from_letters(self.letters.iter().filter(|l| l.gen.class != class).copied())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for l in &self.letters {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            if l.exp == 1 {
                write!(f, "{}", l.gen)?;
            } else {
                write!(f, "{}^-1", l.gen)?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WordParseError {
    #[error("unrecognized generator token `{0}`")]
    BadToken(String),
    #[error("bad exponent in token `{0}`")]
    BadExponent(String),
}

/// Parses the textual word syntax: whitespace-separated tokens such as
/// `a`, `a3`, `v`, `b2^-1`, with `a` shorthand for `a1` and `v` the omega
/// generator. Small integer powers (`v^2`, `a^-3`) are accepted. `1` is
/// the empty word.
pub fn parse_word(text: &str) -> Result<Word, WordParseError> {
    let mut letters = Vec::new();
    for tok in text.split_whitespace() {
        if tok == "1" {
            continue;
        }
        let (base, exp) = match tok.split_once('^') {
            Some((b, e)) => {
                let exp: i64 =
                    e.parse().map_err(|_| WordParseError::BadExponent(tok.to_string()))?;
                (b, exp)
            }
            None => (tok, 1),
        };
        let gen = parse_generator(base).ok_or_else(|| WordParseError::BadToken(tok.to_string()))?;
        let sign = if exp >= 0 { 1 } else { -1 };
        for _ in 0..exp.unsigned_abs() {
            letters.push(Letter::new(gen, sign));
        }
    }
    Ok(Word::from_letters(letters))
}

fn parse_generator(base: &str) -> Option<Generator> {
    let mut chars = base.chars();
    let first = chars.next()?;
    let rest: String = chars.collect();
    let arc = if rest.is_empty() { 1 } else { rest.parse().ok()? };
    if arc == 0 {
        return None;
    }
    match first {
        'v' => {
            if arc == 1 {
                Some(Generator::omega())
            } else {
                None
            }
        }
        'a'..='u' => Some(Generator::component(first as u32 - 'a' as u32 + 1, arc)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(i: u32) -> Generator {
        Generator::component(1, i)
    }

    fn v() -> Generator {
        Generator::omega()
    }

    #[test]
    fn multiply_cancels_inverse() {
        let w = parse_word("a v a2^-1").unwrap();
        assert!(w.mul(&w.inverse()).is_empty());
        assert!(w.inverse().mul(&w).is_empty());
    }

    #[test]
    fn invert_is_antihomomorphism() {
        // invert(v a v^-1) = v a^-1 v^-1
        let w = parse_word("v a v^-1").unwrap();
        assert_eq!(w.inverse(), parse_word("v a^-1 v^-1").unwrap());
    }

    #[test]
    fn one_cancellation() {
        // v^2 * v^-1 a^-1 = v a^-1
        let u = parse_word("v^2").unwrap();
        let w = parse_word("v^-1 a^-1").unwrap();
        assert_eq!(u.mul(&w), parse_word("v a^-1").unwrap());
    }

    #[test]
    fn commutator_of_equal_words_is_trivial() {
        let x = parse_word("v a v").unwrap();
        assert!(Word::commutator(&x, &x).is_empty());
    }

    #[test]
    fn commutator_definition() {
        let c = Word::commutator(&Word::generator(v()), &Word::generator(a(1)));
        assert_eq!(c, parse_word("v^-1 a^-1 v a").unwrap());
    }

    #[test]
    fn left_normed_bracketing() {
        // [w,x,y,z] = [[[w,x],y],z]
        let w = Word::generator(a(1));
        let x = Word::generator(v());
        let y = Word::generator(a(2));
        let z = Word::generator(a(3));
        let ln = Word::left_normed(&[w.clone(), x.clone(), y.clone(), z.clone()]);
        let manual = Word::commutator(&Word::commutator(&Word::commutator(&w, &x), &y), &z);
        assert_eq!(ln, manual);
    }

    #[test]
    fn exponent_sums() {
        // the extended parallel word of the three-crossing example knot
        let w = parse_word("v^2 a1^-1 v^-1 a2^-1 v^-1 a3^-1").unwrap();
        assert_eq!(w.exponent_sum(ClassId::Component(1)), -3);
        assert_eq!(w.exponent_sum(ClassId::Omega), 0);
        assert_eq!(Word::empty().exponent_sum(ClassId::Omega), 0);
    }

    #[test]
    fn display_roundtrip() {
        let w = parse_word("v^2 a1^-1 v^-1 a2^-1").unwrap();
        assert_eq!(parse_word(&w.to_string()).unwrap(), w);
        assert_eq!(Word::empty().to_string(), "1");
    }

    #[test]
    fn reduction_is_confluent_under_random_orders() {
        // build an unreduced letter soup, reduce via different association orders
        use rand::prelude::*;
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.random_range(0..14);
            let letters: Vec<Letter> = (0..n)
                .map(|_| {
                    let g = if rng.random_bool(0.3) { v() } else { a(rng.random_range(1..3)) };
                    Letter::new(g, if rng.random_bool(0.5) { 1 } else { -1 })
                })
                .collect();
            let direct = Word::from_letters(letters.iter().copied());
            // random split-then-multiply association
            let k = rng.random_range(0..=letters.len());
            let left = Word::from_letters(letters[..k].iter().copied());
            let right = Word::from_letters(letters[k..].iter().copied());
            assert_eq!(left.mul(&right), direct);
        }
    }
}
