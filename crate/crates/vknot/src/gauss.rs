//! Gauss codes and Gauss diagrams of virtual knots, links, and long knots.
//!
//! A Gauss code records each classical crossing twice (once as `O`, once as
//! `U`) with a sign, e.g. `O1-O2-O3-U1-U2-U3-`. Components are separated by
//! `,`; long (string-link) components carry the prefix `L:`. Crossing labels
//! are renumbered to first-appearance order on construction, so structural
//! equality is equality of canonical forms.

use std::fmt;

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Over,
    Under,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Pos => 1,
            Sign::Neg => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sign::Pos => write!(f, "+"),
            Sign::Neg => write!(f, "-"),
        }
    }
}

/// One passage through a classical crossing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Passage {
    /// 1-based crossing label (canonical after renumbering).
    pub crossing: u32,
    pub role: Role,
    pub sign: Sign,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Topology {
    Closed,
    Long,
}

/// One ordered component: a cyclic (closed) or linear (long) passage sequence.
/// The basepoint is implicit at index 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Component {
    pub passages: Vec<Passage>,
    pub topology: Topology,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GaussError {
    #[error("malformed Gauss code token `{0}`")]
    Syntax(String),
    #[error("crossing {0} does not appear exactly once as O and once as U")]
    UnbalancedCrossing(u32),
    #[error("crossing {0} carries different signs on its two passages")]
    SignMismatch(u32),
    #[error("component {0} does not exist")]
    NoSuchComponent(usize),
    #[error("operation requires a closed component")]
    LongComponent,
    #[error("operation requires a 1-component long diagram")]
    NotLong,
    #[error("cut position {0} is out of range or splits a crossing pair")]
    BadCut(usize),
    #[error("basepoint shift {0} is out of range")]
    BadShift(usize),
}

/// A validated, canonically numbered Gauss diagram.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussDiagram {
    components: Vec<Component>,
}

impl GaussDiagram {
    /// Builds a diagram from raw components, validating the pairing and sign
    /// invariants and renumbering crossings to first-appearance order.
    pub fn from_components(components: Vec<Component>) -> Result<Self, GaussError> {
        let mut d = GaussDiagram { components };
        d.validate()?;
        d.renumber();
        Ok(d)
    }

    /// The standard unknot diagram: one closed component, no crossings.
    pub fn unknot() -> Self {
        GaussDiagram {
            components: vec![Component { passages: Vec::new(), topology: Topology::Closed }],
        }
    }

    /// The diagram with no components at all (the end state of a movie in
    /// which every component has died).
    pub fn void() -> Self {
        GaussDiagram { components: Vec::new() }
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn component(&self, i: usize) -> Result<&Component, GaussError> {
        self.components.get(i).ok_or(GaussError::NoSuchComponent(i))
    }

    pub fn crossing_count(&self) -> usize {
        self.components.iter().map(|c| c.passages.len()).sum::<usize>() / 2
    }

    /// True when the diagram has no passages: the unknot, an unlink, or the
    /// void diagram.
    pub fn is_crossing_free(&self) -> bool {
        self.components.iter().all(|c| c.passages.is_empty())
    }

    pub fn is_closed_knot(&self) -> bool {
        self.components.len() == 1 && self.components[0].topology == Topology::Closed
    }

    pub fn is_long_knot(&self) -> bool {
        self.components.len() == 1 && self.components[0].topology == Topology::Long
    }

    fn validate(&self) -> Result<(), GaussError> {
        use std::collections::HashMap;
        let mut seen: HashMap<u32, Vec<Passage>> = HashMap::new();
        for comp in &self.components {
            for p in &comp.passages {
                seen.entry(p.crossing).or_default().push(*p);
            }
        }
        for (id, ps) in &seen {
            if ps.len() != 2 || ps[0].role == ps[1].role {
                return Err(GaussError::UnbalancedCrossing(*id));
            }
            if ps[0].sign != ps[1].sign {
                return Err(GaussError::SignMismatch(*id));
            }
        }
        Ok(())
    }

    fn renumber(&mut self) {
        use std::collections::HashMap;
        let mut map: HashMap<u32, u32> = HashMap::new();
        let mut next = 1;
        for comp in &mut self.components {
            for p in &mut comp.passages {
                let id = *map.entry(p.crossing).or_insert_with(|| {
                    let id = next;
                    next += 1;
                    id
                });
                p.crossing = id;
            }
        }
    }

    /// Parses the token grammar. The empty code is the unknot.
    pub fn parse(text: &str) -> Result<Self, GaussError> {
        let mut components = Vec::new();
        for chunk in text.split(',') {
            let mut chunk = chunk.trim();
            let topology = if let Some(rest) = chunk.strip_prefix("L:") {
                chunk = rest.trim_start();
                Topology::Long
            } else {
                Topology::Closed
            };
            components.push(Component { passages: parse_passages(chunk)?, topology });
        }
        GaussDiagram::from_components(components)
    }

    /// Cyclically rotates the passage sequence of a closed component right by
    /// `k` endpoints, renumbering afterwards. Shifting by 0 or by the full
    /// length is the identity.
    pub fn shift_basepoint(&self, component: usize, k: usize) -> Result<Self, GaussError> {
        let comp = self.component(component)?;
        if comp.topology != Topology::Closed {
            return Err(GaussError::LongComponent);
        }
        let len = comp.passages.len();
        if len > 0 && k >= 2 * len {
            return Err(GaussError::BadShift(k));
        }
        let mut components = self.components.clone();
        if len > 0 {
            let k = k % len;
            components[component].passages.rotate_right(k);
        }
        GaussDiagram::from_components(components)
    }

    /// Sum of the signs of crossings whose passages both lie on `component`.
    pub fn writhe(&self, component: usize) -> Result<i64, GaussError> {
        let comp = self.component(component)?;
        let mut sum = 0;
        for p in &comp.passages {
            if p.role == Role::Over
                && comp.passages.iter().any(|q| q.crossing == p.crossing && q.role == Role::Under)
            {
                sum += p.sign.value();
            }
        }
        Ok(sum)
    }

    /// Concatenation of 1-component long diagrams: `self` then `other`.
    pub fn concatenate(&self, other: &GaussDiagram) -> Result<Self, GaussError> {
        if !self.is_long_knot() || !other.is_long_knot() {
            return Err(GaussError::NotLong);
        }
        let offset = self.components[0].passages.iter().map(|p| p.crossing).max().unwrap_or(0);
        let mut passages = self.components[0].passages.clone();
        passages.extend(other.components[0].passages.iter().map(|p| Passage {
            crossing: p.crossing + offset,
            ..*p
        }));
        GaussDiagram::from_components(vec![Component { passages, topology: Topology::Long }])
    }

    /// Marks a 1-component long diagram cyclic (identifies its endpoints).
    pub fn closure(&self) -> Result<Self, GaussError> {
        if !self.is_long_knot() {
            return Err(GaussError::NotLong);
        }
        GaussDiagram::from_components(vec![Component {
            passages: self.components[0].passages.clone(),
            topology: Topology::Closed,
        }])
    }

    /// Cuts a 1-component closed diagram open at the endpoint boundary `cut`
    /// (0 cuts at the basepoint), producing a long diagram.
    pub fn split_closed(&self, cut: usize) -> Result<Self, GaussError> {
        if !self.is_closed_knot() {
            return Err(GaussError::NotLong);
        }
        let len = self.components[0].passages.len();
        if cut > len {
            return Err(GaussError::BadCut(cut));
        }
        let mut passages = self.components[0].passages.clone();
        passages.rotate_left(cut % len.max(1));
        GaussDiagram::from_components(vec![Component { passages, topology: Topology::Long }])
    }

    /// Cuts a 1-component closed diagram at the basepoint and at `cut`,
    /// producing the two long factors. Fails with `BadCut` when any crossing
    /// has one passage in each piece.
    pub fn split_factors(&self, cut: usize) -> Result<(Self, Self), GaussError> {
        if !self.is_closed_knot() {
            return Err(GaussError::NotLong);
        }
        let passages = &self.components[0].passages;
        if cut > passages.len() {
            return Err(GaussError::BadCut(cut));
        }
        let (first, second) = passages.split_at(cut);
        let straddles = first
            .iter()
            .any(|p| second.iter().any(|q| q.crossing == p.crossing));
        if straddles {
            return Err(GaussError::BadCut(cut));
        }
        let mk = |ps: &[Passage]| {
            GaussDiagram::from_components(vec![Component {
                passages: ps.to_vec(),
                topology: Topology::Long,
            }])
        };
        Ok((mk(first)?, mk(second)?))
    }
}

fn parse_passages(chunk: &str) -> Result<Vec<Passage>, GaussError> {
    let mut passages = Vec::new();
    let mut it = chunk.chars().peekable();
    while let Some(&c) = it.peek() {
        if c.is_whitespace() {
            it.next();
            continue;
        }
        let role = match c {
            'O' => Role::Over,
            'U' => Role::Under,
            _ => return Err(GaussError::Syntax(c.to_string())),
        };
        it.next();
        let mut digits = String::new();
        while let Some(&d) = it.peek() {
            if d.is_ascii_digit() {
                digits.push(d);
                it.next();
            } else {
                break;
            }
        }
        let crossing: u32 =
            digits.parse().map_err(|_| GaussError::Syntax(format!("{c}{digits}")))?;
        if crossing == 0 {
            return Err(GaussError::Syntax(format!("{c}{digits}")));
        }
        let sign = match it.next() {
            Some('+') => Sign::Pos,
            Some('-') => Sign::Neg,
            other => {
                return Err(GaussError::Syntax(format!(
                    "{c}{digits}{}",
                    other.map(String::from).unwrap_or_default()
                )))
            }
        };
        passages.push(Passage { crossing, role, sign });
    }
    Ok(passages)
}

impl fmt::Display for GaussDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for comp in &self.components {
            if !first {
                write!(f, ",")?;
            }
            first = false;
            if comp.topology == Topology::Long {
                write!(f, "L:")?;
            }
            for p in &comp.passages {
                let role = match p.role {
                    Role::Over => 'O',
                    Role::Under => 'U',
                };
                write!(f, "{role}{}{}", p.crossing, p.sign)?;
            }
        }
        Ok(())
    }
}

/// An ordered, name-unique table of Gauss codes (`name<TAB>code` lines,
/// `#` comments ignored).
#[derive(Clone, Debug, Default)]
pub struct KnotTable {
    entries: Vec<(String, GaussDiagram)>,
}

#[derive(Debug, Error)]
pub enum TableError {
    #[error("line {line}: expected `name<TAB>gausscode`")]
    MissingField { line: usize },
    #[error("line {line}: duplicate name `{name}`")]
    DuplicateName { line: usize, name: String },
    #[error("line {line}: {source}")]
    BadCode {
        line: usize,
        #[source]
        source: GaussError,
    },
}

impl KnotTable {
    pub fn parse(text: &str) -> Result<Self, TableError> {
        let mut entries: Vec<(String, GaussDiagram)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (name, code) =
                trimmed.split_once('\t').ok_or(TableError::MissingField { line })?;
            let name = name.trim();
            if entries.iter().any(|(n, _)| n == name) {
                return Err(TableError::DuplicateName { line, name: name.to_string() });
            }
            let diagram = GaussDiagram::parse(code.trim())
                .map_err(|source| TableError::BadCode { line, source })?;
            entries.push((name.to_string(), diagram));
        }
        Ok(KnotTable { entries })
    }

    pub fn get(&self, name: &str) -> Option<&GaussDiagram> {
        self.entries.iter().find(|(n, _)| n == name).map(|(_, d)| d)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &GaussDiagram)> {
        self.entries.iter().map(|(n, d)| (n.as_str(), d))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
