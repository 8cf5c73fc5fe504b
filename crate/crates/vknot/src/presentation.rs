//! Serial Wirtinger-type presentations of the group G(L) and the extended
//! group of a Gauss diagram, and meridian-longitude word pairs.
//!
//! Generators fall into conjugacy classes, one per link component plus (in
//! the extended case) the auxiliary class `v`. A cyclic class of size `n` has
//! `n` defining relations `c_{i,j+1} = w_{i,j}^-1 c_{i,j} w_{i,j}` (indices
//! mod `n`); a serial class has `n - 1` of them; a trivially cyclic class has
//! none. The conjugating words `w_{i,j}` are read off the diagram while
//! traversing each component from its basepoint:
//!
//! * over-passage, sign s: `w = v^-s` (extended only; no generator boundary
//!   in the plain group),
//! * under-passage at a crossing whose over-strand enters on arc `z`:
//!   `w = v z` for sign `+`, `w = v^-1 z^-1` for sign `-` (the plain group
//!   drops the `v` letters).

use std::fmt;

use thiserror::Error;

use crate::gauss::{GaussDiagram, Role, Sign, Topology};
use crate::words::{ClassId, Generator, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassKind {
    Cyclic,
    Serial,
    TriviallyCyclic,
}

/// One conjugacy class of generators with its conjugating words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjClass {
    pub class: ClassId,
    pub kind: ClassKind,
    /// Number of generators `c_{i,1}, ..., c_{i,n}`.
    pub size: u32,
    /// `w_{i,1}, ..., w_{i,n}` for cyclic classes, one fewer for serial,
    /// empty for trivially cyclic.
    pub words: Vec<Word>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SerialPresentation {
    pub classes: Vec<ConjClass>,
    pub extended: bool,
    /// Number of link components (classes excluding `v`).
    pub components: u32,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PresentationError {
    #[error("the omega class has no longitude")]
    OmegaClass,
    #[error("no conjugacy class {0:?}")]
    NoSuchClass(ClassId),
}

/// Meridian plus the parallel word and its exponent-corrected longitude.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeridianLongitudePair {
    pub meridian: Generator,
    /// Product of the conjugating words, before exponent correction.
    pub parallel: Word,
    /// `parallel * c_{i,1}^k` with `k` chosen so the exponent sum of the
    /// meridian class is zero.
    pub longitude: Word,
}

impl SerialPresentation {
    pub fn class(&self, id: ClassId) -> Option<&ConjClass> {
        self.classes.iter().find(|c| c.class == id)
    }

    /// All generators, class by class.
    pub fn generators(&self) -> Vec<Generator> {
        let mut gens = Vec::new();
        for class in &self.classes {
            for arc in 1..=class.size {
                gens.push(Generator { class: class.class, arc });
            }
        }
        gens
    }

    /// The defining relations as `(lhs, rhs)` pairs with
    /// `lhs = c_{i,j+1}` and `rhs = w^-1 c_{i,j} w`.
    pub fn relations(&self) -> Vec<(Generator, Word)> {
        let mut rels = Vec::new();
        for class in &self.classes {
            for (j, w) in class.words.iter().enumerate() {
                let j = j as u32 + 1;
                let src = Generator { class: class.class, arc: j };
                let next = if j == class.size { 1 } else { j + 1 };
                let lhs = Generator { class: class.class, arc: next };
                let rhs = w.inverse().mul(&Word::generator(src)).mul(w);
                rels.push((lhs, rhs));
            }
        }
        rels
    }

    /// Meridian-parallel-longitude data for a component class.
    pub fn longitude_pair(&self, id: ClassId) -> Result<MeridianLongitudePair, PresentationError> {
        if id == ClassId::Omega {
            return Err(PresentationError::OmegaClass);
        }
        let class = self.class(id).ok_or(PresentationError::NoSuchClass(id))?;
        let take = match class.kind {
            ClassKind::Cyclic => class.words.len(),
            ClassKind::Serial => class.words.len(),
            ClassKind::TriviallyCyclic => 0,
        };
        let mut parallel = Word::empty();
        for w in class.words.iter().take(take) {
            parallel = parallel.mul(w);
        }
        let meridian = Generator::class_rep(id);
        let k = -parallel.exponent_sum(id);
        let longitude = parallel.mul(&Word::generator(meridian).pow(k));
        Ok(MeridianLongitudePair { meridian, parallel, longitude })
    }
}

impl fmt::Display for SerialPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self.generators().iter().map(|g| g.to_string()).collect();
        writeln!(f, "< {} |", gens.join(", "))?;
        for (lhs, rhs) in self.relations() {
            writeln!(f, "  {lhs} = {rhs}")?;
        }
        write!(f, ">")
    }
}

/// Location of every passage: (component, position) pairs indexed by
/// crossing id and role.
struct PassageIndex {
    over: Vec<(usize, usize)>,
    under: Vec<(usize, usize)>,
}

fn index_passages(d: &GaussDiagram) -> PassageIndex {
    let n = d.crossing_count();
    let mut over = vec![(usize::MAX, usize::MAX); n + 1];
    let mut under = over.clone();
    for (ci, comp) in d.components().iter().enumerate() {
        for (pi, p) in comp.passages.iter().enumerate() {
            let slot = match p.role {
                Role::Over => &mut over,
                Role::Under => &mut under,
            };
            slot[p.crossing as usize] = (ci, pi);
        }
    }
    PassageIndex { over, under }
}

/// Builds the extended presentation: one generator per short arc (per
/// passage-to-passage interval) of each component, plus the auxiliary `v`.
pub fn extended_presentation(d: &GaussDiagram) -> SerialPresentation {
    let idx = index_passages(d);
    let m = d.components().len() as u32;
    let mut classes = Vec::new();
    for (ci, comp) in d.components().iter().enumerate() {
        let class = ClassId::Component(ci as u32 + 1);
        let p = comp.passages.len() as u32;
        if p == 0 {
            classes.push(ConjClass { class, kind: ClassKind::TriviallyCyclic, size: 1, words: vec![] });
            continue;
        }
        let (kind, size) = match comp.topology {
            Topology::Closed => (ClassKind::Cyclic, p),
            Topology::Long => (ClassKind::Serial, p + 1),
        };
        let v = Word::generator(Generator::omega());
        let words = comp
            .passages
            .iter()
            .map(|pas| match pas.role {
                // over passage: w = v^-s
                Role::Over => v.pow(-pas.sign.value()),
                // under passage: w = (v z)^...,  z = over-incoming short arc
                Role::Under => {
                    let (oc, op) = idx.over[pas.crossing as usize];
                    // the short arc entering passage `op` has arc index op+1
                    let z = Word::generator(Generator::component(oc as u32 + 1, op as u32 + 1));
                    match pas.sign {
                        Sign::Pos => v.mul(&z),
                        Sign::Neg => v.inverse().mul(&z.inverse()),
                    }
                }
            })
            .collect();
        classes.push(ConjClass { class, kind, size, words });
    }
    classes.push(ConjClass {
        class: ClassId::Omega,
        kind: ClassKind::TriviallyCyclic,
        size: 1,
        words: vec![],
    });
    SerialPresentation { classes, extended: true, components: m }
}

/// Builds the plain group presentation: one generator per arc (per
/// under-passage interval) of each component, no `v`.
pub fn group_presentation(d: &GaussDiagram) -> SerialPresentation {
    let idx = index_passages(d);
    let m = d.components().len() as u32;

    // arc index at a given position of a component: arcs are delimited by
    // under-passages; arc j ends at the j-th under-passage.
    let arc_at = |ci: usize, pos: usize| -> u32 {
        let comp = &d.components()[ci];
        let unders: Vec<usize> = comp
            .passages
            .iter()
            .enumerate()
            .filter(|(_, p)| p.role == Role::Under)
            .map(|(i, _)| i)
            .collect();
        let before = unders.iter().filter(|&&u| u < pos).count() as u32;
        match comp.topology {
            Topology::Long => before + 1,
            Topology::Closed => {
                let k = unders.len() as u32;
                if k == 0 {
                    1
                } else {
                    before % k + 1
                }
            }
        }
    };

    let mut classes = Vec::new();
    for (ci, comp) in d.components().iter().enumerate() {
        let class = ClassId::Component(ci as u32 + 1);
        let unders = comp.passages.iter().filter(|p| p.role == Role::Under).count() as u32;
        if unders == 0 {
            classes.push(ConjClass { class, kind: ClassKind::TriviallyCyclic, size: 1, words: vec![] });
            continue;
        }
        let (kind, size) = match comp.topology {
            Topology::Closed => (ClassKind::Cyclic, unders),
            Topology::Long => (ClassKind::Serial, unders + 1),
        };
        let words = comp
            .passages
            .iter()
            .filter(|p| p.role == Role::Under)
            .map(|pas| {
                let (oc, op) = idx.over[pas.crossing as usize];
                let z = Word::generator(Generator::component(oc as u32 + 1, arc_at(oc, op)));
                z.pow(pas.sign.value())
            })
            .collect();
        classes.push(ConjClass { class, kind, size, words });
    }
    SerialPresentation { classes, extended: false, components: m }
}
