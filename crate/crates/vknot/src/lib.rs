#![forbid(unsafe_code)]

//! Milnor-type concordance invariants of virtual knots and links, computed
//! directly from Gauss codes.
//!
//! The pipeline reads a Gauss code into a [`gauss::GaussDiagram`], builds a
//! serial Wirtinger-type presentation of the extended group
//! ([`presentation`]), pushes longitudes into free nilpotent quotients
//! ([`chenmilnor`]), and extracts invariants from Magnus expansions
//! ([`magnus`], [`invariants`]). Normal forms over basic commutators live in
//! [`hall`], concordance obstructions for long knots in [`artin`], and the
//! Gauss-diagram move calculus with slice-movie verification in
//! [`cobordism`].

pub mod artin;
pub mod chenmilnor;
pub mod cobordism;
pub mod gauss;
pub mod hall;
pub mod invariants;
pub mod magnus;
pub mod presentation;
pub mod words;

pub use gauss::{GaussDiagram, KnotTable};
pub use invariants::InvariantValue;
pub use magnus::TruncatedSeries;
pub use words::Word;
