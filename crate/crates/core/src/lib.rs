//! Exact computations with polyharmonic polynomials and the multivariate
//! Markov transform of finitely supported measures.
//!
//! Polynomials have rational coefficients and every quantity is computed
//! exactly, apart from [`markov::markov_eval_numeric`] and
//! [`markov::SeriesRep::eval_numeric`], which evaluate in floating point.
//!
//! ```
//! use polyharmonic::{harmonic, parse_poly};
//!
//! let p = parse_poly("x1^2 + x2^2 - 1", 2)?;
//! assert_eq!(p.polyharmonic_degree(), 1);
//! assert_eq!(harmonic::np_formula(&p)?, 1);
//! # Ok::<(), polyharmonic::Error>(())
//! ```
//!
//! The guide in `book/` walks through the concepts; its code listings run
//! as doc-tests of this crate.

pub mod error;
pub mod harmonic;
pub mod linalg;
pub mod markov;
pub mod measures;
pub mod parse;
pub mod poly;
pub mod rational;
pub mod verify;

pub use error::{Error, Result};
pub use harmonic::{almansi_decompose, harmonic_basis, np_formula, np_search, HarmonicLayer};
pub use markov::{markov_series, SecondKindRep, SeriesRep, SupportVerdict};
pub use measures::{Atom, DiscreteMeasure};
pub use parse::parse_poly;
pub use poly::{MPoly, Monomial};
pub use rational::Rational;

// Chapters of the guide, so `cargo test --doc` runs their listings.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/polynomials.md")]
    mod polynomials {}
    #[doc = include_str!("../../../book/src/harmonics.md")]
    mod harmonics {}
    #[doc = include_str!("../../../book/src/measures.md")]
    mod measures {}
    #[doc = include_str!("../../../book/src/markov.md")]
    mod markov {}
    #[doc = include_str!("../../../book/src/second_kind.md")]
    mod second_kind {}
    #[doc = include_str!("../../../book/src/uniqueness.md")]
    mod uniqueness {}
}
