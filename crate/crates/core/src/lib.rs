//! Schatten quasi-norms, Schur multipliers and the triangular projection on
//! `S_p`, `0 < p <= 1`. The guide in `book/` walks through each module.

pub mod bump;
pub mod error;
pub mod hankel;
pub mod harness;
mod quad;
pub mod spcore;
pub mod trigpoly;
pub mod witness;

pub use error::{Error, Result};

/// The guide's snippets, compiled and run as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/schatten.md")]
    mod schatten {}
    #[doc = include_str!("../../../book/src/polynomials.md")]
    mod polynomials {}
    #[doc = include_str!("../../../book/src/bump.md")]
    mod bump {}
    #[doc = include_str!("../../../book/src/hankel.md")]
    mod hankel {}
    #[doc = include_str!("../../../book/src/witness.md")]
    mod witness {}
    #[doc = include_str!("../../../book/src/harness.md")]
    mod harness {}
}
