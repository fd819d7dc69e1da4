//! Exact computer algebra for super Adler-type operators.
//!
//! The crate builds, bottom up: differential superpolynomials
//! ([`superpoly`]), scalar pseudo-differential operators ([`psdo`]), matrix
//! operators with the `∘` and `★` products ([`matop`]), λ-brackets and
//! Poisson vertex superalgebra checks ([`pvsa`]), rectangular W-superalgebra
//! generators ([`wgen`]) and the bihamiltonian hierarchy ([`hierarchy`]).

pub mod error;
pub mod hierarchy;
pub mod matop;
pub mod psdo;
pub mod pvsa;
pub mod render;
pub mod serial;
pub mod superpoly;
pub mod wgen;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/superpoly.md")]
    mod superpoly {}
    #[doc = include_str!("../../../book/src/psdo.md")]
    mod psdo {}
    #[doc = include_str!("../../../book/src/matrices.md")]
    mod matrices {}
    #[doc = include_str!("../../../book/src/brackets.md")]
    mod brackets {}
    #[doc = include_str!("../../../book/src/walgebra.md")]
    mod walgebra {}
    #[doc = include_str!("../../../book/src/hierarchy.md")]
    mod hierarchy {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
