//! Coalgebraic predicate logic over finite coalgebras.

pub mod corpus;
pub mod error;
pub mod evaluator;
pub mod gen;
pub mod hilbert;
pub mod io;
pub mod modeltheory;
pub mod onestep;
pub mod selftest;
pub mod sequent;
pub mod structures;
pub mod syntax;
pub mod translate;

pub use error::{Error, Result};
