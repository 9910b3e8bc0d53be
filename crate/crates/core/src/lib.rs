//! Finite-scale constructions around maximal subfamilies, finite-character
//! predicates and finitary closure operators, each paired with a brute-force
//! checker.

pub mod closure_det;
pub mod closure_nondet;
pub mod constructions;
pub mod encoding;
pub mod error;
pub mod families;
pub mod finite_character;
pub mod oracles;
pub mod zorn;

pub use encoding::FinSet;
pub use error::{Error, Result};
