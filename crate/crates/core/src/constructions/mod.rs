//! Stage-based constructions: the diagonalizing adversary, permitting, the
//! escape subfamily, forcing with dense sets and good-sequence genericity.

pub mod adversary;
pub mod escape;
pub mod forcing;
pub mod permitting;
pub mod pi01g;
pub mod strategy;
pub mod transcript;
