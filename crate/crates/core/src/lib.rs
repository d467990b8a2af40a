//! Symbolic shape analysis with Boolean heaps.

pub mod abstraction;
pub mod engine;
pub mod heap;
pub mod logic;
pub mod oracle;
pub mod propagation;
pub mod prover;
