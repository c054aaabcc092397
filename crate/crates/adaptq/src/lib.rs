//! Statevector workbench for VQE and ADAPT-VQE on small molecules: Pauli
//! algebra, operator pools, gate compilation and noisy sampled execution.

pub mod chem;
pub mod circuit;
pub mod engine;
mod error;
mod kernel;
pub mod pauli;
pub mod pools;
pub mod simstate;

pub use error::{Error, Result};
