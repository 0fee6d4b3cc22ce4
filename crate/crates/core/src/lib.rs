//! Secure multi-party batch matrix multiplication over prime fields.
//!
//! The crate implements generalized cross-subspace alignment codes with
//! noise alignment (GCSA-NA), a polynomial-sharing baseline, a Strassen
//! variant with null-space aligned noise, closed-form and measured cost
//! accounting, and a deterministic three-phase simulator.

pub mod block;
pub mod cost;
pub mod ep;
pub mod error;
pub mod field;
pub mod gcsa;
pub mod matrix;
pub mod ps;
pub mod rng;
pub mod sim;
pub mod strassen;
pub mod structured;
pub mod verify;

pub use error::{Error, Result};
pub use field::PrimeField;
pub use matrix::FieldMatrix;
