//! Numerics for wave maps with potential into the unit sphere, their viscous
//! regularization, and the Schrödinger solitons built from them.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line driver and concurrent sweeps live in the `solitonsim` crate.
#![no_std]
// `!(x > 0.0)` is deliberate throughout: it rejects NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod elliptic;
pub mod error;
pub mod evolver;
pub mod geometry;
pub mod grid;
pub mod init;
pub mod vector;
pub mod verify;

pub use error::{Error, Result};
pub use vector::{AmbientVector, Vec3};
