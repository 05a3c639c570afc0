//! Finite groupoid representation engine.
//!
//! Almost representations of a finite groupoid (matrix assignments that are
//! multiplicative up to a small defect) are corrected into exact projective
//! representations by repeated Haar averaging. Around that sit Haar systems
//! and cutoff functions, scalar 2-cocycle multipliers and their
//! isometrization, unitarization by averaged Gram matrices, direct and
//! inverse images along homomorphisms, and separation of arrows by the
//! regular representation.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]
#![forbid(unsafe_code)]
// Negated comparisons keep NaN on the failing side.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod cocycle;
pub mod error;
pub mod fixtures;
pub mod groupoid;
pub mod hilbert;
pub mod linalg;
pub mod measure;
pub mod morita;
pub mod rep;
pub mod report;

pub use error::{Error, Result};
