//! Synthesis of curves and invariant surfaces with a prescribed
//! geometry-induced potential, and the separated Schrödinger problems they
//! carry.

// `!(x > 0.0)` guards are used on purpose so NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod curve;
pub mod cylindrical;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod helicoidal;
pub mod mesh;
pub mod par;
pub mod profile;
pub mod quad;
pub mod revolution;
pub mod schrodinger;
pub mod surface;

pub use error::{ErrorKind, GipError, Result};
