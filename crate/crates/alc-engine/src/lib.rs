//! Exact algebra for parabolic geometries: root systems, Levi characters,
//! Chevalley bases, and the algebraic linearization condition for compatible
//! metrics on the horizontal distribution.

// Index loops read closer to the formulas in the numeric kernels.
#![allow(clippy::needless_range_loop)]

pub mod alc;
pub mod bgg1;
pub mod charalg;
pub mod chevalley;
pub mod classify;
pub mod config;
pub mod error;
pub mod fixture;
pub mod linalg;
pub mod parabolic;
pub mod rational;
pub mod rootsys;
pub mod tractor;

pub use error::{EngineError, Result};
