//! Adaptive-optics wavefront budgets, channel efficiency and decoy-state BB84
//! key rates for LEO satellite-to-ground optical links.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod atmosphere;
pub mod budget;
pub mod channel;
pub mod error;
pub mod geometry;
pub mod numerics;
pub mod qkd;
pub mod scenario;

pub use error::{Error, Result};
