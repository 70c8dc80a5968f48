//! Exact tail decay rates for double M/G/1-type reflecting random walks on the
//! quarter plane, with numerical cross-checks.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod error;
pub mod geometry;
pub mod model;
pub mod network;
pub mod plot;
pub mod report;
pub mod sample;
pub mod section;
pub mod stability;
pub mod verify;

pub use error::{Error, Result};
