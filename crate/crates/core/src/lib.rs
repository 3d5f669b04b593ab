//! Numerical and exact verification of curvature pinching for Lagrangian
//! submanifolds of complex space forms.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod ambient;
pub mod curvature;
pub mod driver;
pub mod error;
pub mod fundforms;
pub mod identities;
pub mod immersions;
pub mod jets;
pub mod optimize;
pub mod pinching;
pub mod report;

pub use error::{Error, Result};
