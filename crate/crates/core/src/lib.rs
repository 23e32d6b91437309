//! Motion transfer from human facial landmarks to pareidolia images.
//!
//! Boundaries are modelled as composite Bézier curves, driven by per-control
//! ratios against a neutral reference face, spread into a dense motion field,
//! inverted with first-order hole filling, and rendered by a mask-gated
//! coarse-to-fine warp.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bezier;
pub mod error;
pub mod field;
pub mod io;
pub mod metrics;
pub mod motion;
pub mod pipeline;
pub mod shape;
pub mod warp;

pub use error::{Error, Result};
