//! Rocket design benchmark environment.

// `!(x > 0.0)` is used deliberately throughout so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod design;
pub mod geometry;
pub mod harness;
pub mod optimize;
pub mod pipeline;
pub mod scoring;
pub mod server;
pub mod sim;
pub mod structures;
