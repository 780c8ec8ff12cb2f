//! Resource estimation for fault-tolerant quantum computers.
//!
//! The crate computes QLOPS (logical operations per second), QLOPS density and
//! magic-state factory sizes from declarative descriptions of hardware, codes
//! and decoders. Modules are layered bottom-up:
//!
//! * [`model`]: domain types and configuration loading
//! * [`error_rates`]: per-layer error rates, log-linear fits, distance matching
//! * [`sec`]: syndrome-extraction cycle lengths and AOD scheduling
//! * [`qlops`]: the metric itself
//! * [`distillation`]: 15-to-1 factory sizing
//! * [`report`]: scenario evaluation, case studies and output formats

// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distillation;
pub mod error;
pub mod error_rates;
pub mod model;
pub mod qlops;
pub mod report;
pub mod sec;

pub use error::{Error, Result};
