//! Discrete-time simulation and duty-cycle scheduling for swarms of
//! batteryless intermittent nodes that coordinate without communicating.
//!
//! The crate is organised bottom-up: [`energy`] and [`model`] hold the shared
//! physics and domain types, [`pcp`] selects co-prime duty cycles offline,
//! [`traces`] generates or ingests harvest and event inputs, [`policy`]
//! implements every wake/sleep scheduler, [`engine`] runs the slot loop and
//! [`metrics`] scores its output.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod energy;
pub mod engine;
pub mod error;
pub mod metrics;
pub mod model;
pub mod pcp;
pub mod policy;
pub mod traces;

pub use error::{Error, Result};
