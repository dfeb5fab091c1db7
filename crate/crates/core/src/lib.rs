//! Hierarchical beam training for terminals built from four uniform planar
//! arrays (UPAs) facing the four horizontal quadrants.
//!
//! The crate covers the array model ([`geometry`]), codebook construction
//! ([`codebook`]), the line-of-sight channel and noisy measurements
//! ([`channel`]), the training procedures ([`training`]) and evaluation
//! ([`metrics`]). [`config`], [`export`] and [`commands`] back the
//! `quadbeam` binary.

pub mod channel;
pub mod codebook;
pub mod commands;
pub mod config;
pub mod error;
pub mod export;
pub mod geometry;
pub mod metrics;
pub mod training;

pub use error::{Error, Result};
