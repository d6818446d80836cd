//! Havoc mutation with zero-execution taint inference.
//!
//! The crate models a coverage-guided greybox fuzzer: a stacked havoc mutation
//! engine, byte-distance metrics, a taint map that is filled from the mutants
//! the havoc loop executes anyway, a position sampler biased by that map,
//! small synthetic targets with edge coverage, and a campaign loop tying them
//! together. [`analysis`] holds the measurement experiments.

pub mod analysis;
pub mod biased;
pub mod distance;
pub mod error;
pub mod fuzzer;
pub mod mutation;
pub mod rng;
pub mod target;
pub mod taint;

pub use error::{Error, Result};
