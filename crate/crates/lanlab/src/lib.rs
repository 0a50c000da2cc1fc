//! Simulation and verification toolkit for local asymptotic normality (LAN)
//! of discretely observed Markov models.
//!
//! The library has two kinds of models sharing one interface
//! ([`transition::TransitionModel`]): exact finite-state chains
//! ([`chain`]), where every density, score and Fisher information is
//! available in closed form, and a jump-SDE model ([`sde`] driven by the
//! Lévy noise of [`levy`]), where scores are estimated by Monte Carlo
//! (kernel density estimates plus finite differences in the parameter,
//! with common random numbers).
//!
//! On top of the models, [`lan`] computes likelihood-ratio decompositions,
//! normality tests of the normalized score, and the per-step Hellinger
//! diagnostics; [`ergodics`] covers invariant-measure, long-run-variance
//! and mixing diagnostics; [`harness`] is the configuration-driven,
//! deterministic-parallel front end used by the `lanlab` CLI.

pub mod chain;
pub mod config;
pub mod ergodics;
mod error;
pub mod harness;
pub mod lan;
pub mod levy;
pub mod quad;
pub mod rng;
pub mod sde;
pub mod stats;
pub mod transition;

pub use error::{Error, Result};
