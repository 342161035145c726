//! Countable random sets on the real line and on small discrete spaces.
//!
//! The crate covers the constructive side of the theory: separating
//! families and dissecting systems ([`setalg`], [`partition`]), the
//! canonical measurable selection and enumeration of finite sets,
//! constructive Poisson samplers including processes with fixed and random
//! accumulation points ([`models`]), hitting-function estimation and
//! approximation checks ([`hitting`]), law-comparison harnesses and the
//! sigma-finite decomposition ([`laws`]), and an exact sigma-field engine
//! over finite configuration spaces ([`sigma`]).

pub mod cli;
pub mod error;
pub mod hitting;
pub mod laws;
pub mod models;
pub mod partition;
pub mod rng;
pub mod setalg;
pub mod sigma;
pub mod stats;

pub use error::{Error, Result};
