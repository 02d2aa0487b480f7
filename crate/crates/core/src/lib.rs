//! Virtual resource distillation.
//!
//! Overheads, rates and bounds for distilling target resources from noisy
//! states, channels and combs with signed mixtures of free operations, and
//! the Monte Carlo estimators that realise them.

pub mod channels;
pub mod coherence;
pub mod combs;
pub mod conic;
pub mod entanglement;
pub mod error;
pub mod freesets;
pub mod magic;
pub mod monotones;
pub mod qcore;
pub mod sampler;

pub use error::{Result, VqrdError};
