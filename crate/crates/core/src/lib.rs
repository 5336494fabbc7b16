//! Conditional density matrices: composing, reducing, and conditioning
//! quantum subsystems, with worked spin/polarization examples and a
//! photon-pair one-time-pad simulator.

pub mod cdm;
pub mod cli;
pub mod error;
mod numfmt;
pub mod qstate;
pub mod scenarios;
pub mod tensor;
pub mod vernam;

pub use error::{Error, Result};
