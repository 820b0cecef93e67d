//! Channel separation, sum-rate bounds and phase optimization for a
//! multi-user uplink through a reconfigurable intelligent surface.

pub mod channel;
pub mod config;
pub mod error;
pub mod harness;
pub mod numerics;
pub mod optim;
pub mod phase;
pub mod separation;

pub use error::{Error, Result};
