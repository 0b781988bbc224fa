//! Capacity regions, GDoF bounds and genie-aided upper bounds for the ergodic
//! phase-fading Z-interference channel with a relay (Z-ICR).
//!
//! All information quantities are in bits. Channel gains are given as SNRs on
//! the links `11, 21, 31, 22, 32, 13` where the first digit is the transmitter
//! (3 is the relay) and the second the receiver (3 is the relay).

pub mod capacity;
pub mod cli;
pub mod error;
pub mod gaussian;
pub mod gdof;
pub mod geometry;
pub mod model;
pub mod oracle;
pub mod tol;
pub mod verify;

pub use error::{Error, Result};
