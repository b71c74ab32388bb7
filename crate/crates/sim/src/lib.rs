//! Monte-Carlo bit-error-rate simulation, file formats and the command
//! line for the `asi-core` receiver chain.
//!
//! * [`harness`]: paired Monte-Carlo runs over an SNR sweep.
//! * [`config`]: the sectioned `key = value` run configuration.
//! * [`io`]: CSV formats and atomic file output.
//! * [`report`]: BER and complexity tables.
//! * [`cli`]: the `asi-sim` binary.

pub mod cli;
pub mod config;
pub mod error;
pub mod harness;
pub mod io;
pub mod report;
pub mod stats;

pub use error::{ConfigIssue, SimError, SimResult};
