//! Signal processing core for an overloaded multi-LNB satellite receiver.
//!
//! The crate covers the whole receive chain up to the hard symbol decision:
//!
//! * [`numerics`]: a small complex linear-algebra kernel (Hermitian
//!   eigendecomposition, pseudo-inverse square root, Cholesky, linear solve).
//! * [`scenario`]: dish/LNB/satellite geometry, the channel matrix it induces
//!   and the spatially correlated noise model.
//! * [`constellation`]: unit-power QPSK, 8PSK and 16APSK alphabets with their
//!   DVB-S2 bit labels.
//! * [`preprocessor`]: the MRC and Wiener-Hopf beamformers together with the
//!   matching whitening filters.
//! * [`detector`]: exhaustive joint ML detection and list-based group-wise
//!   search detection (LGSD), both instrumented with a squaring counter.
//!
//! Everything here is `no_std` with `alloc`. File formats, the Monte-Carlo
//! driver and the command line live in the `asi-sim` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod constellation;
pub mod detector;
mod error;
pub mod numerics;
pub mod preprocessor;
pub mod scenario;

pub use constellation::{Constellation, Modulation};
pub use detector::{CandidateList, DetectionResult, LgsdConfig, SquaringCounter};
pub use error::{Error, Result};
pub use numerics::{CMatrix, HermEig};
pub use preprocessor::{CovarianceSet, Preprocessor, PreprocessorKind};
pub use scenario::{ChannelMatrix, NoiseModel, Scenario};

pub use num_complex::Complex64;
