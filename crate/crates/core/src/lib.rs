//! Decay envelopes, graded coefficient spaces and perturbed frames.
//!
//! Infinite matrices are modelled by their `N × N` truncations; every
//! estimate is evaluated on the interior window where truncation effects
//! are negligible.

pub mod cvalue;
pub mod envelopes;
pub mod error;
pub mod frames;
pub mod graded;
pub mod hermite;
pub mod io;
pub mod jaffard;
pub mod linalg;
pub mod matrix;
pub mod nonfinite;
pub mod rng;
pub mod series;
pub mod summation;
pub mod weights;

pub use error::{Error, Result};
pub use matrix::TruncatedMatrix;
pub use weights::{CoefficientSequence, GradedFamily, Weight};
