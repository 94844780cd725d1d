//! Exact and approximate power of binary hypothesis tests between two

// `!(x >= 0.0)` style guards reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
//! discrete distributions, computed from the log-likelihood-ratio spectrum.

pub mod error;
pub mod gaussian;
pub mod io;
pub mod largedev;
pub mod normal;
pub mod np_exact;
pub mod numeric;
pub mod quad;
pub mod renyi;
pub mod spectrum;
pub mod variational;

pub use error::{Error, Result};
pub use spectrum::{llr_spectrum, DiscretePair, LlrSpectrum};
