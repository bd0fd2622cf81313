//! Numerical laboratory for the fractional Helmholtz equation with a random
//! source: Green's functions, Gaussian source synthesis, Born scattering,
//! far-field patterns and correlation-based recovery of the source statistics.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod error;
pub mod forward;
pub mod gmig;
pub mod greens;
pub mod grid;
pub mod inversion;
pub mod io;
pub mod oracle;
pub mod quad;
pub mod specfun;

pub use error::{Error, Result};
