//! Independent brute-force references used to validate the production paths:
//! principal-value Fourier inversion of the kernel, discrete weighted norms,
//! residuals of the fractional equation and Monte-Carlo statistics.

mod norms;
mod pv;
mod stats;

pub use norms::{
    fractional_pde_residual, fractional_pde_residual_within, resolvent_decay_probe, weighted_norm, DecayProbe, DecayProbeConfig, ProbeInput,
};
pub use pv::{green_delta_pv, half_residue, PVQuadSpec, PvEval};
pub use stats::{complex_mean, jarque_bera, loglog_slope, real_mean, JarqueBera, MeanEstimate};
