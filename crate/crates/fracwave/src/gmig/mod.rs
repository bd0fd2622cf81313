//! Complex Gaussian sources with prescribed covariance and relation principal
//! symbols mu_c |xi|^{-m}, mu_r |xi|^{-m}: envelopes, spectral sampler,
//! lattice kernels and the admissibility report.

mod sampler;
mod source;
mod validate;

pub use sampler::{continuum_correlation_1d, kernel_eval, sample_field, FieldRealization, KernelKind, LatticeCorrelation};
pub use source::{derive_envelopes, Bump, Potential, Region, SourceSpec};
pub use validate::{validate_assumption, AssumptionReport, Check};
