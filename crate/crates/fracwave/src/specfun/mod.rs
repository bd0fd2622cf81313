//! Complex special functions: Gamma, Bessel and the Fox H-function family
//! behind the fractional Helmholtz Green's function.

mod bessel;
pub(crate) mod dd;
mod fox;
mod gamma;

pub use bessel::{bessel_j, j0};
pub use fox::{
    asymptotic_envelope, crossover, fox_h_2124, fox_h_asymptotic, fox_h_large, kernel_direct, mellin_g2,
    ContourSpec, FoxEval, HParams,
};
pub(crate) use fox::{algebraic_series, classical_pv, green_prefactor};
pub use gamma::{gamma_complex, ln_gamma_complex};
