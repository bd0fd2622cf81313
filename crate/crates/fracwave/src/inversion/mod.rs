//! Recovery of the micro-correlation strengths from far-field correlations:
//! separating normal, band estimators, conjugate mirror rule and inverse
//! transform onto a spatial grid.

mod assemble;
mod estimators;
mod geometry;

pub use assemble::{
    assemble_mu, estimate_band, fourier_transform_on_grid, relative_symbol_error, BandEstimates, DirectionalEstimate,
    Reconstruction,
};
pub use estimators::{
    aligned_tau_grid, band_nodes, correlate_covariance, correlate_relation, correlate_with, covariance_constant,
    estimator_weight, mean_constant, relation_constant, required_wavenumbers, weight_exponent, RecoveryConfig,
};
pub use geometry::{compute_separating_normal, SeparatingNormal};

use crate::error::Result;
use crate::forward::FarFieldTable;
use crate::grid::Grid;

/// Band estimates and reconstructions for every band start of a recovery.
#[derive(Clone, Debug)]
pub struct RecoveryReport {
    pub bands: Vec<BandEstimates>,
    pub reconstructions: Vec<Reconstruction>,
}

/// Runs the estimators over every band of `cfg` and assembles mu_c and mu_r
/// on `grid` for each band.
pub fn recover(table: &FarFieldTable, cfg: &RecoveryConfig, grid: &Grid) -> Result<RecoveryReport> {
    cfg.validate()?;
    let mut bands = Vec::with_capacity(cfg.k_values.len());
    let mut reconstructions = Vec::with_capacity(cfg.k_values.len());
    for &k in &cfg.k_values {
        let b = estimate_band(table, k, cfg)?;
        reconstructions.push(assemble_mu(&b, cfg, grid)?);
        bands.push(b);
    }
    Ok(RecoveryReport { bands, reconstructions })
}
