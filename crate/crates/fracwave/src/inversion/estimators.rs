use super::geometry::SeparatingNormal;
use crate::error::{Error, Result};
use crate::forward::FarFieldTable;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Normalization of the covariance estimator: 4 a^2, 8 pi a^2, 16 pi^2 a^2.
pub fn covariance_constant(d: usize, alpha: f64) -> Complex64 {
    let a2 = alpha * alpha;
    Complex64::new(
        match d {
            1 => 4.0 * a2,
            2 => 8.0 * PI * a2,
            _ => 16.0 * PI * PI * a2,
        },
        0.0,
    )
}

/// Normalization of the relation estimator: -4 a^2, -8 pi a^2 i, 16 pi^2 a^2.
pub fn relation_constant(d: usize, alpha: f64) -> Complex64 {
    let a2 = alpha * alpha;
    match d {
        1 => Complex64::new(-4.0 * a2, 0.0),
        2 => Complex64::new(0.0, -8.0 * PI * a2),
        _ => Complex64::new(16.0 * PI * PI * a2, 0.0),
    }
}

/// Leading constant of the mean correlation of F0: 1/(4 a^2), 1/(8 pi a^2), 1/(16 pi^2 a^2).
pub fn mean_constant(d: usize, alpha: f64) -> f64 {
    1.0 / covariance_constant(d, alpha).re
}

/// Exponent m + 4 alpha - d - 1 of the frequency weight.
pub fn weight_exponent(d: usize, alpha: f64, m: f64) -> f64 {
    m + 4.0 * alpha - d as f64 - 1.0
}

pub fn estimator_weight(k: f64, d: usize, alpha: f64, m: f64) -> f64 {
    k.powf(weight_exponent(d, alpha, m))
}

/// Trapezoid nodes K + i K / (nk - 1), i = 0..nk-1, over the band [K, 2K].
pub fn band_nodes(band_start: f64, nk: usize) -> Vec<f64> {
    let h = band_start / (nk - 1) as f64;
    (0..nk).map(|i| band_start + i as f64 * h).collect()
}

/// Offsets j * s * dk with dk the band step, s the smallest integer giving a
/// spacing of at least `spacing`, up to `tau_max`; all offsets land on nodes.
pub fn aligned_tau_grid(band_start: f64, nk: usize, spacing: f64, tau_max: f64) -> Vec<f64> {
    let dk = band_start / (nk - 1) as f64;
    let s = (spacing / dk).round().max(1.0);
    let step = s * dk;
    let n = (tau_max / step + 1e-9).floor() as usize;
    (0..=n).map(|j| j as f64 * step).collect()
}

/// Wavenumbers needed to evaluate the band estimators for the given offsets.
pub fn required_wavenumbers(band_start: f64, nk: usize, taus: &[f64]) -> Vec<f64> {
    let nodes = band_nodes(band_start, nk);
    let mut ks: Vec<f64> = nodes.iter().flat_map(|k| taus.iter().map(move |t| k + t)).collect();
    ks.extend_from_slice(&nodes);
    ks.sort_by(f64::total_cmp);
    ks.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * b.abs().max(1.0));
    ks
}

/// Band, offsets, node count and geometry of the recovery.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoveryConfig {
    pub k_values: Vec<f64>,
    pub nk: usize,
    pub tau_grid: Vec<f64>,
    pub directions: Vec<Vec<f64>>,
    pub normal: SeparatingNormal,
}

impl RecoveryConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nk < 2 {
            return Err(Error::InvalidSpec("at least two band nodes are required".into()));
        }
        if self.k_values.windows(2).any(|w| w[1] <= w[0]) || self.k_values.iter().any(|k| !(*k > 0.0)) {
            return Err(Error::InvalidSpec("band starts must be positive and increasing".into()));
        }
        let tmax = self.tau_grid.iter().copied().fold(0.0, f64::max);
        if let Some(k) = self.k_values.first() {
            if tmax > 0.25 * k + 1e-9 {
                return Err(Error::InvalidSpec(format!("tau_max = {tmax} exceeds K/4 = {}", 0.25 * k)));
            }
        }
        if self.tau_grid.iter().any(|t| *t < 0.0) {
            return Err(Error::InvalidSpec("offsets must be nonnegative".into()));
        }
        Ok(())
    }

    /// Directions on the closed half-space x.n >= 0, where the estimators apply.
    pub fn estimator_directions(&self) -> Vec<usize> {
        (0..self.directions.len()).filter(|&j| self.normal.dot(&self.directions[j]) >= -1e-12).collect()
    }
}

fn coverage_values(table: &FarFieldTable, ks: &[f64]) -> Result<Vec<usize>> {
    let mut idx = Vec::with_capacity(ks.len());
    let mut missing = Vec::new();
    for &k in ks {
        match table.k_index(k) {
            Some(i) => idx.push(i),
            None => missing.push(k),
        }
    }
    if !missing.is_empty() {
        let shown: Vec<String> = missing.iter().take(8).map(|k| format!("{k:.6}")).collect();
        return Err(Error::Coverage(format!(
            "{} wavenumbers missing from the far-field table: {}{}",
            missing.len(),
            shown.join(", "),
            if missing.len() > 8 { ", ..." } else { "" }
        )));
    }
    Ok(idx)
}

fn direction(table: &FarFieldTable, x_hat: &[f64]) -> Result<usize> {
    table
        .direction_index(x_hat)
        .ok_or_else(|| Error::Coverage(format!("direction {x_hat:?} is missing from the far-field table")))
}

/// Trapezoid rule over the band for the product data(k) weighted by
/// k^{m + 4 alpha - d - 1}, divided by K.
fn band_average(
    table: &FarFieldTable,
    band_start: f64,
    nk: usize,
    tau: f64,
    product: impl Fn(usize, usize) -> Complex64,
) -> Result<Complex64> {
    let nodes = band_nodes(band_start, nk);
    let shifted: Vec<f64> = nodes.iter().map(|k| k + tau).collect();
    let i0 = coverage_values(table, &nodes)?;
    let i1 = coverage_values(table, &shifted)?;
    let h = band_start / (nk - 1) as f64;
    let mut s = Complex64::new(0.0, 0.0);
    for (j, k) in nodes.iter().enumerate() {
        let w = if j == 0 || j == nk - 1 { 0.5 * h } else { h };
        s += product(i0[j], i1[j]) * (w * estimator_weight(*k, table.dim, table.alpha, table.m));
    }
    Ok(s / band_start)
}

fn check_hemisphere(normal: &SeparatingNormal, x_hat: &[f64]) -> Result<()> {
    if normal.dot(x_hat) < -1e-12 {
        return Err(Error::Geometry(format!(
            "direction {x_hat:?} lies on the far side of the separating hyperplane; use the mirror rule"
        )));
    }
    Ok(())
}

/// (C^c / K) int_K^{2K} k^{m+4a-d-1} conj(u_inf(x, k)) u_inf(x, k + tau) dk,
/// an estimator of mu_c-hat(tau x).
pub fn correlate_covariance(table: &FarFieldTable, x_hat: &[f64], tau: f64, band_start: f64, cfg: &RecoveryConfig) -> Result<Complex64> {
    check_hemisphere(&cfg.normal, x_hat)?;
    let j = direction(table, x_hat)?;
    let v = band_average(table, band_start, cfg.nk, tau, |a, b| table.entry(j, a).u_inf.conj() * table.entry(j, b).u_inf)?;
    Ok(covariance_constant(table.dim, table.alpha) * v)
}

/// (C^r / K) int_K^{2K} k^{m+4a-d-1} u_inf(-x, k) u_inf(x, k + tau) dk,
/// an estimator of mu_r-hat(tau x).
pub fn correlate_relation(table: &FarFieldTable, x_hat: &[f64], tau: f64, band_start: f64, cfg: &RecoveryConfig) -> Result<Complex64> {
    check_hemisphere(&cfg.normal, x_hat)?;
    let j = direction(table, x_hat)?;
    let minus: Vec<f64> = x_hat.iter().map(|v| -v).collect();
    let jm = direction(table, &minus)?;
    let v = band_average(table, band_start, cfg.nk, tau, |a, b| table.entry(jm, a).u_inf * table.entry(j, b).u_inf)?;
    Ok(relation_constant(table.dim, table.alpha) * v)
}

/// Same estimators with a caller-supplied far-field component (for example
/// F0 alone).
pub fn correlate_with(
    table: &FarFieldTable,
    x_hat: &[f64],
    tau: f64,
    band_start: f64,
    nk: usize,
    relation: bool,
    pick: impl Fn(&crate::forward::FarFieldEntry) -> Complex64,
) -> Result<Complex64> {
    let j = direction(table, x_hat)?;
    if relation {
        let minus: Vec<f64> = x_hat.iter().map(|v| -v).collect();
        let jm = direction(table, &minus)?;
        let v = band_average(table, band_start, nk, tau, |a, b| pick(table.entry(jm, a)) * pick(table.entry(j, b)))?;
        Ok(relation_constant(table.dim, table.alpha) * v)
    } else {
        let v = band_average(table, band_start, nk, tau, |a, b| pick(table.entry(j, a)).conj() * pick(table.entry(j, b)))?;
        Ok(covariance_constant(table.dim, table.alpha) * v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants() {
        assert_eq!(covariance_constant(1, 0.5), Complex64::new(1.0, 0.0));
        assert_eq!(relation_constant(1, 0.5), Complex64::new(-1.0, 0.0));
        assert_eq!(relation_constant(2, 0.5), Complex64::new(0.0, -2.0 * PI));
        assert!((mean_constant(3, 0.5) - 1.0 / (4.0 * PI * PI)).abs() < 1e-15);
    }

    #[test]
    fn weight_exponent_is_exact() {
        assert_eq!(weight_exponent(1, 0.75, 0.5), 0.5 + 3.0 - 2.0);
        assert_eq!(estimator_weight(2.0, 2, 0.5, 1.0), 1.0);
    }

    #[test]
    fn aligned_offsets_land_on_nodes() {
        let taus = aligned_tau_grid(32.0, 256, 0.25, 8.0);
        let nodes = band_nodes(32.0, 256);
        let dk = nodes[1] - nodes[0];
        for t in &taus {
            let r = t / dk;
            assert!((r - r.round()).abs() < 1e-9);
        }
        assert!(*taus.last().unwrap() <= 8.0);
        let ks = required_wavenumbers(32.0, 256, &taus);
        assert!(ks.windows(2).all(|w| w[1] > w[0]));
    }
}
