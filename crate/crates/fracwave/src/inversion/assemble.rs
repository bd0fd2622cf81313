use super::estimators::{correlate_covariance, correlate_relation, RecoveryConfig};
use crate::error::{Error, Result};
use crate::forward::FarFieldTable;
use crate::grid::Grid;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Estimate of a symbol transform at zeta = tau * direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionalEstimate {
    pub direction: Vec<f64>,
    pub tau: f64,
    pub value: Complex64,
}

/// Covariance and relation estimates of one band [K, 2K].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandEstimates {
    pub band_start: f64,
    pub covariance: Vec<DirectionalEstimate>,
    pub relation: Vec<DirectionalEstimate>,
}

/// Reconstructed principal-symbol strengths on a spatial grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Reconstruction {
    pub grid: Grid,
    pub mu_c: Vec<f64>,
    pub mu_r: Vec<f64>,
    /// L^2 norm of the discarded imaginary parts relative to the real parts.
    pub imag_residual_c: f64,
    pub imag_residual_r: f64,
    /// Largest |estimate(zeta) - conj(estimate(-zeta))| over directions on
    /// the separating hyperplane, where both branches apply.
    pub mirror_discrepancy: f64,
}

/// Direct grid transform int e^{-i zeta.y} mu(y) dy.
pub fn fourier_transform_on_grid(grid: &Grid, mu: &[f64], zeta: &[f64]) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for (i, v) in mu.iter().enumerate() {
        if *v == 0.0 {
            continue;
        }
        let y = grid.point(i);
        let ph: f64 = zeta.iter().zip(y.iter()).map(|(a, b)| a * b).sum();
        s += Complex64::from_polar(*v, -ph);
    }
    s * grid.cell_volume()
}

/// Runs both estimators for every estimator direction and offset of a band.
pub fn estimate_band(table: &FarFieldTable, band_start: f64, cfg: &RecoveryConfig) -> Result<BandEstimates> {
    cfg.validate()?;
    let pairs: Vec<(usize, f64)> =
        cfg.estimator_directions().into_iter().flat_map(|j| cfg.tau_grid.iter().map(move |&t| (j, t))).collect();
    let results: Result<Vec<(DirectionalEstimate, DirectionalEstimate)>> = pairs
        .par_iter()
        .map(|&(j, tau)| {
            let x = &cfg.directions[j];
            let c = correlate_covariance(table, x, tau, band_start, cfg)?;
            let r = correlate_relation(table, x, tau, band_start, cfg)?;
            Ok((
                DirectionalEstimate { direction: x.clone(), tau, value: c },
                DirectionalEstimate { direction: x.clone(), tau, value: r },
            ))
        })
        .collect();
    let (covariance, relation) = results?.into_iter().unzip();
    Ok(BandEstimates { band_start, covariance, relation })
}

/// Symbol samples over the whole frequency space: estimates on the
/// estimator half-space plus conjugate mirror images.
struct FullSamples {
    dirs: Vec<Vec<f64>>,
    taus: Vec<f64>,
    /// values[dir][tau]
    values: Vec<Vec<Complex64>>,
    discrepancy: f64,
}

fn mirror(est: &[DirectionalEstimate], cfg: &RecoveryConfig) -> Result<FullSamples> {
    let mut taus: Vec<f64> = cfg.tau_grid.clone();
    taus.sort_by(f64::total_cmp);
    let tau_pos = |t: f64| taus.iter().position(|v| (v - t).abs() < 1e-12).expect("offset from the grid");
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    let mut values: Vec<Vec<Option<Complex64>>> = Vec::new();
    let find = |dirs: &Vec<Vec<f64>>, x: &[f64]| dirs.iter().position(|y| y.iter().zip(x).all(|(a, b)| (a - b).abs() < 1e-12));
    for e in est {
        let j = match find(&dirs, &e.direction) {
            Some(j) => j,
            None => {
                dirs.push(e.direction.clone());
                values.push(vec![None; taus.len()]);
                dirs.len() - 1
            }
        };
        values[j][tau_pos(e.tau)] = Some(e.value);
    }
    let direct = dirs.len();
    let mut discrepancy: f64 = 0.0;
    for j in 0..direct {
        let minus: Vec<f64> = dirs[j].iter().map(|v| -v).collect();
        let mirrored: Vec<Option<Complex64>> = values[j].iter().map(|v| v.map(|z| z.conj())).collect();
        match find(&dirs, &minus) {
            Some(i) if i < direct => {
                for (a, b) in values[i].iter().zip(&mirrored) {
                    if let (Some(a), Some(b)) = (a, b) {
                        discrepancy = discrepancy.max((a - b).norm());
                    }
                }
            }
            Some(_) => {}
            None => {
                dirs.push(minus);
                values.push(mirrored);
            }
        }
    }
    let mut out = Vec::with_capacity(values.len());
    for (j, row) in values.into_iter().enumerate() {
        let missing: Vec<f64> = row.iter().zip(&taus).filter(|(v, _)| v.is_none()).map(|(_, t)| *t).collect();
        if !missing.is_empty() {
            return Err(Error::Coverage(format!("direction {:?} lacks offsets {missing:?}", dirs[j])));
        }
        out.push(row.into_iter().map(|v| v.unwrap()).collect());
    }
    Ok(FullSamples { dirs, taus, values: out, discrepancy })
}

fn interp_tau(taus: &[f64], row: &[Complex64], rho: f64) -> Complex64 {
    let n = taus.len();
    if rho <= taus[0] {
        return row[0];
    }
    let i = taus.partition_point(|&t| t <= rho).min(n - 1).max(1);
    let (t0, t1) = (taus[i - 1], taus[i]);
    let w = ((rho - t0) / (t1 - t0)).clamp(0.0, 1.0);
    row[i - 1] * (1.0 - w) + row[i] * w
}

/// Largest angular gap (radians) between the sample directions, probed by a
/// dense set of test directions.
fn angular_gap(d: usize, dirs: &[Vec<f64>]) -> f64 {
    let probes: Vec<Vec<f64>> = match d {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..720).map(|j| {
            let t = PI * j as f64 / 360.0;
            vec![t.cos(), t.sin()]
        }).collect(),
        _ => crate::forward::default_directions(3, 2000),
    };
    probes
        .iter()
        .map(|p| {
            let best = dirs.iter().map(|x| x.iter().zip(p).map(|(a, b)| a * b).sum::<f64>()).fold(-1.0, f64::max);
            best.clamp(-1.0, 1.0).acos()
        })
        .fold(0.0, f64::max)
}

/// Value of the mirrored symbol at a Cartesian frequency: linear in the
/// radius and, in d = 2, linear in the angle; nearest direction in d = 3.
fn symbol_at(s: &FullSamples, xi: &[f64]) -> Complex64 {
    let rho = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
    let d = xi.len();
    if rho == 0.0 || d == 1 {
        let j = if d == 1 { s.dirs.iter().position(|x| x[0] * xi[0] >= 0.0).unwrap_or(0) } else { 0 };
        return interp_tau(&s.taus, &s.values[j], rho);
    }
    if d == 2 {
        let th = xi[1].atan2(xi[0]);
        let mut best = (f64::INFINITY, 0usize, f64::INFINITY, 0usize);
        for (j, x) in s.dirs.iter().enumerate() {
            let a = x[1].atan2(x[0]);
            let mut diff = a - th;
            diff = (diff + PI).rem_euclid(2.0 * PI) - PI;
            if diff >= 0.0 && diff < best.0 {
                best.0 = diff;
                best.1 = j;
            }
            if diff < 0.0 && -diff < best.2 {
                best.2 = -diff;
                best.3 = j;
            }
        }
        if !best.0.is_finite() || !best.2.is_finite() {
            let j = if best.0.is_finite() { best.1 } else { best.3 };
            return interp_tau(&s.taus, &s.values[j], rho);
        }
        let w = best.2 / (best.0 + best.2);
        let a = interp_tau(&s.taus, &s.values[best.1], rho);
        let b = interp_tau(&s.taus, &s.values[best.3], rho);
        return a * w + b * (1.0 - w);
    }
    let j = s
        .dirs
        .iter()
        .enumerate()
        .map(|(j, x)| (j, x.iter().zip(xi).map(|(a, b)| a * b).sum::<f64>()))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|v| v.0)
        .unwrap_or(0);
    interp_tau(&s.taus, &s.values[j], rho)
}

/// Inverse transform of sampled symbol values over a Cartesian frequency
/// grid of spacing dxi inside the ball |xi| <= xi_max, evaluated on `grid`.
fn invert(grid: &Grid, s: &FullSamples, dxi: f64, xi_max: f64) -> (Vec<f64>, f64) {
    let d = grid.dim();
    let n = (xi_max / dxi + 1e-9).floor() as i64;
    let mut nodes: Vec<(Vec<f64>, Complex64, f64)> = Vec::new();
    let range: Vec<i64> = (-n..=n).collect();
    let mut push = |idx: &[i64]| {
        let xi: Vec<f64> = idx.iter().map(|&i| i as f64 * dxi).collect();
        let r = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r <= xi_max + 1e-9 * dxi {
            // trapezoid end weights along the line in d = 1
            let w = if d == 1 && idx[0].abs() == n { 0.5 } else { 1.0 };
            nodes.push((xi.clone(), symbol_at(s, &xi), w));
        }
    };
    match d {
        1 => range.iter().for_each(|&i| push(&[i])),
        2 => range.iter().for_each(|&i| range.iter().for_each(|&j| push(&[i, j]))),
        _ => range.iter().for_each(|&i| range.iter().for_each(|&j| range.iter().for_each(|&l| push(&[i, j, l])))),
    }
    let scale = dxi.powi(d as i32) / (2.0 * PI).powi(d as i32);
    let vals: Vec<Complex64> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let x = grid.point(i);
            let mut acc = Complex64::new(0.0, 0.0);
            for (xi, v, w) in &nodes {
                let ph: f64 = xi.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
                acc += v * Complex64::from_polar(*w, ph);
            }
            acc * scale
        })
        .collect();
    let re: f64 = vals.iter().map(|z| z.re * z.re).sum::<f64>().sqrt();
    let im: f64 = vals.iter().map(|z| z.im * z.im).sum::<f64>().sqrt();
    (vals.iter().map(|z| z.re).collect(), if re > 0.0 { im / re } else { im })
}

/// Fills the far half-space by mu-hat(-zeta) = conj mu-hat(zeta),
/// interpolates onto a Cartesian frequency grid with the offset spacing and
/// inverts the transform on `grid`.
pub fn assemble_mu(band: &BandEstimates, cfg: &RecoveryConfig, grid: &Grid) -> Result<Reconstruction> {
    let mut taus = cfg.tau_grid.clone();
    taus.sort_by(f64::total_cmp);
    if taus.len() < 2 || taus[0] != 0.0 {
        return Err(Error::InvalidSpec("the offset grid must start at 0 and have at least two points".into()));
    }
    let dxi = taus[1] - taus[0];
    let xi_max = *taus.last().unwrap();
    let c = mirror(&band.covariance, cfg)?;
    let r = mirror(&band.relation, cfg)?;
    let d = grid.dim();
    let gap = angular_gap(d, &c.dirs);
    let allowed = match d {
        1 => 1e-9,
        2 => 4.0 * PI / c.dirs.len().max(1) as f64,
        _ => 3.0 * (4.0 * PI / c.dirs.len().max(1) as f64).sqrt(),
    };
    if gap > allowed {
        return Err(Error::Coverage(format!(
            "direction set leaves an angular gap of {:.1} degrees after mirroring",
            gap.to_degrees()
        )));
    }
    let (mu_c, ic) = invert(grid, &c, dxi, xi_max);
    let (mu_r, ir) = invert(grid, &r, dxi, xi_max);
    Ok(Reconstruction {
        grid: grid.clone(),
        mu_c,
        mu_r,
        imag_residual_c: ic,
        imag_residual_r: ir,
        mirror_discrepancy: c.discrepancy.max(r.discrepancy),
    })
}

/// Relative L^2 error of the estimates against exact transforms.
pub fn relative_symbol_error(est: &[DirectionalEstimate], exact: impl Fn(&[f64]) -> Complex64) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for e in est {
        let zeta: Vec<f64> = e.direction.iter().map(|v| v * e.tau).collect();
        let x = exact(&zeta);
        num += (e.value - x).norm_sqr();
        den += x.norm_sqr();
    }
    (num / den).sqrt()
}
