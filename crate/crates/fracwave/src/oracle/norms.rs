use super::stats::loglog_slope;
use crate::error::{Error, Result};
use crate::forward::{BornConfig, Resolvent};
use crate::gmig::Bump;
use crate::greens::ModelParams;
use crate::grid::{fft_nd, l2_norm, Grid, GridField};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// Periodic spectral multiplier m(|xi|) applied on the grid.
fn apply_multiplier(values: &[Complex64], grid: &Grid, m: impl Fn(f64) -> f64) -> Vec<Complex64> {
    let norms = Grid::frequency_norms(&grid.shape, grid.spacing);
    let mut buf = values.to_vec();
    fft_nd(&mut buf, &grid.shape, false);
    for (v, r) in buf.iter_mut().zip(&norms) {
        *v *= m(*r);
    }
    fft_nd(&mut buf, &grid.shape, true);
    buf
}

fn japanese(x: [f64; 3]) -> f64 {
    (1.0 + x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

fn weighted_lp(values: &[Complex64], grid: &Grid, p: f64, delta: f64) -> f64 {
    let hd = grid.cell_volume();
    let s: f64 = values.iter().enumerate().map(|(i, v)| (japanese(grid.point(i)).powf(delta) * v.norm()).powf(p)).sum();
    (s * hd).powf(1.0 / p)
}

/// Discrete surrogate of the weighted Bessel-potential norm
/// |<x>^delta (I - Delta)^{s/2} field|_{L^p}, with the multiplier
/// (1 + |xi|^2)^{s/2} applied by the periodic FFT on the grid.
pub fn weighted_norm(field: &GridField, s: f64, p: f64, delta: f64) -> f64 {
    let v = if s == 0.0 {
        field.values.clone()
    } else {
        apply_multiplier(&field.values, &field.grid, |r| (1.0 + r * r).powf(0.5 * s))
    };
    weighted_lp(&v, &field.grid, p, delta)
}

/// Relative L^2 residual of (-Delta)^alpha u - k^{2 alpha} u + q u = f with
/// the fractional Laplacian applied as the periodic multiplier |xi|^{2 alpha}.
/// The residual is divided by |f|, or by the norm of the operator terms when
/// f vanishes; identically zero data give 0.
pub fn fractional_pde_residual(u: &GridField, f: &GridField, q: Option<&[Complex64]>, p: &ModelParams) -> f64 {
    fractional_pde_residual_within(u, f, q, p, f64::INFINITY)
}

/// Same residual with both norms restricted to the cells with |x| < radius,
/// which keeps the periodic wrap-around of the multiplier near the box edges
/// out of the measurement.
pub fn fractional_pde_residual_within(
    u: &GridField,
    f: &GridField,
    q: Option<&[Complex64]>,
    p: &ModelParams,
    radius: f64,
) -> f64 {
    let grid = &u.grid;
    let hd = grid.cell_volume();
    let k2a = p.k.powf(2.0 * p.alpha);
    let lap = apply_multiplier(&u.values, grid, |r| r.powf(2.0 * p.alpha));
    let inside: Vec<bool> = grid.points().map(|x| (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt() < radius).collect();
    let mask = |v: Vec<Complex64>| -> Vec<Complex64> {
        v.into_iter().zip(&inside).map(|(z, &keep)| if keep { z } else { Complex64::new(0.0, 0.0) }).collect()
    };
    let op: Vec<Complex64> = (0..grid.len())
        .map(|i| {
            let qu = q.map_or(Complex64::new(0.0, 0.0), |q| q[i] * u.values[i]);
            lap[i] - u.values[i] * k2a + qu
        })
        .collect();
    let res = mask(op.iter().zip(&f.values).map(|(a, b)| a - b).collect());
    let rn = l2_norm(&res, hd);
    let fn_ = l2_norm(&mask(f.values.clone()), hd);
    let scale =
        if fn_ > 0.0 { fn_ } else { l2_norm(&mask(lap), hd) + k2a * l2_norm(&mask(u.values.clone()), hd) };
    if scale == 0.0 {
        rn
    } else {
        rn / scale
    }
}

/// Input of the resolvent decay probe.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ProbeInput {
    /// Fixed smooth compactly supported test function.
    Smooth(Bump),
    /// Maximizing input from power iteration on the weighted operator.
    WorstCase { steps: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayProbeConfig {
    pub grid: Grid,
    pub ks: Vec<f64>,
    /// epsilon of the weights <x>^{1/2 + epsilon} and <x>^{-1/2 - epsilon}.
    pub weight_epsilon: f64,
    pub input: ProbeInput,
    pub born: BornConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayProbe {
    pub ks: Vec<f64>,
    /// Ratio |H_k phi| / |phi| in the dual weighted norms at each k.
    pub norms: Vec<f64>,
    pub slope: f64,
    /// Exponent -2 s (1 - 1/p) of the decay bound.
    pub predicted: f64,
}

/// Ratio |H_k phi|_{H^{s/p}_{-1/2-eps}} / |phi|_{H^{-s/p}_{1/2+eps}} over a
/// wavenumber sweep, with the log-log slope of the ratios.
pub fn resolvent_decay_probe(base: &ModelParams, cfg: &DecayProbeConfig, s: f64, p_exp: f64) -> Result<DecayProbe> {
    if !(p_exp > 1.0) || !(s > 0.0) {
        return Err(Error::InvalidSpec(format!("decay probe needs s > 0 and p > 1 (got s = {s}, p = {p_exp})")));
    }
    if cfg.ks.len() < 2 {
        return Err(Error::InvalidSpec("decay probe needs at least two wavenumbers".into()));
    }
    let grid = &cfg.grid;
    let sigma = s / p_exp;
    let w_out = -0.5 - cfg.weight_epsilon;
    let w_in = 0.5 + cfg.weight_epsilon;
    let mut norms = Vec::with_capacity(cfg.ks.len());
    for &k in &cfg.ks {
        let p = base.with_k(k);
        let h = Resolvent::new(grid, &p, &cfg.born)?;
        let ratio = match &cfg.input {
            ProbeInput::Smooth(b) => {
                let phi = GridField::from_real_fn(grid, |x| b.value(&x));
                let u = GridField { grid: grid.clone(), values: h.apply(&phi.values) };
                weighted_norm(&u, sigma, 2.0, w_out) / weighted_norm(&phi, -sigma, 2.0, w_in)
            }
            ProbeInput::WorstCase { steps } => worst_case_ratio(grid, &h, sigma, w_in, w_out, *steps),
        };
        norms.push(ratio);
    }
    let slope = loglog_slope(&cfg.ks, &norms);
    Ok(DecayProbe { ks: cfg.ks.clone(), norms, slope, predicted: -2.0 * s * (1.0 - 1.0 / p_exp) })
}

/// Largest singular value of W_out M^sigma H M^sigma W_in^{-1} by power
/// iteration, where M^sigma is the Bessel multiplier and W are the weights.
fn worst_case_ratio(grid: &Grid, h: &Resolvent, sigma: f64, w_in: f64, w_out: f64, steps: usize) -> f64 {
    let n = grid.len();
    let wi: Vec<f64> = (0..n).map(|i| japanese(grid.point(i)).powf(-w_in)).collect();
    let wo: Vec<f64> = (0..n).map(|i| japanese(grid.point(i)).powf(w_out)).collect();
    let bessel = |v: &[Complex64]| apply_multiplier(v, grid, |r| (1.0 + r * r).powf(0.5 * sigma));
    let scale = |v: &[Complex64], w: &[f64]| v.iter().zip(w).map(|(a, b)| a * b).collect::<Vec<Complex64>>();
    let forward = |v: &[Complex64]| scale(&bessel(&h.apply(&bessel(&scale(v, &wi)))), &wo);
    let adjoint = |v: &[Complex64]| scale(&bessel(&h.apply_adjoint(&bessel(&scale(v, &wo)))), &wi);
    let mut rng = ChaCha8Rng::seed_from_u64(0x0dec);
    let mut v: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
        .collect();
    let mut est = 0.0;
    for _ in 0..steps.max(1) {
        let nv = l2_norm(&v, 1.0);
        v.iter_mut().for_each(|z| *z /= nv);
        let av = forward(&v);
        est = l2_norm(&av, 1.0);
        v = adjoint(&av);
    }
    est
}
