//! Brute-force Fourier inversion of (|xi|^{2 alpha} - k^{2 alpha})^{-1}.
//!
//! After the angular integration the kernel is a radial integral whose
//! integrand has a simple pole at r = k. The real part is its principal value:
//! symmetric exclusion windows of half-width eps_j = eps_0 2^{-j} and
//! Richardson extrapolation in the odd powers of eps. The tail beyond a
//! cut-off R is integrated along the vertical ray R + it, where the outgoing
//! exponential decays. The imaginary part is the half residue on the sphere
//! |xi| = k, which is available in closed form.

use crate::error::{Error, Result};
use crate::greens::ModelParams;
use crate::quad::{integrate, integrate_c};
use crate::specfun::j0;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Controls of the principal-value quadrature.
#[derive(Clone, Debug, PartialEq)]
pub struct PVQuadSpec {
    /// Radial cut-off in units of k; raised automatically when the
    /// oscillation is too slow for the rotated tail.
    pub r_max: f64,
    /// Initial exclusion half-width in units of k (further limited by the
    /// oscillation scale 1/|x|).
    pub exclusion: f64,
    /// Number of Richardson levels.
    pub levels: usize,
    /// Tolerance of the inner adaptive quadratures.
    pub quad_tol: f64,
}

impl Default for PVQuadSpec {
    fn default() -> Self {
        PVQuadSpec { r_max: 2.0, exclusion: 0.25, levels: 7, quad_tol: 1e-13 }
    }
}

/// Oracle value: principal-value part, half-residue part and the ladder of
/// extrapolated values (one per Richardson level).
#[derive(Clone, Debug, PartialEq)]
pub struct PvEval {
    pub pv: f64,
    pub residue: Complex64,
    pub ladder: Vec<f64>,
}

impl PvEval {
    /// Outgoing kernel G^k = principal value + half residue.
    pub fn total(&self) -> Complex64 {
        self.residue + self.pv
    }
}

/// Radial weight w(r) in G^{k,delta}(x) = PV int_0^inf w(r) / (r^{2a} - k^{2a}) dr.
fn radial_numerator(d: usize, rho: f64, r: f64) -> f64 {
    match d {
        1 => (rho * r).cos() / PI,
        2 => r * j0(rho * r) / (2.0 * PI),
        _ => r * (rho * r).sin() / (2.0 * PI * PI * rho),
    }
}

/// Complex Hankel function H_0^{(1)}(w) by its large-argument expansion.
fn hankel1_0(w: Complex64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    let mut p = Complex64::new(1.0, 0.0);
    let mut q = Complex64::new(0.0, 0.0);
    let mut a = Complex64::new(1.0, 0.0);
    let mut prev = f64::INFINITY;
    for k in 1..60 {
        let f = ((2 * k - 1) * (2 * k - 1)) as f64;
        let next = a * (-f / (k as f64 * 8.0)) / w;
        if next.norm() > prev {
            break;
        }
        a = next;
        prev = a.norm();
        match k % 4 {
            1 => q += a,
            2 => p -= a,
            3 => q -= a,
            _ => p += a,
        }
        if a.norm() < 1e-18 {
            break;
        }
    }
    (2.0 / (PI * w)).sqrt() * (i * (w - 0.25 * PI)).exp() * (p + i * q)
}

/// Tail integral over [R, inf) evaluated on the ray R + it.
fn tail(d: usize, rho: f64, k: f64, alpha: f64, r0: f64, tol: f64) -> f64 {
    let i = Complex64::new(0.0, 1.0);
    let k2a = k.powf(2.0 * alpha);
    let denom = |r: Complex64| r.powf(2.0 * alpha) - k2a;
    let t_max = 60.0 / rho;
    let (v, _) = integrate_c(
        |t| {
            let r = Complex64::new(r0, t);
            let e = (i * rho * r).exp();
            let f = match d {
                // Re int e^{i rho r} / D
                1 => e / PI,
                // Im int r e^{i rho r} / D
                3 => -i * r * e / (2.0 * PI * PI * rho),
                // Re int r H_0^{(1)}(rho r) / D
                _ => r * hankel1_0(rho * r) / (2.0 * PI),
            };
            // dr = i dt
            i * f / denom(r)
        },
        0.0,
        t_max,
        tol * 1e-3,
        tol,
        4000,
    );
    v.re
}

/// Integral of the radial integrand over [a, b] away from the pole.
fn segment(d: usize, rho: f64, k: f64, alpha: f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let k2a = k.powf(2.0 * alpha);
    // split into pieces of about one oscillation for the adaptive rule
    let n = ((b - a) * rho / PI).ceil().max(1.0) as usize;
    let mut s = 0.0;
    for j in 0..n {
        let lo = a + (b - a) * j as f64 / n as f64;
        let hi = a + (b - a) * (j + 1) as f64 / n as f64;
        let (v, e) =
            integrate(|r| radial_numerator(d, rho, r) / (r.powf(2.0 * alpha) - k2a), lo, hi, 1e-16, tol, 2000);
        if !(e.is_finite() && v.is_finite()) {
            return Err(Error::Accuracy {
                msg: format!("radial quadrature failed on [{lo}, {hi}]"),
                partial: Complex64::new(s, 0.0),
            });
        }
        s += v;
    }
    Ok(s)
}

/// Half residue on |xi| = k: i pi (2 pi)^{-d} int_{|xi|=k} e^{i x xi} dS / (2 alpha k^{2 alpha - 1}).
pub fn half_residue(x_norm: f64, p: &ModelParams) -> Complex64 {
    let k = p.k;
    let kr = k * x_norm;
    let sphere = match p.d {
        1 => 2.0 * kr.cos(),
        2 => 2.0 * PI * k * j0(kr),
        _ => {
            if kr < 1e-8 {
                4.0 * PI * k * k
            } else {
                4.0 * PI * k * kr.sin() / x_norm
            }
        }
    };
    let v = PI * (2.0 * PI).powf(-(p.d as f64)) * sphere / (2.0 * p.alpha * k.powf(2.0 * p.alpha - 1.0));
    Complex64::new(0.0, v)
}

/// Principal-value Fourier inversion of (|xi|^{2 alpha} - k^{2 alpha})^{-1}
/// at |x| = x_norm, with the outgoing half residue.
pub fn green_delta_pv(x_norm: f64, p: &ModelParams, spec: &PVQuadSpec) -> Result<PvEval> {
    if !(x_norm > 0.0) {
        return Err(Error::Singularity("the radial oracle needs |x| > 0".into()));
    }
    let (d, k, alpha, rho) = (p.d, p.k, p.alpha, x_norm);
    // the Hankel expansion on the tail ray needs rho * R large in d = 2
    let r0 = (spec.r_max * k).max(if d == 2 { 30.0 / rho } else { 4.0 / rho }).max(1.5 * k);
    let tol = spec.quad_tol;
    let eps0 = (spec.exclusion * k).min(0.5 / rho);
    let far = segment(d, rho, k, alpha, 0.0, k - eps0, tol)? + segment(d, rho, k, alpha, k + eps0, r0, tol)?;
    let tail_v = tail(d, rho, k, alpha, r0, tol);

    // values with exclusion eps_j; the window [k - eps_0, k + eps_0] minus the
    // inner window is integrated piecewise and accumulated
    let mut raw = Vec::with_capacity(spec.levels);
    let mut inner = 0.0;
    let mut eps = eps0;
    for j in 0..spec.levels {
        if j > 0 {
            let e2 = 0.5 * eps;
            inner += segment(d, rho, k, alpha, k - eps, k - e2, tol)? + segment(d, rho, k, alpha, k + e2, k + eps, tol)?;
            eps = e2;
        }
        raw.push(far + inner);
    }
    // Richardson on I(eps) = PV + c1 eps + c3 eps^3 + ..., ratio 2
    let mut table = vec![raw.clone()];
    for lvl in 1..spec.levels {
        let prev = &table[lvl - 1];
        let pw = (2 * lvl - 1) as i32;
        let f = 2f64.powi(pw);
        let row: Vec<f64> = (1..prev.len()).map(|i| (f * prev[i] - prev[i - 1]) / (f - 1.0)).collect();
        if row.is_empty() {
            break;
        }
        table.push(row);
    }
    let ladder: Vec<f64> = table.iter().map(|r| *r.last().unwrap() + tail_v).collect();
    let n = ladder.len();
    if n >= 3 {
        let d1 = (ladder[n - 1] - ladder[n - 2]).abs();
        let d0 = (ladder[n - 2] - ladder[n - 3]).abs();
        let scale = ladder[n - 1].abs().max(1e-300);
        if d1 > d0 && d1 > 1e-8 * scale {
            return Err(Error::Accuracy {
                msg: format!("principal-value ladder did not converge: {ladder:?}"),
                partial: Complex64::new(ladder[n - 1], 0.0),
            });
        }
    }
    Ok(PvEval { pv: ladder[n - 1], residue: half_residue(x_norm, p), ladder })
}
