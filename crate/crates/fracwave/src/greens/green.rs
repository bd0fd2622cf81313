use super::params::ModelParams;
use crate::error::{Error, Result};
use crate::specfun::{
    asymptotic_envelope, bessel_j, crossover, fox_h_2124, green_prefactor, ContourSpec,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// How a Green's function value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Contour,
    Asymptotic,
    Hybrid,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Method::Contour => "contour",
            Method::Asymptotic => "asymptotic",
            Method::Hybrid => "hybrid",
        };
        f.write_str(s)
    }
}

/// Green's function value with the evaluation path and an error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GreenEval {
    pub value: Complex64,
    pub method: Method,
    pub err_est: f64,
}

/// Selects between contour quadrature and the leading asymptotic form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Policy {
    /// Contour below the cached crossover, asymptotics above.
    #[default]
    Hybrid,
    ContourOnly,
    /// Refuses arguments below the crossover.
    AsymptoticOnly,
}

/// Variant of the subleading coefficient in the truncated d = 2 kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TruncationVariant {
    /// ((10 + i) / (32 alpha)) sqrt(2/pi) sin(k|x| - pi/4).
    #[default]
    Printed,
    /// (1 / (32 alpha)) sqrt(2/pi) exp(i (k|x| - pi/4)), the next term of the
    /// Hankel expansion of the outgoing kernel.
    Hankel,
}

fn check_radius(x_norm: f64) -> Result<()> {
    if x_norm == 0.0 {
        return Err(Error::Singularity("Green's function is singular at x = 0".into()));
    }
    if !(x_norm > 0.0) || !x_norm.is_finite() {
        return Err(Error::Domain(format!("|x| must be positive and finite, got {x_norm}")));
    }
    Ok(())
}

/// k^{d - 2 alpha}.
fn k_scale(p: &ModelParams) -> f64 {
    p.k.powf(p.d as f64 - 2.0 * p.alpha)
}

/// Principal-value part G^{k,delta}(|x|) from the Fox H representation.
pub fn green_delta(x_norm: f64, p: &ModelParams) -> Result<GreenEval> {
    check_radius(x_norm)?;
    let hp = p.hparams();
    let pref = green_prefactor(p.d, p.alpha) * k_scale(p);
    let h = fox_h_2124(0.5 * p.k * x_norm, &hp, &ContourSpec::default_for(&hp))?;
    Ok(GreenEval { value: h.value * pref, method: Method::Contour, err_est: h.err_est * pref.abs() })
}

/// The constant multiplying the homogeneous solution in the radiating kernel.
pub fn homogeneous_constant(p: &ModelParams) -> Complex64 {
    let a = p.alpha;
    let k = p.k;
    let v = match p.d {
        1 => k.powf(1.0 - 2.0 * a) / (2.0 * a),
        2 => k.powf(2.0 - 2.0 * a) / (4.0 * a),
        _ => k.powf(2.0 - 2.0 * a) / (4.0 * PI * a),
    };
    Complex64::new(0.0, v)
}

/// Homogeneous solution cos(k|x|), J_0(k|x|), sin(k|x|)/|x|.
pub fn green_homogeneous(x_norm: f64, p: &ModelParams) -> f64 {
    let r = x_norm.abs();
    let kr = p.k * r;
    match p.d {
        1 => kr.cos(),
        2 => bessel_j(0.0, kr).expect("order 0 is supported"),
        _ => {
            if kr < 1e-4 {
                let k2r2 = kr * kr;
                p.k * (1.0 - k2r2 / 6.0 + k2r2 * k2r2 / 120.0)
            } else {
                kr.sin() / r
            }
        }
    }
}

/// Far-field constant C_{k,d,alpha} of the outgoing wave.
pub fn far_field_constant(p: &ModelParams) -> Complex64 {
    let a = p.alpha;
    let k = p.k;
    match p.d {
        1 => Complex64::new(0.0, k.powf(1.0 - 2.0 * a) / (2.0 * a)),
        2 => Complex64::new(1.0, 1.0) * (k.powf(1.5 - 2.0 * a) / (4.0 * a * PI.sqrt())),
        _ => Complex64::new(k.powf(2.0 - 2.0 * a) / (4.0 * PI * a), 0.0),
    }
}

/// Decay exponent N_d of the remainder after the outgoing leading term.
pub fn decay_exponent(d: usize, alpha: f64) -> f64 {
    match d {
        1 => 1.0 + 2.0 * alpha,
        2 => 1.5,
        _ => 3.0 + 2.0 * alpha,
    }
}

/// Leading outgoing form C_{k,d,alpha} |x|^{-(d-1)/2} e^{ik|x|}.
pub fn green_leading(x_norm: f64, p: &ModelParams) -> Complex64 {
    far_field_constant(p) * x_norm.powf(-0.5 * (p.d as f64 - 1.0)) * Complex64::from_polar(1.0, p.k * x_norm)
}

/// Radiating Green's function G^k = G^{k,delta} + C~ G^{k,0} under the
/// default hybrid policy.
pub fn green(x_norm: f64, p: &ModelParams) -> Result<GreenEval> {
    green_with(x_norm, p, Policy::Hybrid)
}

pub fn green_with(x_norm: f64, p: &ModelParams, policy: Policy) -> Result<GreenEval> {
    check_radius(x_norm)?;
    let hp = p.hparams();
    let z = 0.5 * p.k * x_norm;
    let use_asymptotic = match policy {
        Policy::ContourOnly => false,
        Policy::Hybrid => z >= crossover(&hp),
        Policy::AsymptoticOnly => {
            let zc = crossover(&hp);
            if z < zc {
                return Err(Error::Domain(format!(
                    "asymptotic evaluation refused: k|x|/2 = {z} is below the crossover {zc}"
                )));
            }
            true
        }
    };
    if use_asymptotic {
        // the crossover guarantees agreement with the contour value to 1e-4
        // of the asymptotic envelope
        let pref = (green_prefactor(p.d, p.alpha) * k_scale(p)).abs();
        let err = 1e-4 * asymptotic_envelope(z, &hp) * pref;
        return Ok(GreenEval { value: green_leading(x_norm, p), method: Method::Asymptotic, err_est: err });
    }
    let gd = green_delta(x_norm, p)?;
    let value = gd.value + homogeneous_constant(p) * green_homogeneous(x_norm, p);
    Ok(GreenEval { value, method: Method::Contour, err_est: gd.err_est })
}

/// Truncated kernel G^k_N for d = 2, 3 with the printed subleading coefficient.
pub fn green_truncated(x_norm: f64, p: &ModelParams) -> Result<Complex64> {
    green_truncated_with(x_norm, p, TruncationVariant::Printed)
}

pub fn green_truncated_with(x_norm: f64, p: &ModelParams, variant: TruncationVariant) -> Result<Complex64> {
    check_radius(x_norm)?;
    let a = p.alpha;
    let k = p.k;
    let kr = k * x_norm;
    match p.d {
        1 => Err(Error::UnsupportedDimension(1, "the truncated kernel is defined only for d = 2, 3".into())),
        2 => {
            let lead = Complex64::new(1.0, 1.0) * k.powf(1.5 - 2.0 * a) / (4.0 * a * (PI * x_norm).sqrt())
                * Complex64::from_polar(1.0, kr);
            let amp = (2.0 / PI).sqrt() / (32.0 * a);
            let c1 = match variant {
                TruncationVariant::Printed => Complex64::new(10.0, 1.0) * amp * (kr - 0.25 * PI).sin(),
                TruncationVariant::Hankel => Complex64::from_polar(amp, kr - 0.25 * PI),
            };
            Ok(lead + c1 * k.powf(0.5 - 2.0 * a) * x_norm.powf(-1.5))
        }
        _ => Ok(Complex64::from_polar(k.powf(2.0 - 2.0 * a) / (4.0 * PI * a * x_norm), kr)),
    }
}
