use crate::error::{Error, Result};
use crate::specfun::HParams;
use serde::{Deserialize, Serialize};

/// Model parameters: dimension, fractional order, order -m of the random
/// source and wavenumber.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub d: usize,
    pub alpha: f64,
    pub m: f64,
    pub k: f64,
}

/// Lower bound on m for the inverse problem in dimension d.
pub fn m_threshold(d: usize, alpha: f64) -> f64 {
    match d {
        1 => 1.5 - 2.0 * alpha,
        2 => 2.5 - 2.0 * alpha,
        _ => 3.75 - 2.0 * alpha,
    }
}

/// Lower bound on alpha for the inverse problem in dimension d.
pub fn alpha_threshold(d: usize) -> f64 {
    if d == 3 {
        0.375
    } else {
        0.25
    }
}

/// Smoothness order required of the potential: 0, ceil(5/2 + m - 2 alpha),
/// ceil(3 + m/2) for d = 1, 2, 3.
pub fn potential_smoothness_order(d: usize, alpha: f64, m: f64) -> u32 {
    match d {
        1 => 0,
        2 => (2.5 + m - 2.0 * alpha).ceil().max(0.0) as u32,
        _ => (3.0 + 0.5 * m).ceil().max(0.0) as u32,
    }
}

impl ModelParams {
    pub fn new(d: usize, alpha: f64, m: f64, k: f64) -> Result<Self> {
        if !(1..=3).contains(&d) {
            return Err(Error::UnsupportedDimension(d, "dimension must be 1, 2 or 3".into()));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidSpec(format!("fractional order must lie in (0, 1), got {alpha}")));
        }
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::InvalidSpec(format!("wavenumber must be positive and finite, got {k}")));
        }
        if !m.is_finite() {
            return Err(Error::InvalidSpec(format!("order m must be finite, got {m}")));
        }
        Ok(ModelParams { d, alpha, m, k })
    }

    pub fn with_k(&self, k: f64) -> Self {
        ModelParams { k, ..*self }
    }

    pub fn hparams(&self) -> HParams {
        HParams::new(self.d, self.alpha).expect("validated model parameters")
    }

    /// m in (d - 2 alpha, d), the hypothesis of the direct problem.
    pub fn check_direct(&self) -> Result<()> {
        let (lo, hi) = (self.d as f64 - 2.0 * self.alpha, self.d as f64);
        if self.m > lo && self.m < hi {
            Ok(())
        } else {
            Err(Error::InvalidSpec(format!("direct problem needs m in ({lo}, {hi}), got {}", self.m)))
        }
    }

    /// m in (m_{d,alpha}, d) and alpha > alpha_d, the hypotheses of the inverse problem.
    pub fn check_inversion(&self) -> Result<()> {
        let lo = m_threshold(self.d, self.alpha);
        let hi = self.d as f64;
        if !(self.m > lo && self.m < hi) {
            return Err(Error::InvalidSpec(format!("inversion needs m in ({lo}, {hi}), got {}", self.m)));
        }
        let a0 = alpha_threshold(self.d);
        if !(self.alpha > a0) {
            return Err(Error::InvalidSpec(format!("inversion needs alpha > {a0}, got {}", self.alpha)));
        }
        Ok(())
    }
}
