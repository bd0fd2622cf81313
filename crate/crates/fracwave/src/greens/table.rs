//! Tabulated radiating kernel at unit wavenumber.
//!
//! G^1(rho) splits into the classical principal-value kernel divided by alpha,
//! a smooth non-oscillatory remainder, and the homogeneous correction. The
//! remainder is stored as piecewise Chebyshev series in u = ln rho, built from
//! contour evaluations; beyond `RHO_SERIES` the algebraic residue series takes
//! over. G^k follows from the scaling G^k(x) = k^{d-2 alpha} G^1(k x).

use crate::error::Result;
use crate::specfun::{
    algebraic_series, classical_pv, fox_h_2124, green_prefactor, j0, ContourSpec, HParams,
};
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

const RHO_MIN: f64 = 1e-10;
const RHO_SERIES: f64 = 40.0;
const PIECE_WIDTH: f64 = 0.5;
const NODES: usize = 24;

#[derive(Debug)]
pub struct GreenTable {
    pub d: usize,
    pub alpha: f64,
    scale_pow: f64,
    u_lo: f64,
    pieces: Vec<[f64; NODES]>,
    hom_coef: f64,
    prefactor: f64,
}

fn cheb_nodes() -> [f64; NODES] {
    let mut x = [0.0; NODES];
    for (j, v) in x.iter_mut().enumerate() {
        *v = (PI * (j as f64 + 0.5) / NODES as f64).cos();
    }
    x
}

fn cheb_coeffs(vals: &[f64; NODES]) -> [f64; NODES] {
    let mut c = [0.0; NODES];
    for (i, ci) in c.iter_mut().enumerate() {
        let mut s = 0.0;
        for (j, v) in vals.iter().enumerate() {
            s += v * (PI * i as f64 * (j as f64 + 0.5) / NODES as f64).cos();
        }
        *ci = 2.0 * s / NODES as f64;
    }
    c[0] *= 0.5;
    c
}

fn clenshaw(c: &[f64; NODES], x: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &ci in c.iter().skip(1).rev() {
        let b0 = 2.0 * x * b1 - b2 + ci;
        b2 = b1;
        b1 = b0;
    }
    x * b1 - b2 + c[0]
}

type TableCache = HashMap<(usize, u64), Arc<GreenTable>>;

impl GreenTable {
    /// Shared table for (d, alpha), built on first use.
    pub fn get(d: usize, alpha: f64) -> Result<Arc<GreenTable>> {
        static CACHE: OnceLock<Mutex<TableCache>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let key = (d, alpha.to_bits());
        if let Some(t) = cache.lock().unwrap().get(&key) {
            return Ok(t.clone());
        }
        let t = Arc::new(Self::build(d, alpha)?);
        Ok(cache.lock().unwrap().entry(key).or_insert(t).clone())
    }

    pub fn build(d: usize, alpha: f64) -> Result<GreenTable> {
        let hp = HParams::new(d, alpha)?;
        let prefactor = green_prefactor(d, alpha);
        let scale_pow = (d as f64 - 2.0 * alpha).max(0.0);
        let u_lo = RHO_MIN.ln();
        let u_hi = RHO_SERIES.ln();
        let npieces = ((u_hi - u_lo) / PIECE_WIDTH).ceil() as usize;
        let nodes = cheb_nodes();
        let contour = ContourSpec::default_for(&hp);
        let pieces: Result<Vec<[f64; NODES]>> = (0..npieces)
            .into_par_iter()
            .map(|i| {
                let a = u_lo + i as f64 * PIECE_WIDTH;
                let mut vals = [0.0; NODES];
                for (j, &x) in nodes.iter().enumerate() {
                    let u = a + 0.5 * PIECE_WIDTH * (x + 1.0);
                    let rho = u.exp();
                    let h = fox_h_2124(0.5 * rho, &hp, &contour)?;
                    let rem = prefactor * h.value.re - classical_pv(d, rho) / alpha;
                    vals[j] = rem * rho.powf(scale_pow);
                }
                Ok(cheb_coeffs(&vals))
            })
            .collect();
        let hom_coef = match d {
            1 => 1.0 / (2.0 * alpha),
            2 => 1.0 / (4.0 * alpha),
            _ => 1.0 / (4.0 * PI * alpha),
        };
        Ok(GreenTable { d, alpha, scale_pow, u_lo, pieces: pieces?, hom_coef, prefactor })
    }

    /// Smooth remainder G^{1,delta}(rho) - classical_pv(rho) / alpha.
    pub fn remainder(&self, rho: f64) -> f64 {
        if rho >= RHO_SERIES {
            let hp = HParams::new(self.d, self.alpha).expect("validated at build");
            return self.prefactor * algebraic_series(0.5 * rho, &hp).0;
        }
        let u = rho.max(RHO_MIN).ln();
        let t = (u - self.u_lo) / PIECE_WIDTH;
        let i = (t.floor() as usize).min(self.pieces.len() - 1);
        let x = 2.0 * (t - i as f64) - 1.0;
        clenshaw(&self.pieces[i], x.clamp(-1.0, 1.0)) * rho.max(RHO_MIN).powf(-self.scale_pow)
    }

    /// G^{1,delta}(rho).
    pub fn delta_unit(&self, rho: f64) -> f64 {
        classical_pv(self.d, rho) / self.alpha + self.remainder(rho)
    }

    /// Radiating kernel G^1(rho) at unit wavenumber.
    pub fn unit(&self, rho: f64) -> Complex64 {
        let hom = match self.d {
            1 => rho.cos(),
            2 => j0(rho),
            _ => {
                if rho < 1e-4 {
                    1.0 - rho * rho / 6.0
                } else {
                    rho.sin() / rho
                }
            }
        };
        Complex64::new(self.delta_unit(rho), self.hom_coef * hom)
    }

    /// G^k(r) for r > 0.
    pub fn eval(&self, k: f64, r: f64) -> Complex64 {
        self.unit(k * r) * k.powf(self.d as f64 - 2.0 * self.alpha)
    }
}
