use crate::error::{Error, Result};
use crate::greens::{homogeneous_constant, GreenTable, ModelParams};
use crate::grid::{convolve_with_hat, fft_nd, for_each_index, Grid, GridField};
use crate::quad::gauss_legendre;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// How the resolvent is applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResolventMethod {
    /// Convolution with the tabulated outgoing kernel sampled on the grid.
    #[default]
    Kernel,
    /// Spectral division by |xi|^{2 alpha} - k^{2 alpha} - i tau on the
    /// padded lattice, extrapolated to tau = 0, plus the homogeneous
    /// correction. Available in d = 1.
    LimitingAbsorption,
}

/// Controls of the resolvent and of the Born series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BornConfig {
    pub max_terms: usize,
    pub contraction_tol: f64,
    /// Strictly decreasing absorption ladder used by the spectral path.
    pub limiting_absorption_tau: Vec<f64>,
    pub method: ResolventMethod,
    /// Zero-padding factor of the convolution grid (at least 2).
    pub pad: usize,
    /// Power-iteration steps of the norm estimate.
    pub power_steps: usize,
}

impl Default for BornConfig {
    fn default() -> Self {
        BornConfig {
            max_terms: 200,
            contraction_tol: 1e-10,
            limiting_absorption_tau: vec![1e-1, 3e-2, 1e-2, 3e-3],
            method: ResolventMethod::Kernel,
            pad: 2,
            power_steps: 20,
        }
    }
}

impl BornConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_terms < 1 {
            return Err(Error::InvalidSpec("max_terms must be at least 1".into()));
        }
        if !(self.contraction_tol > 0.0) {
            return Err(Error::InvalidSpec("contraction_tol must be positive".into()));
        }
        if self.pad < 2 {
            return Err(Error::InvalidSpec("the padding factor must be at least 2".into()));
        }
        let t = &self.limiting_absorption_tau;
        if t.is_empty() || t.iter().any(|v| !(*v > 0.0)) || t.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidSpec("the absorption ladder must be positive and strictly decreasing".into()));
        }
        Ok(())
    }
}

/// Integral of a radial function over the cell [-h/2, h/2]^d divided by h^d.
/// The cell is split into simplices (segments, triangles, pyramids) with apex
/// at the singular point, and the radial variable is graded as t = s^4.
pub fn cell_average(d: usize, h: f64, f: impl Fn(f64) -> Complex64) -> Complex64 {
    let a = 0.5 * h;
    let rule = gauss_legendre(40);
    let (xs, ws) = (&rule.0, &rule.1);
    // int_0^1 g(t) dt with t = s^4
    let radial = |g: &dyn Fn(f64) -> Complex64| -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for (x, w) in xs.iter().zip(ws.iter()) {
            let u = 0.5 * (x + 1.0);
            let t = u.powi(4);
            s += g(t) * (0.5 * w * 4.0 * u.powi(3));
        }
        s
    };
    let ang = gauss_legendre(24);
    let (ya, wa) = (&ang.0, &ang.1);
    match d {
        1 => radial(&|t| f(a * t)) * a * 2.0 / h,
        2 => {
            // 8 triangles: x = t a, y = t a v, v in [0, 1], Jacobian a^2 t
            let mut s = Complex64::new(0.0, 0.0);
            for (v, w) in ya.iter().zip(wa.iter()) {
                let v = 0.5 * (v + 1.0);
                let rho = a * (1.0 + v * v).sqrt();
                s += radial(&|t| f(t * rho) * t) * (0.5 * w);
            }
            s * (8.0 * a * a) / (h * h)
        }
        _ => {
            // 6 pyramids, each 4 symmetric quarters: x = t a, (y, z) = t a (v, w), Jacobian a^3 t^2
            let mut s = Complex64::new(0.0, 0.0);
            for (v, wv) in ya.iter().zip(wa.iter()) {
                let v = 0.5 * (v + 1.0);
                for (w, ww) in ya.iter().zip(wa.iter()) {
                    let w = 0.5 * (w + 1.0);
                    let rho = a * (1.0 + v * v + w * w).sqrt();
                    s += radial(&|t| f(t * rho) * t * t) * (0.25 * wv * ww);
                }
            }
            s * (24.0 * a * a * a) / (h * h * h)
        }
    }
}

/// Convolution on a grid with a radial kernel, zero-padded to avoid wrap-around.
#[derive(Clone, Debug)]
pub struct Convolution {
    pub grid: Grid,
    padded: Vec<usize>,
    kernel_hat: Vec<Complex64>,
    adjoint_hat: Vec<Complex64>,
}

impl Convolution {
    /// Kernel samples kernel(|x|) h^d at lattice displacements; `center` is
    /// the value used for the zero displacement (already a cell average).
    pub fn from_radial(grid: &Grid, pad: usize, kernel: impl Fn(f64) -> Complex64 + Sync, center: Complex64) -> Self {
        let padded: Vec<usize> = grid.shape.iter().map(|n| n * pad).collect();
        let total: usize = padded.iter().product();
        let h = grid.spacing;
        let hd = grid.cell_volume();
        let mut radii = vec![0.0; total];
        for_each_index(&padded, |flat, idx| {
            let mut r2 = 0.0;
            for (a, &i) in idx.iter().enumerate() {
                let n = padded[a];
                let o = if i <= n / 2 { i as f64 } else { i as f64 - n as f64 };
                r2 += o * o;
            }
            radii[flat] = r2.sqrt() * h;
        });
        let mut samples: Vec<Complex64> =
            radii.par_iter().map(|&r| if r == 0.0 { center * hd } else { kernel(r) * hd }).collect();
        let mut adj: Vec<Complex64> = samples.iter().map(|z| z.conj()).collect();
        fft_nd(&mut samples, &padded, false);
        fft_nd(&mut adj, &padded, false);
        Convolution { grid: grid.clone(), padded, kernel_hat: samples, adjoint_hat: adj }
    }

    pub fn apply(&self, phi: &[Complex64]) -> Vec<Complex64> {
        convolve_with_hat(phi, &self.grid.shape, &self.padded, &self.kernel_hat)
    }

    /// L^2 adjoint (convolution with the conjugate kernel, which is even).
    pub fn apply_adjoint(&self, phi: &[Complex64]) -> Vec<Complex64> {
        convolve_with_hat(phi, &self.grid.shape, &self.padded, &self.adjoint_hat)
    }
}

/// Outgoing resolvent phi -> int G^k(x - z) phi(z) dz on a grid.
#[derive(Clone, Debug)]
pub struct Resolvent {
    pub params: ModelParams,
    pub method: ResolventMethod,
    conv: Option<Convolution>,
    spectral: Option<SpectralResolvent>,
}

#[derive(Clone, Debug)]
struct SpectralResolvent {
    grid: Grid,
    boxes: Vec<SpectralBox>,
    taus: Vec<f64>,
    homogeneous: Convolution,
}

/// One periodic box of the spectral path with its weight in the final
/// combination.
#[derive(Clone, Debug)]
struct SpectralBox {
    padded: Vec<usize>,
    symbol: Vec<f64>,
    weight: f64,
}

impl SpectralBox {
    fn new(padded: Vec<usize>, grid: &Grid, p: &ModelParams, weight: f64) -> Result<Self> {
        let norms = Grid::frequency_norms(&padded, grid.spacing);
        let k = p.k;
        if let Some(r) = norms.iter().find(|r| (*r - k).abs() <= 1e-9 * k.max(1.0)) {
            return Err(Error::Resonance(format!(
                "k = {k} coincides with the lattice radius {r}; shift k by a fraction of the frequency cell {} or change the grid",
                2.0 * std::f64::consts::PI / (padded[0] as f64 * grid.spacing)
            )));
        }
        let k2a = k.powf(2.0 * p.alpha);
        let symbol = norms.iter().map(|r| r.powf(2.0 * p.alpha) - k2a).collect();
        Ok(SpectralBox { padded, symbol, weight })
    }
}

/// Periodic boxes of the spectral path (d = 1 only). In d = 1 the wrap-around images of
/// the resonant standing wave add cot(k L / 2) W(x) to the lattice sum of a
/// box of length L, with W independent of L. Two box lengths with phases
/// k L / 2 near pi / 4 and 3 pi / 4 (mod pi) keep the lattice away from k and
/// are combined with weights that cancel that term.
fn spectral_boxes(grid: &Grid, p: &ModelParams, pad: usize) -> Result<Vec<SpectralBox>> {
    let first: Vec<usize> = grid.shape.iter().map(|n| n * pad).collect();
    if grid.dim() != 1 {
        return Err(Error::UnsupportedDimension(
            grid.dim(),
            "the limiting-absorption path leaves periodic images of the outgoing wave in d >= 2; use the kernel method".into(),
        ));
    }
    let pi = std::f64::consts::PI;
    let phase = |n: usize| (0.5 * p.k * n as f64 * grid.spacing).rem_euclid(pi);
    let period = (2.0 * pi / (p.k * grid.spacing)).ceil().max(2.0) as usize;
    let closest = |target: f64| {
        (first[0]..=first[0] + period)
            .min_by(|&a, &b| (phase(a) - target).abs().total_cmp(&(phase(b) - target).abs()))
            .unwrap_or(first[0])
    };
    let (na, nb) = (closest(0.25 * pi), closest(0.75 * pi));
    let (ca, cb) = (1.0 / phase(na).tan(), 1.0 / phase(nb).tan());
    if na == nb || !(ca - cb).is_finite() || (ca - cb).abs() < 1e-3 {
        return Ok(vec![SpectralBox::new(first, grid, p, 1.0)?]);
    }
    Ok(vec![SpectralBox::new(vec![na], grid, p, cb / (cb - ca))?, SpectralBox::new(vec![nb], grid, p, -ca / (cb - ca))?])
}

/// Neville extrapolation of values sampled at x_i to x = 0.
fn neville_at_zero(x: &[f64], y: &[Complex64]) -> Complex64 {
    let mut p = y.to_vec();
    let n = x.len();
    for lvl in 1..n {
        for i in 0..n - lvl {
            p[i] = (p[i + 1] * x[i] - p[i] * x[i + lvl]) / (x[i] - x[i + lvl]);
        }
    }
    p[0]
}

impl Resolvent {
    pub fn new(grid: &Grid, p: &ModelParams, cfg: &BornConfig) -> Result<Self> {
        cfg.validate()?;
        if grid.dim() != p.d {
            return Err(Error::InvalidSpec(format!("grid dimension {} does not match d = {}", grid.dim(), p.d)));
        }
        let table = GreenTable::get(p.d, p.alpha)?;
        match cfg.method {
            ResolventMethod::Kernel => {
                let k = p.k;
                let center = cell_average(p.d, grid.spacing, |r| table.eval(k, r.max(1e-300)));
                let conv = Convolution::from_radial(grid, cfg.pad, |r| table.eval(k, r), center);
                Ok(Resolvent { params: *p, method: cfg.method, conv: Some(conv), spectral: None })
            }
            ResolventMethod::LimitingAbsorption => {
                let boxes = spectral_boxes(grid, p, cfg.pad)?;
                let c = homogeneous_constant(p);
                let pp = *p;
                let hom = move |r: f64| c * crate::greens::green_homogeneous(r, &pp);
                let center = cell_average(p.d, grid.spacing, hom);
                let homogeneous = Convolution::from_radial(grid, cfg.pad, hom, center);
                let spectral =
                    SpectralResolvent { grid: grid.clone(), boxes, taus: cfg.limiting_absorption_tau.clone(), homogeneous };
                Ok(Resolvent { params: *p, method: cfg.method, conv: None, spectral: Some(spectral) })
            }
        }
    }

    pub fn grid(&self) -> &Grid {
        match (&self.conv, &self.spectral) {
            (Some(c), _) => &c.grid,
            (_, Some(s)) => &s.grid,
            _ => unreachable!("resolvent without a backend"),
        }
    }

    pub fn apply(&self, phi: &[Complex64]) -> Vec<Complex64> {
        if let Some(c) = &self.conv {
            return c.apply(phi);
        }
        let s = self.spectral.as_ref().expect("resolvent without a backend");
        let mut out = s.homogeneous.apply(phi);
        for b in &s.boxes {
            let mut hat = crate::grid::embed(phi, &s.grid.shape, &b.padded);
            fft_nd(&mut hat, &b.padded, false);
            let layers: Vec<Vec<Complex64>> = s
                .taus
                .iter()
                .map(|&tau| {
                    let mut buf: Vec<Complex64> =
                        hat.iter().zip(&b.symbol).map(|(v, sym)| v / Complex64::new(*sym, -tau)).collect();
                    fft_nd(&mut buf, &b.padded, true);
                    crate::grid::extract(&buf, &b.padded, &s.grid.shape)
                })
                .collect();
            for (i, o) in out.iter_mut().enumerate() {
                let ys: Vec<Complex64> = layers.iter().map(|l| l[i]).collect();
                *o += neville_at_zero(&s.taus, &ys) * b.weight;
            }
        }
        out
    }

    /// L^2 adjoint of the resolvent (kernel path only; the spectral path is
    /// approximated by the conjugate kernel).
    pub fn apply_adjoint(&self, phi: &[Complex64]) -> Vec<Complex64> {
        match &self.conv {
            Some(c) => c.apply_adjoint(phi),
            None => {
                let conj: Vec<Complex64> = phi.iter().map(|z| z.conj()).collect();
                self.apply(&conj).into_iter().map(|z| z.conj()).collect()
            }
        }
    }
}

/// Applies the outgoing resolvent to a grid field.
pub fn apply_resolvent(phi: &GridField, p: &ModelParams, cfg: &BornConfig) -> Result<GridField> {
    let r = Resolvent::new(&phi.grid, p, cfg)?;
    Ok(GridField { grid: phi.grid.clone(), values: r.apply(&phi.values) })
}

/// Applies phi -> H_k(q phi).
pub fn apply_potential_op(u: &GridField, q: &[Complex64], p: &ModelParams, cfg: &BornConfig) -> Result<GridField> {
    let r = Resolvent::new(&u.grid, p, cfg)?;
    let qu: Vec<Complex64> = u.values.iter().zip(q).map(|(a, b)| a * b).collect();
    Ok(GridField { grid: u.grid.clone(), values: r.apply(&qu) })
}
