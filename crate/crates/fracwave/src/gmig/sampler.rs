use super::source::SourceSpec;
use crate::error::{Error, Result};
use crate::grid::{fft_nd, Grid, GridField};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::PI;

/// One draw of the random source.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldRealization {
    pub samples: GridField,
    pub seed: u64,
    /// Smallest nonzero lattice frequency 2 pi / (n h) along the longest axis.
    pub spectral_floor: f64,
}

/// Which second moment of the source a kernel describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelKind {
    /// E[conj f(x) f(y)].
    Covariance,
    /// E[f(x) f(y)].
    Relation,
}

/// Spectral amplitude sqrt(|xi|^{-m} / h^d) on the FFT lattice, zero mode dropped.
fn spectral_amplitude(grid: &Grid, m: f64) -> Vec<f64> {
    let hd = grid.cell_volume();
    Grid::frequency_norms(&grid.shape, grid.spacing)
        .into_iter()
        .map(|r| if r == 0.0 { 0.0 } else { (r.powf(-m) / hd).sqrt() })
        .collect()
}

/// Real stationary Gaussian field with lattice density |xi|^{-m}.
fn stationary_field(grid: &Grid, amp: &[f64], rng: &mut ChaCha20Rng) -> Vec<f64> {
    let mut w: Vec<Complex64> =
        (0..grid.len()).map(|_| Complex64::new(StandardNormal.sample(&mut *rng), 0.0)).collect();
    fft_nd(&mut w, &grid.shape, false);
    for (v, a) in w.iter_mut().zip(amp) {
        *v *= *a;
    }
    fft_nd(&mut w, &grid.shape, true);
    w.into_iter().map(|z| z.re).collect()
}

/// Draws f = phi1 X + i phi2 Y with X, Y independent stationary fields.
pub fn sample_field(spec: &SourceSpec, seed: u64) -> Result<FieldRealization> {
    if !(spec.m > 0.0) {
        return Err(Error::InvalidSpec(format!("order m must be positive, got {}", spec.m)));
    }
    let grid = &spec.grid;
    let amp = spectral_amplitude(grid, spec.m);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let x = stationary_field(grid, &amp, &mut rng);
    let y = stationary_field(grid, &amp, &mut rng);
    let values = (0..grid.len()).map(|i| Complex64::new(spec.phi1[i] * x[i], spec.phi2[i] * y[i])).collect();
    let longest = grid.shape.iter().copied().max().unwrap_or(1) as f64;
    Ok(FieldRealization {
        samples: GridField { grid: grid.clone(), values },
        seed,
        spectral_floor: 2.0 * PI / (longest * grid.spacing),
    })
}

/// Stationary correlation of the lattice-regularized density: the exact
/// covariance (1/(N h^d)) sum_{xi != 0} |xi|^{-m} e^{i xi . (x - y)} of the
/// fields X, Y used by the sampler, tabulated over all lattice displacements.
#[derive(Clone, Debug)]
pub struct LatticeCorrelation {
    shape: Vec<usize>,
    values: Vec<f64>,
}

impl LatticeCorrelation {
    pub fn new(grid: &Grid, m: f64) -> Self {
        let amp = spectral_amplitude(grid, m);
        let mut c: Vec<Complex64> = amp.iter().map(|a| Complex64::new(a * a, 0.0)).collect();
        fft_nd(&mut c, &grid.shape, true);
        LatticeCorrelation { shape: grid.shape.clone(), values: c.into_iter().map(|z| z.re).collect() }
    }

    /// Correlation at the displacement between multi-indices a and b (periodic).
    pub fn at(&self, a: &[usize], b: &[usize]) -> f64 {
        let mut i = 0;
        for ax in 0..self.shape.len() {
            let n = self.shape[ax];
            let o = (a[ax] + n - b[ax]) % n;
            i = i * n + o;
        }
        self.values[i]
    }
}

/// Covariance or relation kernel of the sampled source between grid cells
/// with flat indices xi and yi: (phi1 phi1 +/- phi2 phi2) times the lattice
/// correlation.
pub fn kernel_eval(kind: KernelKind, spec: &SourceSpec, corr: &LatticeCorrelation, xi: usize, yi: usize) -> Result<Complex64> {
    if xi == yi && spec.m < spec.grid.dim() as f64 {
        return Err(Error::Singularity(format!(
            "the kernel is singular on the diagonal for m = {} < d = {}",
            spec.m,
            spec.grid.dim()
        )));
    }
    let env = match kind {
        KernelKind::Covariance => spec.phi1[xi] * spec.phi1[yi] + spec.phi2[xi] * spec.phi2[yi],
        KernelKind::Relation => spec.phi1[xi] * spec.phi1[yi] - spec.phi2[xi] * spec.phi2[yi],
    };
    if env == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let g = &spec.grid;
    let c = corr.at(&g.unflatten(xi)[..g.dim()], &g.unflatten(yi)[..g.dim()]);
    Ok(Complex64::new(env * c, 0.0))
}

/// Continuum stationary factor (2 pi)^{-1} int e^{i r xi} |xi|^{-m} dxi in
/// d = 1, that is Gamma(1 - m) sin(pi m / 2) |r|^{m-1} / pi for m in (0, 1).
pub fn continuum_correlation_1d(m: f64, r: f64) -> f64 {
    let g = crate::specfun::gamma_complex(Complex64::new(1.0 - m, 0.0)).expect("1 - m is not a pole").re;
    g * (0.5 * PI * m).sin() * r.abs().powf(m - 1.0) / PI
}
