//! Uniform Cartesian grids, complex grid fields and n-dimensional FFTs.

use crate::error::{Error, Result};
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Uniform grid with `shape[j]` cell centers along axis j, spacing `spacing`
/// and first cell center at `origin`. Flattening is row-major (last axis fastest).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub shape: Vec<usize>,
    pub spacing: f64,
    pub origin: Vec<f64>,
}

impl Grid {
    pub fn new(shape: Vec<usize>, spacing: f64, origin: Vec<f64>) -> Result<Self> {
        if shape.is_empty() || shape.len() > 3 {
            return Err(Error::UnsupportedDimension(shape.len(), "grids have 1, 2 or 3 axes".into()));
        }
        if origin.len() != shape.len() {
            return Err(Error::InvalidSpec("grid origin and shape have different lengths".into()));
        }
        if shape.contains(&0) {
            return Err(Error::InvalidSpec("grid axes must be non-empty".into()));
        }
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::InvalidSpec(format!("grid spacing must be positive, got {spacing}")));
        }
        Ok(Grid { shape, spacing, origin })
    }

    /// Cube grid with n cells per axis centred on the origin of R^d.
    pub fn centered(d: usize, n: usize, spacing: f64) -> Result<Self> {
        let o = -0.5 * (n as f64 - 1.0) * spacing;
        Grid::new(vec![n; d], spacing, vec![o; d])
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.dim() as i32)
    }

    /// Multi-index of a flat index.
    pub fn unflatten(&self, mut i: usize) -> [usize; 3] {
        let mut idx = [0usize; 3];
        for a in (0..self.dim()).rev() {
            idx[a] = i % self.shape[a];
            i /= self.shape[a];
        }
        idx
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        let mut i = 0;
        for (n, j) in self.shape.iter().zip(idx) {
            i = i * n + j;
        }
        i
    }

    /// Coordinates of the cell center with flat index i (unused axes are 0).
    pub fn point(&self, i: usize) -> [f64; 3] {
        let idx = self.unflatten(i);
        let mut x = [0.0; 3];
        for a in 0..self.dim() {
            x[a] = self.origin[a] + idx[a] as f64 * self.spacing;
        }
        x
    }

    pub fn points(&self) -> impl Iterator<Item = [f64; 3]> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    /// Lower and upper corners of the box covered by the cells.
    pub fn bbox(&self) -> (Vec<f64>, Vec<f64>) {
        let lo: Vec<f64> = self.origin.iter().map(|o| o - 0.5 * self.spacing).collect();
        let hi: Vec<f64> =
            self.origin.iter().zip(&self.shape).map(|(o, &n)| o + (n as f64 - 0.5) * self.spacing).collect();
        (lo, hi)
    }

    /// Nyquist angular frequency pi / spacing.
    pub fn nyquist(&self) -> f64 {
        PI / self.spacing
    }

    /// Angular FFT frequencies along an axis of n points.
    pub fn axis_frequencies(n: usize, spacing: f64) -> Vec<f64> {
        let dk = 2.0 * PI / (n as f64 * spacing);
        (0..n).map(|j| if j < n.div_ceil(2) { j as f64 } else { j as f64 - n as f64 } * dk).collect()
    }

    /// |xi| at every FFT mode of a grid with the given shape.
    pub fn frequency_norms(shape: &[usize], spacing: f64) -> Vec<f64> {
        let axes: Vec<Vec<f64>> = shape.iter().map(|&n| Grid::axis_frequencies(n, spacing)).collect();
        let total: usize = shape.iter().product();
        let mut out = Vec::with_capacity(total);
        for i in 0..total {
            let mut rem = i;
            let mut s = 0.0;
            for a in (0..shape.len()).rev() {
                let j = rem % shape[a];
                rem /= shape[a];
                s += axes[a][j] * axes[a][j];
            }
            out.push(s.sqrt());
        }
        out
    }

    /// Grid with the same spacing, `factor` times as many cells per axis and
    /// the same origin; the original grid occupies the leading corner.
    pub fn padded(&self, factor: usize) -> Grid {
        Grid { shape: self.shape.iter().map(|n| n * factor).collect(), spacing: self.spacing, origin: self.origin.clone() }
    }
}

/// Complex samples on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    pub grid: Grid,
    pub values: Vec<Complex64>,
}

impl GridField {
    pub fn zeros(grid: &Grid) -> Self {
        GridField { grid: grid.clone(), values: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_fn(grid: &Grid, f: impl Fn([f64; 3]) -> Complex64) -> Self {
        GridField { grid: grid.clone(), values: grid.points().map(f).collect() }
    }

    pub fn from_real_fn(grid: &Grid, f: impl Fn([f64; 3]) -> f64) -> Self {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    /// Discrete L^2 norm (sum |v|^2 h^d)^{1/2}.
    pub fn l2_norm(&self) -> f64 {
        l2_norm(&self.values, self.grid.cell_volume())
    }

    /// Riemann sum of the values.
    pub fn integral(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() * self.grid.cell_volume()
    }
}

pub fn l2_norm(v: &[Complex64], cell_volume: f64) -> f64 {
    (v.iter().map(|z| z.norm_sqr()).sum::<f64>() * cell_volume).sqrt()
}

/// In-place n-dimensional FFT of row-major data; the inverse transform is
/// normalized by 1/N.
pub fn fft_nd(data: &mut [Complex64], shape: &[usize], inverse: bool) {
    let total: usize = shape.iter().product();
    assert_eq!(data.len(), total, "data length does not match the grid shape");
    let mut planner = FftPlanner::new();
    let mut stride = 1;
    let mut line = Vec::new();
    for a in (0..shape.len()).rev() {
        let n = shape[a];
        if n > 1 {
            let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
            let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
            line.resize(n, Complex64::new(0.0, 0.0));
            let block = n * stride;
            for outer in (0..total).step_by(block) {
                for inner in 0..stride {
                    let base = outer + inner;
                    for (j, v) in line.iter_mut().enumerate() {
                        *v = data[base + j * stride];
                    }
                    fft.process_with_scratch(&mut line, &mut scratch);
                    for (j, v) in line.iter().enumerate() {
                        data[base + j * stride] = *v;
                    }
                }
            }
        }
        stride *= n;
    }
    if inverse {
        let s = 1.0 / total as f64;
        for v in data.iter_mut() {
            *v *= s;
        }
    }
}

/// Copies `src` (shape `small`) into the leading corner of a zero array of shape `big`.
pub fn embed(src: &[Complex64], small: &[usize], big: &[usize]) -> Vec<Complex64> {
    let total: usize = big.iter().product();
    let mut out = vec![Complex64::new(0.0, 0.0); total];
    for_each_index(small, |flat, idx| {
        out[flatten_in(big, idx)] = src[flat];
    });
    out
}

/// Extracts the leading corner of shape `small` from an array of shape `big`.
pub fn extract(src: &[Complex64], big: &[usize], small: &[usize]) -> Vec<Complex64> {
    let total: usize = small.iter().product();
    let mut out = vec![Complex64::new(0.0, 0.0); total];
    for_each_index(small, |flat, idx| {
        out[flat] = src[flatten_in(big, idx)];
    });
    out
}

fn flatten_in(shape: &[usize], idx: &[usize]) -> usize {
    let mut i = 0;
    for a in 0..shape.len() {
        i = i * shape[a] + idx[a];
    }
    i
}

/// Calls f(flat, multi_index) for every index of the shape in row-major order.
pub fn for_each_index(shape: &[usize], mut f: impl FnMut(usize, &[usize])) {
    let total: usize = shape.iter().product();
    let mut idx = vec![0usize; shape.len()];
    for flat in 0..total {
        f(flat, &idx);
        for a in (0..shape.len()).rev() {
            idx[a] += 1;
            if idx[a] < shape[a] {
                break;
            }
            idx[a] = 0;
        }
    }
}

/// Circular convolution of row-major data with a kernel given by its FFT.
pub fn convolve_with_hat(data: &[Complex64], small: &[usize], padded: &[usize], kernel_hat: &[Complex64]) -> Vec<Complex64> {
    let mut buf = embed(data, small, padded);
    fft_nd(&mut buf, padded, false);
    for (b, k) in buf.iter_mut().zip(kernel_hat) {
        *b *= k;
    }
    fft_nd(&mut buf, padded, true);
    extract(&buf, padded, small)
}
