use super::born::{born_solve, BornSolution};
use super::resolvent::{BornConfig, Convolution, Resolvent};
use crate::error::{Error, Result};
use crate::gmig::{FieldRealization, SourceSpec};
use crate::greens::{far_field_constant, green_truncated_with, GreenTable, ModelParams, TruncationVariant};
use crate::grid::{Grid, GridField};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};

/// Far-field contributions for one (direction, wavenumber) pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FarFieldEntry {
    pub direction: usize,
    pub k: f64,
    pub f0: Complex64,
    pub f1: Complex64,
    pub f2: Complex64,
    pub u_inf: Complex64,
}

/// Convergence certificate of the Born series at one wavenumber.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BornCertificate {
    pub k: f64,
    pub term_norms: Vec<f64>,
    pub norm_estimate: f64,
    pub residual: f64,
}

impl From<(&BornSolution, f64)> for BornCertificate {
    fn from((s, k): (&BornSolution, f64)) -> Self {
        BornCertificate { k, term_norms: s.term_norms.clone(), norm_estimate: s.norm_estimate, residual: s.residual }
    }
}

/// Far-field data of one source realization over directions and a sorted
/// wavenumber grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FarFieldTable {
    pub dim: usize,
    pub alpha: f64,
    pub m: f64,
    pub seed: u64,
    pub directions: Vec<Vec<f64>>,
    pub wavenumbers: Vec<f64>,
    /// Entries ordered by wavenumber, then direction.
    pub entries: Vec<FarFieldEntry>,
}

/// Sum over grid cells of e^{-i k x.y} w(y) h^d.
fn plane_wave_sum(grid: &Grid, dir: &[f64], k: f64, w: &[Complex64]) -> Complex64 {
    let hd = grid.cell_volume();
    let mut s = Complex64::new(0.0, 0.0);
    for (i, v) in w.iter().enumerate() {
        if *v == Complex64::new(0.0, 0.0) {
            continue;
        }
        let y = grid.point(i);
        let phase: f64 = dir.iter().zip(y.iter()).map(|(a, b)| a * b).sum::<f64>() * k;
        s += v * Complex64::from_polar(1.0, -phase);
    }
    s * hd
}

fn check_directions(d: usize, directions: &[Vec<f64>]) -> Result<()> {
    for x in directions {
        let n: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if x.len() != d || (n - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidSpec(format!("direction {x:?} is not a unit vector in R^{d}")));
        }
    }
    Ok(())
}

/// F0, F1, F2 and u_inf at one wavenumber for all directions, with the Born
/// certificate. F2 collects the whole multiple-scattering remainder
/// -C int e^{-ik x.y} q (u - H_k f) dy, so that u_inf = F0 + F1 + F2.
pub fn far_field(
    f: &GridField,
    q: Option<&[Complex64]>,
    resolvent: &Resolvent,
    cfg: &BornConfig,
    directions: &[Vec<f64>],
) -> Result<(Vec<FarFieldEntry>, BornSolution)> {
    let p = resolvent.params;
    check_directions(p.d, directions)?;
    let c = far_field_constant(&p);
    let sol = born_solve(f, q, resolvent, cfg)?;
    let grid = &f.grid;
    let (qi, qs) = match q {
        Some(q) => {
            let qi: Vec<Complex64> = q.iter().zip(&sol.incident.values).map(|(a, b)| a * b).collect();
            let qs: Vec<Complex64> =
                q.iter().zip(sol.u.values.iter().zip(&sol.incident.values)).map(|(a, (u, h))| a * (u - h)).collect();
            (qi, qs)
        }
        None => (vec![Complex64::new(0.0, 0.0); grid.len()], vec![Complex64::new(0.0, 0.0); grid.len()]),
    };
    let entries = directions
        .iter()
        .enumerate()
        .map(|(j, dir)| {
            let f0 = c * plane_wave_sum(grid, dir, p.k, &f.values);
            let f1 = -c * plane_wave_sum(grid, dir, p.k, &qi);
            let f2 = -c * plane_wave_sum(grid, dir, p.k, &qs);
            FarFieldEntry { direction: j, k: p.k, f0, f1, f2, u_inf: f0 + f1 + f2 }
        })
        .collect();
    Ok((entries, sol))
}

/// F0 alone, C int e^{-ik x.y} f(y) dy, for all directions. Needs no
/// resolvent.
pub fn far_field_f0(f: &GridField, p: &ModelParams, directions: &[Vec<f64>]) -> Result<Vec<Complex64>> {
    check_directions(p.d, directions)?;
    let c = far_field_constant(p);
    Ok(directions.iter().map(|dir| c * plane_wave_sum(&f.grid, dir, p.k, &f.values)).collect())
}

/// Result of one wavenumber of a sweep.
#[derive(Clone, Debug)]
pub struct SweepOutcome {
    pub k: f64,
    pub result: Result<(Vec<FarFieldEntry>, BornCertificate)>,
}

/// Parallel sweep over wavenumbers for one fixed realization.
pub fn far_field_sweep(
    spec: &SourceSpec,
    field: &FieldRealization,
    base: &ModelParams,
    cfg: &BornConfig,
    directions: &[Vec<f64>],
    ks: &[f64],
) -> Vec<SweepOutcome> {
    ks.par_iter()
        .map(|&k| {
            let p = base.with_k(k);
            let result = Resolvent::new(&spec.grid, &p, cfg).and_then(|r| {
                let (e, s) = far_field(&field.samples, spec.potential_values(), &r, cfg, directions)?;
                Ok((e, BornCertificate::from((&s, k))))
            });
            SweepOutcome { k, result }
        })
        .collect()
}

impl FarFieldTable {
    pub fn new(dim: usize, alpha: f64, m: f64, seed: u64, directions: Vec<Vec<f64>>) -> Self {
        FarFieldTable { dim, alpha, m, seed, directions, wavenumbers: Vec::new(), entries: Vec::new() }
    }

    /// Builds a table from a sweep, failing on the first failed wavenumber.
    pub fn from_sweep(
        dim: usize,
        alpha: f64,
        m: f64,
        seed: u64,
        directions: Vec<Vec<f64>>,
        outcomes: Vec<SweepOutcome>,
    ) -> Result<(Self, Vec<BornCertificate>)> {
        let mut t = FarFieldTable::new(dim, alpha, m, seed, directions);
        let mut certs = Vec::new();
        for o in outcomes {
            let (e, c) = o.result?;
            t.insert(o.k, e)?;
            certs.push(c);
        }
        Ok((t, certs))
    }

    /// Inserts the entries of one wavenumber, keeping the grid sorted.
    pub fn insert(&mut self, k: f64, mut entries: Vec<FarFieldEntry>) -> Result<()> {
        if entries.len() != self.directions.len() {
            return Err(Error::InvalidSpec("one entry per direction is required".into()));
        }
        if self.k_index(k).is_some() {
            return Err(Error::InvalidSpec(format!("wavenumber {k} is already present")));
        }
        entries.sort_by_key(|e| e.direction);
        let pos = self.wavenumbers.partition_point(|&v| v < k);
        self.wavenumbers.insert(pos, k);
        let at = pos * self.directions.len();
        self.entries.splice(at..at, entries);
        Ok(())
    }

    /// Index of a sampled wavenumber within a relative 1e-9.
    pub fn k_index(&self, k: f64) -> Option<usize> {
        let tol = 1e-9 * k.abs().max(1.0);
        let pos = self.wavenumbers.partition_point(|&v| v < k - tol);
        (pos < self.wavenumbers.len() && (self.wavenumbers[pos] - k).abs() <= tol).then_some(pos)
    }

    pub fn direction_index(&self, dir: &[f64]) -> Option<usize> {
        self.directions.iter().position(|x| x.iter().zip(dir).all(|(a, b)| (a - b).abs() < 1e-12))
    }

    pub fn entry(&self, direction: usize, k_index: usize) -> &FarFieldEntry {
        &self.entries[k_index * self.directions.len() + direction]
    }

    pub fn lookup(&self, direction: usize, k: f64) -> Option<&FarFieldEntry> {
        self.k_index(k).map(|i| self.entry(direction, i))
    }

    /// Checks the sorted grid and u_inf = F0 + F1 + F2.
    pub fn check_invariants(&self) -> Result<()> {
        if self.wavenumbers.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSpec("wavenumbers are not strictly increasing".into()));
        }
        for e in &self.entries {
            let s = e.f0 + e.f1 + e.f2;
            if (s - e.u_inf).norm() > 1e-12 * (e.u_inf.norm() + s.norm()).max(1e-300) {
                return Err(Error::InvalidSpec(format!("u_inf != F0 + F1 + F2 at k = {}", e.k)));
            }
        }
        Ok(())
    }

    pub fn csv_header(dim: usize) -> String {
        let dirs: Vec<String> = (0..dim).map(|j| format!("dir_{j}")).collect();
        format!(
            "dim,alpha,m,k,{},f0_re,f0_im,f1_re,f1_im,f2_re,f2_im,u_inf_re,u_inf_im,seed",
            dirs.join(",")
        )
    }

    pub fn csv_row(&self, e: &FarFieldEntry) -> String {
        let dir: Vec<String> = self.directions[e.direction].iter().map(|v| format!("{v:.17e}")).collect();
        format!(
            "{},{:.17e},{:.17e},{:.17e},{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{}",
            self.dim,
            self.alpha,
            self.m,
            e.k,
            dir.join(","),
            e.f0.re,
            e.f0.im,
            e.f1.re,
            e.f1.im,
            e.f2.re,
            e.f2.im,
            e.u_inf.re,
            e.u_inf.im,
            self.seed
        )
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{}", Self::csv_header(self.dim))?;
        for e in &self.entries {
            writeln!(w, "{}", self.csv_row(e))?;
        }
        Ok(())
    }

    /// Parses the CSV layout written by `write_csv`. Directions are collected
    /// in order of first appearance.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let bad = |line: usize, msg: &str| Error::InvalidSpec(format!("far-field CSV line {line}: {msg}"));
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| bad(1, "empty file"))?.map_err(|e| bad(1, &e.to_string()))?;
        let cols: Vec<&str> = header.trim().split(',').collect();
        let dim = cols.iter().filter(|c| c.starts_with("dir_")).count();
        if !(1..=3).contains(&dim) || cols.len() != 13 + dim || header.trim() != Self::csv_header(dim) {
            return Err(bad(1, "unexpected header"));
        }
        let mut table: Option<FarFieldTable> = None;
        let mut rows: Vec<(f64, usize, FarFieldEntry)> = Vec::new();
        for (ln, line) in lines.enumerate() {
            let line = line.map_err(|e| bad(ln + 2, &e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let v: Vec<&str> = line.trim().split(',').collect();
            if v.len() != cols.len() {
                return Err(bad(ln + 2, "wrong number of fields"));
            }
            let num = |i: usize| v[i].parse::<f64>().map_err(|_| bad(ln + 2, &format!("column {} is not a number", cols[i])));
            let alpha = num(1)?;
            let m = num(2)?;
            let k = num(3)?;
            let dir: Vec<f64> = (0..dim).map(|j| num(4 + j)).collect::<Result<_>>()?;
            let c = |i: usize| -> Result<Complex64> { Ok(Complex64::new(num(i)?, num(i + 1)?)) };
            let b = 4 + dim;
            let seed: u64 = v[b + 8].parse().map_err(|_| bad(ln + 2, "seed is not an integer"))?;
            let t = table.get_or_insert_with(|| FarFieldTable::new(dim, alpha, m, seed, Vec::new()));
            let di = match t.direction_index(&dir) {
                Some(i) => i,
                None => {
                    t.directions.push(dir);
                    t.directions.len() - 1
                }
            };
            rows.push((k, di, FarFieldEntry { direction: di, k, f0: c(b)?, f1: c(b + 2)?, f2: c(b + 4)?, u_inf: c(b + 6)? }));
        }
        let mut t = table.ok_or_else(|| bad(2, "no data rows"))?;
        rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let nd = t.directions.len();
        for chunk in rows.chunk_by(|a, b| a.0 == b.0) {
            if chunk.len() != nd {
                return Err(Error::InvalidSpec(format!("wavenumber {} lacks some directions", chunk[0].0)));
            }
            t.insert(chunk[0].0, chunk.iter().map(|r| r.2).collect())?;
        }
        Ok(t)
    }
}

/// Convolution with the difference or with the truncated kernel itself.
fn truncated_convolution(grid: &Grid, p: &ModelParams, variant: TruncationVariant, difference: bool) -> Result<Convolution> {
    if p.d == 1 {
        return Err(Error::UnsupportedDimension(1, "the truncated kernel is defined only for d = 2, 3".into()));
    }
    let table = GreenTable::get(p.d, p.alpha)?;
    let pp = *p;
    let kernel = move |r: f64| {
        let gn = green_truncated_with(r, &pp, variant).unwrap_or_default();
        if difference {
            table.eval(pp.k, r) - gn
        } else {
            gn
        }
    };
    // the self cell never couples D to U; its value is immaterial and set to 0
    Ok(Convolution::from_radial(grid, 2, kernel, Complex64::new(0.0, 0.0)))
}

/// F1 with the outgoing kernel replaced by the truncated kernel.
pub fn far_field_f1_truncated(
    f: &GridField,
    q: &[Complex64],
    p: &ModelParams,
    directions: &[Vec<f64>],
    variant: TruncationVariant,
) -> Result<Vec<Complex64>> {
    check_directions(p.d, directions)?;
    let conv = truncated_convolution(&f.grid, p, variant, false)?;
    let c = far_field_constant(p);
    let hn = conv.apply(&f.values);
    let w: Vec<Complex64> = q.iter().zip(&hn).map(|(a, b)| a * b).collect();
    Ok(directions.iter().map(|dir| -c * plane_wave_sum(&f.grid, dir, p.k, &w)).collect())
}

/// F1 - F1N computed directly with the kernel difference G^k - G^k_N.
pub fn far_field_f1_truncation_error(
    f: &GridField,
    q: &[Complex64],
    p: &ModelParams,
    directions: &[Vec<f64>],
    variant: TruncationVariant,
) -> Result<Vec<Complex64>> {
    check_directions(p.d, directions)?;
    let conv = truncated_convolution(&f.grid, p, variant, true)?;
    let c = far_field_constant(p);
    let hn = conv.apply(&f.values);
    let w: Vec<Complex64> = q.iter().zip(&hn).map(|(a, b)| a * b).collect();
    Ok(directions.iter().map(|dir| -c * plane_wave_sum(&f.grid, dir, p.k, &w)).collect())
}

/// Unit directions: the two signs in d = 1, n equally spaced angles in
/// d = 2, and an equal-area spiral over the sphere in d = 3.
pub fn default_directions(d: usize, n: usize) -> Vec<Vec<f64>> {
    match d {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..n)
            .map(|j| {
                let t = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        _ => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..n)
                .map(|j| {
                    let z = 1.0 - 2.0 * (j as f64 + 0.5) / n as f64;
                    let r = (1.0 - z * z).sqrt();
                    let t = golden * j as f64;
                    vec![r * t.cos(), r * t.sin(), z]
                })
                .collect()
        }
    }
}
