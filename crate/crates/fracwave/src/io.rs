//! Binary and CSV serialization of grid fields.
//!
//! Binary layout (little-endian): the magic bytes `FWGRID01`, u32 dimension d,
//! d u64 axis lengths, f64 spacing, d f64 lower corner, d f64 upper corner,
//! then the samples as interleaved (re, im) f64 pairs in row-major order.

use crate::error::{Error, Result};
use crate::grid::{Grid, GridField};
use num_complex::Complex64;
use std::io::{Read, Write};

const MAGIC: &[u8; 8] = b"FWGRID01";

pub fn write_grid_binary<W: Write>(field: &GridField, mut w: W) -> std::io::Result<()> {
    let g = &field.grid;
    w.write_all(MAGIC)?;
    w.write_all(&(g.dim() as u32).to_le_bytes())?;
    for &n in &g.shape {
        w.write_all(&(n as u64).to_le_bytes())?;
    }
    w.write_all(&g.spacing.to_le_bytes())?;
    let (lo, hi) = g.bbox();
    for v in lo.iter().chain(hi.iter()) {
        w.write_all(&v.to_le_bytes())?;
    }
    let mut buf = Vec::with_capacity(16 * field.values.len());
    for z in &field.values {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    w.write_all(&buf)
}

fn read_exact<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b).map_err(|e| Error::InvalidSpec(format!("truncated grid file: {e}")))?;
    Ok(b)
}

pub fn read_grid_binary<R: Read>(mut r: R) -> Result<GridField> {
    let magic: [u8; 8] = read_exact(&mut r)?;
    if &magic != MAGIC {
        return Err(Error::InvalidSpec("not a grid file (bad magic bytes)".into()));
    }
    let d = u32::from_le_bytes(read_exact(&mut r)?) as usize;
    if !(1..=3).contains(&d) {
        return Err(Error::UnsupportedDimension(d, "grid files hold 1, 2 or 3 axes".into()));
    }
    let mut shape = Vec::with_capacity(d);
    for _ in 0..d {
        shape.push(u64::from_le_bytes(read_exact(&mut r)?) as usize);
    }
    let spacing = f64::from_le_bytes(read_exact(&mut r)?);
    let mut lo = Vec::with_capacity(d);
    for _ in 0..d {
        lo.push(f64::from_le_bytes(read_exact(&mut r)?));
    }
    for _ in 0..d {
        read_exact::<8, _>(&mut r)?;
    }
    let origin = lo.iter().map(|l| l + 0.5 * spacing).collect();
    let grid = Grid::new(shape, spacing, origin)?;
    let mut values = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        let re = f64::from_le_bytes(read_exact(&mut r)?);
        let im = f64::from_le_bytes(read_exact(&mut r)?);
        values.push(Complex64::new(re, im));
    }
    Ok(GridField { grid, values })
}

/// CSV with columns x0[,x1[,x2]],re,im.
pub fn write_grid_csv<W: Write>(field: &GridField, mut w: W) -> std::io::Result<()> {
    let d = field.grid.dim();
    let names = ["x0", "x1", "x2"];
    writeln!(w, "{},re,im", names[..d].join(","))?;
    for (i, z) in field.values.iter().enumerate() {
        let x = field.grid.point(i);
        let coords: Vec<String> = x[..d].iter().map(|v| format!("{v:.17e}")).collect();
        writeln!(w, "{},{:.17e},{:.17e}", coords.join(","), z.re, z.im)?;
    }
    Ok(())
}
