use crate::error::{Error, Result};
use crate::grid::Grid;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Convex region descriptor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Region {
    Ball { center: Vec<f64>, radius: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

impl Region {
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Region::Ball { center, radius } => dist2(x, center) <= radius * radius,
            Region::Box { lo, hi } => lo.iter().zip(hi).zip(x).all(|((l, h), v)| *v >= *l && *v <= *h),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Region::Ball { center, .. } => center.len(),
            Region::Box { lo, .. } => lo.len(),
        }
    }

    /// Euclidean distance between two regions (0 when they intersect).
    pub fn distance(&self, other: &Region) -> f64 {
        match (self, other) {
            (Region::Ball { center: a, radius: ra }, Region::Ball { center: b, radius: rb }) => {
                (dist2(a, b).sqrt() - ra - rb).max(0.0)
            }
            (Region::Box { lo: l1, hi: h1 }, Region::Box { lo: l2, hi: h2 }) => {
                let mut s = 0.0;
                for j in 0..l1.len() {
                    let gap = (l2[j] - h1[j]).max(l1[j] - h2[j]).max(0.0);
                    s += gap * gap;
                }
                s.sqrt()
            }
            (Region::Ball { center, radius }, Region::Box { lo, hi })
            | (Region::Box { lo, hi }, Region::Ball { center, radius }) => {
                let nearest: Vec<f64> = center.iter().zip(lo.iter().zip(hi)).map(|(c, (l, h))| c.clamp(*l, *h)).collect();
                (dist2(&nearest, center).sqrt() - radius).max(0.0)
            }
        }
    }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Smooth compactly supported bump exp(1 - 1/(1 - |x - c|^2 / R^2)), equal to
/// 1 at the center and vanishing with all derivatives at radius R.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: Vec<f64>,
    pub radius: f64,
    pub amplitude: f64,
}

impl Bump {
    pub fn new(center: Vec<f64>, radius: f64, amplitude: f64) -> Self {
        Bump { center, radius, amplitude }
    }

    /// Profile g(x) without the amplitude.
    pub fn shape(&self, x: &[f64]) -> f64 {
        let t = dist2(&x[..self.center.len()], &self.center) / (self.radius * self.radius);
        if t >= 1.0 {
            0.0
        } else {
            (1.0 - 1.0 / (1.0 - t)).exp()
        }
    }

    /// Squared-bump strength amplitude * g(x)^2.
    pub fn squared(&self, x: &[f64]) -> f64 {
        let g = self.shape(x);
        self.amplitude * g * g
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.amplitude * self.shape(x)
    }
}

/// Pointwise envelopes phi1 = sqrt((mu_c + mu_r)/2), phi2 = sqrt((mu_c - mu_r)/2).
pub fn derive_envelopes(mu_c: &[f64], mu_r: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if mu_c.len() != mu_r.len() {
        return Err(Error::InvalidSpec("mu_c and mu_r have different lengths".into()));
    }
    let mut phi1 = Vec::with_capacity(mu_c.len());
    let mut phi2 = Vec::with_capacity(mu_c.len());
    for (i, (&c, &r)) in mu_c.iter().zip(mu_r).enumerate() {
        if !(c >= 0.0) || !(r >= 0.0) {
            return Err(Error::InvalidSpec(format!("principal symbols must be nonnegative (cell {i}: mu_c = {c}, mu_r = {r})")));
        }
        if r > c {
            return Err(Error::InvalidSpec(format!(
                "the two-field construction needs mu_r <= mu_c (cell {i}: mu_c = {c}, mu_r = {r})"
            )));
        }
        phi1.push((0.5 * (c + r)).sqrt());
        phi2.push((0.5 * (c - r)).sqrt());
    }
    Ok((phi1, phi2))
}

/// Potential q supported in the convex region U.
#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    pub region: Region,
    pub values: Vec<Complex64>,
}

/// Random source description on a grid: principal-symbol strengths, derived
/// envelopes, the source region D and an optional potential.
#[derive(Clone, Debug, PartialEq)]
pub struct SourceSpec {
    pub grid: Grid,
    pub m: f64,
    pub mu_c: Vec<f64>,
    pub mu_r: Vec<f64>,
    pub phi1: Vec<f64>,
    pub phi2: Vec<f64>,
    pub domain: Region,
    pub potential: Option<Potential>,
}

impl SourceSpec {
    pub fn new(grid: Grid, m: f64, mu_c: Vec<f64>, mu_r: Vec<f64>, domain: Region) -> Result<Self> {
        if mu_c.len() != grid.len() || mu_r.len() != grid.len() {
            return Err(Error::InvalidSpec("symbol arrays do not match the grid".into()));
        }
        if domain.dim() != grid.dim() {
            return Err(Error::InvalidSpec("region dimension does not match the grid".into()));
        }
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::InvalidSpec(format!("order m must be positive, got {m}")));
        }
        let (phi1, phi2) = derive_envelopes(&mu_c, &mu_r)?;
        Ok(SourceSpec { grid, m, mu_c, mu_r, phi1, phi2, domain, potential: None })
    }

    /// Symbols given as squared bumps sampled on the grid.
    pub fn from_bumps(grid: Grid, m: f64, mu_c: &[Bump], mu_r: &[Bump], domain: Region) -> Result<Self> {
        let sample = |bumps: &[Bump]| -> Vec<f64> {
            grid.points().map(|x| bumps.iter().map(|b| b.squared(&x)).sum()).collect()
        };
        let (c, r) = (sample(mu_c), sample(mu_r));
        SourceSpec::new(grid, m, c, r, domain)
    }

    /// Attaches a potential sampled from `q` on the grid.
    pub fn with_potential(mut self, region: Region, q: impl Fn([f64; 3]) -> Complex64) -> Result<Self> {
        if region.dim() != self.grid.dim() {
            return Err(Error::InvalidSpec("potential region dimension does not match the grid".into()));
        }
        let values = self.grid.points().map(q).collect();
        self.potential = Some(Potential { region, values });
        Ok(self)
    }

    /// Default d = 1 configuration: D = [-2, 2], U = [2.5, 3.5], mu_c a unit
    /// squared bump on D, mu_r a narrower off-center squared bump of strength
    /// 0.64 and q a smooth bump on U.
    pub fn default_1d(n: usize, spacing: f64, m: f64, q_amplitude: f64) -> Result<Self> {
        let grid = Grid::centered(1, n, spacing)?;
        let spec = SourceSpec::from_bumps(
            grid,
            m,
            &[Bump::new(vec![0.0], 2.0, 1.0)],
            &[Bump::new(vec![0.2], 1.6, 0.8)],
            Region::Box { lo: vec![-2.0], hi: vec![2.0] },
        )?;
        let q = Bump::new(vec![3.0], 0.5, q_amplitude);
        spec.with_potential(Region::Box { lo: vec![2.5], hi: vec![3.5] }, move |x| Complex64::new(q.value(&x), 0.0))
    }

    /// Default d = 2 configuration on a square grid: D is the disc of radius
    /// 0.7 centred at (0.8, 0), U the disc of radius 0.5 centred at (-0.8, 0).
    pub fn default_2d(n: usize, spacing: f64, m: f64, q_amplitude: f64) -> Result<Self> {
        let grid = Grid::centered(2, n, spacing)?;
        let spec = SourceSpec::from_bumps(
            grid,
            m,
            &[Bump::new(vec![0.8, 0.0], 0.7, 1.0)],
            &[Bump::new(vec![0.9, 0.1], 0.4, 0.5)],
            Region::Ball { center: vec![0.8, 0.0], radius: 0.7 },
        )?;
        let q = Bump::new(vec![-0.8, 0.0], 0.5, q_amplitude);
        spec.with_potential(Region::Ball { center: vec![-0.8, 0.0], radius: 0.5 }, move |x| {
            Complex64::new(q.value(&x), 0.0)
        })
    }

    pub fn potential_values(&self) -> Option<&[Complex64]> {
        self.potential.as_ref().map(|p| p.values.as_slice())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_examples() {
        let (p1, p2) = derive_envelopes(&[2.0, 1.0, 3.0], &[1.0, 1.0, 0.0]).unwrap();
        assert!((p1[0] - 1.5f64.sqrt()).abs() < 1e-15 && (p2[0] - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(p2[1], 0.0);
        assert_eq!(p1[2], p2[2]);
        assert!(derive_envelopes(&[1.0], &[1.5]).is_err());
    }

    #[test]
    fn region_distances() {
        let a = Region::Ball { center: vec![1.0, 0.0], radius: 0.5 };
        let b = Region::Ball { center: vec![-1.0, 0.0], radius: 0.5 };
        assert!((a.distance(&b) - 1.0).abs() < 1e-15);
        let c = Region::Box { lo: vec![2.0, -1.0], hi: vec![3.0, 1.0] };
        assert!((a.distance(&c) - 0.5).abs() < 1e-15);
        let e = Region::Box { lo: vec![-1.0], hi: vec![1.0] };
        let f = Region::Box { lo: vec![1.5], hi: vec![2.5] };
        assert!((e.distance(&f) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn default_specs_are_admissible() {
        let s = SourceSpec::default_1d(256, 0.04, 0.9, 1.0).unwrap();
        assert!(s.mu_r.iter().zip(&s.mu_c).all(|(r, c)| r <= c));
        let s2 = SourceSpec::default_2d(64, 0.05, 1.2, 1.0).unwrap();
        assert!(s2.potential.is_some());
    }
}
