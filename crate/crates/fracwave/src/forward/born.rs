use super::resolvent::{BornConfig, Resolvent};
use crate::error::{Error, Result};
use crate::grid::{l2_norm, GridField};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Converged Born series with its convergence certificate.
#[derive(Clone, Debug)]
pub struct BornSolution {
    /// Total field u solving (I + K_k) u = H_k f.
    pub u: GridField,
    /// Incident term H_k f.
    pub incident: GridField,
    /// Norms of the successive terms (-K_k)^j H_k f.
    pub term_norms: Vec<f64>,
    /// Power-iteration estimate of the norm of K_k.
    pub norm_estimate: f64,
    /// Relative residual |(I + K_k) u - H_k f| / |H_k f|.
    pub residual: f64,
}

/// Potential operator K_k phi = H_k(q phi) bound to a resolvent.
pub struct PotentialOperator<'a> {
    pub resolvent: &'a Resolvent,
    pub q: &'a [Complex64],
}

impl PotentialOperator<'_> {
    pub fn apply(&self, phi: &[Complex64]) -> Vec<Complex64> {
        let qphi: Vec<Complex64> = phi.iter().zip(self.q).map(|(a, b)| a * b).collect();
        self.resolvent.apply(&qphi)
    }

    pub fn apply_adjoint(&self, phi: &[Complex64]) -> Vec<Complex64> {
        let v = self.resolvent.apply_adjoint(phi);
        v.iter().zip(self.q).map(|(a, b)| a * b.conj()).collect()
    }

    /// Spectral-norm estimate by power iteration on K* K from a fixed
    /// pseudo-random start restricted to the support of q.
    pub fn norm_estimate(&self, steps: usize) -> f64 {
        let n = self.q.len();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut v: Vec<Complex64> = (0..n)
            .map(|i| {
                let a: f64 = StandardNormal.sample(&mut rng);
                let b: f64 = StandardNormal.sample(&mut rng);
                if self.q[i].norm() > 0.0 {
                    Complex64::new(a, b)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        let mut est = 0.0;
        for _ in 0..steps.max(1) {
            let nv = l2_norm(&v, 1.0);
            if nv == 0.0 {
                return 0.0;
            }
            for z in v.iter_mut() {
                *z /= nv;
            }
            let kv = self.apply(&v);
            est = l2_norm(&kv, 1.0);
            v = self.apply_adjoint(&kv);
        }
        est
    }
}

/// Born series u = sum_j (-K_k)^j H_k f with a norm pre-check and a
/// Lippmann-Schwinger residual check.
pub fn born_solve(f: &GridField, q: Option<&[Complex64]>, resolvent: &Resolvent, cfg: &BornConfig) -> Result<BornSolution> {
    cfg.validate()?;
    let grid = &f.grid;
    let hd = grid.cell_volume();
    let incident = resolvent.apply(&f.values);
    let inc_norm = l2_norm(&incident, hd);
    let q = match q {
        Some(q) if q.iter().any(|z| z.norm() > 0.0) => q,
        _ => {
            return Ok(BornSolution {
                u: GridField { grid: grid.clone(), values: incident.clone() },
                incident: GridField { grid: grid.clone(), values: incident },
                term_norms: vec![inc_norm],
                norm_estimate: 0.0,
                residual: 0.0,
            })
        }
    };
    let op = PotentialOperator { resolvent, q };
    let norm = op.norm_estimate(cfg.power_steps);
    if norm >= 1.0 {
        return Err(Error::WavenumberTooSmall { k: resolvent.params.k, norm });
    }
    let mut u = incident.clone();
    let mut term = incident.clone();
    let mut term_norms = vec![inc_norm];
    let mut converged = inc_norm == 0.0;
    for _ in 1..cfg.max_terms {
        if converged {
            break;
        }
        term = op.apply(&term).into_iter().map(|z| -z).collect();
        let tn = l2_norm(&term, hd);
        term_norms.push(tn);
        for (a, b) in u.iter_mut().zip(&term) {
            *a += b;
        }
        converged = tn < cfg.contraction_tol * inc_norm;
    }
    let ku = op.apply(&u);
    let res: Vec<Complex64> = u.iter().zip(&ku).zip(&incident).map(|((a, b), c)| a + b - c).collect();
    let residual = if inc_norm == 0.0 { 0.0 } else { l2_norm(&res, hd) / inc_norm };
    let bound = 10.0 * cfg.contraction_tol;
    if residual > bound {
        return Err(Error::Residual { residual, bound });
    }
    Ok(BornSolution {
        u: GridField { grid: grid.clone(), values: u },
        incident: GridField { grid: grid.clone(), values: incident },
        term_norms,
        norm_estimate: norm,
        residual,
    })
}
