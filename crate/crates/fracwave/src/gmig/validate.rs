use super::source::SourceSpec;
use crate::greens::{alpha_threshold, m_threshold, potential_smoothness_order, ModelParams};
use crate::grid::{fft_nd, Grid};
use serde::Serialize;

/// Outcome of one admissibility condition.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Pass/fail report of the source and potential hypotheses.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub checks: Vec<Check>,
    /// Required smoothness order of the potential.
    pub smoothness_order: u32,
}

impl AssumptionReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

/// Fraction of the energy of |xi|^order q-hat carried by the upper third of
/// the lattice band; small values mean q is resolved to that order.
fn high_band_fraction(grid: &Grid, q: &[num_complex::Complex64], order: u32) -> f64 {
    let mut v = q.to_vec();
    fft_nd(&mut v, &grid.shape, false);
    let norms = Grid::frequency_norms(&grid.shape, grid.spacing);
    let cut = 2.0 / 3.0 * grid.nyquist();
    let (mut hi, mut tot) = (0.0, 0.0);
    for (z, r) in v.iter().zip(&norms) {
        let e = z.norm_sqr() * r.powi(2 * order as i32);
        tot += e;
        if *r > cut {
            hi += e;
        }
    }
    if tot == 0.0 {
        0.0
    } else {
        hi / tot
    }
}

/// Checks m in (m_{d,alpha}, d), alpha > alpha_d, the supports of the symbols
/// and of q, their separation, and a resolution heuristic for q at the
/// required smoothness order.
pub fn validate_assumption(p: &ModelParams, spec: &SourceSpec) -> AssumptionReport {
    let d = p.d;
    let mut checks = Vec::new();
    let lo = m_threshold(d, p.alpha);
    checks.push(Check {
        name: "m_range".into(),
        passed: p.m > lo && p.m < d as f64,
        detail: format!("m = {} must lie in ({lo}, {d})", p.m),
    });
    let ad = alpha_threshold(d);
    checks.push(Check {
        name: "alpha_range".into(),
        passed: p.alpha > ad,
        detail: format!("alpha = {} must exceed {ad}", p.alpha),
    });
    checks.push(Check {
        name: "dimension".into(),
        passed: spec.grid.dim() == d,
        detail: format!("grid dimension {} vs model dimension {d}", spec.grid.dim()),
    });
    let outside = spec
        .grid
        .points()
        .zip(spec.mu_c.iter().zip(&spec.mu_r))
        .filter(|(x, (c, r))| (**c > 0.0 || **r > 0.0) && !spec.domain.contains(&x[..d.min(3)]))
        .count();
    checks.push(Check {
        name: "source_support".into(),
        passed: outside == 0,
        detail: format!("{outside} cells with nonzero symbol outside D"),
    });
    let order = potential_smoothness_order(d, p.alpha, p.m);
    match &spec.potential {
        None => checks.push(Check { name: "potential".into(), passed: true, detail: "no potential (q = 0)".into() }),
        Some(pot) => {
            let outside = spec
                .grid
                .points()
                .zip(&pot.values)
                .filter(|(x, q)| q.norm() > 0.0 && !pot.region.contains(&x[..d.min(3)]))
                .count();
            checks.push(Check {
                name: "potential_support".into(),
                passed: outside == 0,
                detail: format!("{outside} cells with nonzero q outside U"),
            });
            let dist = spec.domain.distance(&pot.region);
            checks.push(Check {
                name: "separation".into(),
                passed: dist > 0.0,
                detail: format!("dist(D, U) = {dist}"),
            });
            let frac = high_band_fraction(&spec.grid, &pot.values, order);
            checks.push(Check {
                name: "potential_smoothness".into(),
                passed: frac < 1e-3,
                detail: format!("order {order}: high-band energy fraction {frac:.3e}"),
            });
        }
    }
    AssumptionReport { checks, smoothness_order: order }
}
