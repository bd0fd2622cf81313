//! Experiment configuration file and its translation into library types.

use crate::error::CliError;
use fracwave::forward::{default_directions, BornConfig, ResolventMethod};
use fracwave::gmig::{Bump, Region, SourceSpec};
use fracwave::greens::ModelParams;
use fracwave::grid::Grid;
use fracwave::inversion::{
    aligned_tau_grid, compute_separating_normal, required_wavenumbers, RecoveryConfig, SeparatingNormal,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelBlock,
    pub grid: GridBlock,
    pub source: SourceBlock,
    #[serde(default)]
    pub potential: Option<PotentialBlock>,
    #[serde(default)]
    pub sweep: SweepBlock,
    #[serde(default)]
    pub green: GreenBlock,
    #[serde(default)]
    pub output: OutputBlock,
    #[serde(default)]
    pub tolerances: ToleranceBlock,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    pub dim: usize,
    pub alpha: f64,
    pub m: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    pub n: usize,
    pub spacing: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RegionBlock {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
}

impl From<&RegionBlock> for Region {
    fn from(r: &RegionBlock) -> Self {
        match r {
            RegionBlock::Box { lo, hi } => Region::Box { lo: lo.clone(), hi: hi.clone() },
            RegionBlock::Ball { center, radius } => Region::Ball { center: center.clone(), radius: *radius },
        }
    }
}

/// Squared-bump primitive amplitude * g(x)^2 for the strengths, plain bump
/// amplitude * g(x) for the potential.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpBlock {
    pub center: Vec<f64>,
    pub radius: f64,
    pub amplitude: f64,
}

impl From<&BumpBlock> for Bump {
    fn from(b: &BumpBlock) -> Self {
        Bump::new(b.center.clone(), b.radius, b.amplitude)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceBlock {
    pub domain: RegionBlock,
    #[serde(default)]
    pub mu_c: Vec<BumpBlock>,
    #[serde(default)]
    pub mu_r: Vec<BumpBlock>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialBlock {
    pub region: RegionBlock,
    pub bumps: Vec<BumpBlock>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepBlock {
    /// Band starts K of the recovery.
    pub bands: Vec<f64>,
    pub nk: usize,
    pub tau_spacing: f64,
    pub tau_max: f64,
    /// Number of observation directions (ignored in d = 1).
    pub directions: usize,
    pub seeds: Vec<u64>,
    /// Explicit forward wavenumbers; by default those required by the bands.
    pub wavenumbers: Option<Vec<f64>>,
}

impl Default for SweepBlock {
    fn default() -> Self {
        SweepBlock {
            bands: vec![32.0, 64.0, 128.0],
            nk: 256,
            tau_spacing: 0.25,
            tau_max: 3.0,
            directions: 16,
            seeds: vec![1],
            wavenumbers: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GreenBlock {
    /// (k, |x|) evaluation points.
    pub points: Vec<[f64; 2]>,
    pub oracle: bool,
    pub policy: GreenPolicy,
}

/// Evaluation path of `green-eval`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GreenPolicy {
    /// Contour below the crossover, large-argument form above.
    #[default]
    Hybrid,
    /// Contour quadrature at every point.
    Contour,
}

impl Default for GreenBlock {
    fn default() -> Self {
        GreenBlock { points: Vec::new(), oracle: true, policy: GreenPolicy::Hybrid }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputBlock {
    pub dir: PathBuf,
}

impl Default for OutputBlock {
    fn default() -> Self {
        OutputBlock { dir: PathBuf::from("out") }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToleranceBlock {
    pub contraction_tol: f64,
    pub max_terms: usize,
    pub method: ResolventMethod,
    pub pad: usize,
    /// Seeds of the Monte-Carlo moment report of `sample-field`.
    pub mc_seeds: u64,
    /// Acceptance band of the moment report in standard errors.
    pub mc_sigma: f64,
    /// Wavenumbers per resumable forward chunk.
    pub chunk: usize,
}

impl Default for ToleranceBlock {
    fn default() -> Self {
        let b = BornConfig::default();
        ToleranceBlock {
            contraction_tol: b.contraction_tol,
            max_terms: b.max_terms,
            method: b.method,
            pad: b.pad,
            mc_seeds: 200,
            mc_sigma: 3.0,
            chunk: 64,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Validation(msg) => CliError::Validation(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| CliError::Validation(e.to_string()))?;
        cfg.check_shape()?;
        Ok(cfg)
    }

    fn check_shape(&self) -> Result<(), CliError> {
        let d = self.model.dim;
        if !(1..=3).contains(&d) {
            return Err(CliError::Validation(format!("model.dim = {d} must be 1, 2 or 3")));
        }
        let bad_len = |what: &str, v: &[f64]| {
            (v.len() != d).then(|| CliError::Validation(format!("{what} has {} coordinates, expected {d}", v.len())))
        };
        let region = |what: &str, r: &RegionBlock| match r {
            RegionBlock::Box { lo, hi } => bad_len(&format!("{what}.lo"), lo).or_else(|| bad_len(&format!("{what}.hi"), hi)),
            RegionBlock::Ball { center, .. } => bad_len(&format!("{what}.center"), center),
        };
        let mut errs = Vec::new();
        errs.extend(region("source.domain", &self.source.domain));
        for (name, list) in [("source.mu_c", &self.source.mu_c), ("source.mu_r", &self.source.mu_r)] {
            for (i, b) in list.iter().enumerate() {
                errs.extend(bad_len(&format!("{name}[{i}].center"), &b.center));
            }
        }
        if let Some(p) = &self.potential {
            errs.extend(region("potential.region", &p.region));
            for (i, b) in p.bumps.iter().enumerate() {
                errs.extend(bad_len(&format!("potential.bumps[{i}].center"), &b.center));
            }
        }
        if let Some(e) = errs.into_iter().next() {
            return Err(e);
        }
        if self.sweep.seeds.is_empty() {
            return Err(CliError::Validation("sweep.seeds must not be empty".into()));
        }
        if self.sweep.bands.is_empty() {
            return Err(CliError::Validation("sweep.bands must not be empty".into()));
        }
        Ok(())
    }

    /// SHA-256 of the configuration with the output location removed.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output = OutputBlock::default();
        let text = serde_json::to_string(&c).expect("configuration serializes");
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn seed(&self) -> u64 {
        self.sweep.seeds[0]
    }

    pub fn params(&self, k: f64) -> Result<ModelParams, CliError> {
        Ok(ModelParams::new(self.model.dim, self.model.alpha, self.model.m, k)?)
    }

    pub fn grid(&self) -> Result<Grid, CliError> {
        Ok(Grid::centered(self.model.dim, self.grid.n, self.grid.spacing)?)
    }

    pub fn source_spec(&self) -> Result<SourceSpec, CliError> {
        let mu_c: Vec<Bump> = self.source.mu_c.iter().map(Bump::from).collect();
        let mu_r: Vec<Bump> = self.source.mu_r.iter().map(Bump::from).collect();
        let spec = SourceSpec::from_bumps(self.grid()?, self.model.m, &mu_c, &mu_r, Region::from(&self.source.domain))?;
        Ok(match &self.potential {
            Some(p) => {
                let bumps: Vec<Bump> = p.bumps.iter().map(Bump::from).collect();
                spec.with_potential(Region::from(&p.region), move |x| {
                    Complex64::new(bumps.iter().map(|b| b.value(&x)).sum(), 0.0)
                })?
            }
            None => spec,
        })
    }

    pub fn born(&self) -> Result<BornConfig, CliError> {
        let t = &self.tolerances;
        let cfg = BornConfig {
            max_terms: t.max_terms,
            contraction_tol: t.contraction_tol,
            method: t.method,
            pad: t.pad,
            ..BornConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn directions(&self) -> Vec<Vec<f64>> {
        default_directions(self.model.dim, self.sweep.directions)
    }

    pub fn tau_grid(&self) -> Vec<f64> {
        aligned_tau_grid(self.sweep.bands[0], self.sweep.nk, self.sweep.tau_spacing, self.sweep.tau_max)
    }

    /// Forward wavenumbers, sorted and deduplicated.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let mut ks = match &self.sweep.wavenumbers {
            Some(ks) => ks.clone(),
            None => {
                let taus = self.tau_grid();
                self.sweep.bands.iter().flat_map(|&b| required_wavenumbers(b, self.sweep.nk, &taus)).collect()
            }
        };
        ks.sort_by(f64::total_cmp);
        ks.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * b.abs().max(1.0));
        ks
    }

    /// Separating normal of the source and potential supports; without a
    /// potential every hyperplane separates and the first axis is used.
    pub fn normal(&self, spec: &SourceSpec) -> Result<SeparatingNormal, CliError> {
        let d = self.model.dim;
        let Some(q) = spec.potential_values() else {
            let mut n_hat = vec![0.0; d];
            n_hat[0] = 1.0;
            return Ok(SeparatingNormal { n_hat, offset: 0.0, gap: 0.0 });
        };
        let support = |keep: &dyn Fn(usize) -> bool| -> Vec<Vec<f64>> {
            (0..spec.grid.len()).filter(|&i| keep(i)).map(|i| spec.grid.point(i)[..d].to_vec()).collect()
        };
        let dp = support(&|i| spec.mu_c[i] > 0.0);
        let up = support(&|i| q[i].norm() > 0.0);
        if dp.is_empty() || up.is_empty() {
            let mut n_hat = vec![0.0; d];
            n_hat[0] = 1.0;
            return Ok(SeparatingNormal { n_hat, offset: 0.0, gap: 0.0 });
        }
        Ok(compute_separating_normal(&dp, &up)?)
    }

    pub fn recovery(&self, spec: &SourceSpec, directions: Vec<Vec<f64>>) -> Result<RecoveryConfig, CliError> {
        let cfg = RecoveryConfig {
            k_values: self.sweep.bands.clone(),
            nk: self.sweep.nk,
            tau_grid: self.tau_grid(),
            directions,
            normal: self.normal(spec)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn out_dir(&self) -> &Path {
        &self.output.dir
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[model]
dim = 1
alpha = 0.8
m = 0.9

[grid]
n = 256
spacing = 0.04

[source]
domain = { kind = "box", lo = [-2.0], hi = [2.0] }
mu_c = [{ center = [0.0], radius = 2.0, amplitude = 1.0 }]
"#;

    #[test]
    fn minimal_config_takes_defaults() {
        let c = ExperimentConfig::parse(MINIMAL).unwrap();
        assert_eq!(c.sweep.seeds, vec![1]);
        assert_eq!(c.tolerances.method, ResolventMethod::Kernel);
        assert!(c.potential.is_none());
        assert_eq!(c.source_spec().unwrap().mu_r, vec![0.0; 256]);
    }

    #[test]
    fn unknown_fields_are_reported_with_location() {
        let text = MINIMAL.replace("m = 0.9", "m = 0.9\nbeta = 1.0");
        match ExperimentConfig::parse(&text) {
            Err(CliError::Validation(msg)) => {
                assert!(msg.contains("beta"), "{msg}");
                assert!(msg.contains("line"), "{msg}");
            }
            other => panic!("expected a validation error, got {other:?}"),
        }
    }

    #[test]
    fn coordinate_counts_are_checked() {
        let text = MINIMAL.replace("center = [0.0]", "center = [0.0, 1.0]");
        assert!(matches!(ExperimentConfig::parse(&text), Err(CliError::Validation(m)) if m.contains("source.mu_c[0].center")));
    }

    #[test]
    fn hash_ignores_the_output_location() {
        let a = ExperimentConfig::parse(MINIMAL).unwrap();
        let mut b = a.clone();
        b.output.dir = PathBuf::from("/elsewhere");
        assert_eq!(a.hash(), b.hash());
        b.model.alpha = 0.7;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
