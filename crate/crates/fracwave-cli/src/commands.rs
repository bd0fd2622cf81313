//! The five subcommands. Every command writes its outputs under the output
//! directory next to a `<name>.manifest.json` carrying the configuration hash.

use crate::config::{ExperimentConfig, GreenPolicy, RegionBlock};
use crate::error::CliError;
use fracwave::forward::{far_field_sweep, BornCertificate, FarFieldTable};
use fracwave::gmig::{kernel_eval, sample_field, validate_assumption, KernelKind, LatticeCorrelation, SourceSpec};
use fracwave::greens::{green_with, Policy};
use fracwave::inversion::{fourier_transform_on_grid, recover, relative_symbol_error};
use fracwave::io::write_grid_binary;
use fracwave::oracle::{complex_mean, green_delta_pv, PVQuadSpec};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

/// Writes `bytes` to `path` through a temporary file so that an interrupted
/// run never leaves a truncated output behind.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

fn write_manifest(cfg: &ExperimentConfig, command: &str, files: &[PathBuf]) -> Result<(), CliError> {
    let names: Vec<String> = files.iter().map(|p| p.file_name().unwrap().to_string_lossy().into_owned()).collect();
    let manifest = json!({
        "command": command,
        "config_hash": cfg.hash(),
        "seed": cfg.seed(),
        "files": names,
    });
    write_json(&cfg.out_dir().join(format!("{command}.manifest.json")), &manifest)
}

fn prepare_out(cfg: &ExperimentConfig) -> Result<(), CliError> {
    fs::create_dir_all(cfg.out_dir())
        .map_err(|e| CliError::Validation(format!("cannot create output directory {}: {e}", cfg.out_dir().display())))
}

fn relative_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    if den > 0.0 {
        (num / den).sqrt()
    } else {
        num.sqrt()
    }
}

/// Admissibility, Nyquist and solver-setting checks shared by `validate` and
/// `forward`.
fn checks(cfg: &ExperimentConfig, spec: &SourceSpec) -> Result<serde_json::Value, CliError> {
    let ks = cfg.wavenumbers();
    let k_min = ks.first().copied().unwrap_or(cfg.sweep.bands[0]);
    let k_max = ks.last().copied().unwrap_or(cfg.sweep.bands[0]);
    let assumption = validate_assumption(&cfg.params(k_min)?, spec);
    let tau_max = cfg.tau_grid().last().copied().unwrap_or(0.0);
    let nyquist = spec.grid.nyquist();
    let required = 2.0 * k_max + tau_max;
    let born = cfg.born().map(|_| ()).map_err(|e| e.to_string());
    let recovery = cfg.recovery(spec, cfg.directions()).map(|r| r.normal).map_err(|e| e.to_string());
    let passed = assumption.all_passed() && nyquist > required && born.is_ok() && recovery.is_ok();
    Ok(json!({
        "config_hash": cfg.hash(),
        "passed": passed,
        "assumption": assumption,
        "nyquist": { "nyquist": nyquist, "required": required, "passed": nyquist > required },
        "born": match &born { Ok(()) => json!({ "passed": true }), Err(e) => json!({ "passed": false, "detail": e }) },
        "recovery": match &recovery {
            Ok(n) => json!({ "passed": true, "normal": n }),
            Err(e) => json!({ "passed": false, "detail": e }),
        },
        "wavenumbers": ks.len(),
    }))
}

fn failure_summary(report: &serde_json::Value) -> String {
    let mut parts = Vec::new();
    if let Some(checks) = report["assumption"]["checks"].as_array() {
        for c in checks.iter().filter(|c| c["passed"] == false) {
            parts.push(format!("{}: {}", c["name"].as_str().unwrap_or("?"), c["detail"].as_str().unwrap_or("")));
        }
    }
    if report["nyquist"]["passed"] == false {
        parts.push(format!(
            "grid Nyquist {:.3} does not exceed 2 k_max + tau_max = {:.3}",
            report["nyquist"]["nyquist"].as_f64().unwrap_or(0.0),
            report["nyquist"]["required"].as_f64().unwrap_or(0.0)
        ));
    }
    for key in ["born", "recovery"] {
        if report[key]["passed"] == false {
            parts.push(format!("{key}: {}", report[key]["detail"].as_str().unwrap_or("")));
        }
    }
    parts.join("; ")
}

pub fn validate(cfg: &ExperimentConfig) -> Result<(), CliError> {
    prepare_out(cfg)?;
    let spec = cfg.source_spec()?;
    let report = checks(cfg, &spec)?;
    let path = cfg.out_dir().join("validate.json");
    write_json(&path, &report)?;
    write_manifest(cfg, "validate", &[path])?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    if report["passed"] == true {
        Ok(())
    } else {
        Err(CliError::Validation(failure_summary(&report)))
    }
}

pub fn green_eval(cfg: &ExperimentConfig, asymptotic_only: bool) -> Result<(), CliError> {
    prepare_out(cfg)?;
    let policy = match (asymptotic_only, cfg.green.policy) {
        (true, _) => Policy::AsymptoticOnly,
        (false, GreenPolicy::Hybrid) => Policy::Hybrid,
        (false, GreenPolicy::Contour) => Policy::ContourOnly,
    };
    let spec = PVQuadSpec::default();
    let rows: Vec<Result<String, CliError>> = cfg
        .green
        .points
        .par_iter()
        .map(|&[k, x]| {
            let p = cfg.params(k)?;
            let g = green_with(x, &p, policy)?;
            let oracle = if cfg.green.oracle {
                let o = green_delta_pv(x, &p, &spec)?.total();
                let rel = (g.value - o).norm() / o.norm();
                format!("{:.16e},{:.16e},{:.6e}", o.re, o.im, rel)
            } else {
                ",,".to_string()
            };
            Ok(format!(
                "{},{},{},{},{:.16e},{:.16e},{},{:.6e},{}",
                p.d, p.alpha, k, x, g.value.re, g.value.im, g.method, g.err_est, oracle
            ))
        })
        .collect();
    let mut text = String::from("d,alpha,k,x,re,im,method,err_est,oracle_re,oracle_im,rel_diff\n");
    for r in rows {
        text.push_str(&r?);
        text.push('\n');
    }
    let path = cfg.out_dir().join("green.csv");
    write_atomic(&path, text.as_bytes())?;
    write_manifest(cfg, "green-eval", &[path])
}

/// Grid cell nearest to the centre of the source domain.
fn domain_centre_index(cfg: &ExperimentConfig, spec: &SourceSpec) -> usize {
    let d = cfg.model.dim;
    let c: Vec<f64> = match &cfg.source.domain {
        RegionBlock::Box { lo, hi } => lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect(),
        RegionBlock::Ball { center, .. } => center.clone(),
    };
    (0..spec.grid.len())
        .min_by(|&a, &b| {
            let da: f64 = spec.grid.point(a)[..d].iter().zip(&c).map(|(x, y)| (x - y) * (x - y)).sum();
            let db: f64 = spec.grid.point(b)[..d].iter().zip(&c).map(|(x, y)| (x - y) * (x - y)).sum();
            da.total_cmp(&db)
        })
        .unwrap_or(0)
}

#[derive(Serialize)]
struct MomentCheck {
    i: usize,
    j: usize,
    kind: &'static str,
    kernel: [f64; 2],
    mc_mean: [f64; 2],
    std_error: f64,
    deviation: f64,
    passed: bool,
}

pub fn sample_field_cmd(cfg: &ExperimentConfig) -> Result<(), CliError> {
    prepare_out(cfg)?;
    let spec = cfg.source_spec()?;
    let seed = cfg.seed();
    let field = sample_field(&spec, seed)?;
    let bin = cfg.out_dir().join(format!("field_seed{seed}.bin"));
    let mut buf = Vec::new();
    write_grid_binary(&field.samples, &mut buf)?;
    write_atomic(&bin, &buf)?;

    // Monte-Carlo moment report at three pairs along the last axis
    let g = &spec.grid;
    let base = domain_centre_index(cfg, &spec);
    let idx = g.unflatten(base);
    let last = g.dim() - 1;
    let pairs: Vec<(usize, usize)> = [1usize, 3, 8]
        .iter()
        .filter(|&&s| idx[last] + s < g.shape[last])
        .map(|&s| {
            let mut j = idx;
            j[last] += s;
            (base, g.flatten(&j[..g.dim()]))
        })
        .collect();
    let draws: Vec<Vec<Complex64>> = (0..cfg.tolerances.mc_seeds)
        .into_par_iter()
        .map(|sd| {
            sample_field(&spec, sd).map(|f| {
                let v = &f.samples.values;
                pairs.iter().flat_map(|&(i, j)| [v[i].conj() * v[j], v[i] * v[j]]).collect()
            })
        })
        .collect::<Result<_, _>>()?;
    let corr = LatticeCorrelation::new(g, spec.m);
    let mut report = Vec::new();
    for (n, &(i, j)) in pairs.iter().enumerate() {
        for (slot, kind, name) in [(2 * n, KernelKind::Covariance, "covariance"), (2 * n + 1, KernelKind::Relation, "relation")] {
            let xs: Vec<Complex64> = draws.iter().map(|v| v[slot]).collect();
            let m = complex_mean(&xs);
            let want = kernel_eval(kind, &spec, &corr, i, j)?;
            let diff = (m.mean - want).norm();
            let deviation = if m.std_error > 0.0 { diff / m.std_error } else if diff == 0.0 { 0.0 } else { f64::INFINITY };
            report.push(MomentCheck {
                i,
                j,
                kind: name,
                kernel: [want.re, want.im],
                mc_mean: [m.mean.re, m.mean.im],
                std_error: m.std_error,
                deviation,
                passed: deviation <= cfg.tolerances.mc_sigma,
            });
        }
    }
    let all = report.iter().all(|c| c.passed);
    let stats = json!({
        "config_hash": cfg.hash(),
        "seed": seed,
        "field": bin.file_name().unwrap().to_string_lossy(),
        "spectral_floor": field.spectral_floor,
        "mc_seeds": cfg.tolerances.mc_seeds,
        "sigma": cfg.tolerances.mc_sigma,
        "checks": report,
        "all_passed": all,
    });
    let stats_path = cfg.out_dir().join(format!("field_seed{seed}_stats.json"));
    write_json(&stats_path, &stats)?;
    write_manifest(cfg, "sample-field", &[bin, stats_path])
}

/// Sidecar of the far-field table: configuration hash, certificates of the
/// solved wavenumbers and wavenumbers whose Born series was refused.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ForwardState {
    pub config_hash: String,
    pub seed: u64,
    pub certificates: Vec<BornCertificate>,
    pub flagged: Vec<FlaggedWavenumber>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FlaggedWavenumber {
    pub k: f64,
    pub error: String,
}

pub fn table_paths(cfg: &ExperimentConfig) -> (PathBuf, PathBuf) {
    let seed = cfg.seed();
    (cfg.out_dir().join(format!("farfield_seed{seed}.csv")), cfg.out_dir().join(format!("farfield_seed{seed}.json")))
}

pub fn forward(cfg: &ExperimentConfig) -> Result<(), CliError> {
    prepare_out(cfg)?;
    let spec = cfg.source_spec()?;
    let report = checks(cfg, &spec)?;
    if report["passed"] != true {
        return Err(CliError::Validation(failure_summary(&report)));
    }
    let seed = cfg.seed();
    let hash = cfg.hash();
    let dirs = cfg.directions();
    let (csv_path, state_path) = table_paths(cfg);
    let (mut table, mut state) = if csv_path.exists() {
        let state: ForwardState = serde_json::from_reader(BufReader::new(File::open(&state_path).map_err(|e| {
            CliError::Validation(format!("{} exists without its sidecar {}: {e}", csv_path.display(), state_path.display()))
        })?))?;
        if state.config_hash != hash {
            return Err(CliError::Validation(format!(
                "{} was produced by a different configuration (hash {}); remove it or choose another output directory",
                csv_path.display(),
                state.config_hash
            )));
        }
        let text = fs::read_to_string(&csv_path)?;
        let table = if text.lines().filter(|l| !l.trim().is_empty()).count() <= 1 {
            FarFieldTable::new(cfg.model.dim, cfg.model.alpha, cfg.model.m, seed, dirs.clone())
        } else {
            FarFieldTable::read_csv(text.as_bytes())?
        };
        let mut state = state;
        state.certificates.retain(|c| table.k_index(c.k).is_some());
        (table, state)
    } else {
        let table = FarFieldTable::new(cfg.model.dim, cfg.model.alpha, cfg.model.m, seed, dirs.clone());
        (table, ForwardState { config_hash: hash, seed, ..Default::default() })
    };
    let done = |k: f64, table: &FarFieldTable, state: &ForwardState| {
        table.k_index(k).is_some() || state.flagged.iter().any(|f| (f.k - k).abs() <= 1e-9 * k.abs().max(1.0))
    };
    let missing: Vec<f64> = cfg.wavenumbers().into_iter().filter(|&k| !done(k, &table, &state)).collect();
    let field = sample_field(&spec, seed)?;
    let base = cfg.params(cfg.sweep.bands[0])?;
    let born = cfg.born()?;
    let persist = |table: &FarFieldTable, state: &ForwardState| -> Result<(), CliError> {
        let mut buf = Vec::new();
        table.write_csv(&mut buf)?;
        write_atomic(&csv_path, &buf)?;
        write_json(&state_path, state)
    };
    for chunk in missing.chunks(cfg.tolerances.chunk.max(1)) {
        for o in far_field_sweep(&spec, &field, &base, &born, &dirs, chunk) {
            match o.result {
                Ok((entries, cert)) => {
                    table.insert(o.k, entries)?;
                    state.certificates.push(cert);
                }
                Err(e) => state.flagged.push(FlaggedWavenumber { k: o.k, error: e.to_string() }),
            }
        }
        state.certificates.sort_by(|a, b| a.k.total_cmp(&b.k));
        state.flagged.sort_by(|a, b| a.k.total_cmp(&b.k));
        persist(&table, &state)?;
    }
    if missing.is_empty() && !csv_path.exists() {
        persist(&table, &state)?;
    }
    table.check_invariants()?;
    eprintln!(
        "forward: {} new wavenumbers, {} in table, {} flagged",
        missing.len(),
        table.wavenumbers.len(),
        state.flagged.len()
    );
    write_manifest(cfg, "forward", &[csv_path, state_path])
}

pub fn recover_cmd(cfg: &ExperimentConfig, table_path: Option<&Path>) -> Result<(), CliError> {
    prepare_out(cfg)?;
    let spec = cfg.source_spec()?;
    let path = table_path.map(Path::to_path_buf).unwrap_or_else(|| table_paths(cfg).0);
    let file = File::open(&path).map_err(|e| CliError::Validation(format!("cannot open far-field table {}: {e}", path.display())))?;
    let table = FarFieldTable::read_csv(BufReader::new(file))?;
    if table.dim != cfg.model.dim || table.alpha != cfg.model.alpha || table.m != cfg.model.m {
        return Err(CliError::Validation(format!(
            "table model (d = {}, alpha = {}, m = {}) does not match the configuration",
            table.dim, table.alpha, table.m
        )));
    }
    let rc = cfg.recovery(&spec, table.directions.clone())?;
    let report = recover(&table, &rc, &spec.grid)?;
    let seed = table.seed;
    let mut files = Vec::new();
    let mut bands = Vec::new();
    let d = spec.grid.dim();
    for (b, r) in report.bands.iter().zip(&report.reconstructions) {
        let ec = relative_symbol_error(&b.covariance, |z| fourier_transform_on_grid(&spec.grid, &spec.mu_c, z));
        let er = relative_symbol_error(&b.relation, |z| fourier_transform_on_grid(&spec.grid, &spec.mu_r, z));
        bands.push(json!({
            "band_start": b.band_start,
            "symbol_error_c": ec,
            "symbol_error_r": er,
            "spatial_error_c": relative_l2(&r.mu_c, &spec.mu_c),
            "spatial_error_r": relative_l2(&r.mu_r, &spec.mu_r),
            "imag_residual_c": r.imag_residual_c,
            "imag_residual_r": r.imag_residual_r,
            "mirror_discrepancy": r.mirror_discrepancy,
            "covariance": b.covariance,
            "relation": b.relation,
        }));
        let csv = cfg.out_dir().join(format!("recovery_seed{seed}_K{}.csv", b.band_start));
        let mut w = BufWriter::new(Vec::new());
        let axes: Vec<String> = (0..d).map(|j| format!("x{j}")).collect();
        writeln!(w, "{},mu_c,mu_r,mu_c_true,mu_r_true", axes.join(","))?;
        for i in 0..spec.grid.len() {
            let x = spec.grid.point(i);
            let coords: Vec<String> = x[..d].iter().map(|v| format!("{v}")).collect();
            writeln!(w, "{},{:.10e},{:.10e},{:.10e},{:.10e}", coords.join(","), r.mu_c[i], r.mu_r[i], spec.mu_c[i], spec.mu_r[i])?;
        }
        write_atomic(&csv, &w.into_inner().map_err(|e| CliError::from(e.into_error()))?)?;
        files.push(csv);
    }
    let out = json!({
        "config_hash": cfg.hash(),
        "table": path.display().to_string(),
        "seed": seed,
        "normal": rc.normal,
        "tau_grid": rc.tau_grid,
        "bands": bands,
    });
    let json_path = cfg.out_dir().join(format!("recovery_seed{seed}.json"));
    write_json(&json_path, &out)?;
    files.push(json_path);
    write_manifest(cfg, "recover", &files)
}
