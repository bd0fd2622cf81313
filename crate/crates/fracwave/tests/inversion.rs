use fracwave::forward::*;
use fracwave::gmig::{sample_field, Bump, Region, SourceSpec};
use fracwave::greens::ModelParams;
use fracwave::grid::Grid;
use fracwave::inversion::*;
use fracwave::Error;
use num_complex::Complex64;

const ALPHA: f64 = 0.8;
const M: f64 = 0.9;

fn normal_1d() -> SeparatingNormal {
    SeparatingNormal { n_hat: vec![-1.0], offset: 2.25, gap: 0.5 }
}

fn config(k: f64, nk: usize, taus: Vec<f64>) -> RecoveryConfig {
    RecoveryConfig { k_values: vec![k], nk, tau_grid: taus, directions: vec![vec![-1.0], vec![1.0]], normal: normal_1d() }
}

/// Table over the given wavenumbers with u_inf = value(direction, k) in
/// the F0 slot.
fn synthetic_table(ks: &[f64], dirs: Vec<Vec<f64>>, value: impl Fn(usize, f64) -> Complex64) -> FarFieldTable {
    let nd = dirs.len();
    let mut t = FarFieldTable::new(1, ALPHA, M, 0, dirs);
    for &k in ks {
        let entries = (0..nd)
            .map(|j| {
                let v = value(j, k);
                FarFieldEntry { direction: j, k, f0: v, f1: Complex64::new(0.0, 0.0), f2: Complex64::new(0.0, 0.0), u_inf: v }
            })
            .collect();
        t.insert(k, entries).unwrap();
    }
    t
}

fn wave(j: usize, k: f64) -> Complex64 {
    Complex64::from_polar(1.0 + 0.1 * j as f64 + 0.01 * k, 0.7 * k + j as f64)
}

#[test]
fn estimators_scale_quadratically_in_the_data() {
    let cfg = config(8.0, 9, vec![0.0, 1.0, 2.0]);
    let ks = required_wavenumbers(8.0, 9, &cfg.tau_grid);
    let c = Complex64::new(0.6, -1.3);
    let a = synthetic_table(&ks, cfg.directions.clone(), wave);
    let b = synthetic_table(&ks, cfg.directions.clone(), |j, k| c * wave(j, k));
    let x = [-1.0];
    for &tau in &cfg.tau_grid {
        let (ca, cb) = (correlate_covariance(&a, &x, tau, 8.0, &cfg).unwrap(), correlate_covariance(&b, &x, tau, 8.0, &cfg).unwrap());
        let (ra, rb) = (correlate_relation(&a, &x, tau, 8.0, &cfg).unwrap(), correlate_relation(&b, &x, tau, 8.0, &cfg).unwrap());
        assert!((cb - ca * c.norm_sqr()).norm() <= 1e-13 * cb.norm());
        assert!((rb - ra * c * c).norm() <= 1e-13 * rb.norm());
    }
}

#[test]
fn zero_data_give_zero_estimates() {
    let cfg = config(8.0, 9, vec![0.0, 1.0]);
    let ks = required_wavenumbers(8.0, 9, &cfg.tau_grid);
    let t = synthetic_table(&ks, cfg.directions.clone(), |_, _| Complex64::new(0.0, 0.0));
    assert_eq!(correlate_covariance(&t, &[-1.0], 1.0, 8.0, &cfg).unwrap(), Complex64::new(0.0, 0.0));
    assert_eq!(correlate_relation(&t, &[-1.0], 0.0, 8.0, &cfg).unwrap(), Complex64::new(0.0, 0.0));
}

#[test]
fn band_average_uses_the_trapezoid_rule_and_frequency_weight() {
    let cfg = config(8.0, 9, vec![0.0]);
    let ks = required_wavenumbers(8.0, 9, &cfg.tau_grid);
    let t = synthetic_table(&ks, cfg.directions.clone(), |_, _| Complex64::new(1.0, 0.0));
    let got = correlate_covariance(&t, &[-1.0], 0.0, 8.0, &cfg).unwrap();
    let w = weight_exponent(1, ALPHA, M);
    let mut sum = 0.0;
    for (j, k) in band_nodes(8.0, 9).iter().enumerate() {
        let end = if j == 0 || j == 8 { 0.5 } else { 1.0 };
        sum += end * k.powf(w);
    }
    let want = 4.0 * ALPHA * ALPHA * sum / 8.0;
    assert!((got.re - want).abs() <= 1e-13 * want && got.im == 0.0);
}

#[test]
fn missing_wavenumbers_are_reported() {
    let cfg = config(8.0, 9, vec![0.0, 1.0]);
    let ks: Vec<f64> = band_nodes(8.0, 9);
    let t = synthetic_table(&ks, cfg.directions.clone(), wave);
    assert!(correlate_covariance(&t, &[-1.0], 0.0, 8.0, &cfg).is_ok());
    match correlate_covariance(&t, &[-1.0], 1.0, 8.0, &cfg) {
        Err(Error::Coverage(msg)) => assert!(msg.contains("17.000000"), "{msg}"),
        other => panic!("expected a coverage error, got {other:?}"),
    }
}

#[test]
fn relation_needs_the_opposite_direction() {
    let mut cfg = config(8.0, 9, vec![0.0]);
    cfg.directions = vec![vec![-1.0]];
    let ks = required_wavenumbers(8.0, 9, &cfg.tau_grid);
    let t = synthetic_table(&ks, cfg.directions.clone(), wave);
    assert!(correlate_covariance(&t, &[-1.0], 0.0, 8.0, &cfg).is_ok());
    assert!(matches!(correlate_relation(&t, &[-1.0], 0.0, 8.0, &cfg), Err(Error::Coverage(_))));
}

#[test]
fn far_hemisphere_is_refused() {
    let cfg = config(8.0, 9, vec![0.0]);
    let ks = required_wavenumbers(8.0, 9, &cfg.tau_grid);
    let t = synthetic_table(&ks, cfg.directions.clone(), wave);
    assert!(matches!(correlate_covariance(&t, &[1.0], 0.0, 8.0, &cfg), Err(Error::Geometry(_))));
    assert!(matches!(correlate_relation(&t, &[1.0], 0.0, 8.0, &cfg), Err(Error::Geometry(_))));
    assert_eq!(cfg.estimator_directions(), vec![0]);
}

#[test]
fn configuration_is_validated() {
    let mut cfg = config(8.0, 9, vec![0.0, 3.0]);
    assert!(cfg.validate().is_err());
    cfg.tau_grid = vec![0.0, 1.0];
    assert!(cfg.validate().is_ok());
    cfg.nk = 1;
    assert!(cfg.validate().is_err());
    cfg.nk = 9;
    cfg.k_values = vec![16.0, 8.0];
    assert!(cfg.validate().is_err());
    cfg.k_values = vec![8.0];
    cfg.tau_grid = vec![-1.0, 0.0];
    assert!(cfg.validate().is_err());
}

#[test]
fn default_geometries_have_the_expected_normals() {
    let s1 = SourceSpec::default_1d(256, 0.04, 0.9, 1.0).unwrap();
    let s2 = SourceSpec::default_2d(64, 0.05, 1.2, 1.0).unwrap();
    for (s, want) in [(s1, vec![-1.0]), (s2, vec![1.0, 0.0])] {
        let d = s.grid.dim();
        let dp: Vec<Vec<f64>> =
            s.grid.points().zip(&s.mu_c).filter(|(_, c)| **c > 0.0).map(|(x, _)| x[..d].to_vec()).collect();
        let q = s.potential_values().unwrap();
        let up: Vec<Vec<f64>> = s.grid.points().zip(q).filter(|(_, v)| v.norm() > 0.0).map(|(x, _)| x[..d].to_vec()).collect();
        let n = compute_separating_normal(&dp, &up).unwrap();
        for (a, b) in n.n_hat.iter().zip(&want) {
            assert!((a - b).abs() < 1e-9, "{:?}", n.n_hat);
        }
        assert!(dp.iter().all(|p| n.side(p) > 0.0) && up.iter().all(|p| n.side(p) < 0.0));
    }
}

#[test]
fn real_sources_give_equal_covariance_and_relation_estimates() {
    // with mu_r = mu_c the field is real, F0(-x) is a unimodular multiple of
    // conj F0(x), and the two estimators coincide for every offset
    let g = Grid::centered(1, 256, 0.04).unwrap();
    let spec = SourceSpec::from_bumps(
        g,
        M,
        &[Bump::new(vec![0.0], 1.0, 1.0)],
        &[Bump::new(vec![0.0], 1.0, 1.0)],
        Region::Box { lo: vec![-1.0], hi: vec![1.0] },
    )
    .unwrap();
    let field = sample_field(&spec, 5).unwrap();
    assert!(field.samples.values.iter().all(|z| z.im == 0.0));
    let cfg = config(16.0, 17, vec![0.0, 1.0, 2.0]);
    let ks = required_wavenumbers(16.0, 17, &cfg.tau_grid);
    let base = ModelParams::new(1, ALPHA, M, 16.0).unwrap();
    let out = far_field_sweep(&spec, &field, &base, &BornConfig::default(), &cfg.directions, &ks);
    let (table, _) = FarFieldTable::from_sweep(1, ALPHA, M, 5, cfg.directions.clone(), out).unwrap();
    for &tau in &cfg.tau_grid {
        let c = correlate_covariance(&table, &[-1.0], tau, 16.0, &cfg).unwrap();
        let r = correlate_relation(&table, &[-1.0], tau, 16.0, &cfg).unwrap();
        assert!((c - r).norm() <= 1e-12 * c.norm(), "tau = {tau}: {c} vs {r}");
    }
}

#[test]
fn recovery_reports_one_reconstruction_per_band() {
    let mut cfg = config(8.0, 9, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
    cfg.k_values = vec![8.0, 16.0];
    cfg.nk = 17;
    let mut ks: Vec<f64> = cfg.k_values.iter().flat_map(|k| required_wavenumbers(*k, 17, &cfg.tau_grid)).collect();
    ks.sort_by(f64::total_cmp);
    ks.dedup();
    let t = synthetic_table(&ks, cfg.directions.clone(), wave);
    let grid = Grid::centered(1, 64, 0.1).unwrap();
    let rep = recover(&t, &cfg, &grid).unwrap();
    assert_eq!(rep.bands.len(), 2);
    assert_eq!(rep.reconstructions.len(), 2);
    assert_eq!(rep.bands[1].band_start, 16.0);
    for r in &rep.reconstructions {
        assert_eq!(r.mu_c.len(), 64);
        assert!(r.mu_c.iter().all(|v| v.is_finite()));
    }
}

fn box_cells(lo: &[f64], size: &[f64], n: usize) -> Vec<Vec<f64>> {
    let d = lo.len();
    let total = n.pow(d as u32);
    (0..total)
        .map(|mut i| {
            (0..d)
                .map(|a| {
                    let j = i % n;
                    i /= n;
                    lo[a] + size[a] * (j as f64 + 0.5) / n as f64
                })
                .collect()
        })
        .collect()
}

proptest::proptest! {
    #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]

    #[test]
    fn disjoint_boxes_are_separated(
        d in 2usize..=3,
        axis in 0usize..3,
        gap in 0.05f64..1.0,
        lo in proptest::collection::vec(-2.0f64..2.0, 6),
        size in proptest::collection::vec(0.2f64..1.5, 6),
    ) {
        let axis = axis % d;
        let a_lo = lo[..d].to_vec();
        let a_size = size[..d].to_vec();
        let mut b_lo = lo[3..3 + d].to_vec();
        b_lo[axis] = a_lo[axis] + a_size[axis] + gap;
        let b_size = size[3..3 + d].to_vec();
        let dp = box_cells(&a_lo, &a_size, 6);
        let up = box_cells(&b_lo, &b_size, 6);
        let n = compute_separating_normal(&dp, &up).unwrap();
        let norm: f64 = n.n_hat.iter().map(|v| v * v).sum::<f64>().sqrt();
        proptest::prop_assert!((norm - 1.0).abs() < 1e-12);
        proptest::prop_assert!(dp.iter().all(|p| n.side(p) > 0.0));
        proptest::prop_assert!(up.iter().all(|p| n.side(p) < 0.0));
        proptest::prop_assert!(n.gap >= gap - 1e-9);
    }
}
