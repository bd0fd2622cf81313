use fracwave::gmig::*;
use fracwave::greens::ModelParams;
use fracwave::grid::{Grid, GridField};
use fracwave::io::{read_grid_binary, write_grid_binary, write_grid_csv};
use fracwave::oracle::{complex_mean, jarque_bera};
use num_complex::Complex64;
use proptest::prelude::*;

fn small_1d() -> SourceSpec {
    SourceSpec::default_1d(128, 0.08, 0.8, 1.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn envelopes_reproduce_the_symbols(c in 0.0f64..10.0, t in 0.0f64..=1.0) {
        let r = c * t;
        let (p1, p2) = derive_envelopes(&[c], &[r]).unwrap();
        prop_assert!((p1[0] * p1[0] + p2[0] * p2[0] - c).abs() <= 1e-12 * c.max(1.0));
        prop_assert!((p1[0] * p1[0] - p2[0] * p2[0] - r).abs() <= 1e-12 * c.max(1.0));
        prop_assert!(p1[0] >= p2[0]);
    }

    #[test]
    fn relation_above_covariance_is_rejected(c in 0.0f64..10.0, extra in 1e-6f64..5.0) {
        prop_assert!(derive_envelopes(&[c], &[c + extra]).is_err());
    }
}

#[test]
fn negative_symbols_are_rejected() {
    assert!(derive_envelopes(&[-1.0], &[0.0]).is_err());
    assert!(derive_envelopes(&[1.0], &[-0.5]).is_err());
    assert!(derive_envelopes(&[1.0, 2.0], &[0.5]).is_err());
}

#[test]
fn samples_are_reproducible_and_seed_dependent() {
    let s = small_1d();
    let a = sample_field(&s, 11).unwrap();
    assert_eq!(a, sample_field(&s, 11).unwrap());
    assert_ne!(a.samples.values, sample_field(&s, 12).unwrap().samples.values);
    assert_eq!(a.seed, 11);
    assert!((a.spectral_floor - 2.0 * std::f64::consts::PI / (128.0 * 0.08)).abs() < 1e-14);
}

#[test]
fn samples_vanish_outside_the_source_region() {
    let s = small_1d();
    let f = sample_field(&s, 5).unwrap();
    for (i, x) in s.grid.points().enumerate() {
        if !s.domain.contains(&x[..1]) {
            assert_eq!(f.samples.values[i], Complex64::new(0.0, 0.0), "x = {}", x[0]);
        }
    }
    assert!(f.samples.values.iter().any(|z| z.norm() > 0.0));
}

#[test]
fn zero_symbols_give_zero_kernels_and_fields() {
    let g = Grid::centered(1, 64, 0.1).unwrap();
    let s = SourceSpec::new(g.clone(), 0.8, vec![0.0; 64], vec![0.0; 64], Region::Box { lo: vec![-1.0], hi: vec![1.0] }).unwrap();
    let corr = LatticeCorrelation::new(&g, 0.8);
    assert_eq!(kernel_eval(KernelKind::Covariance, &s, &corr, 3, 9).unwrap(), Complex64::new(0.0, 0.0));
    assert_eq!(kernel_eval(KernelKind::Relation, &s, &corr, 3, 9).unwrap(), Complex64::new(0.0, 0.0));
    assert!(sample_field(&s, 1).unwrap().samples.values.iter().all(|z| z.norm() == 0.0));
}

#[test]
fn nonpositive_order_is_rejected() {
    let g = Grid::centered(1, 16, 0.1).unwrap();
    let dom = Region::Box { lo: vec![-0.5], hi: vec![0.5] };
    assert!(SourceSpec::new(g.clone(), 0.0, vec![1.0; 16], vec![0.0; 16], dom.clone()).is_err());
    assert!(SourceSpec::new(g, -1.0, vec![1.0; 16], vec![0.0; 16], dom).is_err());
}

#[test]
fn lattice_correlation_follows_the_continuum_power_law() {
    // dropping the zero mode shifts the lattice correlation by a constant, so
    // compare increments C(r) - C(r0)
    let m = 0.8;
    let g = Grid::centered(1, 4096, 0.01).unwrap();
    let corr = LatticeCorrelation::new(&g, m);
    let at = |cells: usize| corr.at(&[2048 + cells], &[2048]);
    let r0 = 40;
    for cells in [10usize, 20, 80] {
        let lat = at(cells) - at(r0);
        let cont = continuum_correlation_1d(m, cells as f64 * 0.01) - continuum_correlation_1d(m, r0 as f64 * 0.01);
        assert!((lat - cont).abs() <= 0.02 * cont.abs(), "r = {}: {lat} vs {cont}", cells as f64 * 0.01);
    }
}

#[test]
fn kernels_are_stationary_times_envelopes() {
    let s = small_1d();
    let corr = LatticeCorrelation::new(&s.grid, s.m);
    for (i, j) in [(60usize, 64usize), (50, 70), (64, 66)] {
        let c = kernel_eval(KernelKind::Covariance, &s, &corr, i, j).unwrap();
        let r = kernel_eval(KernelKind::Relation, &s, &corr, i, j).unwrap();
        let base = corr.at(&[i], &[j]);
        assert!((c.re - (s.phi1[i] * s.phi1[j] + s.phi2[i] * s.phi2[j]) * base).abs() < 1e-14 * base.abs());
        assert!((r.re - (s.phi1[i] * s.phi1[j] - s.phi2[i] * s.phi2[j]) * base).abs() < 1e-14 * base.abs());
        assert_eq!(c.im, 0.0);
    }
}

#[test]
fn monte_carlo_moments_match_the_kernels() {
    let s = small_1d();
    let corr = LatticeCorrelation::new(&s.grid, s.m);
    let seeds = 2000u64;
    let draws: Vec<Vec<Complex64>> = (0..seeds).map(|sd| sample_field(&s, sd).unwrap().samples.values).collect();
    for (i, j) in [(60usize, 64usize), (55, 70), (64, 65)] {
        let cov: Vec<Complex64> = draws.iter().map(|f| f[i].conj() * f[j]).collect();
        let rel: Vec<Complex64> = draws.iter().map(|f| f[i] * f[j]).collect();
        let (mc, mr) = (complex_mean(&cov), complex_mean(&rel));
        let kc = kernel_eval(KernelKind::Covariance, &s, &corr, i, j).unwrap();
        let kr = kernel_eval(KernelKind::Relation, &s, &corr, i, j).unwrap();
        assert!((mc.mean - kc).norm() <= 3.0 * mc.std_error, "cov ({i},{j}): {} vs {kc} (se {})", mc.mean, mc.std_error);
        assert!((mr.mean - kr).norm() <= 3.0 * mr.std_error, "rel ({i},{j}): {} vs {kr} (se {})", mr.mean, mr.std_error);
    }
    let centre: Vec<Complex64> = draws.iter().map(|f| f[64]).collect();
    let m = complex_mean(&centre);
    assert!(m.mean.norm() <= 3.0 * m.std_error);
    let re: Vec<f64> = centre.iter().map(|z| z.re).collect();
    let im: Vec<f64> = centre.iter().map(|z| z.im).collect();
    assert!(jarque_bera(&re).p_value > 1e-3);
    assert!(jarque_bera(&im).p_value > 1e-3);
}

#[test]
fn admissibility_examples() {
    let s2 = SourceSpec::default_2d(64, 0.05, 1.6, 1.0).unwrap();
    // d = 2, alpha = 0.5: m must exceed 1.5
    let ok = validate_assumption(&ModelParams::new(2, 0.5, 1.6, 10.0).unwrap(), &s2);
    assert!(ok.get("m_range").unwrap().passed);
    let bad = validate_assumption(&ModelParams::new(2, 0.5, 1.4, 10.0).unwrap(), &s2);
    assert!(!bad.get("m_range").unwrap().passed);
    assert!(validate_assumption(&ModelParams::new(2, 0.5, 2.0, 10.0).unwrap(), &s2).get("m_range").map(|c| !c.passed).unwrap());
    // d = 3 with m = 2 needs four derivatives of q
    let g3 = Grid::centered(3, 8, 0.25).unwrap();
    let s3 = SourceSpec::new(g3.clone(), 2.0, vec![0.0; g3.len()], vec![0.0; g3.len()], Region::Ball { center: vec![0.0; 3], radius: 0.5 })
        .unwrap()
        .with_potential(Region::Ball { center: vec![0.0, 0.0, 0.9], radius: 0.2 }, |_| Complex64::new(0.0, 0.0))
        .unwrap();
    let r3 = validate_assumption(&ModelParams::new(3, 0.8, 2.0, 5.0).unwrap(), &s3);
    assert_eq!(r3.smoothness_order, 4);
    let r1 = validate_assumption(&ModelParams::new(1, 0.2, 0.9, 5.0).unwrap(), &small_1d());
    assert!(!r1.all_passed());
    assert!(r1.failures().iter().any(|c| c.name == "alpha_range"));
}

#[test]
fn overlapping_supports_fail_separation() {
    let s = SourceSpec::default_1d(128, 0.08, 0.9, 1.0).unwrap();
    let s = s.with_potential(Region::Box { lo: vec![1.5], hi: vec![2.5] }, |x| {
        Complex64::new(if (1.5..=2.5).contains(&x[0]) { 1.0 } else { 0.0 }, 0.0)
    });
    let r = validate_assumption(&ModelParams::new(1, 0.8, 0.9, 5.0).unwrap(), &s.unwrap());
    assert!(!r.get("separation").unwrap().passed);
}

#[test]
fn sampled_fields_survive_serialization() {
    let s = small_1d();
    let f = sample_field(&s, 2).unwrap().samples;
    let mut buf = Vec::new();
    write_grid_binary(&f, &mut buf).unwrap();
    let back: GridField = read_grid_binary(&buf[..]).unwrap();
    assert_eq!(back.values, f.values);
    assert!(read_grid_binary(&buf[..buf.len() - 3]).is_err());
    let mut csv = Vec::new();
    write_grid_csv(&f, &mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert_eq!(text.lines().count(), 129);
    assert!(text.starts_with("x0,re,im"));
}
