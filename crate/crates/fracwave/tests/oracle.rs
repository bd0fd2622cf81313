use fracwave::forward::BornConfig;
use fracwave::gmig::Bump;
use fracwave::greens::{green_delta, homogeneous_constant, green_homogeneous, ModelParams};
use fracwave::grid::{Grid, GridField};
use fracwave::oracle::*;
use fracwave::Error;
use num_complex::Complex64;
use proptest::prelude::*;

#[test]
fn richardson_ladder_settles() {
    let spec = PVQuadSpec::default();
    for (d, alpha, k, x) in [(1usize, 0.6, 2.0, 1.5), (2, 0.8, 5.0, 0.3), (3, 0.6, 1.0, 7.0)] {
        let p = ModelParams::new(d, alpha, 1.0, k).unwrap();
        let e = green_delta_pv(x, &p, &spec).unwrap();
        let n = e.ladder.len();
        assert!(n >= 3);
        let last = (e.ladder[n - 1] - e.ladder[n - 2]).abs();
        let first = (e.ladder[1] - e.ladder[0]).abs();
        assert!(last <= first, "d={d}: {:?}", e.ladder);
        assert!(last <= 1e-8 * e.pv.abs(), "d={d}: {:?}", e.ladder);
        let g = green_delta(x, &p).unwrap().value;
        assert!((g.re - e.pv).abs() <= 1e-6 * e.pv.abs());
    }
}

#[test]
fn half_residue_is_the_homogeneous_correction() {
    for (d, alpha, k) in [(1usize, 0.7, 3.0), (2, 0.6, 1.5), (3, 0.9, 4.0)] {
        let p = ModelParams::new(d, alpha, 1.0, k).unwrap();
        for x in [0.1, 1.0, 6.5] {
            let want = homogeneous_constant(&p) * green_homogeneous(x, &p);
            let got = half_residue(x, &p);
            assert!((got - want).norm() <= 1e-13 * want.norm().max(1e-300), "d={d} x={x}: {got} vs {want}");
        }
    }
}

#[test]
fn oracle_rejects_the_origin() {
    let p = ModelParams::new(2, 0.7, 1.0, 1.0).unwrap();
    assert!(matches!(green_delta_pv(0.0, &p, &PVQuadSpec::default()), Err(Error::Singularity(_))));
}

fn probe_config(input: ProbeInput) -> DecayProbeConfig {
    DecayProbeConfig {
        grid: Grid::centered(1, 512, 0.02).unwrap(),
        ks: vec![8.0, 16.0, 32.0],
        weight_epsilon: 0.1,
        input,
        born: BornConfig::default(),
    }
}

#[test]
fn decay_probe_reports_the_bound_exponent() {
    let base = ModelParams::new(1, 0.8, 0.9, 8.0).unwrap();
    let cfg = probe_config(ProbeInput::Smooth(Bump::new(vec![0.0], 1.0, 1.0)));
    let pr = resolvent_decay_probe(&base, &cfg, 0.48, 2.0).unwrap();
    assert_eq!(pr.predicted, -0.48);
    assert_eq!(pr.norms.len(), 3);
    assert!(pr.norms.iter().all(|v| v.is_finite() && *v > 0.0));
    assert!((pr.slope - loglog_slope(&pr.ks, &pr.norms)).abs() < 1e-15);
    // a resolvent of order k^{1 - 2 alpha} or faster decays over the sweep
    assert!(pr.slope < 0.0, "{}", pr.slope);
    assert!(resolvent_decay_probe(&base, &cfg, 0.48, 1.0).is_err());
    assert!(resolvent_decay_probe(&base, &cfg, 0.0, 2.0).is_err());
}

#[test]
fn power_iteration_dominates_a_fixed_input() {
    let base = ModelParams::new(1, 0.8, 0.9, 8.0).unwrap();
    let smooth = resolvent_decay_probe(&base, &probe_config(ProbeInput::Smooth(Bump::new(vec![0.0], 1.0, 1.0))), 0.48, 2.0).unwrap();
    let worst = resolvent_decay_probe(&base, &probe_config(ProbeInput::WorstCase { steps: 20 }), 0.48, 2.0).unwrap();
    for (a, b) in smooth.norms.iter().zip(&worst.norms) {
        assert!(b >= a, "{a} vs {b}");
    }
}

#[test]
fn residual_of_an_exact_multiplier_solution_vanishes() {
    // u = f / (|xi0|^{2a} - k^{2a} + q) for a single periodic mode and constant q
    let g = Grid::centered(1, 128, 0.05).unwrap();
    let xi0 = 2.0 * std::f64::consts::PI * 7.0 / 6.4;
    let p = ModelParams::new(1, 0.6, 0.9, 2.5).unwrap();
    let q = vec![Complex64::new(0.3, 0.1); g.len()];
    let f = GridField::from_fn(&g, |x| Complex64::from_polar(1.0, xi0 * x[0]));
    let c = xi0.powf(1.2) - 2.5f64.powf(1.2) + q[0];
    let u = GridField { grid: g.clone(), values: f.values.iter().map(|v| v / c).collect() };
    assert!(fractional_pde_residual(&u, &f, Some(&q), &p) < 1e-12);
    assert!(fractional_pde_residual(&u, &f, None, &p) > 1e-2);
    assert!(fractional_pde_residual_within(&u, &f, Some(&q), &p, 1.0) < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn heavier_weights_give_larger_norms(s in -1.0f64..1.0, p in 1.0f64..4.0, d0 in -1.0f64..1.0, dd in 0.01f64..1.0) {
        let g = Grid::centered(1, 128, 0.05).unwrap();
        let f = GridField::from_real_fn(&g, |x| (-(x[0] - 1.0).powi(2)).exp());
        prop_assert!(weighted_norm(&f, s, p, d0 + dd) > weighted_norm(&f, s, p, d0));
    }

    #[test]
    fn smoother_norms_grow_with_order(s in -1.0f64..1.0, ds in 0.01f64..1.0) {
        let g = Grid::centered(1, 128, 0.05).unwrap();
        let f = GridField::from_real_fn(&g, |x| (-4.0 * x[0] * x[0]).exp());
        prop_assert!(weighted_norm(&f, s + ds, 2.0, 0.0) > weighted_norm(&f, s, 2.0, 0.0));
    }
}

#[test]
fn summary_statistics() {
    let xs: Vec<f64> = (0..1000).map(|i| ((i as f64) * 0.618_033_988_7).fract() - 0.5).collect();
    let m = real_mean(&xs);
    assert!(m.mean.abs() < 3.0 * m.std_error + 1e-3);
    assert_eq!(m.count, 1000);
    // a uniform sample has excess kurtosis -1.2
    let jb = jarque_bera(&xs);
    assert!((jb.excess_kurtosis + 1.2).abs() < 0.05, "{}", jb.excess_kurtosis);
    assert!(jb.p_value < 1e-6);
    let zs: Vec<Complex64> = xs.iter().map(|x| Complex64::new(*x, -x)).collect();
    let cm = complex_mean(&zs);
    assert!((cm.std_error - 2f64.sqrt() * m.std_error).abs() < 1e-12);
}
