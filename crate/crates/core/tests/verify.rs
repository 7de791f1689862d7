use voronoi_takagi::stats::ks_two_sample;
use voronoi_takagi::verify::*;
use voronoi_takagi::{Dim, Error, Point};

/// Composite Simpson rule on `[a, b]` with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

const M: IncrementModel = IncrementModel { lambda: 2.0, alpha: 0.5, beta: 1.0, hurst: 1.2, n: 2 };

fn model_scales(m: &IncrementModel) -> (f64, f64, f64) {
    let mu = m.lambda.powf(m.n as f64 * m.beta);
    let tau = m.lambda.powf(-(m.n as f64) * m.hurst);
    let amp = m.lambda.powf(-(m.n as f64) * m.alpha);
    (mu, tau, amp)
}

#[test]
fn closed_form_density_integrates_to_the_cdf() {
    let (mu, tau, amp) = model_scales(&M);
    let dist = tau / 2.0;
    let p = (-4.0 * mu * tau).exp();
    let bound = amp * dist / (2.0 * tau);
    let g = |t: f64| z1d_density(t, amp, dist, mu, tau, p);
    let total = simpson(g, -bound, bound, 200_000);
    assert!((total - 1.0).abs() < 1e-6, "{total}");
    for frac in [-0.9, -0.3, -0.05, 0.1, 0.5, 0.99] {
        let t = frac * bound;
        let mass = simpson(g, -bound, t, 200_000);
        assert!((mass - z1d_cdf(t, amp, dist, mu, tau)).abs() < 1e-6, "{frac}");
    }
    assert_eq!(z1d_cdf(-bound, amp, dist, mu, tau), 0.0);
    assert_eq!(z1d_cdf(bound, amp, dist, mu, tau), 1.0);
    assert_eq!(z1d_density(1.01 * bound, amp, dist, mu, tau, p), 0.0);
}

#[test]
fn one_dimensional_density_matches_closed_form() {
    let (mu, tau, _) = model_scales(&M);
    let d = empirical_density_z1d(&M, 0.3, 0.3 + tau / 2.0, 20_000, 17).unwrap();
    assert!(d.pass, "{} vs {}", d.sup_distance, d.dkw_band);
    assert_eq!(d.support_violations, 0);
    assert!(d.max_abs_sample < d.support_bound);
    let total: f64 = d.empirical.iter().sum();
    assert!((total - 1.0).abs() < 1e-12);
    let model_total: f64 = d.model_masses.iter().sum();
    assert!((model_total - 1.0).abs() < 1e-12);
    // Conditioning rate against e^{−4μτ}, within four binomial standard errors.
    let p = (-4.0 * mu * tau).exp();
    assert!((d.p_exact - p).abs() < 1e-15);
    let se = (p * (1.0 - p) / d.trials as f64).sqrt();
    assert!((d.acceptance_rate - p).abs() < 4.0 * se);
    assert!(d.sup_distance_empirical_norm < 4.0 * d.dkw_band);
}

#[test]
fn increments_are_symmetric() {
    let (_, tau, _) = model_scales(&M);
    let (z, _) = sample_increments(&M, Dim::One, Point::on_line(0.7), Point::on_line(0.7 - tau / 3.0), 20_000, 3).unwrap();
    let (a, b) = z.split_at(10_000);
    let neg: Vec<f64> = b.iter().map(|t| -t).collect();
    assert!(ks_two_sample(a, &neg) < voronoi_takagi::stats::ks_critical(LEVEL, 10_000, 10_000));
}

#[test]
fn density_preconditions() {
    let (_, tau, _) = model_scales(&M);
    assert!(matches!(empirical_density_z1d(&M, 0.3, 0.3 + 2.0 * tau, 20_000, 1), Err(Error::InvalidParameter(_))));
    assert!(matches!(empirical_density_z1d(&M, 0.3, 0.3, 20_000, 1), Err(Error::InvalidParameter(_))));
    assert!(matches!(empirical_density_z1d(&M, 0.3, 0.31, 100, 1), Err(Error::InvalidParameter(_))));
    // In one dimension P(x ∈ O_{n,n}) ≥ e^{−4}; in the plane with H near β the
    // τ_n-ball is comparable to a cell and the event is very rare.
    let rare = IncrementModel { hurst: 1.05, n: 1, ..M };
    let x = Point::new(0.2, 0.2);
    let r = sample_increments(&rare, Dim::Two, x, x + Point::new(0.01, 0.0), 10_000, 1);
    assert!(matches!(r, Err(Error::InvalidParameter(_))));
}

#[test]
fn conditioning_rate_agrees_with_decay_estimate() {
    let (_, tau, _) = model_scales(&M);
    let d = empirical_density_z1d(&M, 0.0, tau / 2.0, 20_000, 5).unwrap();
    let decay = oscillation_set_decay(Dim::One, M.lambda, M.beta, M.hurst, &[(2, 2), (1, 2), (0, 2)], 100_000, 6).unwrap();
    let p_decay = 1.0 - decay.cells[0].probability;
    let p_density = d.acceptance_rate;
    let se = (p_decay * (1.0 - p_decay) / 100_000.0 + p_density * (1.0 - p_density) / d.trials as f64).sqrt();
    assert!((p_decay - p_density).abs() < 4.0 * se, "{p_decay} vs {p_density}");
}

#[test]
fn decay_regression_recovers_unit_slope() {
    let fit = oscillation_set_decay(Dim::One, 2.0, 1.0, 1.25, &decay_grid(), 10_000, 8).unwrap();
    assert!((fit.slope - 1.0).abs() <= 0.15, "{}", fit.slope);
    assert_eq!(fit.cells.len(), 16);
    for c in &fit.cells {
        assert!((0.0..=1.0).contains(&c.probability));
    }
    // Monotone in N at fixed n.
    for n in 0..4 {
        let p: Vec<f64> = fit.cells.iter().filter(|c| c.n == n).map(|c| c.probability).collect();
        assert!(p.windows(2).all(|w| w[1] <= w[0]), "{p:?}");
    }
}

#[test]
fn decay_ratio_per_generation_step() {
    // Small-probability regime: P(0 ∉ O_{n,N}) ≈ 4λ^{nβ−NH}, so each step in N
    // multiplies by λ^{−H}.
    let fit = oscillation_set_decay(Dim::One, 2.0, 1.0, 1.5, &[(1, 4), (1, 5), (1, 6)], 200_000, 9).unwrap();
    let p: Vec<f64> = fit.cells.iter().map(|c| c.probability).collect();
    let expected = 2f64.powf(-1.5);
    for w in p.windows(2) {
        assert!((w[1] / w[0] / expected - 1.0).abs() < 0.15, "{p:?}");
    }
}

#[test]
fn decay_in_the_plane_and_exclusions() {
    let fit = oscillation_set_decay(Dim::Two, 2.0, 1.0, 2.0, &[(0, 1), (0, 2), (1, 2), (0, 3), (0, 40)], 2_000, 2).unwrap();
    assert_eq!(fit.excluded, vec![(0, 40)]);
    assert!(fit.cells.iter().all(|c| c.trials == 2_000));
    assert!(fit.slope > 0.0);
    assert!(oscillation_set_decay(Dim::One, 2.0, 1.0, 1.0, &decay_grid(), 10, 0).is_err());
    assert!(oscillation_set_decay(Dim::One, 2.0, 1.0, 1.2, &[(3, 2)], 10, 0).is_err());
    assert!(matches!(
        oscillation_set_decay(Dim::One, 2.0, 1.0, 1.2, &[(0, 60), (0, 61), (0, 62), (0, 2)], 100, 0),
        Err(Error::InsufficientData { .. })
    ));
}

#[test]
fn unconditioned_lipschitz_mean_is_two() {
    // E[2/G] for a size-biased unit-rate gap G with density g e^{−g}.
    let oracle = simpson(|g| if g == 0.0 { 2.0 } else { 2.0 / g * g * (-g).exp() }, 0.0, 60.0, 100_000);
    assert!((oracle - 2.0).abs() < 1e-9);
    let l = lipschitz_mean(Dim::One, 100_000, None, 11).unwrap();
    assert!((l.mean - oracle).abs() < 0.05, "{}", l.mean);
    assert_eq!(l.trials, 100_000);
}

#[test]
fn conditioned_lipschitz_mean_matches_quadrature() {
    for (n, big_n) in [(1, 2), (2, 3), (3, 4)] {
        let c = Conditioning { n, big_n, hurst: 1.25, lambda: 2.0, beta: 1.0 };
        let r = c.radius(Dim::One);
        // Given the conditioning the gap is 4r + Gamma(2,1).
        let oracle = simpson(|g| 2.0 * g * (-g).exp() / (4.0 * r + g), 0.0, 60.0, 100_000);
        let l = lipschitz_mean(Dim::One, 20_000, Some(c), 12 + n as u64).unwrap();
        assert!((l.mean - oracle).abs() < 4.0 * l.stderr, "{n}: {} vs {oracle}", l.mean);
        assert!(l.mean < 2.0);
    }
}

#[test]
fn planar_lipschitz_mean_stabilises() {
    let l = lipschitz_mean(Dim::Two, 50_000, None, 4).unwrap();
    assert!(l.mean.is_finite() && l.mean > 0.0);
    assert!(l.drift < 0.05, "{}", l.drift);
    let c = Conditioning { n: 2, big_n: 3, hurst: 2.0, lambda: 2.0, beta: 1.0 };
    let cond = lipschitz_mean(Dim::Two, 10_000, Some(c), 4).unwrap();
    assert!(cond.mean <= l.mean);
    assert!(lipschitz_mean(Dim::Two, 100, None, 4).is_err());
}

#[test]
fn lipschitz_mean_is_thread_count_independent() {
    let run =
        |k| rayon::ThreadPoolBuilder::new().num_threads(k).build().unwrap().install(|| lipschitz_mean(Dim::One, 10_000, None, 2).unwrap());
    assert_eq!(run(1), run(4));
}

#[test]
fn scaling_invariance_and_controls() {
    // Identical laws.
    let same = nearest_distance_ks(Dim::Two, 8.0, 1.0, 8.0, 10_000, 1).unwrap();
    assert!(same.pass);
    let ok = scaling_invariance_test(Dim::Two, 2.0, 1.0, 3, 10_000, 2, ScalingFactor::Correct).unwrap();
    assert!(ok.pass, "{} vs {}", ok.statistic, ok.critical);
    assert!((ok.critical - 1.6276 * (2.0f64 / 10_000.0).sqrt()).abs() < 1e-3);
    let ok1 = scaling_invariance_test(Dim::One, 3.0, 0.7, 2, 10_000, 2, ScalingFactor::Correct).unwrap();
    assert!(ok1.pass);
    let bad = scaling_invariance_test(Dim::Two, 2.0, 1.0, 3, 10_000, 2, ScalingFactor::NegativeControl).unwrap();
    assert!(!bad.pass);
    assert!(scaling_invariance_test(Dim::Two, 2.0, 1.0, 0, 100, 2, ScalingFactor::Correct).is_err());
}

#[test]
fn planar_density_sup_bound() {
    let m = IncrementModel { lambda: 2.0, alpha: 0.5, beta: 1.0, hurst: 3.0, n: 3 };
    let check = density_sup_bound_d2(&m, &[(3, 0.5), (4, 0.5), (4, 0.25), (4, 0.9)], 10_000, 3).unwrap();
    assert!(check.pass, "{check:?}");
    assert!(check.cases.iter().all(|c| c.sup_density > 0.0));
    assert!(density_sup_bound_d2(&m, &[(3, 1.5)], 10_000, 3).is_err());
}

#[test]
fn suite_records_and_negative_control() {
    let opts = SuiteOptions {
        density_samples: 20_000,
        lipschitz_samples: 20_000,
        decay_trials: 5_000,
        scaling_samples: 5_000,
        ..Default::default()
    };
    let records = run_suite(&opts).unwrap();
    assert_eq!(records.len(), 4);
    for r in &records {
        let v = serde_json::to_value(r).unwrap();
        for key in ["test", "parameters", "statistic", "threshold", "pass"] {
            assert!(v.get(key).is_some());
        }
    }
    assert!(records[0].pass && records[1].pass && records[3].pass);
    let neg = run_suite(&SuiteOptions { negative_control: true, ..opts }).unwrap();
    assert!(!neg[3].pass);
    assert_eq!(neg[..3], records[..3]);
}
