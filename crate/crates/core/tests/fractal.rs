use proptest::prelude::*;
use voronoi_takagi::field::{AffineField, ConstantField, Family, FieldConfig, FieldRealization, PlusSmooth, SurfaceField};
use voronoi_takagi::fractal::*;
use voronoi_takagi::{Dim, Error, Point};

fn voronoi1(seed: u64, depth: u32) -> FieldRealization {
    let cfg = FieldConfig::new(Family::Voronoi, Dim::One, 2.0, 0.5, 1.0, 1.2, depth, seed).unwrap();
    FieldRealization::with_cache(cfg, 1 << 20).unwrap()
}

fn hex(alpha: f64, depth: u32) -> FieldRealization {
    FieldRealization::new(FieldConfig::hexagonal(alpha, depth).unwrap()).unwrap()
}

fn fixed(k: usize) -> SamplingPlan {
    SamplingPlan { initial_k: k, max_k: k, rel_tol: 0.01 }
}

#[test]
fn oscillation_of_constant_and_affine_fields() {
    let plan = SamplingPlan::default();
    for dim in [Dim::One, Dim::Two] {
        let c = ConstantField { dim, value: 3.5 };
        let o = oscillation(&c, Point::new(0.2, 0.3), 0.1, &plan).unwrap();
        assert_eq!(o.value, 0.0);
        assert!(!o.flagged);
    }
    let a = AffineField { dim: Dim::One, gradient: Point::on_line(-2.5), offset: 1.0 };
    let o = oscillation(&a, Point::on_line(0.25), 0.125, &plan).unwrap();
    assert!((o.value - 2.5 * 0.125).abs() < 1e-14);
    let a = AffineField { dim: Dim::Two, gradient: Point::new(1.0, -3.0), offset: 0.0 };
    let o = oscillation(&a, Point::new(0.5, 0.25), 0.25, &plan).unwrap();
    assert!((o.value - 4.0 * 0.25).abs() < 1e-14);
}

#[test]
fn oscillation_rejects_bad_inputs() {
    let c = ConstantField { dim: Dim::One, value: 0.0 };
    assert!(oscillation(&c, Point::ORIGIN, 0.0, &SamplingPlan::default()).is_err());
    let bad = SamplingPlan { initial_k: 8, max_k: 4, rel_tol: 0.01 };
    assert!(oscillation(&c, Point::ORIGIN, 0.1, &bad).is_err());
}

#[test]
fn oscillation_flags_unstable_refinement() {
    // A rough field keeps revealing new extremes under refinement.
    let real = voronoi1(3, 30);
    let o = oscillation(&real, Point::on_line(0.1), 0.5, &SamplingPlan { initial_k: 2, max_k: 4, rel_tol: 0.0 }).unwrap();
    assert!(o.flagged);
    assert_eq!(o.samples_per_side, 4);
}

#[test]
fn hexagonal_cell_oscillation_bound() {
    for alpha in [0.3, 0.5, 0.8] {
        let depth = 40;
        let h = hex(alpha, depth);
        let trunc = h.config().truncation_bound();
        for big_n in 0..=8 {
            // The centre 0 and the vertex 2^{-N}(1,0) of a generation-N cell.
            let side = 0.5f64.powi(big_n);
            let bound = 2f64.powf(-alpha * big_n as f64) / (1.0 - 2f64.powf(-alpha)) - trunc;
            let diff = h.value(Point::ORIGIN).unwrap() - h.value(Point::new(side, 0.0)).unwrap();
            // The vertex has irrational lattice coordinates; rounding grows
            // through the doublings up to ~1e-7 at depth 40.
            assert!(diff >= bound - 1e-6, "alpha {alpha} N {big_n}: {diff} < {bound}");
            let o = oscillation(&h, Point::ORIGIN, side, &SamplingPlan::default()).unwrap();
            assert!(o.value >= diff);
        }
    }
}

#[test]
fn constant_field_counts_two_boxes_per_cell() {
    for dim in [Dim::One, Dim::Two] {
        let c = ConstantField { dim, value: 0.3 };
        let taus = dyadic_scales(1, 7);
        let r = box_count_report(&c, &taus, &BoxCountPlan::default(), "x").unwrap();
        for e in &r.entries {
            let cells = (1.0 / e.tau).ceil() as u64;
            assert_eq!(e.n_boxes, 2 * cells.pow(dim.get() as u32));
            assert!(!e.flagged);
        }
        let d = estimate_dimension(&r).unwrap();
        assert!((d.slope - dim.as_f64()).abs() < 1e-12);
    }
    // Non-dyadic side: ⌈1/τ⌉ cells per axis.
    let c = ConstantField { dim: Dim::One, value: 0.0 };
    assert_eq!(box_count(&c, 0.3, &BoxCountPlan::default()).unwrap(), (0.3, 8));
}

#[test]
fn affine_field_has_slope_d() {
    for dim in [Dim::One, Dim::Two] {
        let a = AffineField { dim, gradient: Point::new(0.7, -0.4), offset: 0.1 };
        let r = box_count_report(&a, &dyadic_scales(2, 9), &BoxCountPlan::default(), "").unwrap();
        let d = estimate_dimension(&r).unwrap();
        assert!((d.slope - dim.as_f64()).abs() < 0.05, "{dim:?}: {}", d.slope);
    }
}

#[test]
fn report_invariants_hold() {
    let real = voronoi1(5, 30);
    let taus = [0.5, 0.3, 0.25, 0.125, 0.1, 2f64.powi(-6), 2f64.powi(-9)];
    let r = box_count_report(&real, &taus, &BoxCountPlan { samples_per_side: 8, safety_factor: 8.0 }, "d").unwrap();
    assert_eq!(r.entries.len(), taus.len());
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for x in (0..=4096).map(|i| i as f64 / 4096.0) {
        let v = real.value(Point::on_line(x)).unwrap();
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let range = hi - lo;
    for w in r.entries.windows(2) {
        assert!(w[1].tau < w[0].tau);
        assert!(w[1].n_boxes >= w[0].n_boxes);
    }
    for e in &r.entries {
        assert_eq!(e.samples_per_cell, 9);
        assert!(e.n_boxes >= 1);
        let cells = (1.0 / e.tau).ceil();
        // Generous in `range` since the reference range is sampled.
        assert!((e.n_boxes as f64) <= cells * (1.01 * range / e.tau + 2.0));
    }
}

#[test]
fn shared_raster_matches_single_scale_counts() {
    let real = voronoi1(8, 30);
    let taus = dyadic_scales(2, 8);
    let plan = BoxCountPlan { samples_per_side: 8, safety_factor: 8.0 };
    let r = box_count_report(&real, &taus, &plan, "").unwrap();
    for e in &r.entries {
        assert_eq!(box_count(&real, e.tau, &plan).unwrap().1, e.n_boxes);
    }
    let h = hex(0.5, 20);
    let r = box_count_report(&h, &dyadic_scales(2, 5), &BoxCountPlan::default(), "").unwrap();
    for e in &r.entries {
        assert_eq!(box_count(&h, e.tau, &BoxCountPlan::default()).unwrap().1, e.n_boxes);
    }
}

#[test]
fn box_count_parameter_errors_and_flags() {
    let real = voronoi1(1, 10);
    let plan = BoxCountPlan::default();
    let trunc = real.truncation_scale();
    for tau in [0.0, -0.1, 1.0, 1.5, 0.5 * trunc] {
        assert!(matches!(box_count(&real, tau, &plan), Err(Error::InvalidParameter(_))), "{tau}");
    }
    let r = box_count_report(&real, &[0.25, 4.0 * trunc], &plan, "").unwrap();
    assert!(!r.entries[0].flagged);
    assert!(r.entries[1].flagged);
    assert!(box_count_report(&real, &[0.25], &BoxCountPlan { samples_per_side: 0, safety_factor: 8.0 }, "").is_err());
}

fn synthetic(taus: &[f64], counts: &[u64], flagged: &[bool]) -> BoxCountReport {
    BoxCountReport {
        dim: Dim::Two,
        config_digest: "abc".into(),
        truncation_scale: 0.0,
        samples_per_side: 4,
        entries: taus
            .iter()
            .zip(counts)
            .zip(flagged)
            .map(|((&tau, &n_boxes), &flagged)| BoxCountEntry { tau, n_boxes, samples_per_cell: 25, flagged, mean_oscillation: 0.0 })
            .collect(),
    }
}

#[test]
fn exact_power_law_recovers_exponent() {
    let taus = dyadic_scales(1, 8);
    let counts: Vec<u64> = (1..=8u64).map(|k| 10 + k * k * k).collect();
    // Exact τ^{-2} counts.
    let sq: Vec<u64> = (1..=8).map(|k| 1u64 << (2 * k)).collect();
    let r = synthetic(&taus, &sq, &[false; 8]);
    let d = estimate_dimension(&r).unwrap();
    assert!((d.slope - 2.0).abs() < 1e-12);
    assert!(d.residuals.iter().all(|e| e.abs() < 1e-12));
    assert_eq!(d.taus.len(), 6);
    assert_eq!(d.tau_range, (taus[7], taus[2]));
    assert_eq!(d.config_digest, "abc");
    // Scaling all counts moves only the intercept.
    let scaled: Vec<u64> = counts.iter().map(|c| c * 7).collect();
    let a = estimate_dimension(&synthetic(&taus, &counts, &[false; 8])).unwrap();
    let b = estimate_dimension(&synthetic(&taus, &scaled, &[false; 8])).unwrap();
    assert!((a.slope - b.slope).abs() < 1e-12);
    assert!((b.intercept - a.intercept - 7f64.ln()).abs() < 1e-12);
    // Non-integer exponent through fit_counts.
    let c: Vec<f64> = taus.iter().map(|t| t.powf(-1.37)).collect();
    assert!((fit_counts(&taus, &c).unwrap().slope - 1.37).abs() < 1e-12);
}

#[test]
fn flagged_and_coarse_scales_are_excluded() {
    let taus = dyadic_scales(1, 6);
    let sq: Vec<u64> = (1..=6).map(|k| 1u64 << (2 * k)).collect();
    let mut flags = [false; 6];
    flags[5] = true;
    let d = estimate_dimension(&synthetic(&taus, &sq, &flags)).unwrap();
    assert_eq!(d.taus, vec![taus[2], taus[3], taus[4]]);
    flags[4] = true;
    assert!(matches!(estimate_dimension(&synthetic(&taus, &sq, &flags)), Err(Error::InsufficientData { usable: 2, required: 3 })));
}

#[test]
fn dimension_json_round_trips() {
    let taus = dyadic_scales(1, 7);
    let c: Vec<f64> = taus.iter().map(|t| 3.0 * t.powf(-1.5)).collect();
    let d = fit_counts(&taus, &c).unwrap();
    let mut buf = Vec::new();
    d.write_json(&mut buf).unwrap();
    let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
    for key in ["slope", "ci", "half_width", "tau_range", "config_digest"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn boxcount_csv_schema() {
    let c = ConstantField { dim: Dim::One, value: 0.0 };
    let r = box_count_report(&c, &[0.5, 0.25], &BoxCountPlan::default(), "").unwrap();
    let mut buf = Vec::new();
    r.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "tau,n_boxes,samples_per_cell,flagged");
    assert_eq!(lines[1], "5e-1,4,5,false");
    assert_eq!(lines.len(), 3);
}

#[test]
fn hexagonal_oscillation_bracket_is_stable() {
    let alpha = 0.5;
    let h = hex(alpha, 45);
    let r = box_count_report(&h, &dyadic_scales(2, 11), &BoxCountPlan::default(), "").unwrap();
    let ratios: Vec<f64> = r.entries.iter().map(|e| e.mean_oscillation / e.tau.powf(alpha)).collect();
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(0.0, f64::max);
    assert!(lo > 0.0 && hi / lo < 1.5, "{ratios:?}");
}

#[test]
fn lipschitz_layer_does_not_move_the_slope() {
    let real = voronoi1(2, 36);
    let taus = dyadic_scales(2, 12);
    let plan = BoxCountPlan { samples_per_side: 8, safety_factor: 8.0 };
    let base = estimate_dimension(&box_count_report(&real, &taus, &plan, "").unwrap()).unwrap();
    let smooth = PlusSmooth { inner: &real, amplitude: 0.05 };
    let moved = estimate_dimension(&box_count_report(&smooth, &taus, &plan, "").unwrap()).unwrap();
    assert!((moved.slope - base.slope).abs() < base.half_width, "{} vs {} ± {}", moved.slope, base.slope, base.half_width);
}

fn energy_field() -> FieldRealization {
    let cfg = FieldConfig::new(Family::Voronoi, Dim::One, 2.0, 0.5, 1.0, 1.1, 40, 3).unwrap();
    FieldRealization::with_cache(cfg, 1 << 20).unwrap()
}

#[test]
fn energy_is_positive_and_monotone_in_s() {
    let real = energy_field();
    let opts = EnergyOptions::default();
    let s = [1.2, 1.5, 1.8, 2.2];
    let v = energy_integral_multi(&real, &s, 36, 4000, 9, &opts).unwrap();
    for e in &v {
        assert!(e.estimate > 0.0 && e.stderr.is_finite() && e.stderr > 0.0);
        assert_eq!(e.pairs, 4000);
        assert_eq!(e.big_n, 36);
        assert!((e.acceptance_rate - 0.23).abs() < 0.03);
    }
    assert!(v.windows(2).all(|w| w[1].estimate >= w[0].estimate));
    let single = energy_integral(&real, 1.5, 36, 4000, 9).unwrap();
    assert_eq!(single, v[1]);
}

#[test]
fn energy_is_independent_of_thread_count() {
    let real = energy_field();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| energy_integral_multi(&real, &[1.2], 36, 3000, 4, &EnergyOptions { min_distance: 1e-6, chunk: 256 }).unwrap())
    };
    assert_eq!(run(1), run(3));
}

#[test]
fn energy_errors() {
    let real = energy_field();
    assert!(matches!(energy_integral(&real, 1.0, 36, 100, 0), Err(Error::InvalidParameter(_))));
    assert!(matches!(energy_integral(&real, 1.5, 41, 100, 0), Err(Error::InvalidParameter(_))));
    assert!(matches!(energy_integral(&real, 1.5, 36, 0, 0), Err(Error::InvalidParameter(_))));
    // W_0 also asks for membership at radius 1 in generation 0: essentially empty.
    assert!(matches!(energy_integral(&real, 1.5, 0, 100, 0), Err(Error::Degenerate(_))));
}

#[test]
fn energy_csv_schema() {
    let real = energy_field();
    let v = energy_integral_multi(&real, &[1.2, 2.2], 36, 500, 1, &EnergyOptions::default()).unwrap();
    let mut buf = Vec::new();
    write_energy_csv(&mut buf, &v).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("s,estimate,stderr,pairs,acceptance_rate\n1.2,"));
    assert_eq!(text.lines().count(), 3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn oscillation_dominates_subcubes(seed in 0u64..1000, cx in 0.0f64..0.5, cy in 0.0f64..0.5, qx in 0usize..2, qy in 0usize..2) {
        let cfg = FieldConfig::new(Family::Voronoi, Dim::Two, 2.0, 0.5, 1.0, 1.5, 8, seed).unwrap();
        let real = FieldRealization::new(cfg).unwrap();
        let tau = 0.25;
        let corner = Point::new(cx, cy);
        let whole = oscillation(&real, corner, tau, &fixed(8)).unwrap().value;
        let sub = corner + Point::new(qx as f64, qy as f64) * (tau / 2.0);
        let part = oscillation(&real, sub, tau / 2.0, &fixed(4)).unwrap().value;
        prop_assert!(whole >= part);
    }

    #[test]
    fn counts_decrease_with_tau(seed in 0u64..1000) {
        let real = voronoi1(seed, 20);
        let r = box_count_report(&real, &dyadic_scales(1, 9), &BoxCountPlan::default(), "").unwrap();
        prop_assert!(r.entries.windows(2).all(|w| w[1].n_boxes >= w[0].n_boxes));
    }
}
