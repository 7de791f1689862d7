//! Monte Carlo checks of the distributional properties of the construction.
//!
//! Every trial draws its own independent process from a seed derived from the
//! trial index, so results are identical for any thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{invalid, Error, Result};
use crate::field::{Family, FieldConfig, FieldRealization};
use crate::geometry::{locate, nearest, simplex_of, Location};
use crate::point::{Dim, Point};
use crate::pointprocess::{generation_seed, TiledPoisson};
use crate::seed::{derive, stream};
use crate::stats::{dkw_band, fit_line, ks_critical, ks_two_sample, mean_var};

/// Significance level of every gating test.
pub const LEVEL: f64 = 0.01;
/// Conditioning events rarer than this are rejected.
pub const MIN_ACCEPTANCE: f64 = 1e-3;

fn trial_seed(seed: u64, label: u64, i: u64) -> u64 {
    derive(derive(seed, label), i)
}

/// Runs trials in batches until `target` of them return `Some`, keeping the
/// first `target` in trial order. Returns the kept values and the number of
/// trials consumed.
fn collect_accepted<T: Send>(target: usize, p_guess: f64, seed: u64, f: impl Fn(u64) -> Result<Option<T>> + Sync) -> Result<(Vec<T>, u64)> {
    let mut out = Vec::with_capacity(target);
    let mut next = 0u64;
    let p = p_guess.clamp(MIN_ACCEPTANCE, 1.0);
    while out.len() < target {
        let want = target - out.len();
        let batch = ((want as f64 / p) * 1.1).ceil() as u64 + 64;
        let got: Vec<Option<T>> =
            (next..next + batch).into_par_iter().map(|i| f(trial_seed(seed, stream::TRIAL, i))).collect::<Result<_>>()?;
        for (j, v) in got.into_iter().enumerate() {
            if let Some(v) = v {
                out.push(v);
                if out.len() == target {
                    return Ok((out, next + j as u64 + 1));
                }
            }
        }
        next += batch;
        if (out.len() as f64) < MIN_ACCEPTANCE * next as f64 {
            return Err(invalid(format!("conditioning acceptance {:.2e} is below {MIN_ACCEPTANCE:e}", out.len() as f64 / next as f64)));
        }
    }
    Ok((out, next))
}

// ---------------------------------------------------------------------------
// Conditional increment density in one dimension

/// `P(ρ ≥ a)` for `ρ = 4τ + Gamma(2, μ)`: the gap containing `x` given `x ∈ O_{n,n}`.
fn gap_survival(a: f64, mu: f64, tau: f64) -> f64 {
    if a <= 4.0 * tau {
        return 1.0;
    }
    let z = mu * (a - 4.0 * tau);
    (-z).exp() * (z + 1.0)
}

/// Exact CDF of `Z_n(x,y)` given `x ∈ O_{n,n}` in one dimension, for amplitude
/// `amp = λ^{−nα}`, `dist = |x−y|`, intensity `mu` and conditioning radius `tau`.
pub fn z1d_cdf(t: f64, amp: f64, dist: f64, mu: f64, tau: f64) -> f64 {
    if t == 0.0 {
        return 0.5;
    }
    let a = (2.0 * amp * dist / t.abs()).max(4.0 * tau);
    let s = gap_survival(a, mu, tau);
    if t > 0.0 {
        0.5 + 0.5 * s
    } else {
        0.5 - 0.5 * s
    }
}

/// The closed-form density with `P(x ∈ O_{n,n})` as a free normaliser.
pub fn z1d_density(t: f64, amp: f64, dist: f64, mu: f64, tau: f64, p_cond: f64) -> f64 {
    let bound = amp * dist / (2.0 * tau);
    if t == 0.0 || t.abs() >= bound {
        return 0.0;
    }
    let u = amp * dist / t.abs();
    2.0 * mu * mu / p_cond * (-2.0 * mu * u).exp() * (u - 2.0 * tau) * u / t.abs()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncrementModel {
    pub lambda: f64,
    pub alpha: f64,
    pub beta: f64,
    pub hurst: f64,
    pub n: u32,
}

impl IncrementModel {
    fn config(&self, dim: Dim, seed: u64) -> Result<FieldConfig> {
        FieldConfig::new(Family::Voronoi, dim, self.lambda, self.alpha, self.beta, self.hurst, self.n, seed)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityComparison {
    pub model: IncrementModel,
    pub dist: f64,
    pub edges: Vec<f64>,
    pub empirical: Vec<f64>,
    /// Bin masses from the exactly normalised density.
    pub model_masses: Vec<f64>,
    /// Bin masses with the empirical conditioning probability as normaliser.
    pub model_masses_empirical_norm: Vec<f64>,
    /// `sup_t |F̂(t) − F(t)|` over the sample, against the exact CDF.
    pub sup_distance: f64,
    /// Cumulative sup-distance over bin edges with the empirical normaliser.
    pub sup_distance_empirical_norm: f64,
    pub dkw_band: f64,
    pub samples: usize,
    pub trials: u64,
    pub acceptance_rate: f64,
    pub p_exact: f64,
    pub support_bound: f64,
    pub max_abs_sample: f64,
    pub support_violations: usize,
    pub pass: bool,
}

/// Conditional increments `Z_n(x,y)` over independent realizations with `x ∈ O_{n,n}`.
pub fn sample_increments(model: &IncrementModel, dim: Dim, x: Point, y: Point, samples: usize, seed: u64) -> Result<(Vec<f64>, u64)> {
    let cfg = model.config(dim, seed)?;
    let tau = cfg.tau(model.n);
    let dist = x.dist(y);
    if !(dist > 0.0 && dist <= tau) {
        return Err(invalid(format!("need 0 < |x-y| <= tau_n = {tau}, got {dist}")));
    }
    let p_guess = match dim {
        Dim::One => (-4.0 * cfg.intensity(model.n) * tau).exp(),
        Dim::Two => 0.1,
    };
    if p_guess < MIN_ACCEPTANCE {
        return Err(invalid(format!("conditioning probability {p_guess:.2e} is below {MIN_ACCEPTANCE:e}")));
    }
    let n = model.n;
    collect_accepted(samples, p_guess, seed, |s| {
        let real = FieldRealization::new(FieldConfig { seed: s, ..cfg.clone() })?;
        if !real.membership(n, x, tau)? {
            return Ok(None);
        }
        real.increment_zn(n, x, y).map(Some)
    })
}

/// Histogram of conditional `Z_n(x,y)` in one dimension against the closed form.
pub fn empirical_density_z1d(model: &IncrementModel, x: f64, y: f64, samples: usize, seed: u64) -> Result<DensityComparison> {
    if samples < 10_000 {
        return Err(invalid("density comparison needs at least 10^4 samples"));
    }
    let cfg = model.config(Dim::One, seed)?;
    let (mu, tau, amp) = (cfg.intensity(model.n), cfg.tau(model.n), cfg.amplitude(model.n));
    let dist = (x - y).abs();
    let (mut z, trials) = sample_increments(model, Dim::One, Point::on_line(x), Point::on_line(y), samples, seed)?;
    let p_exact = (-4.0 * mu * tau).exp();
    let p_emp = samples as f64 / trials as f64;
    let bound = amp * dist / (2.0 * tau);
    let support_violations = z.iter().filter(|t| t.abs() >= bound).count();
    let max_abs_sample = z.iter().fold(0.0f64, |m, t| m.max(t.abs()));

    z.sort_by(f64::total_cmp);
    let nf = samples as f64;
    let cdf = |t: f64| z1d_cdf(t, amp, dist, mu, tau);
    let sup_distance = z
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let f = cdf(t);
            (f - i as f64 / nf).max((i + 1) as f64 / nf - f)
        })
        .fold(0.0, f64::max);

    const BINS: usize = 100;
    let edges: Vec<f64> = (0..=BINS).map(|i| -bound + 2.0 * bound * i as f64 / BINS as f64).collect();
    let mut counts = vec![0usize; BINS];
    for &t in &z {
        let b = (((t + bound) / (2.0 * bound)) * BINS as f64).floor();
        counts[(b.max(0.0) as usize).min(BINS - 1)] += 1;
    }
    let empirical: Vec<f64> = counts.iter().map(|&c| c as f64 / nf).collect();
    let model_masses: Vec<f64> = edges.windows(2).map(|w| cdf(w[1]) - cdf(w[0])).collect();
    let rescale = p_exact / p_emp;
    let model_masses_empirical_norm: Vec<f64> = model_masses.iter().map(|m| m * rescale).collect();
    let mut ce = 0.0;
    let mut cm = 0.0;
    let mut sup_distance_empirical_norm: f64 = 0.0;
    for (e, m) in empirical.iter().zip(&model_masses_empirical_norm) {
        ce += e;
        cm += m;
        sup_distance_empirical_norm = sup_distance_empirical_norm.max((ce - cm).abs());
    }
    let band = dkw_band(LEVEL, samples);
    Ok(DensityComparison {
        model: *model,
        dist,
        edges,
        empirical,
        model_masses,
        model_masses_empirical_norm,
        sup_distance,
        sup_distance_empirical_norm,
        dkw_band: band,
        samples,
        trials,
        acceptance_rate: p_emp,
        p_exact,
        support_bound: bound,
        max_abs_sample,
        support_violations,
        pass: sup_distance < band && support_violations == 0,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupBoundCase {
    pub n: u32,
    pub dist: f64,
    pub acceptance_rate: f64,
    /// Largest histogram density of `Z_n`.
    pub sup_density: f64,
    /// `sup_density · P(x ∈ O_{n,n}) · |x−y| · λ^{n(β−α)/D}`, bounded by a constant.
    pub normalized: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupBoundCheck {
    pub cases: Vec<SupBoundCase>,
    /// Largest normalized sup over all cases.
    pub max_normalized: f64,
    /// Registered bound on the normalized sup.
    pub bound: f64,
    /// Largest max/min ratio of the normalized sup among cases sharing `n`.
    pub distance_spread: f64,
    pub spread_threshold: f64,
    pub pass: bool,
}

/// Smoke check of the planar sup bound `C / (P(x ∈ O_{n,n}) |x−y|) λ^{−n(β−α)/D}`
/// on the conditional increment density: the normalized histogram maximum stays
/// below a fixed constant, and at fixed `n` it does not depend on `|x−y|`.
pub fn density_sup_bound_d2(model: &IncrementModel, cases: &[(u32, f64)], samples: usize, seed: u64) -> Result<SupBoundCheck> {
    const BINS: usize = 50;
    const BOUND: f64 = 1.0;
    const SPREAD: f64 = 1.5;
    let mut out: Vec<SupBoundCase> = Vec::new();
    for (k, &(n, frac)) in cases.iter().enumerate() {
        if !(frac > 0.0 && frac < 1.0) {
            return Err(invalid("distance fractions must lie in (0,1)"));
        }
        let m = IncrementModel { n, ..*model };
        let cfg = m.config(Dim::Two, seed)?;
        let dist = frac * cfg.tau(n);
        let x = Point::new(0.3, 0.6);
        let y = x + Point::new(0.6, 0.8) * dist;
        let (z, trials) = sample_increments(&m, Dim::Two, x, y, samples, derive(seed, k as u64))?;
        let top = z.iter().fold(0.0f64, |a, t| a.max(t.abs()));
        let width = 2.0 * top / BINS as f64;
        let mut counts = [0usize; BINS];
        for &t in &z {
            counts[(((t + top) / width) as usize).min(BINS - 1)] += 1;
        }
        let sup_density = *counts.iter().max().unwrap() as f64 / (samples as f64 * width);
        let p = samples as f64 / trials as f64;
        let scale = cfg.lambda.powf(n as f64 * (cfg.beta - cfg.alpha) / 2.0);
        out.push(SupBoundCase { n, dist, acceptance_rate: p, sup_density, normalized: sup_density * p * dist * scale });
    }
    let max_normalized = out.iter().map(|c| c.normalized).fold(0.0, f64::max);
    let mut distance_spread: f64 = 1.0;
    for c in &out {
        let same = out.iter().filter(|o| o.n == c.n).map(|o| o.normalized);
        let (lo, hi) = same.fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
        distance_spread = distance_spread.max(hi / lo);
    }
    Ok(SupBoundCheck {
        cases: out,
        max_normalized,
        bound: BOUND,
        distance_spread,
        spread_threshold: SPREAD,
        pass: max_normalized <= BOUND && distance_spread <= SPREAD,
    })
}

// ---------------------------------------------------------------------------
// Oscillation-set decay

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayCell {
    pub n: u32,
    pub big_n: u32,
    pub trials: u64,
    pub failures: u64,
    /// Empirical `P(0 ∉ O_{n,N})`.
    pub probability: f64,
    /// `(nβ − NH)/D · ln λ`.
    pub predictor: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub cells: Vec<DecayCell>,
    /// Cells with no failures, left out of the regression.
    pub excluded: Vec<(u32, u32)>,
    pub slope: f64,
    pub intercept: f64,
    pub predicted_slope: f64,
}

/// Distance from `x` to the skeleton of its generation-`n` simplex.
fn skeleton_distance(process: &TiledPoisson, x: Point) -> Result<f64> {
    let loc = locate(process, x)?;
    Ok(simplex_of(process, x, &loc)?.map_or(0.0, |s| s.skeleton_distance(x)))
}

/// Empirical `P(0 ∉ O_{n,N})` on a grid of `(n, N)` and the regression of its
/// logarithm on `(nβ − NH)/D · ln λ`.
pub fn oscillation_set_decay(
    dim: Dim,
    lambda: f64,
    beta: f64,
    hurst: f64,
    grid: &[(u32, u32)],
    trials: u64,
    seed: u64,
) -> Result<DecayFit> {
    if !(lambda > 1.0 && beta > 0.0 && hurst > beta) {
        return Err(invalid("decay needs lambda > 1, beta > 0 and H > beta"));
    }
    if grid.is_empty() || grid.iter().any(|&(n, big_n)| big_n < n) {
        return Err(invalid("decay grid needs N >= n in every cell"));
    }
    let d = dim.as_f64();
    let mut gens: Vec<u32> = grid.iter().map(|c| c.0).collect();
    gens.sort_unstable();
    gens.dedup();
    // One realization per trial, shared by all cells.
    let dists: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let s = trial_seed(seed, stream::TRIAL, i);
            gens.iter()
                .map(|&n| {
                    let p = TiledPoisson::new(dim, lambda.powf(n as f64 * beta), generation_seed(s, n))?;
                    skeleton_distance(&p, Point::ORIGIN)
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut cells = Vec::new();
    let mut excluded = Vec::new();
    for &(n, big_n) in grid {
        let g = gens.iter().position(|&k| k == n).unwrap();
        let tau = lambda.powf(-(big_n as f64) * hurst / d);
        let failures = dists.iter().filter(|v| v[g] < tau).count() as u64;
        let predictor = (n as f64 * beta - big_n as f64 * hurst) / d * lambda.ln();
        if failures == 0 {
            excluded.push((n, big_n));
        }
        cells.push(DecayCell { n, big_n, trials, failures, probability: failures as f64 / trials as f64, predictor });
    }
    let used: Vec<&DecayCell> = cells.iter().filter(|c| c.failures > 0).collect();
    if used.len() < 3 {
        return Err(Error::InsufficientData { usable: used.len(), required: 3 });
    }
    let x: Vec<f64> = used.iter().map(|c| c.predictor).collect();
    let y: Vec<f64> = used.iter().map(|c| c.probability.ln()).collect();
    let fit = fit_line(&x, &y)?;
    Ok(DecayFit { cells, excluded, slope: fit.slope, intercept: fit.intercept, predicted_slope: 1.0 })
}

// ---------------------------------------------------------------------------
// Lipschitz constant of the affine piece at the origin

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Conditioning {
    pub n: u32,
    pub big_n: u32,
    pub hurst: f64,
    pub lambda: f64,
    pub beta: f64,
}

impl Conditioning {
    /// Ball radius of `O_{n,N}` after rescaling generation `n` to unit intensity.
    pub fn radius(&self, dim: Dim) -> f64 {
        self.lambda.powf((self.n as f64 * self.beta - self.big_n as f64 * self.hurst) / dim.as_f64())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LipschitzMean {
    pub dim: Dim,
    pub conditioning: Option<Conditioning>,
    pub mean: f64,
    /// Nominal; the variance of `L` is infinite in one dimension.
    pub stderr: f64,
    pub samples: usize,
    pub trials: u64,
    /// Running mean after a tenth of the samples.
    pub early_mean: f64,
    /// `|mean − early_mean| / mean`.
    pub drift: f64,
    pub stable: bool,
}

/// Mean of `L(0) = 2/‖c − c′‖` for a unit-intensity process, optionally given
/// that the origin lies in the rescaled oscillation set.
pub fn lipschitz_mean(dim: Dim, samples: usize, conditioning: Option<Conditioning>, seed: u64) -> Result<LipschitzMean> {
    if samples < 10_000 {
        return Err(invalid("lipschitz mean needs at least 10^4 trials"));
    }
    let radius = conditioning.map(|c| c.radius(dim));
    if let Some(c) = &conditioning {
        if !(c.lambda > 1.0 && c.hurst > c.beta && c.big_n >= c.n) {
            return Err(invalid("conditioning needs lambda > 1, H > beta and N >= n"));
        }
    }
    let p_guess = match (radius, dim) {
        (None, _) => 1.0,
        (Some(r), Dim::One) => (-4.0 * r).exp(),
        (Some(_), Dim::Two) => 0.1,
    };
    let (vals, trials) = collect_accepted(samples, p_guess, seed, |s| {
        let p = TiledPoisson::new(dim, 1.0, s)?;
        let loc = locate(&p, Point::ORIGIN)?;
        let Location::Piece { c, c2, .. } = loc else { return Ok(None) };
        if let Some(r) = radius {
            let d = simplex_of(&p, Point::ORIGIN, &loc)?.map_or(0.0, |s| s.skeleton_distance(Point::ORIGIN));
            if d < r {
                return Ok(None);
            }
        }
        Ok(Some(2.0 / c.dist(c2)))
    })?;
    let (mean, var) = mean_var(&vals);
    let (early_mean, _) = mean_var(&vals[..samples / 10]);
    let drift = (mean - early_mean).abs() / mean;
    Ok(LipschitzMean {
        dim,
        conditioning,
        mean,
        stderr: (var / samples as f64).sqrt(),
        samples,
        trials,
        early_mean,
        drift,
        stable: drift < 0.02,
    })
}

// ---------------------------------------------------------------------------
// Scaling invariance

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ScalingFactor {
    /// `λ^{β/D}`, under which generations `n` and `n−1` agree in law.
    Correct,
    /// `λ^{2β/D}`, a deliberate mismatch.
    NegativeControl,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub critical: f64,
    pub samples: usize,
    pub pass: bool,
}

fn nearest_distances(dim: Dim, intensity: f64, factor: f64, samples: usize, seed: u64, label: u64) -> Result<Vec<f64>> {
    (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let p = TiledPoisson::new(dim, intensity, trial_seed(seed, label, i))?;
            Ok(factor * nearest(&p, Point::ORIGIN)?.dist)
        })
        .collect()
}

/// Two-sample KS test between `factor_a ×` the distance from the origin to its
/// nucleus at intensity `intensity_a`, and the same distance at `intensity_b`.
pub fn nearest_distance_ks(dim: Dim, intensity_a: f64, factor_a: f64, intensity_b: f64, samples: usize, seed: u64) -> Result<KsResult> {
    let a = nearest_distances(dim, intensity_a, factor_a, samples, seed, 1)?;
    let b = nearest_distances(dim, intensity_b, 1.0, samples, seed, 2)?;
    let statistic = ks_two_sample(&a, &b);
    let critical = ks_critical(LEVEL, samples, samples);
    Ok(KsResult { statistic, critical, samples, pass: statistic < critical })
}

/// Compares the rescaled generation-`n` distance to the nucleus with generation `n−1`.
pub fn scaling_invariance_test(
    dim: Dim,
    lambda: f64,
    beta: f64,
    n: u32,
    samples: usize,
    seed: u64,
    factor: ScalingFactor,
) -> Result<KsResult> {
    if n == 0 {
        return Err(invalid("scaling test needs n >= 1"));
    }
    if !(lambda > 1.0 && beta > 0.0) {
        return Err(invalid("scaling test needs lambda > 1 and beta > 0"));
    }
    let d = dim.as_f64();
    let f = match factor {
        ScalingFactor::Correct => lambda.powf(beta / d),
        ScalingFactor::NegativeControl => lambda.powf(2.0 * beta / d),
    };
    nearest_distance_ks(dim, lambda.powf(n as f64 * beta), f, lambda.powf((n - 1) as f64 * beta), samples, seed)
}

// ---------------------------------------------------------------------------
// Suite

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestRecord {
    pub test: String,
    pub parameters: serde_json::Value,
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteOptions {
    pub seed: u64,
    pub negative_control: bool,
    pub density_samples: usize,
    pub decay_trials: u64,
    pub lipschitz_samples: usize,
    pub scaling_samples: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            seed: 20240601,
            negative_control: false,
            density_samples: 100_000,
            decay_trials: 10_000,
            lipschitz_samples: 100_000,
            scaling_samples: 10_000,
        }
    }
}

pub const DENSITY_MODEL: IncrementModel = IncrementModel { lambda: 2.0, alpha: 0.5, beta: 1.0, hurst: 1.2, n: 2 };

pub fn decay_grid() -> Vec<(u32, u32)> {
    (0..4).flat_map(|n| (6..10).map(move |big_n| (n, big_n))).collect()
}

/// The four distributional tests at their registered budgets.
pub fn run_suite(opts: &SuiteOptions) -> Result<Vec<TestRecord>> {
    let mut out = Vec::new();

    let m = DENSITY_MODEL;
    let tau = m.lambda.powf(-(m.n as f64) * m.hurst);
    let (x, y) = (0.3, 0.3 + tau / 2.0);
    let d = empirical_density_z1d(&m, x, y, opts.density_samples, derive(opts.seed, 1))?;
    out.push(TestRecord {
        test: "conditional_increment_density_1d".into(),
        parameters: json!({ "model": m, "x": x, "y": y, "samples": opts.density_samples }),
        statistic: d.sup_distance,
        threshold: d.dkw_band,
        pass: d.pass,
    });

    let (lambda, beta, hurst) = (2.0, 1.0, 1.25);
    let decay = oscillation_set_decay(Dim::One, lambda, beta, hurst, &decay_grid(), opts.decay_trials, derive(opts.seed, 2))?;
    let dev = (decay.slope - 1.0).abs();
    out.push(TestRecord {
        test: "oscillation_set_decay".into(),
        parameters: json!({ "dim": 1, "lambda": lambda, "beta": beta, "H": hurst, "grid": decay_grid(), "trials": opts.decay_trials, "slope": decay.slope }),
        statistic: dev,
        threshold: 0.15,
        pass: dev <= 0.15,
    });

    let l = lipschitz_mean(Dim::One, opts.lipschitz_samples, None, derive(opts.seed, 3))?;
    let dev = (l.mean - 2.0).abs();
    out.push(TestRecord {
        test: "lipschitz_mean_1d".into(),
        parameters: json!({ "dim": 1, "samples": opts.lipschitz_samples, "mean": l.mean, "drift": l.drift }),
        statistic: dev,
        threshold: 0.05,
        pass: dev <= 0.05,
    });

    let factor = if opts.negative_control { ScalingFactor::NegativeControl } else { ScalingFactor::Correct };
    let ks = scaling_invariance_test(Dim::Two, 2.0, 1.0, 3, opts.scaling_samples, derive(opts.seed, 4), factor)?;
    out.push(TestRecord {
        test: "scaling_invariance".into(),
        parameters: json!({ "dim": 2, "lambda": 2.0, "beta": 1.0, "n": 3, "samples": opts.scaling_samples, "factor": factor }),
        statistic: ks.statistic,
        threshold: ks.critical,
        pass: ks.pass,
    });
    Ok(out)
}
