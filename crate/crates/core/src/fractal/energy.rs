use std::f64::consts::TAU;
use std::io::Write;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::field::FieldRealization;
use crate::point::{Dim, Point};
use crate::seed::{derive, rng, stream};
use crate::stats::CompensatedSum;

/// Below this W_N acceptance rate the estimate is reported as degenerate.
pub const MIN_ACCEPTANCE: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyOptions {
    /// Smallest sampled pair distance `ε`; pairs closer than this are not represented.
    pub min_distance: f64,
    /// Accepted pairs per independently seeded work unit.
    pub chunk: usize,
}

impl Default for EnergyOptions {
    fn default() -> Self {
        EnergyOptions { min_distance: 1e-6, chunk: 512 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyEstimate {
    pub s: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub pairs: u64,
    pub draws: u64,
    pub acceptance_rate: f64,
    /// Index `N` of the set `W_N`.
    pub big_n: u32,
    pub hurst: f64,
    pub min_distance: f64,
}

/// `(sum, sum of squares)` of the pair weights for each `s`.
#[derive(Clone, Default)]
struct Chunk {
    sums: Vec<(CompensatedSum, CompensatedSum)>,
    pairs: u64,
    draws: u64,
}

fn in_unit_cube(p: Point, dim: Dim) -> bool {
    (0.0..=1.0).contains(&p.x) && (dim == Dim::One || (0.0..=1.0).contains(&p.y))
}

/// Monte Carlo estimates of
/// `∬_{W_N × [0,1]^D} (‖x−y‖² + |F(x)−F(y)|²)^{−s/2} dx dy`
/// for each `s`, all computed on one set of pairs.
///
/// `x` is drawn uniformly and kept when it lies in `W_N`; `y = x + rθ` with `θ`
/// uniform on the sphere and `ln r` uniform on `[ln ε, ln √D]`.
pub fn energy_integral_multi(
    real: &FieldRealization,
    s_values: &[f64],
    big_n: u32,
    pair_budget: u64,
    seed: u64,
    opts: &EnergyOptions,
) -> Result<Vec<EnergyEstimate>> {
    if s_values.is_empty() || s_values.iter().any(|&s| !(s > 1.0 && s.is_finite())) {
        return Err(invalid("energy exponents must be finite and > 1"));
    }
    if pair_budget == 0 || opts.chunk == 0 {
        return Err(invalid("pair budget and chunk size must be positive"));
    }
    let cfg = real.config();
    if big_n > cfg.depth {
        return Err(invalid(format!("N = {big_n} exceeds the series depth {}", cfg.depth)));
    }
    let dim = cfg.dim;
    let r_max = dim.as_f64().sqrt();
    if !(opts.min_distance > 0.0 && opts.min_distance < r_max) {
        return Err(invalid("minimum pair distance must lie in (0, √D)"));
    }
    let log_span = (r_max / opts.min_distance).ln();
    // Surface measure of the unit sphere in R^D.
    let sphere = match dim {
        Dim::One => 2.0,
        Dim::Two => TAU,
    };
    let chunk = opts.chunk as u64;
    let n_chunks = pair_budget.div_ceil(chunk);
    let max_draws = (chunk as f64 / MIN_ACCEPTANCE * 4.0) as u64;

    let chunks: Vec<Chunk> = (0..n_chunks)
        .into_par_iter()
        .map(|c| -> Result<Chunk> {
            let want = chunk.min(pair_budget - c * chunk);
            let mut g = rng(derive(derive(seed, stream::PAIR), c));
            let mut out = Chunk { sums: vec![Default::default(); s_values.len()], ..Default::default() };
            while out.pairs < want && out.draws < max_draws {
                out.draws += 1;
                let x = match dim {
                    Dim::One => Point::on_line(g.random()),
                    Dim::Two => Point::new(g.random(), g.random()),
                };
                if !real.in_w(big_n, x)? {
                    continue;
                }
                out.pairs += 1;
                let r = opts.min_distance * (g.random::<f64>() * log_span).exp();
                let dir = match dim {
                    Dim::One => Point::on_line(if g.random::<bool>() { 1.0 } else { -1.0 }),
                    Dim::Two => {
                        let t = g.random::<f64>() * TAU;
                        Point::new(t.cos(), t.sin())
                    }
                };
                let y = x + dir * r;
                if !in_unit_cube(y, dim) {
                    for acc in &mut out.sums {
                        acc.0.add(0.0);
                        acc.1.add(0.0);
                    }
                    continue;
                }
                let df = real.value(x)? - real.value(y)?;
                let d2 = r * r + df * df;
                let jac = sphere * r.powi(dim.get() as i32) * log_span;
                for (acc, &s) in out.sums.iter_mut().zip(s_values) {
                    let w = d2.powf(-0.5 * s) * jac;
                    acc.0.add(w);
                    acc.1.add(w * w);
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let pairs: u64 = chunks.iter().map(|c| c.pairs).sum();
    let draws: u64 = chunks.iter().map(|c| c.draws).sum();
    let p = pairs as f64 / draws as f64;
    if p < MIN_ACCEPTANCE || pairs < 2 {
        return Err(Error::Degenerate(format!(
            "W_{big_n} acceptance rate {p:.2e} is below {MIN_ACCEPTANCE:e}; choose a larger N or depth"
        )));
    }
    let n = pairs as f64;
    Ok(s_values
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let mut sum = CompensatedSum::default();
            let mut sq = CompensatedSum::default();
            for c in &chunks {
                sum.add(c.sums[i].0.value());
                sq.add(c.sums[i].1.value());
            }
            let mean = sum.value() / n;
            let var_w = ((sq.value() - n * mean * mean) / (n - 1.0)).max(0.0);
            // Delta method for the product of the acceptance rate and the mean weight.
            let var = p * p * var_w / n + mean * mean * p * (1.0 - p) / draws as f64;
            EnergyEstimate {
                s,
                estimate: p * mean,
                stderr: var.sqrt(),
                pairs,
                draws,
                acceptance_rate: p,
                big_n,
                hurst: real.config().hurst,
                min_distance: opts.min_distance,
            }
        })
        .collect())
}

/// Single-exponent energy estimate with default options.
pub fn energy_integral(real: &FieldRealization, s: f64, big_n: u32, pair_budget: u64, seed: u64) -> Result<EnergyEstimate> {
    let mut v = energy_integral_multi(real, &[s], big_n, pair_budget, seed, &EnergyOptions::default())?;
    Ok(v.remove(0))
}

pub fn write_energy_csv<W: Write>(out: &mut W, estimates: &[EnergyEstimate]) -> Result<()> {
    writeln!(out, "s,estimate,stderr,pairs,acceptance_rate")?;
    for e in estimates {
        writeln!(out, "{},{:e},{:e},{},{}", e.s, e.estimate, e.stderr, e.pairs, e.acceptance_rate)?;
    }
    Ok(())
}
