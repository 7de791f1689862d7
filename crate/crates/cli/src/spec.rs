use std::path::Path;

use anyhow::Context;
use clap::Args;
use serde::{Deserialize, Serialize};
use voronoi_takagi::field::{Family, FieldConfig};
use voronoi_takagi::fractal::SamplingPlan;
use voronoi_takagi::verify::SuiteOptions;
use voronoi_takagi::Dim;

/// Invalid flags or parameter combinations; reported with exit code 2.
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

/// Experiment parameters as given on the command line or in a `--config` file.
/// Flags override file values; unset values fall back to per-command defaults.
#[derive(Args, Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpecInput {
    /// Tessellation family: voronoi, hexagonal or dyadic.
    #[arg(long)]
    pub family: Option<Family>,
    /// Domain dimension (1 or 2).
    #[arg(long = "D", visible_alias = "dim")]
    #[serde(rename = "D")]
    pub dim: Option<usize>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Oscillation-set exponent, must exceed beta.
    #[arg(long = "H", visible_alias = "hurst")]
    #[serde(rename = "H")]
    pub hurst: Option<f64>,
    /// Truncation depth; defaults to a depth resolving the finest scale.
    #[arg(long)]
    pub depth: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Scale list: `2^-4..2^-10` or comma-separated values such as `0.5,2^-3`.
    #[arg(long)]
    pub scales: Option<String>,
    /// Raster points per axis.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Samples per box side in box counting.
    #[arg(long)]
    pub samples_per_side: Option<usize>,
    /// Random cubes per scale for the oscillation command.
    #[arg(long)]
    pub cubes: Option<usize>,
    /// Upper limit of the per-cube sampling refinement (oscillation command).
    #[arg(long)]
    pub max_samples_per_side: Option<usize>,
    /// Accepted pair budget for the energy estimate.
    #[arg(long)]
    pub pairs: Option<u64>,
    /// Energy exponents, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub s: Option<Vec<f64>>,
    /// Generation index of the integration window W_N.
    #[arg(long = "N", visible_alias = "big-n")]
    #[serde(rename = "N")]
    pub big_n: Option<u32>,
    /// Smallest pair distance sampled by the energy estimator.
    #[arg(long)]
    pub min_distance: Option<f64>,
    #[arg(long)]
    pub density_samples: Option<usize>,
    #[arg(long)]
    pub decay_trials: Option<u64>,
    #[arg(long)]
    pub lipschitz_samples: Option<usize>,
    #[arg(long)]
    pub scaling_samples: Option<usize>,
}

macro_rules! overlay {
    ($top:expr, $base:expr, $($f:ident),*) => {
        SpecInput { $($f: $top.$f.or($base.$f)),* }
    };
}

impl SpecInput {
    pub fn from_file(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| usage(format!("config {}: {e}", path.display())))
    }

    pub fn over(self, base: SpecInput) -> SpecInput {
        overlay!(
            self,
            base,
            family,
            dim,
            lambda,
            alpha,
            beta,
            hurst,
            depth,
            seed,
            scales,
            grid,
            samples_per_side,
            cubes,
            max_samples_per_side,
            pairs,
            s,
            big_n,
            min_distance,
            density_samples,
            decay_trials,
            lipschitz_samples,
            scaling_samples
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Raster,
    Boxdim,
    Oscillation,
    Energy,
    VerifySuite,
}

/// Fully resolved experiment. Its canonical JSON form is hashed into the
/// config digest carried by every output.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentSpec {
    pub command: CommandKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scales: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples_per_side: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cubes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampling: Option<SamplingPlan>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", rename = "N")]
    pub big_n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_distance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suite: Option<SuiteOptions>,
}

fn parse_scale(term: &str) -> anyhow::Result<f64> {
    let t = term.trim();
    let v = match t.strip_prefix("2^") {
        Some(exp) => 2f64.powi(exp.parse::<i32>().map_err(|_| usage(format!("bad scale exponent in '{t}'")))?),
        None => t.parse::<f64>().map_err(|_| usage(format!("bad scale '{t}'")))?,
    };
    if !(v > 0.0 && v < 1.0) {
        return Err(usage(format!("scale {t} must lie in (0, 1)")));
    }
    Ok(v)
}

/// Parses `2^-a..2^-b` (every power of two between) or a comma-separated list.
pub fn parse_scales(text: &str) -> anyhow::Result<Vec<f64>> {
    let mut out = match text.split_once("..") {
        Some((lo, hi)) => {
            let exp = |s: &str| {
                s.trim()
                    .strip_prefix("2^")
                    .and_then(|e| e.parse::<i32>().ok())
                    .ok_or_else(|| usage(format!("range endpoints must be powers of two, got '{s}'")))
            };
            let (a, b) = (exp(lo)?, exp(hi)?);
            let (a, b) = (a.max(b), a.min(b));
            (b..=a).rev().map(|k| parse_scale(&format!("2^{k}"))).collect::<anyhow::Result<Vec<_>>>()?
        }
        None => text.split(',').map(parse_scale).collect::<anyhow::Result<Vec<_>>>()?,
    };
    out.sort_by(|a, b| b.total_cmp(a));
    out.dedup();
    Ok(out)
}

impl ExperimentSpec {
    pub fn resolve(command: CommandKind, input: &SpecInput) -> anyhow::Result<Self> {
        let dim = match input.dim {
            Some(d) => Some(Dim::from_usize(d).map_err(|e| usage(e.to_string()))?),
            None => None,
        };
        let mut spec = ExperimentSpec {
            command,
            field: None,
            scales: None,
            grid: None,
            samples_per_side: None,
            cubes: None,
            sampling: None,
            pairs: None,
            s: None,
            big_n: None,
            min_distance: None,
            suite: None,
        };
        if command == CommandKind::VerifySuite {
            let d = SuiteOptions::default();
            spec.suite = Some(SuiteOptions {
                seed: input.seed.unwrap_or(d.seed),
                negative_control: false,
                density_samples: input.density_samples.unwrap_or(d.density_samples),
                decay_trials: input.decay_trials.unwrap_or(d.decay_trials),
                lipschitz_samples: input.lipschitz_samples.unwrap_or(d.lipschitz_samples),
                scaling_samples: input.scaling_samples.unwrap_or(d.scaling_samples),
            });
            return Ok(spec);
        }

        let family = input.family.unwrap_or(Family::Voronoi);
        let dim = dim.unwrap_or(if family == Family::Hexagonal { Dim::Two } else { Dim::One });
        let cfg = FieldConfig::new(
            family,
            dim,
            input.lambda.unwrap_or(2.0),
            input.alpha.unwrap_or(0.5),
            input.beta.unwrap_or(1.0),
            input.hurst.unwrap_or(1.2),
            0,
            input.seed.unwrap_or(0),
        )
        .map_err(|e| usage(e.to_string()))?;

        let finest = match command {
            CommandKind::Raster => {
                let grid = input.grid.unwrap_or(256);
                if grid < 2 {
                    return Err(usage("grid needs at least 2 points per axis"));
                }
                spec.grid = Some(grid);
                1.0 / (grid - 1) as f64
            }
            CommandKind::Boxdim | CommandKind::Oscillation => {
                let scales = parse_scales(input.scales.as_deref().unwrap_or("2^-4..2^-10"))?;
                let finest = *scales.last().ok_or_else(|| usage("empty scale list"))?;
                spec.scales = Some(scales);
                if command == CommandKind::Boxdim {
                    let k = input.samples_per_side.unwrap_or(4);
                    if k == 0 {
                        return Err(usage("samples-per-side must be positive"));
                    }
                    spec.samples_per_side = Some(k);
                } else {
                    let cubes = input.cubes.unwrap_or(64);
                    if cubes == 0 {
                        return Err(usage("cubes must be positive"));
                    }
                    spec.cubes = Some(cubes);
                    let max_k = input.max_samples_per_side.unwrap_or(if dim == Dim::One { 1024 } else { 64 });
                    let plan = SamplingPlan { max_k, ..Default::default() };
                    plan.validate().map_err(|e| usage(e.to_string()))?;
                    spec.sampling = Some(plan);
                }
                finest
            }
            CommandKind::Energy => {
                let eps = input.min_distance.unwrap_or(1e-6);
                if !(eps > 0.0 && eps < 1.0) {
                    return Err(usage("min-distance must lie in (0, 1)"));
                }
                let s = input.s.clone().unwrap_or_else(|| vec![1.2, 2.2]);
                if s.is_empty() || s.iter().any(|v| !(*v > 1.0) || !v.is_finite()) {
                    return Err(usage("energy exponents must exceed 1"));
                }
                let pairs = input.pairs.unwrap_or(100_000);
                if pairs == 0 {
                    return Err(usage("pairs must be positive"));
                }
                spec.min_distance = Some(eps);
                spec.s = Some(s);
                spec.pairs = Some(pairs);
                eps
            }
            CommandKind::VerifySuite => unreachable!(),
        };
        let depth = input.depth.unwrap_or_else(|| cfg.recommended_depth(finest));
        if command == CommandKind::Energy {
            let big_n = input.big_n.unwrap_or(depth.saturating_sub(4));
            if big_n > depth {
                return Err(usage(format!("N = {big_n} exceeds depth {depth}")));
            }
            spec.big_n = Some(big_n);
        }
        spec.field = Some(FieldConfig { depth, ..cfg });
        Ok(spec)
    }
}
