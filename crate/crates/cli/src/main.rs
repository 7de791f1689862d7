//! `vtakagi`: experiment runner for random Takagi-Knopp surfaces.

mod spec;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use voronoi_takagi::digest::{config_digest, TOOL_VERSION};
use voronoi_takagi::field::{raster_grid, write_raster_csv, FieldConfig, FieldRealization};
use voronoi_takagi::fractal::{
    box_count_report, energy_integral_multi, estimate_dimension, oscillation, write_energy_csv, BoxCountPlan, EnergyOptions,
};
use voronoi_takagi::seed::{derive, derive2, splitmix64, stream};
use voronoi_takagi::stats::fit_line;
use voronoi_takagi::verify::run_suite;
use voronoi_takagi::{Dim, Error, Point};

use spec::{CommandKind, ExperimentSpec, SpecInput, Usage};

const TOOL: &str = "vtakagi";
/// Nucleus cache budget per realization, in stored points.
const CACHE_BUDGET: usize = 1 << 22;

#[derive(Parser, Debug)]
#[command(name = "vtakagi", version, about = "Random Takagi-Knopp surfaces on Voronoi, hexagonal and dyadic tessellations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct Common {
    /// JSON experiment spec; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, env = "VTAKAGI_OUT_DIR", default_value = "vtakagi-out")]
    out: PathBuf,
    /// Worker thread cap (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Exit 0 even when some scale or cube is flagged.
    #[arg(long)]
    allow_flagged: bool,
    #[command(flatten)]
    spec: SpecInput,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample the surface on a regular grid.
    Raster(Common),
    /// Box-counting dimension over a scale list.
    Boxdim(Common),
    /// Mean oscillation over random cubes at each scale.
    Oscillation(Common),
    /// Monte Carlo s-energy of the graph over W_N × [0,1]^D.
    Energy(Common),
    /// Run the four statistical verification tests.
    VerifySuite {
        #[command(flatten)]
        common: Common,
        /// Compare nearest-neighbour distances under a deliberately wrong scaling.
        #[arg(long)]
        negative_control: bool,
    },
}

enum Status {
    Ok,
    Flagged(String),
}

struct Output {
    dir: PathBuf,
    digest: String,
    spec: Value,
}

impl Output {
    fn csv(&self, name: &str, body: Vec<u8>) -> anyhow::Result<()> {
        let mut text = format!("# tool={TOOL} version={TOOL_VERSION} digest={}\n", self.digest).into_bytes();
        text.extend(body);
        self.write(name, &text)
    }

    fn json<T: Serialize>(&self, name: &str, result: &T) -> anyhow::Result<()> {
        let mut value = serde_json::to_value(result)?;
        if let Value::Object(map) = &mut value {
            map.insert("tool".into(), TOOL.into());
            map.insert("version".into(), TOOL_VERSION.into());
            map.insert("config_digest".into(), self.digest.clone().into());
            map.insert("spec".into(), self.spec.clone());
        }
        let mut text = serde_json::to_vec_pretty(&value)?;
        text.push(b'\n');
        self.write(name, &text)
    }

    fn write(&self, name: &str, bytes: &[u8]) -> anyhow::Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        println!("wrote {}", path.display());
        Ok(())
    }
}

fn realization(spec: &ExperimentSpec) -> anyhow::Result<FieldRealization> {
    let cfg: FieldConfig = spec.field.clone().context("field config missing")?;
    Ok(FieldRealization::with_cache(cfg, CACHE_BUDGET)?)
}

fn unit(seed: u64) -> f64 {
    (splitmix64(seed) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn raster(spec: &ExperimentSpec, out: &Output) -> anyhow::Result<Status> {
    let real = realization(spec)?;
    let r = raster_grid(&real, &real.config().window, spec.grid.unwrap_or(256))?;
    let mut body = Vec::new();
    write_raster_csv(&r, &mut body)?;
    out.csv("raster.csv", body)?;
    Ok(Status::Ok)
}

fn boxdim(spec: &ExperimentSpec, out: &Output) -> anyhow::Result<Status> {
    let real = realization(spec)?;
    let plan = BoxCountPlan { samples_per_side: spec.samples_per_side.unwrap_or(4), ..Default::default() };
    let report = box_count_report(&real, spec.scales.as_deref().unwrap_or_default(), &plan, &out.digest)?;
    let mut body = Vec::new();
    report.write_csv(&mut body)?;
    out.csv("boxcount.csv", body)?;
    let est = estimate_dimension(&report)?;
    out.json("dimension.json", &est)?;
    println!("slope {:.4} ± {:.4}", est.slope, est.half_width);
    let flagged: Vec<f64> = report.entries.iter().filter(|e| e.flagged).map(|e| e.tau).collect();
    Ok(if flagged.is_empty() { Status::Ok } else { Status::Flagged(format!("scales near the truncation scale were flagged: {flagged:?}")) })
}

#[derive(Serialize)]
struct OscillationRow {
    tau: f64,
    mean_oscillation: f64,
    cubes: usize,
    flagged_cubes: usize,
}

fn oscillation_cmd(spec: &ExperimentSpec, out: &Output) -> anyhow::Result<Status> {
    let real = realization(spec)?;
    let cfg = real.config();
    let plan = spec.sampling.unwrap_or_default();
    let cubes = spec.cubes.unwrap_or(64);
    let mut rows = Vec::new();
    for (k, &tau) in spec.scales.as_deref().unwrap_or_default().iter().enumerate() {
        let base = derive(derive(cfg.seed, stream::CUBE), k as u64);
        let estimates = (0..cubes)
            .into_par_iter()
            .map(|i| {
                let c = |axis: i64| unit(derive2(base, i as i64, axis)) * (1.0 - tau);
                let corner = match cfg.dim {
                    Dim::One => Point::on_line(c(0)),
                    Dim::Two => Point::new(c(0), c(1)),
                };
                oscillation(&real, corner, tau, &plan)
            })
            .collect::<Result<Vec<_>, Error>>()?;
        let mean = estimates.iter().map(|e| e.value).sum::<f64>() / cubes as f64;
        let flagged_cubes = estimates.iter().filter(|e| e.flagged).count();
        rows.push(OscillationRow { tau, mean_oscillation: mean, cubes, flagged_cubes });
    }
    let mut body = b"tau,mean_oscillation,cubes,flagged_cubes\n".to_vec();
    for r in &rows {
        body.extend(format!("{:e},{:e},{},{}\n", r.tau, r.mean_oscillation, r.cubes, r.flagged_cubes).into_bytes());
    }
    out.csv("oscillation.csv", body)?;
    if rows.len() >= 3 && rows.iter().all(|r| r.mean_oscillation > 0.0) {
        let x: Vec<f64> = rows.iter().map(|r| r.tau.ln()).collect();
        let y: Vec<f64> = rows.iter().map(|r| r.mean_oscillation.ln()).collect();
        let fit = fit_line(&x, &y)?;
        out.json(
            "oscillation.json",
            &json!({ "slope": fit.slope, "intercept": fit.intercept, "half_width": fit.half_width_95, "rows": rows }),
        )?;
        println!("oscillation exponent {:.4} ± {:.4}", fit.slope, fit.half_width_95);
    }
    let flagged: usize = rows.iter().map(|r| r.flagged_cubes).sum();
    Ok(if flagged == 0 {
        Status::Ok
    } else {
        Status::Flagged(format!("{flagged} cubes did not stabilise at the maximum sampling density"))
    })
}

fn energy(spec: &ExperimentSpec, out: &Output) -> anyhow::Result<Status> {
    let real = realization(spec)?;
    let opts = EnergyOptions { min_distance: spec.min_distance.unwrap_or(1e-6), ..Default::default() };
    let seed = derive(real.config().seed, stream::PAIR);
    let s = spec.s.clone().unwrap_or_default();
    let ests = energy_integral_multi(&real, &s, spec.big_n.unwrap_or(0), spec.pairs.unwrap_or(100_000), seed, &opts)?;
    let mut body = Vec::new();
    write_energy_csv(&mut body, &ests)?;
    out.csv("energy.csv", body)?;
    for e in &ests {
        println!("s={} estimate {:.6e} ± {:.2e}", e.s, e.estimate, e.stderr);
    }
    Ok(Status::Ok)
}

fn verify_suite(spec: &ExperimentSpec, out: &Output) -> anyhow::Result<Status> {
    let opts = spec.suite.context("suite options missing")?;
    let records = run_suite(&opts)?;
    let pass = records.iter().all(|r| r.pass);
    for r in &records {
        println!("[{}] {}: statistic {:.5}, threshold {:.5}", if r.pass { "PASS" } else { "FAIL" }, r.test, r.statistic, r.threshold);
    }
    out.json("verify.json", &json!({ "pass": pass, "tests": records }))?;
    Ok(if pass { Status::Ok } else { Status::Flagged("verification suite failed".into()) })
}

fn run(cli: Cli) -> anyhow::Result<Status> {
    let (kind, common, negative_control) = match cli.command {
        Command::Raster(c) => (CommandKind::Raster, c, false),
        Command::Boxdim(c) => (CommandKind::Boxdim, c, false),
        Command::Oscillation(c) => (CommandKind::Oscillation, c, false),
        Command::Energy(c) => (CommandKind::Energy, c, false),
        Command::VerifySuite { common, negative_control } => (CommandKind::VerifySuite, common, negative_control),
    };
    let input = match &common.config {
        Some(path) => common.spec.clone().over(SpecInput::from_file(path)?),
        None => common.spec.clone(),
    };
    let mut spec = ExperimentSpec::resolve(kind, &input)?;
    if let Some(suite) = spec.suite.as_mut() {
        suite.negative_control = negative_control;
    }
    if let Some(n) = common.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    fs::create_dir_all(&common.out).with_context(|| format!("creating {}", common.out.display()))?;
    let out = Output { dir: common.out.clone(), digest: config_digest(&spec)?, spec: serde_json::to_value(&spec)? };
    let status = match kind {
        CommandKind::Raster => raster(&spec, &out),
        CommandKind::Boxdim => boxdim(&spec, &out),
        CommandKind::Oscillation => oscillation_cmd(&spec, &out),
        CommandKind::Energy => energy(&spec, &out),
        CommandKind::VerifySuite => verify_suite(&spec, &out),
    }?;
    Ok(match status {
        Status::Flagged(_) if common.allow_flagged && kind != CommandKind::VerifySuite => Status::Ok,
        s => s,
    })
}

fn is_usage(err: &anyhow::Error) -> bool {
    err.is::<Usage>() || matches!(err.downcast_ref::<Error>(), Some(Error::InvalidParameter(_)))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Flagged(msg)) => {
            eprintln!("{TOOL}: {msg}");
            ExitCode::from(1)
        }
        Err(e) if is_usage(&e) => {
            eprintln!("{TOOL}: {e:#}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("{TOOL}: {e:#}");
            ExitCode::from(1)
        }
    }
}
