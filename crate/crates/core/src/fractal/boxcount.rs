use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::field::SurfaceField;
use crate::point::{Dim, Point};
use crate::stats::CompensatedSum;

/// Fixed-resolution sampling used for box counting.
///
/// Every cell of side `τ` is sampled on the same `(k+1)^D` grid pattern at every
/// scale, so the sampling bias is identical across scales and cancels in the
/// log-log slope. Nested scales share one raster.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxCountPlan {
    /// Intervals `k` per cell side.
    pub samples_per_side: usize,
    /// Scales below `safety_factor × truncation scale` are flagged.
    pub safety_factor: f64,
}

impl Default for BoxCountPlan {
    fn default() -> Self {
        BoxCountPlan { samples_per_side: 4, safety_factor: 8.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxCountEntry {
    pub tau: f64,
    pub n_boxes: u64,
    pub samples_per_cell: usize,
    /// Too close to the truncation scale to enter the regression.
    pub flagged: bool,
    pub mean_oscillation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxCountReport {
    pub dim: Dim,
    pub config_digest: String,
    pub truncation_scale: f64,
    pub samples_per_side: usize,
    /// Strictly decreasing in `tau`.
    pub entries: Vec<BoxCountEntry>,
}

/// Cell sums for one scale.
#[derive(Clone, Copy, Debug, Default)]
struct Tally {
    boxes: u64,
    osc: CompensatedSum,
    cells: u64,
}

impl Tally {
    fn add(&mut self, osc: f64, tau: f64) {
        self.boxes += (osc / tau).floor() as u64 + 2;
        self.osc.add(osc);
        self.cells += 1;
    }
}

struct Scale {
    tau: f64,
    /// Raster intervals per cell side.
    m: usize,
    /// Cells per axis.
    cells: usize,
}

fn nested(coarse: f64, fine: f64) -> bool {
    let r = coarse / fine;
    (r - r.round()).abs() < 1e-9 * r && r.round() >= 1.0
}

/// Counts boxes for a chain of nested scales (each a multiple of the next) on one raster.
fn count_group<F: SurfaceField>(field: &F, taus: &[f64], k: usize) -> Result<Vec<Tally>> {
    let h = taus[taus.len() - 1] / k as f64;
    let scales: Vec<Scale> =
        taus.iter().map(|&tau| Scale { tau, m: (tau / h).round() as usize, cells: (1.0 / tau - 1e-9).ceil().max(1.0) as usize }).collect();
    let coarse = &scales[0];
    let extent = coarse.cells * coarse.m;
    let mut tallies = vec![Tally::default(); scales.len()];
    let value = |i: usize, j: usize| field.value(Point::new(i as f64 * h, j as f64 * h));

    let range_of = |vals: &[f64], idx: &mut dyn Iterator<Item = usize>| {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in idx {
            lo = lo.min(vals[i]);
            hi = hi.max(vals[i]);
        }
        hi - lo
    };

    match field.dim() {
        Dim::One => {
            let vals: Vec<f64> = (0..=extent).into_par_iter().map(|i| value(i, 0)).collect::<Result<_>>()?;
            for (s, t) in scales.iter().zip(tallies.iter_mut()) {
                let stride = s.m / k;
                for a in 0..s.cells {
                    let osc = range_of(&vals, &mut (0..=k).map(|i| a * s.m + i * stride));
                    t.add(osc, s.tau);
                }
            }
        }
        Dim::Two => {
            let width = extent + 1;
            for strip in 0..coarse.cells {
                let r0 = strip * coarse.m;
                let rows: Vec<Vec<f64>> = (r0..=r0 + coarse.m)
                    .into_par_iter()
                    .map(|j| (0..width).map(|i| value(i, j)).collect::<Result<Vec<f64>>>())
                    .collect::<Result<_>>()?;
                let vals: Vec<f64> = rows.concat();
                for (s, t) in scales.iter().zip(tallies.iter_mut()) {
                    let stride = s.m / k;
                    for b in (r0 / s.m)..((r0 + coarse.m) / s.m) {
                        let rb = b * s.m - r0;
                        for a in 0..s.cells {
                            let mut idx = (0..=k).flat_map(|j| (0..=k).map(move |i| (rb + j * stride) * width + a * s.m + i * stride));
                            let osc = range_of(&vals, &mut idx);
                            t.add(osc, s.tau);
                        }
                    }
                }
            }
        }
    }
    Ok(tallies)
}

fn check_tau(tau: f64, truncation_scale: f64) -> Result<()> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(invalid(format!("box side must lie in (0,1), got {tau}")));
    }
    if tau < truncation_scale {
        return Err(invalid(format!("box side {tau} is below the truncation scale {truncation_scale}; increase the depth")));
    }
    Ok(())
}

/// Box counts at each scale in `taus`, returned in decreasing order of `τ`.
pub fn box_count_report<F: SurfaceField>(field: &F, taus: &[f64], plan: &BoxCountPlan, config_digest: &str) -> Result<BoxCountReport> {
    let k = plan.samples_per_side;
    if k == 0 {
        return Err(invalid("samples per side must be positive"));
    }
    let trunc = field.truncation_scale();
    let mut sorted: Vec<f64> = taus.to_vec();
    for &t in &sorted {
        check_tau(t, trunc)?;
    }
    sorted.sort_by(|a, b| b.total_cmp(a));
    sorted.dedup();

    let mut entries = Vec::with_capacity(sorted.len());
    let mut start = 0;
    while start < sorted.len() {
        let mut end = start + 1;
        while end < sorted.len() && nested(sorted[end - 1], sorted[end]) {
            end += 1;
        }
        let group = &sorted[start..end];
        for (tau, t) in group.iter().zip(count_group(field, group, k)?) {
            entries.push(BoxCountEntry {
                tau: *tau,
                n_boxes: t.boxes,
                samples_per_cell: (k + 1).pow(field.dim().get() as u32),
                flagged: *tau < plan.safety_factor * trunc,
                mean_oscillation: t.osc.value() / t.cells as f64,
            });
        }
        start = end;
    }
    Ok(BoxCountReport { dim: field.dim(), config_digest: config_digest.to_string(), truncation_scale: trunc, samples_per_side: k, entries })
}

/// Number of `τ`-mesh boxes met by the graph over `[0,1]^D`.
pub fn box_count<F: SurfaceField>(field: &F, tau: f64, plan: &BoxCountPlan) -> Result<(f64, u64)> {
    let r = box_count_report(field, &[tau], plan, "")?;
    Ok((tau, r.entries[0].n_boxes))
}
