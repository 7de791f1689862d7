use std::io::Write;

use serde::{Deserialize, Serialize};

use super::boxcount::BoxCountReport;
use crate::error::{Error, Result};
use crate::stats::fit_line;

/// Number of coarsest unflagged scales left out of the regression.
pub const DROPPED_COARSE_SCALES: usize = 2;
pub const MIN_SCALES: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionEstimate {
    pub slope: f64,
    pub intercept: f64,
    /// Scales entering the fit, coarsest first.
    pub taus: Vec<f64>,
    /// `ln N − (intercept + slope·ln(1/τ))` at each entry of `taus`.
    pub residuals: Vec<f64>,
    /// Half-width of the 95% confidence interval for the slope.
    pub half_width: f64,
    pub ci: (f64, f64),
    /// `(smallest τ, largest τ)` used.
    pub tau_range: (f64, f64),
    pub config_digest: String,
}

/// Least-squares slope of `ln N(τ)` against `ln(1/τ)` over the given scales.
pub fn fit_counts(taus: &[f64], counts: &[f64]) -> Result<DimensionEstimate> {
    if taus.len() < MIN_SCALES {
        return Err(Error::InsufficientData { usable: taus.len(), required: MIN_SCALES });
    }
    let x: Vec<f64> = taus.iter().map(|t| -t.ln()).collect();
    let y: Vec<f64> = counts.iter().map(|n| n.ln()).collect();
    let fit = fit_line(&x, &y)?;
    let lo = taus.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = taus.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(DimensionEstimate {
        slope: fit.slope,
        intercept: fit.intercept,
        taus: taus.to_vec(),
        residuals: fit.residuals,
        half_width: fit.half_width_95,
        ci: (fit.slope - fit.half_width_95, fit.slope + fit.half_width_95),
        tau_range: (lo, hi),
        config_digest: String::new(),
    })
}

/// Box dimension estimate from a report. Flagged scales and the two coarsest
/// remaining ones are excluded.
pub fn estimate_dimension(report: &BoxCountReport) -> Result<DimensionEstimate> {
    let mut usable: Vec<_> = report.entries.iter().filter(|e| !e.flagged).collect();
    usable.sort_by(|a, b| b.tau.total_cmp(&a.tau));
    let kept = &usable[DROPPED_COARSE_SCALES.min(usable.len())..];
    if kept.len() < MIN_SCALES {
        return Err(Error::InsufficientData { usable: kept.len(), required: MIN_SCALES });
    }
    let taus: Vec<f64> = kept.iter().map(|e| e.tau).collect();
    let counts: Vec<f64> = kept.iter().map(|e| e.n_boxes as f64).collect();
    let mut est = fit_counts(&taus, &counts)?;
    est.config_digest = report.config_digest.clone();
    Ok(est)
}

impl DimensionEstimate {
    pub fn write_json<W: Write>(&self, out: &mut W) -> Result<()> {
        serde_json::to_writer_pretty(&mut *out, self)?;
        writeln!(out)?;
        Ok(())
    }
}
