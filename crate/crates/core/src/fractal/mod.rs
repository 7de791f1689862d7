//! Oscillation, box counting, dimension regression and s-energy estimation.

mod boxcount;
mod dimension;
mod energy;
mod oscillation;

use std::io::Write;

pub use boxcount::{box_count, box_count_report, BoxCountEntry, BoxCountPlan, BoxCountReport};
pub use dimension::{estimate_dimension, fit_counts, DimensionEstimate, DROPPED_COARSE_SCALES, MIN_SCALES};
pub use energy::{energy_integral, energy_integral_multi, write_energy_csv, EnergyEstimate, EnergyOptions, MIN_ACCEPTANCE};
pub use oscillation::{oscillation, OscillationEstimate, SamplingPlan};

use crate::error::Result;

/// Geometric scale list `2^{-lo}, …, 2^{-hi}`.
pub fn dyadic_scales(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|k| 2f64.powi(-k)).collect()
}

impl BoxCountReport {
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "tau,n_boxes,samples_per_cell,flagged")?;
        for e in &self.entries {
            writeln!(out, "{:e},{},{},{}", e.tau, e.n_boxes, e.samples_per_cell, e.flagged)?;
        }
        Ok(())
    }
}
