use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::field::SurfaceField;
use crate::point::{Dim, Point};

/// Stratified-grid refinement schedule for a single oscillation estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    /// Intervals per cube side at the first pass.
    pub initial_k: usize,
    /// Largest number of intervals per side.
    pub max_k: usize,
    /// Relative change below which successive passes count as stable.
    pub rel_tol: f64,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        SamplingPlan { initial_k: 4, max_k: 64, rel_tol: 0.01 }
    }
}

impl SamplingPlan {
    pub fn validate(&self) -> Result<()> {
        if self.initial_k == 0 || self.max_k < self.initial_k {
            return Err(invalid("sampling plan needs 1 <= initial_k <= max_k"));
        }
        if !(self.rel_tol >= 0.0) {
            return Err(invalid("sampling plan tolerance must be >= 0"));
        }
        Ok(())
    }
}

/// A sampled oscillation: a lower bound on `sup − inf` over the cube.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscillationEstimate {
    pub value: f64,
    /// Intervals per side of the final sampling grid.
    pub samples_per_side: usize,
    /// Set when refinement stopped at `max_k` without stabilising.
    pub flagged: bool,
}

/// `max − min` of the field over the `(k+1)^D` grid on `corner + [0,τ]^D`,
/// skipping grid points whose indices are all even when `skip_even` is set.
fn grid_range<F: SurfaceField>(field: &F, corner: Point, tau: f64, k: usize, skip_even: bool, range: &mut (f64, f64)) -> Result<()> {
    let h = tau / k as f64;
    let mut visit = |i: usize, j: usize| -> Result<()> {
        if skip_even && i.is_multiple_of(2) && j.is_multiple_of(2) {
            return Ok(());
        }
        let v = field.value(corner + Point::new(i as f64 * h, j as f64 * h))?;
        range.0 = range.0.min(v);
        range.1 = range.1.max(v);
        Ok(())
    };
    match field.dim() {
        Dim::One => (0..=k).try_for_each(|i| visit(i, 0)),
        Dim::Two => (0..=k).try_for_each(|j| (0..=k).try_for_each(|i| visit(i, j))),
    }
}

/// Oscillation of the field over `corner + [0,τ]^D`, doubling the grid until the
/// estimate changes by less than `rel_tol` or `max_k` is reached.
pub fn oscillation<F: SurfaceField>(field: &F, corner: Point, tau: f64, plan: &SamplingPlan) -> Result<OscillationEstimate> {
    plan.validate()?;
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(invalid(format!("cube side must be positive, got {tau}")));
    }
    let mut k = plan.initial_k;
    let mut range = (f64::INFINITY, f64::NEG_INFINITY);
    grid_range(field, corner, tau, k, false, &mut range)?;
    let mut osc = range.1 - range.0;
    loop {
        if 2 * k > plan.max_k {
            return Ok(OscillationEstimate { value: osc, samples_per_side: k, flagged: true });
        }
        k *= 2;
        grid_range(field, corner, tau, k, true, &mut range)?;
        let refined = range.1 - range.0;
        let stable = refined - osc <= plan.rel_tol * refined;
        osc = refined;
        if stable {
            return Ok(OscillationEstimate { value: osc, samples_per_side: k, flagged: false });
        }
    }
}
