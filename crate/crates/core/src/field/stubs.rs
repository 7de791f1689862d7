//! Simple reference fields for exercising estimators against known answers.

use super::SurfaceField;
use crate::error::Result;
use crate::point::{Dim, Point};

#[derive(Clone, Copy, Debug)]
pub struct ConstantField {
    pub dim: Dim,
    pub value: f64,
}

impl SurfaceField for ConstantField {
    fn dim(&self) -> Dim {
        self.dim
    }

    fn value(&self, _: Point) -> Result<f64> {
        Ok(self.value)
    }

    fn truncation_scale(&self) -> f64 {
        0.0
    }
}

/// `x ↦ offset + ⟨gradient, x⟩`.
#[derive(Clone, Copy, Debug)]
pub struct AffineField {
    pub dim: Dim,
    pub gradient: Point,
    pub offset: f64,
}

impl SurfaceField for AffineField {
    fn dim(&self) -> Dim {
        self.dim
    }

    fn value(&self, x: Point) -> Result<f64> {
        Ok(self.offset + self.gradient.dot(x))
    }

    fn truncation_scale(&self) -> f64 {
        0.0
    }
}

/// A field plus the smooth bump `amplitude · sin(2πx₁) cos(2πx₂)`.
#[derive(Clone, Copy, Debug)]
pub struct PlusSmooth<'a, F> {
    pub inner: &'a F,
    pub amplitude: f64,
}

impl<F: SurfaceField> SurfaceField for PlusSmooth<'_, F> {
    fn dim(&self) -> Dim {
        self.inner.dim()
    }

    fn value(&self, x: Point) -> Result<f64> {
        let tau = std::f64::consts::TAU;
        Ok(self.inner.value(x)? + self.amplitude * (tau * x.x).sin() * (tau * x.y).cos())
    }

    fn truncation_scale(&self) -> f64 {
        self.inner.truncation_scale()
    }
}
