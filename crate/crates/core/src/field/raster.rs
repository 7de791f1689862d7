use std::io::Write;

use rayon::prelude::*;

use super::SurfaceField;
use crate::error::{invalid, Result};
use crate::point::{Dim, Point};
use crate::pointprocess::Window;

/// Field values on a regular grid, row-major with `x1` varying fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct Raster {
    pub dim: Dim,
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
    pub values: Vec<f64>,
}

fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Samples `field` on `grid` points per axis spanning the window (margin ignored).
pub fn raster_grid<F: SurfaceField>(field: &F, window: &Window, grid: usize) -> Result<Raster> {
    if grid < 2 {
        return Err(invalid("raster grid needs at least 2 points per axis"));
    }
    let x1 = axis(window.lower.x, window.upper.x, grid);
    let x2 = match field.dim() {
        Dim::One => vec![0.0],
        Dim::Two => axis(window.lower.y, window.upper.y, grid),
    };
    let rows: Vec<Vec<f64>> =
        x2.par_iter().map(|&y| x1.iter().map(|&x| field.value(Point::new(x, y))).collect::<Result<Vec<f64>>>()).collect::<Result<_>>()?;
    Ok(Raster { dim: field.dim(), x1, x2, values: rows.concat() })
}

/// Writes `x1[,x2],value` rows with a header line.
pub fn write_raster_csv<W: Write>(raster: &Raster, out: &mut W) -> Result<()> {
    match raster.dim {
        Dim::One => writeln!(out, "x1,value")?,
        Dim::Two => writeln!(out, "x1,x2,value")?,
    }
    let n1 = raster.x1.len();
    for (i, v) in raster.values.iter().enumerate() {
        let x = raster.x1[i % n1];
        match raster.dim {
            Dim::One => writeln!(out, "{x},{v}")?,
            Dim::Two => writeln!(out, "{x},{},{v}", raster.x2[i / n1])?,
        }
    }
    Ok(())
}
