//! Seeded homogeneous Poisson point processes.
//!
//! Two samplers share one drawing protocol:
//!
//! * [`sample_poisson`] draws a finite [`NucleusSet`] on a (buffered) window.
//! * [`TiledPoisson`] covers all of `R^D` by tiling space into cubes and running
//!   the same protocol inside each tile with a seed derived from the tile key.
//!   It is an exact realisation of the infinite process, restricted lazily to
//!   whatever region a query touches.
//!
//! Seed splitting: generation `n` of a master seed `s` uses
//! `seed::derive(seed::derive(s, GENERATION), n)`; tile `(i, j)` of a generation
//! seed `g` uses `seed::derive2(g, i, j)`.

use std::io::Write;

use rand::Rng as _;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::point::{Dim, Point};
use crate::seed::{self, TileRng};

/// Axis-aligned sampling window with a buffer margin on every side.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub dim: Dim,
    pub lower: Point,
    pub upper: Point,
    pub margin: f64,
}

impl Window {
    pub fn new(dim: Dim, lower: Point, upper: Point, margin: f64) -> Result<Self> {
        let w = Window { dim, lower, upper, margin };
        w.validate()?;
        Ok(w)
    }

    /// `[0,1]^D` with the given margin.
    pub fn unit(dim: Dim, margin: f64) -> Result<Self> {
        let upper = match dim {
            Dim::One => Point::on_line(1.0),
            Dim::Two => Point::new(1.0, 1.0),
        };
        Window::new(dim, Point::ORIGIN, upper, margin)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.margin.is_finite() && self.margin >= 0.0) {
            return Err(invalid(format!("window margin must be finite and >= 0, got {}", self.margin)));
        }
        if !(self.lower.is_finite() && self.upper.is_finite()) {
            return Err(invalid("window corners must be finite"));
        }
        for i in 0..self.dim.get() {
            if !(self.upper.coord(i) > self.lower.coord(i)) {
                return Err(invalid(format!("window upper corner must exceed lower corner on axis {i}")));
            }
        }
        if self.dim == Dim::One && (self.lower.y != 0.0 || self.upper.y != 0.0) {
            return Err(invalid("one-dimensional windows must have zero second coordinate"));
        }
        Ok(())
    }

    /// Lower and upper corners of the inflated window.
    pub fn inflated(&self) -> (Point, Point) {
        let m = self.margin;
        match self.dim {
            Dim::One => (Point::on_line(self.lower.x - m), Point::on_line(self.upper.x + m)),
            Dim::Two => (Point::new(self.lower.x - m, self.lower.y - m), Point::new(self.upper.x + m, self.upper.y + m)),
        }
    }

    pub fn inflated_volume(&self) -> f64 {
        let (lo, hi) = self.inflated();
        match self.dim {
            Dim::One => hi.x - lo.x,
            Dim::Two => (hi.x - lo.x) * (hi.y - lo.y),
        }
    }

    pub fn contains_inflated(&self, p: Point) -> bool {
        let (lo, hi) = self.inflated();
        (0..self.dim.get()).all(|i| p.coord(i) >= lo.coord(i) && p.coord(i) <= hi.coord(i))
    }

    pub fn with_margin(&self, margin: f64) -> Result<Self> {
        Window::new(self.dim, self.lower, self.upper, margin)
    }
}

/// Default buffer margin for a generation of the given intensity.
pub fn default_margin(intensity: f64, dim: Dim) -> f64 {
    5.0 * intensity.powf(-1.0 / dim.as_f64())
}

/// One generation's nuclei on a finite window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NucleusSet {
    pub generation: u32,
    pub intensity: f64,
    pub points: Vec<Point>,
    pub seed: u64,
    pub window: Window,
}

impl NucleusSet {
    /// A hand-specified set, mainly for tests and worked examples. The window is
    /// the bounding box of the points, inflated by `margin`.
    pub fn from_points(dim: Dim, points: Vec<Point>, margin: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut lo = points[0];
        let mut hi = points[0];
        for p in &points {
            if !p.is_finite() || (dim == Dim::One && p.y != 0.0) {
                return Err(invalid("points must be finite and match the dimension"));
            }
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        // Degenerate extents get a unit width so the window stays valid.
        if hi.x <= lo.x {
            hi.x = lo.x + 1.0;
        }
        if dim == Dim::Two && hi.y <= lo.y {
            hi.y = lo.y + 1.0;
        }
        let window = Window::new(dim, lo, hi, margin)?;
        let intensity = points.len() as f64 / window.inflated_volume();
        Ok(NucleusSet { generation: 0, intensity, points, seed: 0, window })
    }

    pub fn dim(&self) -> Dim {
        self.window.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Writes `generation,index,x1[,x2]` rows, with a header, to `out`.
    pub fn write_csv<W: Write>(&self, out: &mut W, with_header: bool) -> Result<()> {
        if with_header {
            match self.dim() {
                Dim::One => writeln!(out, "generation,index,x1")?,
                Dim::Two => writeln!(out, "generation,index,x1,x2")?,
            }
        }
        for (i, p) in self.points.iter().enumerate() {
            match self.dim() {
                Dim::One => writeln!(out, "{},{},{}", self.generation, i, p.x)?,
                Dim::Two => writeln!(out, "{},{},{},{}", self.generation, i, p.x, p.y)?,
            }
        }
        Ok(())
    }
}

/// Poisson count sampler: CDF-table inversion for small means (the per-tile
/// case, where it is several times cheaper), the library sampler otherwise.
#[derive(Clone, Debug)]
enum CountSampler {
    Table(Vec<f64>),
    Library(Poisson<f64>),
}

const TABLE_MAX_MEAN: f64 = 32.0;

impl CountSampler {
    fn new(mean: f64) -> Result<Self> {
        if !(mean.is_finite() && mean > 0.0) {
            return Err(invalid(format!("Poisson mean must be positive and finite, got {mean}")));
        }
        if mean > TABLE_MAX_MEAN {
            return Ok(CountSampler::Library(Poisson::new(mean).map_err(|e| invalid(format!("Poisson mean {mean}: {e}")))?));
        }
        let mut cdf = Vec::new();
        let mut p = (-mean).exp();
        let mut acc = 0.0;
        let mut k = 0.0;
        while 1.0 - acc > 1e-17 && cdf.len() < 512 {
            acc += p;
            cdf.push(acc);
            k += 1.0;
            p *= mean / k;
        }
        if let Some(last) = cdf.last_mut() {
            *last = 1.0;
        }
        Ok(CountSampler::Table(cdf))
    }

    #[inline]
    fn sample(&self, rng: &mut TileRng) -> u64 {
        match self {
            CountSampler::Table(cdf) => {
                let u: f64 = rng.random();
                cdf.iter().position(|&c| u < c).unwrap_or(cdf.len() - 1) as u64
            }
            CountSampler::Library(p) => p.sample(rng) as u64,
        }
    }
}

/// The drawing protocol shared by both samplers: Poisson count, then uniform
/// points in the box `[lo, lo + extent)`.
struct Draw {
    rng: TileRng,
    remaining: u64,
    dim: Dim,
    lo: Point,
    extent: Point,
}

impl Draw {
    fn new(count: &CountSampler, dim: Dim, lo: Point, extent: Point, seed: u64) -> Self {
        let mut rng = seed::tile_rng(seed);
        let remaining = count.sample(&mut rng);
        Draw { rng, remaining, dim, lo, extent }
    }
}

impl Iterator for Draw {
    type Item = Point;

    #[inline]
    fn next(&mut self) -> Option<Point> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let u: f64 = self.rng.random();
        Some(match self.dim {
            Dim::One => Point::on_line(self.lo.x + self.extent.x * u),
            Dim::Two => {
                let v: f64 = self.rng.random();
                Point::new(self.lo.x + self.extent.x * u, self.lo.y + self.extent.y * v)
            }
        })
    }
}

/// Samples a homogeneous Poisson process of the given intensity on the inflated window.
pub fn sample_poisson(intensity: f64, window: Window, seed: u64) -> Result<NucleusSet> {
    if !(intensity.is_finite() && intensity > 0.0) {
        return Err(invalid(format!("intensity must be positive and finite, got {intensity}")));
    }
    window.validate()?;
    let volume = window.inflated_volume();
    if !(volume.is_finite() && volume > 0.0) {
        return Err(invalid("inflated window must have positive finite volume"));
    }
    let (lo, hi) = window.inflated();
    let extent = hi - lo;
    let points: Vec<Point> = Draw::new(&CountSampler::new(intensity * volume)?, window.dim, lo, extent, seed).collect();
    Ok(NucleusSet { generation: 0, intensity, points, seed, window })
}

/// Scales every point (and the window) by `factor`; intensity drops by `factor^D`.
pub fn rescale(set: &NucleusSet, factor: f64) -> Result<NucleusSet> {
    if !(factor.is_finite() && factor > 0.0) {
        return Err(invalid(format!("rescale factor must be positive and finite, got {factor}")));
    }
    let w = set.window;
    Ok(NucleusSet {
        generation: set.generation,
        intensity: set.intensity / factor.powi(set.dim().get() as i32),
        points: set.points.iter().map(|&p| p * factor).collect(),
        seed: set.seed,
        window: Window { dim: w.dim, lower: w.lower * factor, upper: w.upper * factor, margin: w.margin * factor },
    })
}

/// Seed of generation `n` under a master seed.
pub fn generation_seed(master: u64, n: u32) -> u64 {
    seed::derive(seed::derive(master, seed::stream::GENERATION), n as u64)
}

/// Identifier of a point of a [`TiledPoisson`] process: tile key, then draw order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TileId {
    pub tile: [i64; 2],
    pub slot: u32,
}

/// Exact procedural Poisson process on all of `R^D`.
#[derive(Clone, Debug)]
pub struct TiledPoisson {
    dim: Dim,
    intensity: f64,
    seed: u64,
    side: f64,
    count: CountSampler,
}

impl TiledPoisson {
    /// Tiles have side `intensity^{-1/D}`, one expected point each.
    pub fn new(dim: Dim, intensity: f64, seed: u64) -> Result<Self> {
        if !(intensity.is_finite() && intensity > 0.0) {
            return Err(invalid(format!("intensity must be positive and finite, got {intensity}")));
        }
        let side = intensity.powf(-1.0 / dim.as_f64());
        if !(side.is_finite() && side > 0.0) {
            return Err(invalid(format!("intensity {intensity} gives a degenerate tile side")));
        }
        let volume = side.powi(dim.get() as i32);
        Ok(TiledPoisson { dim, intensity, seed, side, count: CountSampler::new(intensity * volume)? })
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn intensity(&self) -> f64 {
        self.intensity
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn tile_of(&self, p: Point) -> [i64; 2] {
        let kx = (p.x / self.side).floor() as i64;
        match self.dim {
            Dim::One => [kx, 0],
            Dim::Two => [kx, (p.y / self.side).floor() as i64],
        }
    }

    pub fn tile_seed(&self, tile: [i64; 2]) -> u64 {
        seed::derive2(self.seed, tile[0], tile[1])
    }

    /// The tile as a zero-margin window; sampling it with
    /// `sample_poisson(intensity, window, tile_seed)` reproduces the tile's points.
    pub fn tile_window(&self, tile: [i64; 2]) -> Window {
        let lo = self.tile_lower(tile);
        let hi = match self.dim {
            Dim::One => Point::on_line(lo.x + self.side),
            Dim::Two => Point::new(lo.x + self.side, lo.y + self.side),
        };
        Window { dim: self.dim, lower: lo, upper: hi, margin: 0.0 }
    }

    fn tile_lower(&self, tile: [i64; 2]) -> Point {
        match self.dim {
            Dim::One => Point::on_line(tile[0] as f64 * self.side),
            Dim::Two => Point::new(tile[0] as f64 * self.side, tile[1] as f64 * self.side),
        }
    }

    /// Calls `f` on every point of a tile in draw order.
    #[inline]
    pub fn for_each_in_tile(&self, tile: [i64; 2], mut f: impl FnMut(TileId, Point)) {
        let lo = self.tile_lower(tile);
        let extent = Point::new(self.side, if self.dim == Dim::Two { self.side } else { 0.0 });
        for (slot, p) in Draw::new(&self.count, self.dim, lo, extent, self.tile_seed(tile)).enumerate() {
            f(TileId { tile, slot: slot as u32 }, p);
        }
    }

    /// Materialises the process on a window (points in the inflated window only).
    pub fn restrict(&self, window: &Window) -> Result<NucleusSet> {
        window.validate()?;
        if window.dim != self.dim {
            return Err(invalid("window dimension does not match the process"));
        }
        let (lo, hi) = window.inflated();
        let a = self.tile_of(lo);
        let b = self.tile_of(hi);
        let mut points = Vec::new();
        for ky in a[1]..=b[1] {
            for kx in a[0]..=b[0] {
                self.for_each_in_tile([kx, ky], |_, p| {
                    if window.contains_inflated(p) {
                        points.push(p);
                    }
                });
            }
        }
        Ok(NucleusSet { generation: 0, intensity: self.intensity, points, seed: self.seed, window: *window })
    }
}
