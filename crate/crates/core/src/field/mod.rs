//! Layer functions `Δ_n` and the truncated series `F = Σ_n a^n Δ_n`.

pub mod dyadic;
pub mod hex;
mod raster;
mod stubs;

use serde::{Deserialize, Serialize};

pub use dyadic::DyadicLayer;
pub use raster::{raster_grid, write_raster_csv, Raster};
pub use stubs::{AffineField, ConstantField, PlusSmooth};

use crate::error::{invalid, Error, Result};
use crate::geometry::{self, BucketKey, Location, PointSource, Simplex, SimplexRef, TileCache};
use crate::point::{Dim, Point};
use crate::pointprocess::{default_margin, generation_seed, NucleusSet, TileId, TiledPoisson, Window};

/// Largest clamp applied to a computed `Δ` before it counts as a geometry error.
pub const CLAMP_TOLERANCE: f64 = 1e-12;

/// Finest mesh scale any default truncation depth may reach, by family.
const RESOLUTION_FLOOR_RANDOM: f64 = 1e-12;
const RESOLUTION_FLOOR_HEX: f64 = 1e-15;
/// Upper limit on default truncation depths, for run time.
pub const MAX_DEFAULT_DEPTH: u32 = 60;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Voronoi,
    Hexagonal,
    Dyadic,
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "voronoi" => Ok(Family::Voronoi),
            "hexagonal" | "hex" => Ok(Family::Hexagonal),
            "dyadic" => Ok(Family::Dyadic),
            _ => Err(invalid(format!("unknown family '{s}'"))),
        }
    }
}

/// Everything that determines a realization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldConfig {
    pub family: Family,
    pub dim: Dim,
    pub lambda: f64,
    pub alpha: f64,
    pub beta: f64,
    #[serde(rename = "H")]
    pub hurst: f64,
    pub depth: u32,
    pub window: Window,
    pub seed: u64,
}

impl FieldConfig {
    /// Config on `[0,1]^D` with zero margin (margins are applied per generation).
    pub fn new(family: Family, dim: Dim, lambda: f64, alpha: f64, beta: f64, hurst: f64, depth: u32, seed: u64) -> Result<Self> {
        let cfg = FieldConfig { family, dim, lambda, alpha, beta, hurst, depth, window: Window::unit(dim, 0.0)?, seed };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Hexagonal model with amplitude exponent `alpha`.
    pub fn hexagonal(alpha: f64, depth: u32) -> Result<Self> {
        FieldConfig::new(Family::Hexagonal, Dim::Two, 2.0, alpha, 1.0, 1.5, depth, 0)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.lambda, self.alpha, self.beta, self.hurst].iter().all(|v| v.is_finite());
        if !finite {
            return Err(invalid("parameters must be finite"));
        }
        if !(self.lambda > 1.0) {
            return Err(invalid(format!("lambda must exceed 1, got {}", self.lambda)));
        }
        if !(self.alpha > 0.0 && self.alpha <= self.beta && self.beta <= 1.0) {
            return Err(invalid(format!("need 0 < alpha <= beta <= 1, got alpha={} beta={}", self.alpha, self.beta)));
        }
        if !(self.hurst > self.beta) {
            return Err(invalid(format!("H must exceed beta, got H={} beta={}", self.hurst, self.beta)));
        }
        if self.window.dim != self.dim {
            return Err(invalid("window dimension differs from D"));
        }
        self.window.validate()?;
        if self.family == Family::Hexagonal {
            if self.dim != Dim::Two {
                return Err(invalid("the hexagonal family requires D = 2"));
            }
            if self.lambda != 2.0 || self.beta != 1.0 {
                return Err(invalid("the hexagonal family fixes lambda = 2 and beta = 1"));
            }
        }
        Ok(())
    }

    fn d(&self) -> f64 {
        self.dim.as_f64()
    }

    /// Per-generation amplitude ratio `a`, so generation `n` carries weight `a^n`.
    ///
    /// For the hexagonal model `a = 2^{-α}`, matching `f_α = Σ 2^{-nα} Δ(2^n x)`.
    pub fn amplitude_ratio(&self) -> f64 {
        match self.family {
            Family::Hexagonal => 2f64.powf(-self.alpha),
            _ => self.lambda.powf(-self.alpha / self.d()),
        }
    }

    /// Per-generation ratio of mesh scales.
    pub fn scale_ratio(&self) -> f64 {
        match self.family {
            Family::Hexagonal => 0.5,
            _ => self.lambda.powf(-self.beta / self.d()),
        }
    }

    pub fn amplitude(&self, n: u32) -> f64 {
        self.amplitude_ratio().powi(n as i32)
    }

    /// Typical spacing of generation `n` (cube side for the dyadic model).
    pub fn scale(&self, n: u32) -> f64 {
        self.scale_ratio().powi(n as i32)
    }

    /// Intensity `λ^{nβ}` of generation `n`.
    pub fn intensity(&self, n: u32) -> f64 {
        self.lambda.powf(n as f64 * self.beta)
    }

    /// Oscillation-set radius `τ_n = λ^{-nH/D}`.
    pub fn tau(&self, n: u32) -> f64 {
        self.scale(n).powf(self.hurst / self.beta)
    }

    /// Rigorous bound on the discarded tail `Σ_{n>depth} a^n Δ_n`.
    pub fn truncation_bound(&self) -> f64 {
        let a = self.amplitude_ratio();
        a.powi(self.depth as i32 + 1) / (1.0 - a)
    }

    /// Mesh scale of the finest retained generation.
    pub fn truncation_scale(&self) -> f64 {
        self.scale(self.depth)
    }

    /// Depth whose tail bound is below `1e-4 · tau_min^{α/β}`, limited by float
    /// resolution of the finest mesh and by [`MAX_DEFAULT_DEPTH`].
    pub fn recommended_depth(&self, tau_min: f64) -> u32 {
        let a = self.amplitude_ratio();
        let target = 1e-4 * tau_min.powf(self.alpha / self.beta) * (1.0 - a);
        let by_tail = (target.ln() / a.ln() - 1.0).ceil().max(0.0);
        let floor = if self.family == Family::Hexagonal { RESOLUTION_FLOOR_HEX } else { RESOLUTION_FLOOR_RANDOM };
        let by_resolution = (floor.ln() / self.scale_ratio().ln()).floor();
        by_tail.min(by_resolution).min(MAX_DEFAULT_DEPTH as f64) as u32
    }

    /// Target graph dimension `D + 1 − α/β`.
    pub fn predicted_dimension(&self) -> f64 {
        self.d() + 1.0 - self.alpha / self.beta
    }
}

/// A real-valued field on `R^D` that can be sampled pointwise.
pub trait SurfaceField: Sync {
    fn dim(&self) -> Dim;

    fn value(&self, x: Point) -> Result<f64>;

    /// Mesh scale below which the field is smooth (0 if it has no truncation).
    fn truncation_scale(&self) -> f64;
}

/// Nuclei of one Voronoi generation: the bare tiled process, or one with a
/// stored region.
#[derive(Clone, Debug)]
pub enum VoronoiSource {
    Lazy(TiledPoisson),
    Cached(TileCache),
}

impl VoronoiSource {
    pub fn process(&self) -> &TiledPoisson {
        match self {
            VoronoiSource::Lazy(p) => p,
            VoronoiSource::Cached(c) => c.process(),
        }
    }
}

impl PointSource for VoronoiSource {
    type Id = TileId;

    fn dim(&self) -> Dim {
        self.process().dim()
    }

    fn bucket_side(&self) -> f64 {
        self.process().side()
    }

    fn bucket_of(&self, p: Point) -> BucketKey {
        self.process().tile_of(p)
    }

    fn bucket_range(&self) -> Option<(BucketKey, BucketKey)> {
        None
    }

    #[inline]
    fn visit_bucket<F: FnMut(TileId, Point)>(&self, key: BucketKey, f: &mut F) {
        match self {
            VoronoiSource::Lazy(p) => p.visit_bucket(key, f),
            VoronoiSource::Cached(c) => c.visit_bucket(key, f),
        }
    }
}

#[derive(Clone, Debug)]
enum Layer {
    Voronoi(VoronoiSource),
    Hexagonal,
    Dyadic(DyadicLayer),
}

/// The affine piece above a point of one generation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Piece {
    /// The point is a nucleus, where `Δ_n = 1`.
    Nucleus(Point),
    Simplex(SimplexRef),
}

/// A sampled surface: the layers of generations `0..=depth`.
#[derive(Clone, Debug)]
pub struct FieldRealization {
    config: FieldConfig,
    layers: Vec<Layer>,
}

impl FieldRealization {
    /// Builds all layers; Voronoi nuclei are generated on demand.
    pub fn new(config: FieldConfig) -> Result<Self> {
        config.validate()?;
        let layers = (0..=config.depth)
            .map(|n| {
                let seed = generation_seed(config.seed, n);
                Ok(match config.family {
                    Family::Voronoi => Layer::Voronoi(VoronoiSource::Lazy(TiledPoisson::new(config.dim, config.intensity(n), seed)?)),
                    Family::Hexagonal => Layer::Hexagonal,
                    Family::Dyadic => Layer::Dyadic(DyadicLayer::new(n, config.dim, config.scale(n), seed)),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FieldRealization { config, layers })
    }

    /// Like [`FieldRealization::new`], storing Voronoi nuclei near the window for
    /// the coarsest generations while at most `budget` points are stored in total.
    pub fn with_cache(config: FieldConfig, budget: usize) -> Result<Self> {
        let mut real = FieldRealization::new(config)?;
        let mut used = 0usize;
        let cfg = real.config.clone();
        for (n, layer) in real.layers.iter_mut().enumerate() {
            if let Layer::Voronoi(src) = layer {
                let intensity = cfg.intensity(n as u32);
                let window = cfg.window.with_margin(cfg.window.margin + default_margin(intensity, cfg.dim))?;
                let expected = intensity * window.inflated_volume();
                if !(expected.is_finite()) || used as f64 + expected > budget as f64 {
                    break;
                }
                let (lo, hi) = window.inflated();
                let cache = TileCache::new(src.process().clone(), lo, hi);
                used += cache.stored_points();
                *src = VoronoiSource::Cached(cache);
            }
        }
        Ok(real)
    }

    pub fn config(&self) -> &FieldConfig {
        &self.config
    }

    pub fn depth(&self) -> u32 {
        self.config.depth
    }

    fn layer(&self, n: u32) -> Result<&Layer> {
        self.layers.get(n as usize).ok_or_else(|| invalid(format!("generation {n} exceeds truncation depth {}", self.config.depth)))
    }

    /// The tiled process of a Voronoi generation.
    pub fn voronoi_source(&self, n: u32) -> Result<&VoronoiSource> {
        match self.layer(n)? {
            Layer::Voronoi(s) => Ok(s),
            _ => Err(invalid("not a Voronoi realization")),
        }
    }

    /// Layer descriptor of a dyadic generation.
    pub fn dyadic_layer(&self, n: u32) -> Result<DyadicLayer> {
        match self.layer(n)? {
            Layer::Dyadic(d) => Ok(*d),
            _ => Err(invalid("not a dyadic realization")),
        }
    }

    /// Nuclei of Voronoi generation `n` on the config window, with the default margin.
    pub fn nucleus_set(&self, n: u32) -> Result<NucleusSet> {
        let src = self.voronoi_source(n)?;
        let intensity = self.config.intensity(n);
        let window = self.config.window.with_margin(self.config.window.margin + default_margin(intensity, self.config.dim))?;
        let mut set = src.process().restrict(&window)?;
        set.generation = n;
        Ok(set)
    }

    /// `Δ_n(x)`.
    pub fn delta(&self, n: u32, x: Point) -> Result<f64> {
        let raw = match self.layer(n)? {
            Layer::Voronoi(src) => match geometry::locate(src, x)? {
                Location::Nucleus { .. } => 1.0,
                Location::Piece { c, c2, .. } => SimplexRef::voronoi(n, c, c2).delta(x),
            },
            Layer::Hexagonal => hex::delta(n, x),
            Layer::Dyadic(d) => d.delta(x),
        };
        clamp_delta(raw)
    }

    /// The affine piece of generation `n` above `x`.
    pub fn locate(&self, n: u32, x: Point) -> Result<Piece> {
        Ok(match self.layer(n)? {
            Layer::Voronoi(src) => match geometry::locate(src, x)? {
                Location::Nucleus { point, .. } => Piece::Nucleus(point),
                Location::Piece { c, c2, .. } => Piece::Simplex(SimplexRef::voronoi(n, c, c2)),
            },
            Layer::Hexagonal => match hex::locate(n, x) {
                (c, None) => Piece::Nucleus(c),
                (_, Some((s, _))) => Piece::Simplex(s),
            },
            Layer::Dyadic(d) => match d.locate(x) {
                (c, None) => Piece::Nucleus(c),
                (_, Some((s, _))) => Piece::Simplex(s),
            },
        })
    }

    /// The closed simplex of generation `n` containing `x` (`None` at a nucleus).
    pub fn simplex(&self, n: u32, x: Point) -> Result<Option<Simplex>> {
        match self.layer(n)? {
            Layer::Voronoi(src) => {
                let loc = geometry::locate(src, x)?;
                geometry::simplex_of(src, x, &loc)
            }
            Layer::Hexagonal => Ok(hex::locate(n, x).1.map(|(_, s)| s)),
            Layer::Dyadic(d) => Ok(d.locate(x).1.map(|(_, s)| s)),
        }
    }

    /// Whether `B_radius(x)` lies in one closed simplex of generation `n`.
    pub fn membership(&self, n: u32, x: Point, radius: f64) -> Result<bool> {
        if !(radius >= 0.0) {
            return Err(invalid(format!("radius must be >= 0, got {radius}")));
        }
        Ok(match self.simplex(n, x)? {
            None => radius == 0.0,
            Some(s) => s.skeleton_distance(x) >= radius,
        })
    }

    /// `x ∈ O_{n,N}`: the `τ_N`-ball around `x` lies in one simplex of generation `n`.
    pub fn in_oscillation_set(&self, n: u32, big_n: u32, x: Point) -> Result<bool> {
        self.membership(n, x, self.config.tau(big_n))
    }

    /// `x ∈ W_N`, with the intersection over `n ≥ N` truncated at the depth.
    pub fn in_w(&self, big_n: u32, x: Point) -> Result<bool> {
        for n in big_n..=self.config.depth {
            if !self.in_oscillation_set(n, n, x)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Truncated series value.
    pub fn value(&self, x: Point) -> Result<f64> {
        let a = self.config.amplitude_ratio();
        if let Family::Hexagonal = self.config.family {
            let mut sum = 0.0;
            let mut w = 1.0;
            let mut bad = None;
            hex::for_each_delta(x, self.config.depth, |_, d| {
                match clamp_delta(d) {
                    Ok(d) => sum += w * d,
                    Err(e) => bad = Some(e),
                }
                w *= a;
            });
            return match bad {
                Some(e) => Err(e),
                None => Ok(sum),
            };
        }
        let mut sum = 0.0;
        let mut w = 1.0;
        for n in 0..=self.config.depth {
            sum += w * self.delta(n, x)?;
            w *= a;
        }
        Ok(sum)
    }

    /// Truncated value and the bound on the discarded tail.
    pub fn series_eval(&self, x: Point) -> Result<(f64, f64)> {
        Ok((self.value(x)?, self.config.truncation_bound()))
    }

    /// Closed-form increment `Z_n(x,y) = −2a^n⟨x−y, c′−c⟩/‖c′−c‖²`.
    ///
    /// Requires `x ∈ O_{n,n}` and `‖x−y‖ ≤ τ_n`.
    pub fn increment_zn(&self, n: u32, x: Point, y: Point) -> Result<f64> {
        let tau = self.config.tau(n);
        let gap = x.dist(y);
        if gap > tau {
            return Err(Error::Precondition(format!("|x-y| = {gap} exceeds tau_{n} = {tau}")));
        }
        if !self.membership(n, x, tau)? {
            return Err(Error::Precondition(format!("x is not in the oscillation set O_({n},{n})")));
        }
        match self.locate(n, x)? {
            Piece::Simplex(s) => Ok(s.increment(self.config.amplitude(n), x, y)),
            Piece::Nucleus(_) => Err(Error::Precondition("x is a nucleus".into())),
        }
    }

    /// `S_n(x,y) = Σ_{k≠n} a^k (Δ_k(x) − Δ_k(y))` over the retained generations.
    pub fn remainder_sn(&self, n: u32, x: Point, y: Point) -> Result<f64> {
        let mut sum = 0.0;
        for k in (0..=self.config.depth).filter(|&k| k != n) {
            sum += self.config.amplitude(k) * (self.delta(k, x)? - self.delta(k, y)?);
        }
        Ok(sum)
    }
}

fn clamp_delta(raw: f64) -> Result<f64> {
    if !(-CLAMP_TOLERANCE..=1.0 + CLAMP_TOLERANCE).contains(&raw) {
        return Err(Error::Inconsistent(format!("pyramid value {raw} outside [0,1]")));
    }
    Ok(raw.clamp(0.0, 1.0))
}

impl SurfaceField for FieldRealization {
    fn dim(&self) -> Dim {
        self.config.dim
    }

    fn value(&self, x: Point) -> Result<f64> {
        FieldRealization::value(self, x)
    }

    fn truncation_scale(&self) -> f64 {
        self.config.truncation_scale()
    }
}

/// `Δ_n(x)` of a realization.
pub fn delta_eval(real: &FieldRealization, n: u32, x: Point) -> Result<f64> {
    real.delta(n, x)
}

/// Truncated series value and tail bound.
pub fn series_eval(real: &FieldRealization, x: Point) -> Result<(f64, f64)> {
    real.series_eval(x)
}

/// Closed-form increment of generation `n`.
pub fn increment_zn(real: &FieldRealization, n: u32, x: Point, y: Point) -> Result<f64> {
    real.increment_zn(n, x, y)
}

/// Layer descriptor of a dyadic generation.
pub fn dyadic_layer(real: &FieldRealization, n: u32) -> Result<DyadicLayer> {
    real.dyadic_layer(n)
}
