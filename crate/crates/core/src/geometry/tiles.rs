use super::{BucketKey, PointSource};
use crate::point::{Dim, Point};
use crate::pointprocess::{TileId, TiledPoisson};

impl PointSource for TiledPoisson {
    type Id = TileId;

    fn dim(&self) -> Dim {
        TiledPoisson::dim(self)
    }

    fn bucket_side(&self) -> f64 {
        self.side()
    }

    fn bucket_of(&self, p: Point) -> BucketKey {
        self.tile_of(p)
    }

    fn bucket_range(&self) -> Option<(BucketKey, BucketKey)> {
        None
    }

    #[inline]
    fn visit_bucket<F: FnMut(TileId, Point)>(&self, key: BucketKey, f: &mut F) {
        self.for_each_in_tile(key, f);
    }
}

/// A [`TiledPoisson`] with the tiles of a rectangular key range stored up front.
///
/// Tiles outside the stored range are still generated on demand, so every query
/// answers exactly as it would on the bare process.
#[derive(Clone, Debug)]
pub struct TileCache {
    process: TiledPoisson,
    lo: BucketKey,
    shape: [i64; 2],
    offsets: Vec<u32>,
    points: Vec<Point>,
}

impl TileCache {
    /// Stores every tile meeting the box `[lo, hi]`.
    pub fn new(process: TiledPoisson, lo: Point, hi: Point) -> Self {
        let a = process.tile_of(lo);
        let b = process.tile_of(hi);
        let shape = [b[0] - a[0] + 1, b[1] - a[1] + 1];
        let mut offsets = Vec::with_capacity((shape[0] * shape[1]) as usize + 1);
        let mut points = Vec::new();
        offsets.push(0u32);
        for ky in a[1]..=b[1] {
            for kx in a[0]..=b[0] {
                process.for_each_in_tile([kx, ky], |_, p| points.push(p));
                offsets.push(points.len() as u32);
            }
        }
        TileCache { process, lo: a, shape, offsets, points }
    }

    pub fn process(&self) -> &TiledPoisson {
        &self.process
    }

    pub fn stored_points(&self) -> usize {
        self.points.len()
    }
}

impl PointSource for TileCache {
    type Id = TileId;

    fn dim(&self) -> Dim {
        self.process.dim()
    }

    fn bucket_side(&self) -> f64 {
        self.process.side()
    }

    fn bucket_of(&self, p: Point) -> BucketKey {
        self.process.tile_of(p)
    }

    fn bucket_range(&self) -> Option<(BucketKey, BucketKey)> {
        None
    }

    #[inline]
    fn visit_bucket<F: FnMut(TileId, Point)>(&self, key: BucketKey, f: &mut F) {
        let rx = key[0] - self.lo[0];
        let ry = key[1] - self.lo[1];
        if rx >= 0 && ry >= 0 && rx < self.shape[0] && ry < self.shape[1] {
            let s = (ry * self.shape[0] + rx) as usize;
            let (a, b) = (self.offsets[s] as usize, self.offsets[s + 1] as usize);
            for (slot, &p) in self.points[a..b].iter().enumerate() {
                f(TileId { tile: key, slot: slot as u32 }, p);
            }
        } else {
            self.process.for_each_in_tile(key, f);
        }
    }
}
