use super::{BucketKey, PointSource};
use crate::point::{Dim, Point};
use crate::pointprocess::NucleusSet;

/// Uniform bucket grid over a finite [`NucleusSet`], bucket side ≈ `intensity^{-1/D}`.
#[derive(Clone, Debug)]
pub struct GridIndex<'a> {
    set: &'a NucleusSet,
    origin: Point,
    side: f64,
    shape: [i64; 2],
    offsets: Vec<u32>,
    order: Vec<u32>,
}

impl<'a> GridIndex<'a> {
    pub fn new(set: &'a NucleusSet) -> Self {
        let dim = set.dim();
        let (lo, hi) = set.window.inflated();
        let extent = hi - lo;
        let wanted = if set.intensity > 0.0 { set.intensity.powf(-1.0 / dim.as_f64()) } else { extent.x };
        // Keep the bucket count proportional to the point count.
        let max_side = match dim {
            Dim::One => extent.x,
            Dim::Two => extent.x.max(extent.y),
        };
        let side = wanted.min(max_side).max(max_side / 4096.0);
        let nx = ((extent.x / side).ceil() as i64).max(1);
        let ny = if dim == Dim::Two { ((extent.y / side).ceil() as i64).max(1) } else { 1 };
        let mut index = GridIndex { set, origin: lo, side, shape: [nx, ny], offsets: Vec::new(), order: Vec::new() };

        let nb = (nx * ny) as usize;
        let slot: Vec<usize> = set.points.iter().map(|&p| index.slot(index.bucket_of(p))).collect();
        let mut offsets = vec![0u32; nb + 1];
        for &s in &slot {
            offsets[s + 1] += 1;
        }
        for i in 0..nb {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut order = vec![0u32; set.points.len()];
        for (i, &s) in slot.iter().enumerate() {
            order[fill[s] as usize] = i as u32;
            fill[s] += 1;
        }
        index.offsets = offsets;
        index.order = order;
        index
    }

    pub fn set(&self) -> &'a NucleusSet {
        self.set
    }

    fn slot(&self, key: BucketKey) -> usize {
        let kx = key[0].clamp(0, self.shape[0] - 1);
        let ky = key[1].clamp(0, self.shape[1] - 1);
        (ky * self.shape[0] + kx) as usize
    }
}

impl PointSource for GridIndex<'_> {
    type Id = usize;

    fn dim(&self) -> Dim {
        self.set.dim()
    }

    fn bucket_side(&self) -> f64 {
        self.side
    }

    fn bucket_of(&self, p: Point) -> BucketKey {
        let kx = ((p.x - self.origin.x) / self.side).floor() as i64;
        match self.dim() {
            Dim::One => [kx, 0],
            Dim::Two => [kx, ((p.y - self.origin.y) / self.side).floor() as i64],
        }
    }

    fn bucket_range(&self) -> Option<(BucketKey, BucketKey)> {
        Some(([0, 0], [self.shape[0] - 1, self.shape[1] - 1]))
    }

    fn visit_bucket<F: FnMut(usize, Point)>(&self, key: BucketKey, f: &mut F) {
        if key[0] < 0 || key[1] < 0 || key[0] >= self.shape[0] || key[1] >= self.shape[1] {
            return;
        }
        let s = self.slot(key);
        for &i in &self.order[self.offsets[s] as usize..self.offsets[s + 1] as usize] {
            f(i as usize, self.set.points[i as usize]);
        }
    }
}
