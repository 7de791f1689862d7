//! Perturbed dyadic layers: a cubic mesh translated by a uniform random vector,
//! with one uniform nucleus per cube. The pyramid over a cube is the cone from
//! its nucleus over each face.

use rand_distr::{Distribution, Open01};
use serde::Serialize;

use crate::geometry::{Simplex, SimplexRef};
use crate::point::{Dim, Point};
use crate::seed::{self, stream};

/// One generation of the dyadic model. Nuclei are a pure function of
/// `(generation seed, cube index)` and are generated on demand.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DyadicLayer {
    pub generation: u32,
    pub dim: Dim,
    pub side: f64,
    pub translation: Point,
    pub seed: u64,
}

impl DyadicLayer {
    pub fn new(generation: u32, dim: Dim, side: f64, seed: u64) -> Self {
        let mut rng = seed::rng(seed::derive(seed, stream::TRANSLATION));
        let tx: f64 = Open01.sample(&mut rng);
        let ty: f64 = if dim == Dim::Two { Open01.sample(&mut rng) } else { 0.0 };
        DyadicLayer { generation, dim, side, translation: Point::new(tx * side, ty * side), seed }
    }

    pub fn cube_of(&self, x: Point) -> [i64; 2] {
        let w = (x - self.translation) * (1.0 / self.side);
        match self.dim {
            Dim::One => [w.x.floor() as i64, 0],
            Dim::Two => [w.x.floor() as i64, w.y.floor() as i64],
        }
    }

    /// Nucleus position inside cube `k`, in cube-relative coordinates `(0,1)^D`.
    pub fn nucleus_unit(&self, k: [i64; 2]) -> Point {
        let mut rng = seed::rng(seed::derive2(self.seed, k[0], k[1]));
        let u: f64 = Open01.sample(&mut rng);
        let v: f64 = if self.dim == Dim::Two { Open01.sample(&mut rng) } else { 0.0 };
        Point::new(u, v)
    }

    pub fn cube_corner(&self, k: [i64; 2]) -> Point {
        let lo = Point::new(k[0] as f64 * self.side, k[1] as f64 * self.side) + self.translation;
        if self.dim == Dim::One {
            Point::on_line(lo.x)
        } else {
            lo
        }
    }

    pub fn nucleus(&self, k: [i64; 2]) -> Point {
        let u = self.nucleus_unit(k);
        let lo = self.cube_corner(k);
        match self.dim {
            Dim::One => Point::on_line(lo.x + u.x * self.side),
            Dim::Two => lo + u * self.side,
        }
    }

    /// Cube-relative coordinates of `x`, its cube, and its nucleus.
    fn local(&self, x: Point) -> (Point, [i64; 2], Point) {
        let k = self.cube_of(x);
        let w = (x - self.cube_corner(k)) * (1.0 / self.side);
        let w = Point::new(w.x.clamp(0.0, 1.0), if self.dim == Dim::Two { w.y.clamp(0.0, 1.0) } else { 0.0 });
        (w, k, self.nucleus_unit(k))
    }

    /// Fraction of the way from the nucleus to the crossed face, with the axis
    /// and side of that face (`true` for the upper face). Ties go to the lower axis.
    fn progress(&self, w: Point, u: Point) -> (f64, usize, bool) {
        let mut best = (f64::NEG_INFINITY, 0, false);
        for i in 0..self.dim.get() {
            let (wi, ui) = (w.coord(i), u.coord(i));
            let (r, up) = if wi > ui { ((wi - ui) / (1.0 - ui), true) } else { ((ui - wi) / ui, false) };
            if r > best.0 {
                best = (r, i, up);
            }
        }
        best
    }

    pub fn delta(&self, x: Point) -> f64 {
        let (w, _, u) = self.local(x);
        1.0 - self.progress(w, u).0
    }

    /// The nucleus and, off the nucleus, the affine piece and closed cone containing `x`.
    pub fn locate(&self, x: Point) -> (Point, Option<(SimplexRef, Simplex)>) {
        let (w, k, u) = self.local(x);
        let c = self.nucleus(k);
        if x == c {
            return (c, None);
        }
        let (_, axis, up) = self.progress(w, u);
        let lo = self.cube_corner(k);
        let s = self.side;
        let e = if axis == 0 { Point::new(1.0, 0.0) } else { Point::new(0.0, 1.0) };
        let gap = if up { (1.0 - u.coord(axis)) * s } else { -u.coord(axis) * s };
        let mirror = c + e * (2.0 * gap);
        let sref = SimplexRef::voronoi(self.generation, c, mirror);
        let simplex = match self.dim {
            Dim::One => Simplex::segment(c, c + e * gap),
            Dim::Two => {
                let f = if up { 1.0 } else { 0.0 };
                let (a, b) = if axis == 0 { (Point::new(f, 0.0), Point::new(f, 1.0)) } else { (Point::new(0.0, f), Point::new(1.0, f)) };
                Simplex::triangle(c, lo + a * s, lo + b * s)
            }
        };
        (c, Some((sref, simplex)))
    }
}
