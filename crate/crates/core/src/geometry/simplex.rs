use serde::{Deserialize, Serialize};

use crate::point::Point;

/// The affine piece of a pyramid above a point: nucleus `c`, secondary nucleus
/// `c′` and their bisector `{y : ⟨y, normal⟩ = offset}`.
///
/// For the dyadic model `c′` is the mirror image of `c` in the crossed cube face,
/// so the face is again the bisector and every formula carries over unchanged.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimplexRef {
    pub generation: u32,
    pub nucleus: Point,
    pub secondary: Point,
    pub normal: Point,
    pub offset: f64,
}

impl SimplexRef {
    pub fn voronoi(generation: u32, nucleus: Point, secondary: Point) -> Self {
        let d = secondary - nucleus;
        let normal = d * (1.0 / d.norm());
        let offset = ((nucleus + secondary) * 0.5).dot(normal);
        SimplexRef { generation, nucleus, secondary, normal, offset }
    }

    /// Unclamped affine extension of the pyramid piece.
    #[inline]
    pub fn delta(&self, y: Point) -> f64 {
        let d = self.secondary - self.nucleus;
        1.0 - 2.0 * (y - self.nucleus).dot(d) / d.norm2()
    }

    /// Gradient of the affine piece.
    pub fn gradient(&self) -> Point {
        let d = self.secondary - self.nucleus;
        d * (-2.0 / d.norm2())
    }

    /// `−2·amplitude·⟨x−y, c′−c⟩/‖c′−c‖²`.
    pub fn increment(&self, amplitude: f64, x: Point, y: Point) -> f64 {
        let d = self.secondary - self.nucleus;
        -2.0 * amplitude * (x - y).dot(d) / d.norm2()
    }

    /// Signed distance to the bisector, positive on the nucleus side.
    pub fn bisector_distance(&self, y: Point) -> f64 {
        self.offset - y.dot(self.normal)
    }
}

/// A closed simplex of the tessellation: a segment `[c, b]` in D=1 or a
/// triangle `(c, a, b)` in D=2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Simplex {
    Segment { apex: Point, end: Point },
    Triangle { apex: Point, a: Point, b: Point },
}

fn line_distance(p: Point, q: Point, x: Point) -> f64 {
    let e = q - p;
    let len = e.norm();
    if len == 0.0 {
        return x.dist(p);
    }
    (e.cross(x - p) / len).abs()
}

impl Simplex {
    pub fn segment(apex: Point, end: Point) -> Self {
        Simplex::Segment { apex, end }
    }

    pub fn triangle(apex: Point, a: Point, b: Point) -> Self {
        Simplex::Triangle { apex, a, b }
    }

    /// Distance from a point of the simplex to the simplex boundary.
    pub fn skeleton_distance(&self, x: Point) -> f64 {
        match *self {
            Simplex::Segment { apex, end } => x.dist(apex).min(x.dist(end)),
            Simplex::Triangle { apex, a, b } => line_distance(apex, a, x).min(line_distance(a, b, x)).min(line_distance(b, apex, x)),
        }
    }

    pub fn contains(&self, x: Point, tol: f64) -> bool {
        match *self {
            Simplex::Segment { apex, end } => {
                let (lo, hi) = if apex.x <= end.x { (apex.x, end.x) } else { (end.x, apex.x) };
                x.x >= lo - tol && x.x <= hi + tol
            }
            Simplex::Triangle { apex, a, b } => {
                let s = (a - apex).cross(b - apex).signum();
                let e1 = s * (a - apex).cross(x - apex);
                let e2 = s * (b - a).cross(x - a);
                let e3 = s * (apex - b).cross(x - b);
                e1 >= -tol && e2 >= -tol && e3 >= -tol
            }
        }
    }

    /// Length (D=1) or area (D=2).
    pub fn volume(&self) -> f64 {
        match *self {
            Simplex::Segment { apex, end } => apex.dist(end),
            Simplex::Triangle { apex, a, b } => 0.5 * (a - apex).cross(b - apex).abs(),
        }
    }
}
