//! The deterministic hexagonal model.
//!
//! `X_0` is the triangular lattice whose hexagonal cell at the origin has
//! circumradius 1 and a vertex at `(1, 0)`; `X_n = 2^{-n} X_0`. Points are
//! handled in lattice coordinates `(a, b)` with `p = a·B1 + b·B2`, where doubling
//! the fractional parts is exact in floating point.

use crate::geometry::{Simplex, SimplexRef};
use crate::point::Point;

const SQRT3: f64 = 1.732_050_807_568_877_2;
pub const B1: Point = Point::new(1.5, SQRT3 / 2.0);
pub const B2: Point = Point::new(0.0, SQRT3);

/// Offsets to the six neighbouring centres, in tie-breaking order.
pub const NEIGHBORS: [Point; 6] =
    [B1, B2, Point::new(-1.5, SQRT3 / 2.0), Point::new(-1.5, -SQRT3 / 2.0), Point::new(0.0, -SQRT3), Point::new(1.5, -SQRT3 / 2.0)];

pub fn to_lattice(p: Point) -> (f64, f64) {
    let a = p.x / 1.5;
    (a, p.y / SQRT3 - 0.5 * a)
}

pub fn from_lattice(a: f64, b: f64) -> Point {
    B1 * a + B2 * b
}

/// Nearest lattice centre to `p`, given the lattice coordinates of `p`.
fn nearest_center(a: f64, b: f64) -> (f64, f64) {
    let (a0, b0) = (a.floor(), b.floor());
    let p = from_lattice(a, b);
    let mut best = (a0, b0);
    let mut bd = f64::INFINITY;
    for (i, j) in [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)] {
        let d = (p - from_lattice(a0 + i, b0 + j)).norm2();
        if d < bd {
            bd = d;
            best = (a0 + i, b0 + j);
        }
    }
    best
}

/// Index of the neighbour offset maximising `⟨w, n_j⟩`, and the maximum.
fn facing(w: Point) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (j, n) in NEIGHBORS.iter().enumerate() {
        let s = w.dot(*n);
        if s > best.1 {
            best = (j, s);
        }
    }
    best
}

/// `Δ` of generation 0 at the point with lattice coordinates `(a, b)`, unclamped.
fn delta0_lattice(a: f64, b: f64) -> f64 {
    let (ca, cb) = nearest_center(a, b);
    let w = from_lattice(a - ca, b - cb);
    1.0 - facing(w).1 * (2.0 / 3.0)
}

/// `Δ(p) = Δ_0(p)`.
pub fn delta0(p: Point) -> f64 {
    let (a, b) = to_lattice(p);
    delta0_lattice(a, b)
}

/// Calls `f(n, Δ_n(x))` for `n = 0..=depth`, using exact doubling of the
/// fractional lattice coordinates.
pub fn for_each_delta(x: Point, depth: u32, mut f: impl FnMut(u32, f64)) {
    let (a, b) = to_lattice(x);
    let (mut a, mut b) = (a - a.floor(), b - b.floor());
    for n in 0..=depth {
        f(n, delta0_lattice(a, b));
        a *= 2.0;
        b *= 2.0;
        a -= a.floor();
        b -= b.floor();
    }
}

/// `Δ_n(x)` for a single generation.
pub fn delta(n: u32, x: Point) -> f64 {
    let mut out = 0.0;
    for_each_delta(x, n, |k, d| {
        if k == n {
            out = d;
        }
    });
    out
}

/// Nucleus of generation `n` containing `x`, and the simplex piece, in real coordinates.
pub fn locate(n: u32, x: Point) -> (Point, Option<(SimplexRef, Simplex)>) {
    let s = 0.5f64.powi(n as i32);
    let q = x * (1.0 / s);
    let (a, b) = to_lattice(q);
    let (ca, cb) = nearest_center(a, b);
    let center = from_lattice(ca, cb);
    let w = from_lattice(a - ca, b - cb);
    if w.norm2() == 0.0 {
        return (center * s, None);
    }
    let (j, _) = facing(w);
    let nj = NEIGHBORS[j];
    let mid = center + nj * 0.5;
    let half = nj.perp() * (0.5 / SQRT3);
    let simplex = Simplex::triangle(center * s, (mid - half) * s, (mid + half) * s);
    let sref = SimplexRef::voronoi(n, center * s, (center + nj) * s);
    (center * s, Some((sref, simplex)))
}

/// Vertices of the generation-`n` hexagon centred at lattice point `(i, j)`.
pub fn cell_vertices(n: u32, i: i64, j: i64) -> [Point; 6] {
    let s = 0.5f64.powi(n as i32);
    let c = from_lattice(i as f64, j as f64);
    let mut out = [Point::ORIGIN; 6];
    for (k, v) in out.iter_mut().enumerate() {
        let t = k as f64 * std::f64::consts::FRAC_PI_3;
        *v = (c + Point::new(t.cos(), t.sin())) * s;
    }
    out
}
