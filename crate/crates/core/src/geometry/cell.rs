use super::{first_ring, visit_ring, PointSource};
use crate::error::{Error, Result};
use crate::point::Point;

/// A convex Voronoi cell, vertices counterclockwise. Edge `i` runs from vertex
/// `i` to vertex `i+1` and lies on the bisector with `neighbors[i]`, or on the
/// clip window when `neighbors[i]` is `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct CellPolygon<I> {
    pub nucleus: Point,
    pub vertices: Vec<Point>,
    pub neighbors: Vec<Option<I>>,
}

impl<I: Copy + PartialEq> CellPolygon<I> {
    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        (0..n).map(|i| self.vertices[i].cross(self.vertices[(i + 1) % n])).sum::<f64>() * 0.5
    }

    pub fn edge(&self, i: usize) -> (Point, Point) {
        (self.vertices[i], self.vertices[(i + 1) % self.vertices.len()])
    }

    /// Endpoints of the facet bounding the cone that contains `x`: the edge shared
    /// with `neighbor` when there is one, otherwise the edge the ray `[c, x)` meets.
    pub fn facet_towards(&self, neighbor: I, x: Point) -> Option<(Point, Point)> {
        if let Some(i) = self.neighbors.iter().position(|&n| n == Some(neighbor)) {
            return Some(self.edge(i));
        }
        let u = x - self.nucleus;
        (0..self.vertices.len())
            .map(|i| self.edge(i))
            .find(|&(a, b)| (a - self.nucleus).cross(u) >= 0.0 && u.cross(b - self.nucleus) >= 0.0)
    }
}

/// Clips a convex polygon (in coordinates relative to the nucleus) by the
/// half-plane `⟨w, d⟩ ≤ ‖d‖²/2`, tagging the new edge with `tag`.
fn clip<I: Copy>(poly: &[(Point, Option<I>)], d: Point, tag: I, out: &mut Vec<(Point, Option<I>)>) {
    out.clear();
    let h = 0.5 * d.norm2();
    let n = poly.len();
    for i in 0..n {
        let (a, ta) = poly[i];
        let (b, _) = poly[(i + 1) % n];
        let sa = a.dot(d) - h;
        let sb = b.dot(d) - h;
        let cross = |sa: f64, sb: f64| a + (b - a) * (sa / (sa - sb));
        match (sa <= 0.0, sb <= 0.0) {
            (true, true) => out.push((a, ta)),
            (true, false) => {
                out.push((a, ta));
                out.push((cross(sa, sb), Some(tag)));
            }
            (false, true) => out.push((cross(sa, sb), ta)),
            (false, false) => {}
        }
    }
    // Drop repeated vertices created by cuts through existing vertices.
    let scale = out.iter().map(|(p, _)| p.norm()).fold(0.0_f64, f64::max);
    let eps = 1e-13 * scale.max(f64::MIN_POSITIVE);
    let mut i = 0;
    while out.len() > 2 && i < out.len() {
        let j = (i + 1) % out.len();
        if out[i].0.dist(out[j].0) <= eps {
            // Keep the outgoing tag of the later vertex; the zero-length edge vanishes.
            let keep = out[j].1;
            out[i].1 = keep;
            out.remove(j);
            if j < i {
                i -= 1;
            }
        } else {
            i += 1;
        }
    }
}

/// Voronoi cell of nucleus `c` (identified by `c_id`), optionally clipped to `[lo, hi]`.
pub fn cell_polygon_of<S: PointSource>(src: &S, c_id: S::Id, c: Point, window: Option<(Point, Point)>) -> Result<CellPolygon<S::Id>> {
    let side = src.bucket_side();
    let (lo, hi) = match window {
        Some(w) => w,
        None => {
            let r = match src.bucket_range() {
                Some((a, b)) => {
                    let span = ((b[0] - a[0]).max(b[1] - a[1]) + 1) as f64 * side;
                    4.0 * span
                }
                None => 64.0 * side,
            };
            (Point::new(c.x - r, c.y - r), Point::new(c.x + r, c.y + r))
        }
    };
    if !(lo.x < c.x && c.x < hi.x && lo.y < c.y && c.y < hi.y) {
        return Err(Error::Precondition("nucleus must lie strictly inside the clip window".into()));
    }
    let (lo, hi) = (lo - c, hi - c);
    let mut poly: Vec<(Point, Option<S::Id>)> = vec![
        (Point::new(lo.x, lo.y), None),
        (Point::new(hi.x, lo.y), None),
        (Point::new(hi.x, hi.y), None),
        (Point::new(lo.x, hi.y), None),
    ];
    let mut scratch = Vec::with_capacity(16);
    let center = src.bucket_of(c);
    let mut k = first_ring(src, center);
    loop {
        let more = visit_ring(src, center, k, &mut |id, z| {
            if id == c_id {
                return;
            }
            let d = z - c;
            // Skip points whose bisector misses the current polygon.
            let h = 0.5 * d.norm2();
            if poly.iter().all(|(p, _)| p.dot(d) <= h) {
                return;
            }
            clip(&poly, d, id, &mut scratch);
            std::mem::swap(&mut poly, &mut scratch);
        });
        let reach = poly.iter().map(|(p, _)| p.norm()).fold(0.0_f64, f64::max);
        if k > 0 && 2.0 * reach <= k as f64 * side {
            break;
        }
        if !more {
            break;
        }
        k += 1;
    }
    if window.is_none() && poly.iter().any(|(_, t)| t.is_none()) {
        return Err(Error::UnboundedCell);
    }
    Ok(CellPolygon { nucleus: c, vertices: poly.iter().map(|(p, _)| *p + c).collect(), neighbors: poly.iter().map(|(_, t)| *t).collect() })
}
