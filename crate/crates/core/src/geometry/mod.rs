//! Point location on one generation's Voronoi tessellation.
//!
//! All queries run against a [`PointSource`]: anything that can enumerate its
//! points by square buckets. Searches expand square rings of buckets around the
//! query until the remaining rings provably cannot improve the answer, so they
//! are exact for finite sets ([`GridIndex`]) and for the procedural infinite
//! process ([`TiledPoisson`], optionally cached by [`TileCache`]).
//!
//! Exact ties are broken towards the lowest point id.

mod cell;
mod grid;
mod simplex;
mod tiles;

use std::fmt::Debug;

pub use cell::{cell_polygon_of, CellPolygon};
pub use grid::GridIndex;
pub use simplex::{Simplex, SimplexRef};
pub use tiles::TileCache;

use crate::error::{Error, Result};
use crate::point::{Dim, Point};

pub type BucketKey = [i64; 2];

/// A point set enumerable by square buckets of a fixed side.
pub trait PointSource {
    type Id: Copy + Ord + Debug;

    fn dim(&self) -> Dim;

    fn bucket_side(&self) -> f64;

    fn bucket_of(&self, p: Point) -> BucketKey;

    /// Inclusive range of keys that can hold points; `None` if unbounded.
    fn bucket_range(&self) -> Option<(BucketKey, BucketKey)>;

    fn visit_bucket<F: FnMut(Self::Id, Point)>(&self, key: BucketKey, f: &mut F);
}

/// Visits every bucket on the square ring of Chebyshev radius `k` around `center`.
/// Returns `false` once the ring lies entirely beyond a bounded source, i.e. when
/// no further ring can contain points.
fn visit_ring<S: PointSource, F: FnMut(S::Id, Point)>(src: &S, center: BucketKey, k: i64, f: &mut F) -> bool {
    let range = src.bucket_range();
    let in_range = |key: BucketKey| match range {
        None => true,
        Some((lo, hi)) => key[0] >= lo[0] && key[0] <= hi[0] && key[1] >= lo[1] && key[1] <= hi[1],
    };
    let mut visit = |key: BucketKey| {
        if in_range(key) {
            src.visit_bucket(key, f);
        }
    };
    let [cx, cy] = center;
    match src.dim() {
        Dim::One => {
            if k == 0 {
                visit([cx, 0]);
            } else {
                visit([cx - k, 0]);
                visit([cx + k, 0]);
            }
        }
        Dim::Two => {
            if k == 0 {
                visit(center);
            } else {
                for dx in -k..=k {
                    visit([cx + dx, cy - k]);
                    visit([cx + dx, cy + k]);
                }
                for dy in (1 - k)..k {
                    visit([cx - k, cy + dy]);
                    visit([cx + k, cy + dy]);
                }
            }
        }
    }
    match range {
        None => true,
        Some((lo, hi)) => {
            let covered = |i: usize| lo[i] >= center[i] - k && hi[i] <= center[i] + k;
            !(covered(0) && (src.dim() == Dim::One || covered(1)))
        }
    }
}

/// First ring that can intersect a bounded source; earlier rings are empty.
fn first_ring<S: PointSource>(src: &S, center: BucketKey) -> i64 {
    match src.bucket_range() {
        None => 0,
        Some((lo, hi)) => {
            let gap = |i: usize| (lo[i] - center[i]).max(center[i] - hi[i]).max(0);
            match src.dim() {
                Dim::One => gap(0),
                Dim::Two => gap(0).max(gap(1)),
            }
        }
    }
}

/// Nearest point to a query.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Nearest<I> {
    pub id: I,
    pub point: Point,
    pub dist: f64,
}

pub fn nearest<S: PointSource>(src: &S, x: Point) -> Result<Nearest<S::Id>> {
    let side = src.bucket_side();
    let center = src.bucket_of(x);
    let mut best: Option<(f64, S::Id, Point)> = None;
    let mut k = first_ring(src, center);
    loop {
        let more = visit_ring(src, center, k, &mut |id, p| {
            let d2 = (p - x).norm2();
            let better = match best {
                None => true,
                Some((bd, bid, _)) => d2 < bd || (d2 == bd && id < bid),
            };
            if better {
                best = Some((d2, id, p));
            }
        });
        if let Some((bd, _, _)) = best {
            let reach = k as f64 * side;
            if bd <= reach * reach {
                break;
            }
        }
        if !more {
            break;
        }
        k += 1;
    }
    let (d2, id, point) = best.ok_or(Error::EmptySet)?;
    Ok(Nearest { id, point, dist: d2.sqrt() })
}

/// The neighbour whose bisector the ray `[c, x)` crosses first.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Secondary<I> {
    pub id: I,
    pub point: Point,
    /// `2⟨x−c, z−c⟩/‖z−c‖²`, the fraction of the way to the bisector already covered by `x`.
    pub score: f64,
}

pub fn secondary<S: PointSource>(src: &S, c_id: S::Id, c: Point, x: Point) -> Result<Secondary<S::Id>> {
    let u = x - c;
    let ux = u.norm();
    if ux == 0.0 {
        return Err(Error::Precondition("secondary nucleus is undefined at a nucleus".into()));
    }
    let side = src.bucket_side();
    let center = src.bucket_of(c);
    let mut best: Option<(f64, S::Id, Point)> = None;
    let mut k = first_ring(src, center);
    loop {
        let more = visit_ring(src, center, k, &mut |id, z| {
            if id == c_id {
                return;
            }
            let d = z - c;
            let num = u.dot(d);
            if num <= 0.0 {
                return;
            }
            let g = 2.0 * num / d.norm2();
            let better = match best {
                None => true,
                Some((bg, bid, _)) => g > bg || (g == bg && id < bid),
            };
            if better {
                best = Some((g, id, z));
            }
        });
        // Unvisited points lie farther than k·side from c, so their score is
        // below 2‖x−c‖/(k·side).
        if let Some((bg, _, _)) = best {
            if k > 0 && bg * (k as f64 * side) >= 2.0 * ux {
                break;
            }
        }
        if !more {
            break;
        }
        k += 1;
    }
    let (score, id, point) = best.ok_or(Error::UnboundedDirection)?;
    Ok(Secondary { id, point, score })
}

/// Where a query point sits in one generation's simplex tessellation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Location<I> {
    /// The query coincides with a nucleus.
    Nucleus { id: I, point: Point },
    /// Interior of (or on the boundary of) the cone from `c` over its facet shared with `c2`.
    Piece { c_id: I, c: Point, c2_id: I, c2: Point },
}

pub fn locate<S: PointSource>(src: &S, x: Point) -> Result<Location<S::Id>> {
    let near = nearest(src, x)?;
    if near.dist == 0.0 {
        return Ok(Location::Nucleus { id: near.id, point: near.point });
    }
    let sec = secondary(src, near.id, near.point, x)?;
    Ok(Location::Piece { c_id: near.id, c: near.point, c2_id: sec.id, c2: sec.point })
}

/// Pyramid value at `x`: 1 at nuclei, 0 on cell boundaries, affine on each simplex.
pub fn pyramid<S: PointSource>(src: &S, x: Point) -> Result<f64> {
    Ok(match locate(src, x)? {
        Location::Nucleus { .. } => 1.0,
        Location::Piece { c, c2, .. } => SimplexRef::voronoi(0, c, c2).delta(x),
    })
}

/// The closed simplex containing a located point.
pub fn simplex_of<S: PointSource>(src: &S, x: Point, loc: &Location<S::Id>) -> Result<Option<Simplex>> {
    let (c_id, c, c2_id, c2) = match *loc {
        Location::Nucleus { .. } => return Ok(None),
        Location::Piece { c_id, c, c2_id, c2 } => (c_id, c, c2_id, c2),
    };
    match src.dim() {
        Dim::One => Ok(Some(Simplex::segment(c, (c + c2) * 0.5))),
        Dim::Two => {
            let poly = cell_polygon_of(src, c_id, c, None)?;
            let (a, b) = poly.facet_towards(c2_id, x).ok_or(Error::UnboundedCell)?;
            Ok(Some(Simplex::triangle(c, a, b)))
        }
    }
}

/// Whether the closed ball `B_radius(x)` lies in the closed simplex containing `x`.
pub fn membership<S: PointSource>(src: &S, x: Point, radius: f64) -> Result<bool> {
    if !(radius >= 0.0) {
        return Err(Error::InvalidParameter(format!("radius must be >= 0, got {radius}")));
    }
    let loc = locate(src, x)?;
    match simplex_of(src, x, &loc)? {
        None => Ok(radius == 0.0),
        Some(s) => Ok(s.skeleton_distance(x) >= radius),
    }
}

/// Index and distance of the nearest nucleus of a finite set.
pub fn nearest_nucleus(index: &GridIndex<'_>, x: Point) -> Result<(usize, f64)> {
    let n = nearest(index, x)?;
    Ok((n.id, n.dist))
}

/// Index of the secondary nucleus of `x`, whose nearest nucleus is `c_index`.
pub fn secondary_nucleus(index: &GridIndex<'_>, c_index: usize, x: Point) -> Result<usize> {
    let c = *index.set().points.get(c_index).ok_or_else(|| Error::InvalidParameter(format!("no nucleus {c_index}")))?;
    Ok(secondary(index, c_index, c, x)?.id)
}

/// Voronoi cell of nucleus `c_index`, optionally clipped to the box `[lo, hi]`.
pub fn cell_polygon(index: &GridIndex<'_>, c_index: usize, clip: Option<(Point, Point)>) -> Result<CellPolygon<usize>> {
    if index.dim() != Dim::Two {
        return Err(Error::InvalidParameter("cell polygons are defined for D = 2 only".into()));
    }
    let c = *index.set().points.get(c_index).ok_or_else(|| Error::InvalidParameter(format!("no nucleus {c_index}")))?;
    cell_polygon_of(index, c_index, c, clip)
}

/// Whether `B_radius(x)` lies inside a single simplex of the set's tessellation.
pub fn oscillation_set_membership(index: &GridIndex<'_>, x: Point, radius: f64) -> Result<bool> {
    membership(index, x, radius)
}
