//! Random Takagi–Knopp surfaces driven by Poisson–Voronoi tessellations.
//!
//! A surface is the series `F(x) = Σ_n λ^{-nα/D} Δ_n(x)`, where `Δ_n` is the
//! pyramidal function of the `n`-th tessellation: 1 at each nucleus, 0 on cell
//! boundaries and affine on every cone from a nucleus over a face of its cell.
//! The `n`-th tessellation is built on a Poisson process of intensity `λ^{nβ}`.
//! Hexagonal-lattice and perturbed-dyadic variants share the same machinery.

pub mod digest;
pub mod error;
pub mod field;
pub mod fractal;
pub mod geometry;
pub mod point;
pub mod pointprocess;
pub mod seed;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
pub use point::{Dim, Point};
