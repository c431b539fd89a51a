//! distlab: a numerical laboratory for distance sets and point
//! configurations.
//!
//! The crate builds discrete stand-ins for the objects of geometric measure
//! theory at desk scale — weighted point clouds, pushed measures under
//! orthogonal actions, group-theoretic energies, delta-tube arrangements in
//! the rigid-motion coordinate space — and measures their scaling behaviour
//! against closed-form bounds and exact small-instance oracles.
//!
//! Organization:
//!
//! - [`geom`]: points, clouds, fractal generators, grid counters, rigid
//!   motions and tubes.
//! - [`measure`]: discrete measures with dimension and Fourier diagnostics.
//! - [`bounds`]: closed-form exponent and threshold calculators.
//! - [`energy`]: configuration cells, pushed measures, group energies and
//!   the chain inequalities relating them.
//! - [`incidence`]: the planar-motion coordinate system, tube families,
//!   richness profiles and incidence scaling laws.
//! - [`recipes`]: named, seeded experiments with CSV/JSON reports.
//!
//! Each major capability has a runnable demo under `examples/`; the `distlab`
//! binary exposes the same machinery as subcommands.

pub mod bounds;
pub mod energy;
pub mod error;
pub mod fit;
pub mod geom;
pub mod incidence;
pub mod measure;
pub mod recipes;
pub mod rng;

pub use error::{Error, Result};
