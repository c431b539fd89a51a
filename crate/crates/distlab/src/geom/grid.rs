//! Sparse occupancy counting over a uniform grid of half-open cells
//! [k*delta, (k+1)*delta) per axis.

use std::collections::HashMap;

use super::PointCloud;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct GridCounter {
    dim: usize,
    cell: f64,
    bounds: ([f64; 3], [f64; 3]),
    counts: HashMap<[i64; 3], u64>,
}

impl GridCounter {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cell_size(&self) -> f64 {
        self.cell
    }

    /// Number of occupied cells; O(1).
    pub fn occupied(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn count_at(&self, index: [i64; 3]) -> u64 {
        self.counts.get(&index).copied().unwrap_or(0)
    }

    pub fn bounds(&self) -> ([f64; 3], [f64; 3]) {
        self.bounds
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[i64; 3], &u64)> {
        self.counts.iter()
    }

    /// Cell index of a coordinate: floor(x / cell) per axis.
    #[inline]
    pub fn cell_index(cell: f64, coords: &[f64]) -> [i64; 3] {
        let mut idx = [0i64; 3];
        for (a, &c) in coords.iter().enumerate() {
            idx[a] = (c / cell).floor() as i64;
        }
        idx
    }
}

/// Counts each point of the cloud into its half-open cell.
pub fn grid_count(cloud: &PointCloud, delta: f64) -> Result<GridCounter> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "cell size must be positive and finite, got {delta}"
        )));
    }
    for (i, p) in cloud.iter().enumerate() {
        if p.coords().iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index: i });
        }
    }
    let mut counts = HashMap::new();
    for p in cloud.iter() {
        let idx = GridCounter::cell_index(delta, p.coords());
        *counts.entry(idx).or_insert(0) += 1;
    }
    let bounds = cloud.bounding_box().unwrap_or(([0.0; 3], [0.0; 3]));
    Ok(GridCounter {
        dim: cloud.dim(),
        cell: delta,
        bounds,
        counts,
    })
}
