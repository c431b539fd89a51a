//! Discrete probability measures and their dimension/Fourier diagnostics.

mod diagnostics;
mod series;

pub use diagnostics::{
    ball_average, energy_integral, fourier_amplitude, frostman_exponent, l2_dimension,
    spherical_average, weighted_ball_average, Estimate, DEFAULT_INNER_CUTOFF,
};
pub use series::{box_dimension, occupancy_series, ScaleEntry, ScaleSeries};

use crate::error::{Error, Result};
use crate::geom::PointCloud;

/// Weight-sum slack accepted at construction.
const MASS_TOL: f64 = 1e-12;

/// A weighted point cloud with total mass one.
#[derive(Debug, Clone)]
pub struct DiscreteMeasure {
    cloud: PointCloud,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(cloud: PointCloud, weights: Vec<f64>) -> Result<Self> {
        if cloud.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                expected: cloud.len(),
                got: weights.len(),
            });
        }
        if cloud.is_empty() {
            return Err(Error::EmptyInput("measure needs at least one atom".into()));
        }
        if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidParameter(
                "weights must be strictly positive and finite".into(),
            ));
        }
        let mass: f64 = weights.iter().sum();
        if (mass - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidParameter(format!(
                "weights must sum to 1 within {MASS_TOL:.0e}, got {mass}"
            )));
        }
        Ok(DiscreteMeasure { cloud, weights })
    }

    /// Equal weights on the cloud.
    pub fn uniform(cloud: PointCloud) -> Result<Self> {
        let n = cloud.len();
        if n == 0 {
            return Err(Error::EmptyInput("measure needs at least one atom".into()));
        }
        // Summing n copies of 1/n can drift by a few ulp; patch the last
        // weight so the mass is exactly one.
        let w = 1.0 / n as f64;
        let mut weights = vec![w; n];
        let sum: f64 = weights.iter().sum();
        weights[n - 1] += 1.0 - sum;
        Self::new(cloud, weights)
    }

    pub fn support(&self) -> &PointCloud {
        &self.cloud
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.cloud.dim()
    }

    /// Mass of the closed ball of radius `r` around `center`.
    pub fn ball_mass(&self, center: &crate::geom::Point, r: f64) -> f64 {
        self.cloud
            .iter()
            .zip(&self.weights)
            .filter(|(p, _)| p.dist(center) <= r)
            .map(|(_, w)| w)
            .sum()
    }
}
