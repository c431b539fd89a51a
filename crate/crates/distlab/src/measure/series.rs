//! Scale/value series and box-counting regression.

use crate::error::{Error, Result};
use crate::fit::least_squares_slope;
use crate::geom::{grid_count, PointCloud};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleEntry {
    pub scale: f64,
    pub value: f64,
    pub std_error: f64,
}

/// Samples of a quantity at strictly decreasing scales.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleSeries {
    entries: Vec<ScaleEntry>,
}

impl ScaleSeries {
    pub fn new(entries: Vec<ScaleEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyInput("scale series is empty".into()));
        }
        for pair in entries.windows(2) {
            if !(pair[1].scale < pair[0].scale) {
                return Err(Error::InvalidParameter(
                    "scales must be strictly decreasing".into(),
                ));
            }
        }
        if entries.iter().any(|e| !(e.scale > 0.0) || e.value < 0.0) {
            return Err(Error::InvalidParameter(
                "scales must be positive and values nonnegative".into(),
            ));
        }
        Ok(ScaleSeries { entries })
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .map(|&(scale, value)| ScaleEntry {
                    scale,
                    value,
                    std_error: 0.0,
                })
                .collect(),
        )
    }

    pub fn entries(&self) -> &[ScaleEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// CSV body with header `scale,value,stderr`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("scale,value,stderr\n");
        for e in &self.entries {
            out.push_str(&format!("{},{},{}\n", e.scale, e.value, e.std_error));
        }
        out
    }
}

/// Occupied-cell counts of a cloud at each scale, largest scale first.
pub fn occupancy_series(cloud: &PointCloud, scales: &[f64]) -> Result<ScaleSeries> {
    let mut entries = Vec::with_capacity(scales.len());
    for &s in scales {
        let g = grid_count(cloud, s)?;
        entries.push(ScaleEntry {
            scale: s,
            value: g.occupied() as f64,
            std_error: 0.0,
        });
    }
    ScaleSeries::new(entries)
}

/// Least-squares slope of log(value) against log(1/scale): the box-counting
/// dimension of a count series.
pub fn box_dimension(series: &ScaleSeries) -> Result<f64> {
    if series.len() < 2 {
        return Err(Error::InvalidParameter(
            "box dimension needs at least two scales".into(),
        ));
    }
    if let Some(e) = series.entries().iter().find(|e| !(e.value > 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "zero count at scale {}",
            e.scale
        )));
    }
    let pts: Vec<(f64, f64)> = series
        .entries()
        .iter()
        .map(|e| ((1.0 / e.scale).ln(), e.value.ln()))
        .collect();
    least_squares_slope(&pts).ok_or_else(|| {
        Error::InvalidParameter("degenerate scale series for regression".into())
    })
}
