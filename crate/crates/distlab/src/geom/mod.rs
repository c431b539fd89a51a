//! Geometric substrate: points, clouds, fractal generators, grids, rigid
//! motions and tubes.

mod grid;
mod ifs;
mod mat;
mod motion;
mod tube;

pub use grid::{grid_count, GridCounter};
pub use ifs::{IfsMap, IfsSystem, DEFAULT_IFS_CAP};
pub use mat::SquareMat;
pub use motion::RigidMotion;
pub use tube::{segment_distance, Tube};

use crate::error::{Error, Result};

/// A point of R^d, d in {1,2,3}. Coordinates beyond `dim` are zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    coords: [f64; 3],
    dim: usize,
}

impl Point {
    pub fn new(coords: &[f64]) -> Result<Self> {
        let dim = coords.len();
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidParameter(format!(
                "point dimension must be 1, 2 or 3, got {dim}"
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index: 0 });
        }
        let mut c = [0.0; 3];
        c[..dim].copy_from_slice(coords);
        Ok(Point { coords: c, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim]
    }

    /// Raw fixed-size buffer; entries past `dim` are zero.
    #[inline]
    pub fn raw(&self) -> [f64; 3] {
        self.coords
    }

    #[inline]
    pub fn dist(&self, other: &Point) -> f64 {
        dist(self.coords, other.coords)
    }

    pub(crate) fn from_raw(coords: [f64; 3], dim: usize) -> Self {
        Point { coords, dim }
    }
}

#[inline]
pub(crate) fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

#[inline]
pub(crate) fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub(crate) fn add3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub(crate) fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub(crate) fn norm3(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

#[inline]
pub(crate) fn scale3(a: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// An ordered point cloud with an optional certified minimum pairwise
/// distance.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    points: Vec<Point>,
    separation: Option<f64>,
}

impl PointCloud {
    pub fn new(dim: usize, points: Vec<Point>) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidParameter(format!(
                "cloud dimension must be 1, 2 or 3, got {dim}"
            )));
        }
        for (i, p) in points.iter().enumerate() {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.dim(),
                });
            }
            if p.coords().iter().any(|c| !c.is_finite()) {
                return Err(Error::NonFinite { index: i });
            }
        }
        Ok(PointCloud {
            dim,
            points,
            separation: None,
        })
    }

    pub fn from_coords(dim: usize, coords: &[&[f64]]) -> Result<Self> {
        let pts = coords
            .iter()
            .map(|c| Point::new(c))
            .collect::<Result<Vec<_>>>()?;
        Self::new(dim, pts)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Point> {
        self.points.iter()
    }

    /// Certified minimum pairwise distance, when one is known.
    pub fn separation(&self) -> Option<f64> {
        self.separation
    }

    /// Exhaustive minimum pairwise distance; `None` for clouds of size < 2.
    pub fn min_pairwise_distance(&self) -> Option<f64> {
        if self.len() < 2 {
            return None;
        }
        let mut best = f64::INFINITY;
        for i in 0..self.len() {
            for j in (i + 1)..self.len() {
                best = best.min(self.points[i].dist(&self.points[j]));
            }
        }
        Some(best)
    }

    /// Smallest distance between a point of `self` and a point of `other`.
    pub fn distance_to(&self, other: &PointCloud) -> f64 {
        let mut best = f64::INFINITY;
        for p in &self.points {
            for q in &other.points {
                best = best.min(p.dist(q));
            }
        }
        best
    }

    /// Axis-aligned bounding box `(min, max)` over the leading `dim` axes.
    pub fn bounding_box(&self) -> Option<([f64; 3], [f64; 3])> {
        let first = self.points.first()?;
        let mut lo = first.raw();
        let mut hi = first.raw();
        for p in &self.points {
            for a in 0..self.dim {
                lo[a] = lo[a].min(p.raw()[a]);
                hi[a] = hi[a].max(p.raw()[a]);
            }
        }
        Some((lo, hi))
    }

    /// Image of the cloud under a rigid motion (separation is preserved by
    /// isometry).
    pub fn map_motion(&self, g: &RigidMotion) -> Result<PointCloud> {
        let pts = self
            .points
            .iter()
            .map(|p| g.apply(p))
            .collect::<Result<Vec<_>>>()?;
        let mut cloud = PointCloud::new(self.dim, pts)?;
        cloud.separation = self.separation;
        Ok(cloud)
    }

    /// CSV with header `x[,y[,z]]` and 17-significant-digit coordinates.
    pub fn to_csv(&self) -> String {
        let header = ["x", "x,y", "x,y,z"][self.dim - 1];
        let mut out = String::from(header);
        out.push('\n');
        for p in &self.points {
            let row = p
                .coords()
                .iter()
                .map(|c| format!("{c:.16e}"))
                .collect::<Vec<_>>()
                .join(",");
            out.push_str(&row);
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::CsvParse("empty cloud csv".into()))?;
        let dim = match header.trim() {
            "x" => 1,
            "x,y" => 2,
            "x,y,z" => 3,
            other => {
                return Err(Error::CsvParse(format!(
                    "unexpected header `{other}`; expected x / x,y / x,y,z"
                )))
            }
        };
        let mut points = Vec::new();
        for (ln, line) in lines.enumerate() {
            let fields = line.trim().split(',').collect::<Vec<_>>();
            if fields.len() != dim {
                return Err(Error::CsvParse(format!(
                    "row {} has {} fields, expected {dim}",
                    ln + 2,
                    fields.len()
                )));
            }
            let coords = fields
                .iter()
                .map(|f| {
                    f.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::CsvParse(format!("row {}: {e}", ln + 2)))
                })
                .collect::<std::result::Result<Vec<_>, _>>()?;
            points.push(Point::new(&coords)?);
        }
        Self::new(dim, points)
    }

    pub(crate) fn with_separation(mut self, sep: f64) -> Self {
        self.separation = Some(sep);
        self
    }
}

/// Greedy delta-net in input order: a point is kept iff it lies at distance
/// >= `delta` from every previously kept point. The result carries `delta`
/// as its certified separation.
pub fn delta_net(cloud: &PointCloud, delta: f64) -> Result<PointCloud> {
    if delta < 0.0 || !delta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "delta must be finite and >= 0, got {delta}"
        )));
    }
    let mut kept: Vec<Point> = Vec::new();
    for p in cloud.iter() {
        if kept.iter().all(|q| q.dist(p) >= delta) {
            kept.push(*p);
        }
    }
    Ok(PointCloud::new(cloud.dim(), kept)?.with_separation(delta))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_cloud(xs: &[f64]) -> PointCloud {
        let pts = xs.iter().map(|&x| Point::new(&[x]).unwrap()).collect();
        PointCloud::new(1, pts).unwrap()
    }

    #[test]
    fn delta_net_greedy_walk() {
        let cloud = line_cloud(&[0.0, 0.3, 0.35, 1.0]);
        let net = delta_net(&cloud, 0.1).unwrap();
        let xs: Vec<f64> = net.iter().map(|p| p.coords()[0]).collect();
        assert_eq!(xs, vec![0.0, 0.3, 1.0]);
        assert_eq!(net.separation(), Some(0.1));
    }

    #[test]
    fn delta_net_zero_delta_keeps_everything() {
        let cloud = line_cloud(&[0.0, 0.25, 0.5, 0.75]);
        let net = delta_net(&cloud, 0.0).unwrap();
        assert_eq!(net.len(), cloud.len());
    }

    #[test]
    fn csv_roundtrip() {
        let cloud = PointCloud::from_coords(2, &[&[0.1, 0.2], &[1.0 / 3.0, 2.0 / 7.0]]).unwrap();
        let text = cloud.to_csv();
        assert!(text.starts_with("x,y\n"));
        let back = PointCloud::from_csv(&text).unwrap();
        assert_eq!(back.len(), 2);
        for (p, q) in cloud.iter().zip(back.iter()) {
            assert!(p.dist(q) < 1e-15);
        }
    }

    #[test]
    fn rejects_non_finite() {
        assert!(Point::new(&[f64::NAN]).is_err());
        assert!(Point::new(&[1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn bounding_box_covers_cloud() {
        let cloud =
            PointCloud::from_coords(2, &[&[0.0, -1.0], &[2.0, 0.5], &[-0.5, 3.0]]).unwrap();
        let (lo, hi) = cloud.bounding_box().unwrap();
        assert_eq!(&lo[..2], &[-0.5, -1.0]);
        assert_eq!(&hi[..2], &[2.0, 3.0]);
    }
}
