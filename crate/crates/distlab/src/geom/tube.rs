//! Tubes: neighbourhoods of line segments in R^2 or R^3.

use super::{add3, dist, dot3, norm3, scale3, sub3};
use crate::error::{Error, Result};

/// A segment of given length through `center` along unit `dir`, thickened to
/// radius `radius`.
#[derive(Debug, Clone, Copy)]
pub struct Tube {
    dim: usize,
    center: [f64; 3],
    dir: [f64; 3],
    length: f64,
    radius: f64,
}

impl Tube {
    pub fn new(dim: usize, center: [f64; 3], dir: [f64; 3], length: f64, radius: f64) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(Error::InvalidParameter(format!(
                "tube dimension must be 2 or 3, got {dim}"
            )));
        }
        if !(length > 0.0) || !(radius > 0.0) {
            return Err(Error::InvalidParameter(
                "tube length and radius must be positive".into(),
            ));
        }
        let n = norm3(dir);
        if !((n - 1.0).abs() <= 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "tube direction must be a unit vector (norm {n})"
            )));
        }
        Ok(Tube {
            dim,
            center,
            dir,
            length,
            radius,
        })
    }

    /// Normalizes a nonzero direction before construction.
    pub fn through(
        dim: usize,
        center: [f64; 3],
        dir: [f64; 3],
        length: f64,
        radius: f64,
    ) -> Result<Self> {
        let n = norm3(dir);
        if n == 0.0 {
            return Err(Error::InvalidParameter("zero tube direction".into()));
        }
        Self::new(dim, center, scale3(dir, 1.0 / n), length, radius)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn center(&self) -> [f64; 3] {
        self.center
    }

    pub fn dir(&self) -> [f64; 3] {
        self.dir
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn endpoints(&self) -> ([f64; 3], [f64; 3]) {
        let h = scale3(self.dir, self.length / 2.0);
        (sub3(self.center, h), add3(self.center, h))
    }

    /// Distance from a point to the axis segment.
    #[inline]
    pub fn axis_distance(&self, p: [f64; 3]) -> f64 {
        let rel = sub3(p, self.center);
        let t = dot3(rel, self.dir).clamp(-self.length / 2.0, self.length / 2.0);
        dist(rel, scale3(self.dir, t))
    }

    /// Whether `p` lies in the tube thickened to `extra_radius`.
    #[inline]
    pub fn contains_with_radius(&self, p: [f64; 3], radius: f64) -> bool {
        self.axis_distance(p) <= radius
    }

    /// Acute angle between the axis directions of two tubes, in [0, pi/2]
    /// (tubes are unoriented).
    pub fn direction_gap(&self, other: &Tube) -> f64 {
        let c = dot3(self.dir, other.dir).abs().min(1.0);
        c.acos()
    }

    /// Axis-aligned bounding box of the tube thickened to `radius`.
    pub fn bounding_box(&self, radius: f64) -> ([f64; 3], [f64; 3]) {
        let (a, b) = self.endpoints();
        let mut lo = [0.0; 3];
        let mut hi = [0.0; 3];
        for k in 0..self.dim {
            lo[k] = a[k].min(b[k]) - radius;
            hi[k] = a[k].max(b[k]) + radius;
        }
        (lo, hi)
    }
}

/// Minimum distance between the axis segments of two tubes: closest points
/// of p1 + s d1 (s in [0,1]) and p2 + t d2 by exact case analysis.
pub fn segment_distance(a: &Tube, b: &Tube) -> f64 {
    let (p1, q1) = a.endpoints();
    let (p2, q2) = b.endpoints();
    let d1 = sub3(q1, p1);
    let d2 = sub3(q2, p2);
    let r = sub3(p1, p2);
    let aa = dot3(d1, d1);
    let e = dot3(d2, d2);
    let f = dot3(d2, r);
    let c = dot3(d1, r);
    let bb = dot3(d1, d2);
    let denom = aa * e - bb * bb;
    let mut s = if denom > 1e-300 {
        ((bb * f - c * e) / denom).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let mut t = (bb * s + f) / e;
    if t < 0.0 {
        t = 0.0;
        s = (-c / aa).clamp(0.0, 1.0);
    } else if t > 1.0 {
        t = 1.0;
        s = ((bb - c) / aa).clamp(0.0, 1.0);
    }
    let p = add3(p1, scale3(d1, s));
    let q = add3(p2, scale3(d2, t));
    dist(p, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_tube(dir: [f64; 3]) -> Tube {
        Tube::through(3, [0.0; 3], dir, 1.0, 0.01).unwrap()
    }

    #[test]
    fn axis_distance_clamps_to_endpoints() {
        let t = unit_tube([1.0, 0.0, 0.0]);
        assert!((t.axis_distance([0.0, 0.2, 0.0]) - 0.2).abs() < 1e-15);
        // Beyond the endpoint the distance is to the cap.
        assert!((t.axis_distance([0.7, 0.0, 0.0]) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn crossing_segments_have_zero_distance() {
        let a = unit_tube([1.0, 0.0, 0.0]);
        let b = unit_tube([0.0, 1.0, 0.0]);
        assert!(segment_distance(&a, &b) < 1e-15);
    }

    #[test]
    fn parallel_offset_segments() {
        let a = unit_tube([1.0, 0.0, 0.0]);
        let b = Tube::through(3, [0.0, 0.3, 0.0], [1.0, 0.0, 0.0], 1.0, 0.01).unwrap();
        assert!((segment_distance(&a, &b) - 0.3).abs() < 1e-14);
    }

    #[test]
    fn skew_segments() {
        let a = unit_tube([1.0, 0.0, 0.0]);
        let b = Tube::through(3, [0.0, 0.0, 0.25], [0.0, 1.0, 0.0], 1.0, 0.01).unwrap();
        assert!((segment_distance(&a, &b) - 0.25).abs() < 1e-14);
    }

    #[test]
    fn far_apart_endpoint_case() {
        let a = unit_tube([1.0, 0.0, 0.0]);
        let b = Tube::through(3, [3.0, 0.0, 0.0], [0.0, 1.0, 0.0], 1.0, 0.01).unwrap();
        // Nearest points: (0.5,0,0) on a, (3, t, 0) clamped; distance from
        // (0.5,0,0) to segment x=3,|y|<=0.5 is 2.5.
        assert!((segment_distance(&a, &b) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn direction_gap_is_unoriented() {
        let a = unit_tube([1.0, 0.0, 0.0]);
        let b = unit_tube([-1.0, 0.0, 0.0]);
        assert!(a.direction_gap(&b) < 1e-12);
    }
}
