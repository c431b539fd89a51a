//! Iterated function systems of contracting similarities, the generators for
//! the compact fractal sets used throughout the experiments.

use super::mat::SquareMat;
use super::{Point, PointCloud};
use crate::error::{Error, Result};

/// Default cap on the generated cloud size.
pub const DEFAULT_IFS_CAP: u64 = 1 << 24;

/// One contracting similarity x -> ratio * (O x) + t with O orthogonal.
#[derive(Debug, Clone)]
pub struct IfsMap {
    pub ratio: f64,
    pub linear: SquareMat,
    pub translation: Vec<f64>,
}

impl IfsMap {
    /// Similarity with identity rotation part.
    pub fn similarity(ratio: f64, translation: &[f64]) -> Self {
        IfsMap {
            ratio,
            linear: SquareMat::identity(translation.len()),
            translation: translation.to_vec(),
        }
    }

    fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        let lv = self.linear.apply(v);
        let mut out = [0.0; 3];
        for (a, item) in out.iter_mut().enumerate() {
            *item = self.ratio * lv[a] + self.translation.get(a).copied().unwrap_or(0.0);
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct IfsSystem {
    dim: usize,
    maps: Vec<IfsMap>,
}

impl IfsSystem {
    pub fn new(dim: usize, maps: Vec<IfsMap>) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::EmptyInput("an IFS needs at least one map".into()));
        }
        for m in &maps {
            if !(m.ratio > 0.0 && m.ratio < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "contraction ratio must lie in (0,1), got {}",
                    m.ratio
                )));
            }
            if m.translation.len() != dim || m.linear.dim != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: m.translation.len(),
                });
            }
        }
        Ok(IfsSystem { dim, maps })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn map_count(&self) -> usize {
        self.maps.len()
    }

    /// Middle-thirds set on the line: maps x/3 and x/3 + 2/3.
    pub fn cantor_middle_thirds() -> Self {
        IfsSystem::new(
            1,
            vec![
                IfsMap::similarity(1.0 / 3.0, &[0.0]),
                IfsMap::similarity(1.0 / 3.0, &[2.0 / 3.0]),
            ],
        )
        .expect("static system is valid")
    }

    /// Four-corner set in the unit square: ratio 1/4, translations to the
    /// four corners.
    pub fn four_corner() -> Self {
        IfsSystem::new(
            2,
            vec![
                IfsMap::similarity(0.25, &[0.0, 0.0]),
                IfsMap::similarity(0.25, &[0.75, 0.0]),
                IfsMap::similarity(0.25, &[0.0, 0.75]),
                IfsMap::similarity(0.25, &[0.75, 0.75]),
            ],
        )
        .expect("static system is valid")
    }

    /// All images of the origin under length-`depth` compositions, ordered
    /// lexicographically by map-index word. Cloud size is `maps^depth`.
    pub fn generate(&self, depth: u32) -> Result<PointCloud> {
        self.generate_capped(depth, DEFAULT_IFS_CAP)
    }

    pub fn generate_capped(&self, depth: u32, cap: u64) -> Result<PointCloud> {
        let m = self.maps.len() as u64;
        let mut size: u128 = 1;
        for _ in 0..depth {
            size *= u128::from(m);
            if size > u128::from(cap) {
                return Err(Error::EnumerationCap {
                    required: size,
                    cap,
                });
            }
        }
        // Word (i1, ..., i_depth) in lexicographic order applies as
        // f_{i1} . f_{i2} . ... . f_{i_depth} (origin): prepending the outer
        // map index preserves lexicographic ordering level by level.
        let mut pts: Vec<[f64; 3]> = vec![[0.0; 3]];
        for _ in 0..depth {
            let mut next = Vec::with_capacity(pts.len() * self.maps.len());
            for map in &self.maps {
                for p in &pts {
                    next.push(map.apply(*p));
                }
            }
            pts = next;
        }
        PointCloud::new(
            self.dim,
            pts.into_iter()
                .map(|c| Point::from_raw(c, self.dim))
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_zero_is_the_seed() {
        let cloud = IfsSystem::cantor_middle_thirds().generate(0).unwrap();
        assert_eq!(cloud.len(), 1);
        assert_eq!(cloud.point(0).coords(), &[0.0]);
    }

    #[test]
    fn cantor_depth_three() {
        let cloud = IfsSystem::cantor_middle_thirds().generate(3).unwrap();
        assert_eq!(cloud.len(), 8);
        let mut xs: Vec<f64> = cloud.iter().map(|p| p.coords()[0]).collect();
        xs.sort_by(f64::total_cmp);
        // Triadic expansions with digits in {0, 2}, truncated at three digits.
        let mut expect = Vec::new();
        for d1 in [0.0, 2.0] {
            for d2 in [0.0, 2.0] {
                for d3 in [0.0, 2.0] {
                    expect.push(d1 / 3.0 + d2 / 9.0 + d3 / 27.0);
                }
            }
        }
        expect.sort_by(f64::total_cmp);
        for (a, b) in xs.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!((xs[0]).abs() < 1e-15);
        assert!((xs[7] - 26.0 / 27.0).abs() < 1e-15);
    }

    #[test]
    fn four_corner_depth_two() {
        let cloud = IfsSystem::four_corner().generate(2).unwrap();
        assert_eq!(cloud.len(), 16);
        for p in cloud.iter() {
            for c in p.coords() {
                assert!((0.0..=1.0).contains(c));
            }
        }
    }

    #[test]
    fn recursion_identity() {
        // Depth m+1 equals the union of the maps applied to the depth-m cloud.
        let ifs = IfsSystem::cantor_middle_thirds();
        let deep = ifs.generate(5).unwrap();
        let prev = ifs.generate(4).unwrap();
        let mut expect: Vec<f64> = Vec::new();
        for t in [0.0, 2.0 / 3.0] {
            for p in prev.iter() {
                expect.push(p.coords()[0] / 3.0 + t);
            }
        }
        let mut got: Vec<f64> = deep.iter().map(|p| p.coords()[0]).collect();
        expect.sort_by(f64::total_cmp);
        got.sort_by(f64::total_cmp);
        for (a, b) in got.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let err = IfsSystem::four_corner().generate_capped(10, 1000);
        assert!(matches!(err, Err(Error::EnumerationCap { .. })));
    }
}
