//! Rigid motions: an orthogonal linear part plus a translation.
//!
//! Pure orthogonal motions (zero translation) represent elements of O(n);
//! with translations they represent the Euclidean group, used in dimension 2
//! for the coordinate system of the incidence module.

use rand::Rng;

use super::mat::SquareMat;
use super::Point;
use crate::error::{Error, Result};

/// Construction accepts a linear part whose orthogonality residual is below
/// this without touching it.
const ORTHO_ACCEPT: f64 = 1e-12;
/// Residuals up to this are projected back to the nearest orthogonal matrix;
/// anything worse is rejected.
const ORTHO_REPAIR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidMotion {
    dim: usize,
    linear: SquareMat,
    translation: [f64; 3],
}

impl RigidMotion {
    pub fn new(linear: SquareMat, translation: &[f64]) -> Result<Self> {
        let dim = linear.dim;
        if translation.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: translation.len(),
            });
        }
        if translation.iter().any(|t| !t.is_finite()) {
            return Err(Error::NonFinite { index: 0 });
        }
        let residual = linear.orthogonality_residual();
        let linear = if residual <= ORTHO_ACCEPT {
            linear
        } else if residual <= ORTHO_REPAIR {
            linear
                .nearest_orthogonal()
                .ok_or(Error::NotOrthogonal {
                    residual,
                    limit: ORTHO_REPAIR,
                })?
        } else {
            return Err(Error::NotOrthogonal {
                residual,
                limit: ORTHO_REPAIR,
            });
        };
        let mut t = [0.0; 3];
        t[..dim].copy_from_slice(translation);
        Ok(RigidMotion {
            dim,
            linear,
            translation: t,
        })
    }

    pub fn identity(dim: usize) -> Self {
        RigidMotion {
            dim,
            linear: SquareMat::identity(dim),
            translation: [0.0; 3],
        }
    }

    pub fn translation_of(dim: usize, shift: &[f64]) -> Result<Self> {
        Self::new(SquareMat::identity(dim), shift)
    }

    /// Counterclockwise planar rotation about the origin.
    pub fn rotation2(theta: f64) -> Self {
        RigidMotion {
            dim: 2,
            linear: SquareMat::rotation2(theta),
            translation: [0.0; 3],
        }
    }

    /// Counterclockwise planar rotation about `center`: x -> S(x - c) + c.
    pub fn rotation2_about(theta: f64, center: [f64; 2]) -> Self {
        let s = SquareMat::rotation2(theta);
        let c = [center[0], center[1], 0.0];
        let sc = s.apply(c);
        RigidMotion {
            dim: 2,
            linear: s,
            translation: [c[0] - sc[0], c[1] - sc[1], 0.0],
        }
    }

    /// Planar reflection across the line through the origin at angle `axis`.
    pub fn reflection2(axis: f64) -> Self {
        RigidMotion {
            dim: 2,
            linear: SquareMat::reflection2(axis),
            translation: [0.0; 3],
        }
    }

    pub fn linear_part(&self) -> &SquareMat {
        &self.linear
    }

    pub fn translation(&self) -> &[f64] {
        &self.translation[..self.dim]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_reflection(&self) -> bool {
        self.linear.det() < 0.0
    }

    pub fn is_linear(&self) -> bool {
        self.translation[..self.dim].iter().all(|&t| t == 0.0)
    }

    /// Rotation angle in [0, 2pi) of the linear part of a planar motion.
    /// Errors when the linear part is a reflection.
    pub fn angle2(&self) -> Result<f64> {
        if self.dim != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: self.dim,
            });
        }
        if self.is_reflection() {
            return Err(Error::ReflectionPresent);
        }
        let theta = self.linear.get(1, 0).atan2(self.linear.get(0, 0));
        Ok(if theta < 0.0 {
            theta + std::f64::consts::TAU
        } else {
            theta
        })
    }

    pub fn apply(&self, p: &Point) -> Result<Point> {
        if p.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: p.dim(),
            });
        }
        Ok(Point::from_raw(self.apply_raw(p.raw()), self.dim))
    }

    /// Unchecked fast path used by enumeration loops.
    #[inline]
    pub fn apply_raw(&self, v: [f64; 3]) -> [f64; 3] {
        let lv = self.linear.apply(v);
        [
            lv[0] + self.translation[0],
            lv[1] + self.translation[1],
            lv[2] + self.translation[2],
        ]
    }

    /// Composition `self . other` (apply `other` first).
    pub fn compose(&self, other: &RigidMotion) -> RigidMotion {
        assert_eq!(self.dim, other.dim);
        let linear = self.linear.mul(&other.linear);
        let st = self.linear.apply(other.translation);
        RigidMotion {
            dim: self.dim,
            linear,
            translation: [
                st[0] + self.translation[0],
                st[1] + self.translation[1],
                st[2] + self.translation[2],
            ],
        }
    }

    pub fn inverse(&self) -> RigidMotion {
        let inv = self.linear.transpose();
        let it = inv.apply(self.translation);
        RigidMotion {
            dim: self.dim,
            linear: inv,
            translation: [-it[0], -it[1], -it[2]],
        }
    }

    /// Haar-uniform element of O(d): a Haar rotation composed with a fair
    /// reflection coin. Supported for d in {1, 2, 3}.
    pub fn haar_orthogonal<R: Rng>(dim: usize, rng: &mut R) -> Self {
        let rot = Self::haar_rotation(dim, rng);
        let reflect: bool = rng.gen();
        if !reflect {
            return rot;
        }
        let flip = match dim {
            1 => SquareMat::from_rows(1, &[-1.0]),
            2 => SquareMat::reflection2(0.0),
            // -I has determinant -1 in odd dimension.
            _ => SquareMat::from_rows(3, &[-1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, -1.0]),
        };
        RigidMotion {
            dim,
            linear: flip.mul(rot.linear_part()),
            translation: [0.0; 3],
        }
    }

    /// Haar-uniform element of SO(d): uniform angle for d = 2, uniform unit
    /// quaternion for d = 3.
    pub fn haar_rotation<R: Rng>(dim: usize, rng: &mut R) -> Self {
        match dim {
            1 => Self::identity(1),
            2 => Self::rotation2(rng.gen::<f64>() * std::f64::consts::TAU),
            3 => {
                // Shoemake's subgroup algorithm for uniform quaternions.
                let u1: f64 = rng.gen();
                let u2: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
                let u3: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
                let a = (1.0 - u1).sqrt();
                let b = u1.sqrt();
                let q = (a * u2.sin(), a * u2.cos(), b * u3.sin(), b * u3.cos());
                RigidMotion {
                    dim: 3,
                    linear: SquareMat::from_quaternion(q.0, q.1, q.2, q.3),
                    translation: [0.0; 3],
                }
            }
            _ => panic!("Haar sampling supports dimensions 1..=3"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn quarter_turn_about_origin() {
        let g = RigidMotion::rotation2(std::f64::consts::FRAC_PI_2);
        let p = Point::new(&[1.0, 0.0]).unwrap();
        let q = g.apply(&p).unwrap();
        assert!((q.coords()[0]).abs() < 1e-15);
        assert!((q.coords()[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pure_translation() {
        let g = RigidMotion::translation_of(2, &[1.0, 2.0]).unwrap();
        let q = g.apply(&Point::new(&[0.0, 0.0]).unwrap()).unwrap();
        assert_eq!(q.coords(), &[1.0, 2.0]);
    }

    #[test]
    fn half_turn_with_shift_fixes_its_center() {
        // S = -I with s = (2, 0) is the half turn about (1, 0).
        let s = SquareMat::from_rows(2, &[-1.0, 0.0, 0.0, -1.0]);
        let g = RigidMotion::new(s, &[2.0, 0.0]).unwrap();
        let image = g.apply(&Point::new(&[0.0, 0.0]).unwrap()).unwrap();
        assert_eq!(image.coords(), &[2.0, 0.0]);
        let fixed = g.apply(&Point::new(&[1.0, 0.0]).unwrap()).unwrap();
        assert!(fixed.dist(&Point::new(&[1.0, 0.0]).unwrap()) < 1e-15);
    }

    #[test]
    fn compose_and_invert_satisfy_group_laws() {
        let mut rng = stream(17, 0);
        for _ in 0..50 {
            let g1 = RigidMotion::haar_orthogonal(2, &mut rng);
            let g2 = RigidMotion::rotation2_about(rng.gen::<f64>() * 6.0, [0.3, -0.2]);
            let p = Point::new(&[rng.gen::<f64>(), rng.gen::<f64>()]).unwrap();
            let lhs = g1.compose(&g2).apply(&p).unwrap();
            let rhs = g1.apply(&g2.apply(&p).unwrap()).unwrap();
            assert!(lhs.dist(&rhs) < 1e-10);
            let back = g1.inverse().apply(&g1.apply(&p).unwrap()).unwrap();
            assert!(back.dist(&p) < 1e-10);
        }
    }

    #[test]
    fn motions_are_isometries() {
        let mut rng = stream(23, 0);
        for dim in [2usize, 3] {
            for _ in 0..40 {
                let g = RigidMotion::haar_orthogonal(dim, &mut rng);
                let coords = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
                    (0..dim).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect()
                };
                let p = Point::new(&coords(&mut rng)).unwrap();
                let q = Point::new(&coords(&mut rng)).unwrap();
                let before = p.dist(&q);
                let after = g.apply(&p).unwrap().dist(&g.apply(&q).unwrap());
                assert!((before - after).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn repairs_slightly_skewed_linear_part() {
        let mut m = SquareMat::rotation2(0.4);
        m.set(1, 1, m.get(1, 1) + 5e-10);
        let g = RigidMotion::new(m, &[0.0, 0.0]).unwrap();
        assert!(g.linear_part().orthogonality_residual() < 1e-13);
        let bad = SquareMat::from_rows(2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(matches!(
            RigidMotion::new(bad, &[0.0, 0.0]),
            Err(Error::NotOrthogonal { .. })
        ));
    }

    #[test]
    fn angle_extraction() {
        let g = RigidMotion::rotation2(5.5);
        assert!((g.angle2().unwrap() - 5.5).abs() < 1e-12);
        let r = RigidMotion::reflection2(0.2);
        assert!(matches!(r.angle2(), Err(Error::ReflectionPresent)));
    }
}
