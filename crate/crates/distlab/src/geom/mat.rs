//! Small square matrices for dimensions 1..=3.
//!
//! Stored row-major in a fixed 3x3 buffer; only the leading `dim` block is
//! meaningful. Enough linear algebra for orthogonal groups O(1), O(2), O(3).

/// Row-major square matrix of side `dim <= 3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquareMat {
    pub dim: usize,
    m: [f64; 9],
}

impl SquareMat {
    pub fn zeros(dim: usize) -> Self {
        assert!((1..=3).contains(&dim), "dimension must be 1, 2 or 3");
        SquareMat { dim, m: [0.0; 9] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut a = Self::zeros(dim);
        for i in 0..dim {
            a.set(i, i, 1.0);
        }
        a
    }

    pub fn from_rows(dim: usize, rows: &[f64]) -> Self {
        assert_eq!(rows.len(), dim * dim);
        let mut a = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                a.set(i, j, rows[i * dim + j]);
            }
        }
        a
    }

    /// Counterclockwise rotation of the plane by `theta`.
    pub fn rotation2(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::from_rows(2, &[c, -s, s, c])
    }

    /// Reflection of the plane across the line through the origin at angle
    /// `axis` to the x-axis.
    pub fn reflection2(axis: f64) -> Self {
        let (s, c) = (2.0 * axis).sin_cos();
        Self::from_rows(2, &[c, s, s, -c])
    }

    /// Rotation matrix of the unit quaternion `(w, x, y, z)`.
    pub fn from_quaternion(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self::from_rows(
            3,
            &[
                1.0 - 2.0 * (y * y + z * z),
                2.0 * (x * y - w * z),
                2.0 * (x * z + w * y),
                2.0 * (x * y + w * z),
                1.0 - 2.0 * (x * x + z * z),
                2.0 * (y * z - w * x),
                2.0 * (x * z - w * y),
                2.0 * (y * z + w * x),
                1.0 - 2.0 * (x * x + y * y),
            ],
        )
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[i * 3 + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.m[i * 3 + j] = v;
    }

    pub fn transpose(&self) -> Self {
        let mut a = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                a.set(i, j, self.get(j, i));
            }
        }
        a
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut a = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let mut s = 0.0;
                for k in 0..self.dim {
                    s += self.get(i, k) * other.get(k, j);
                }
                a.set(i, j, s);
            }
        }
        a
    }

    /// Applies the matrix to the leading `dim` entries of `v`.
    #[inline]
    pub fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for i in 0..self.dim {
            let mut s = 0.0;
            for j in 0..self.dim {
                s += self.get(i, j) * v[j];
            }
            out[i] = s;
        }
        out
    }

    pub fn det(&self) -> f64 {
        match self.dim {
            1 => self.get(0, 0),
            2 => self.get(0, 0) * self.get(1, 1) - self.get(0, 1) * self.get(1, 0),
            _ => {
                self.get(0, 0)
                    * (self.get(1, 1) * self.get(2, 2) - self.get(1, 2) * self.get(2, 1))
                    - self.get(0, 1)
                        * (self.get(1, 0) * self.get(2, 2) - self.get(1, 2) * self.get(2, 0))
                    + self.get(0, 2)
                        * (self.get(1, 0) * self.get(2, 1) - self.get(1, 1) * self.get(2, 0))
            }
        }
    }

    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d.abs() < 1e-300 {
            return None;
        }
        let inv = match self.dim {
            1 => Self::from_rows(1, &[1.0 / d]),
            2 => Self::from_rows(
                2,
                &[
                    self.get(1, 1) / d,
                    -self.get(0, 1) / d,
                    -self.get(1, 0) / d,
                    self.get(0, 0) / d,
                ],
            ),
            _ => {
                let c = |i1: usize, j1: usize, i2: usize, j2: usize| {
                    self.get(i1, j1) * self.get(i2, j2) - self.get(i1, j2) * self.get(i2, j1)
                };
                Self::from_rows(
                    3,
                    &[
                        c(1, 1, 2, 2) / d,
                        -c(0, 1, 2, 2) / d,
                        c(0, 1, 1, 2) / d,
                        -c(1, 0, 2, 2) / d,
                        c(0, 0, 2, 2) / d,
                        -c(0, 0, 1, 2) / d,
                        c(1, 0, 2, 1) / d,
                        -c(0, 0, 2, 1) / d,
                        c(0, 0, 1, 1) / d,
                    ],
                )
            }
        };
        Some(inv)
    }

    /// Max-entry residual of `AᵀA - I`.
    pub fn orthogonality_residual(&self) -> f64 {
        let g = self.transpose().mul(self);
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g.get(i, j) - want).abs());
            }
        }
        worst
    }

    /// Nearest orthogonal matrix via the Newton polar iteration
    /// `X <- (X + X^{-T}) / 2`; converges quadratically for near-orthogonal
    /// input.
    pub fn nearest_orthogonal(&self) -> Option<Self> {
        let mut x = *self;
        for _ in 0..32 {
            let inv_t = x.inverse()?.transpose();
            let mut next = Self::zeros(self.dim);
            for i in 0..self.dim {
                for j in 0..self.dim {
                    next.set(i, j, 0.5 * (x.get(i, j) + inv_t.get(i, j)));
                }
            }
            x = next;
            if x.orthogonality_residual() < 1e-15 {
                break;
            }
        }
        Some(x)
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut a = *self;
        for v in a.m.iter_mut() {
            *v *= s;
        }
        a
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut a = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                a.set(i, j, self.get(i, j) - other.get(i, j));
            }
        }
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_is_orthogonal() {
        let r = SquareMat::rotation2(0.7);
        assert!(r.orthogonality_residual() < 1e-15);
        assert!((r.det() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn reflection_has_negative_det() {
        let r = SquareMat::reflection2(0.3);
        assert!(r.orthogonality_residual() < 1e-15);
        assert!((r.det() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn quaternion_rotation_is_orthogonal() {
        let n = (0.1f64 * 0.1 + 0.2 * 0.2 + 0.3 * 0.3 + 0.9 * 0.9).sqrt();
        let r = SquareMat::from_quaternion(0.9 / n, 0.1 / n, 0.2 / n, 0.3 / n);
        assert!(r.orthogonality_residual() < 1e-14);
        assert!((r.det() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn inverse_roundtrip() {
        let a = SquareMat::from_rows(3, &[2.0, 1.0, 0.5, 0.0, 1.5, 0.2, 0.3, 0.0, 1.1]);
        let inv = a.inverse().unwrap();
        let id = a.mul(&inv);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((id.get(i, j) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn polar_projection_restores_orthogonality() {
        let mut a = SquareMat::rotation2(1.1);
        a.set(0, 0, a.get(0, 0) + 3e-9);
        let q = a.nearest_orthogonal().unwrap();
        assert!(q.orthogonality_residual() < 1e-14);
        assert!((q.get(0, 0) - 1.1f64.cos()).abs() < 1e-8);
    }
}
