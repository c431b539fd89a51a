//! Planar-motion coordinates and delta-tube incidence experiments.
//!
//! An orientation-preserving planar motion with rotation angle theta != 0 is
//! a rotation about a unique fixed point x0; the chart used here is
//! (x0, cot(theta/2)) in R^3. Under this chart the motions carrying a point
//! x3 to a point x1 form a line, and near-coincidence sets become tubes,
//! which turns distance-set questions into tube-incidence counting.

mod families;
mod laws;
mod raster;
mod tech;

pub use families::{
    build_pair_tubes, bush_2d, bush_3d, fan_2d, pair_direction_witness, random_family_3d,
    PairSeparationReport, PairTubeBox, TubeFamily,
};
pub use laws::{
    bound_value, fit_richness_exponent, pairwise_intersection_sum, verify_bound, IncidenceBound,
};
pub use raster::{
    bush_radius_check, counting_identity, rasterize, rich_profile, union_volume, CellGrid,
    RasterMode, RichnessProfile, DEFAULT_GRID_CAP,
};
pub use tech::{tech_ratio, wide_angle_fraction, TechRatio};

use crate::error::{Error, Result};
use crate::geom::{Point, RigidMotion};

/// Chart coordinates of an orientation-preserving planar motion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MotionCoords {
    /// Rotation by theta in (0, 2pi) about `center`, with z = cot(theta/2).
    Finite { center: [f64; 2], z: f64 },
    /// Pure translations have no fixed point; they live at z = infinity.
    AtInfinity { shift: [f64; 2] },
}

impl MotionCoords {
    pub fn is_finite(&self) -> bool {
        matches!(self, MotionCoords::Finite { .. })
    }

    /// The R^3 chart point, when finite.
    pub fn as_point3(&self) -> Option<[f64; 3]> {
        match self {
            MotionCoords::Finite { center, z } => Some([center[0], center[1], *z]),
            MotionCoords::AtInfinity { .. } => None,
        }
    }
}

/// Rotation angles below this are treated as pure translations.
const TRANSLATION_ANGLE_TOL: f64 = 1e-12;

/// Chart coordinates of an orientation-preserving planar motion. Errors on
/// reflections; pure translations map to the point at infinity.
pub fn motion_to_coords(g: &RigidMotion) -> Result<MotionCoords> {
    if g.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: g.dim(),
        });
    }
    if g.is_reflection() {
        return Err(Error::ReflectionPresent);
    }
    let theta = g.angle2()?;
    let wrapped = theta.min(std::f64::consts::TAU - theta);
    if wrapped.abs() <= TRANSLATION_ANGLE_TOL {
        let t = g.translation();
        return Ok(MotionCoords::AtInfinity {
            shift: [t[0], t[1]],
        });
    }
    // x0 = (S - I)^{-1} (-s)
    let s_minus_i = g
        .linear_part()
        .sub(&crate::geom::SquareMat::identity(2));
    let inv = s_minus_i
        .inverse()
        .ok_or(Error::CoordsAtInfinity)?;
    let t = g.translation();
    let x0 = inv.apply([-t[0], -t[1], 0.0]);
    let z = (theta / 2.0).cos() / (theta / 2.0).sin();
    Ok(MotionCoords::Finite {
        center: [x0[0], x0[1]],
        z,
    })
}

/// Inverse chart: rotation by theta = 2 arccot(z) in (0, 2pi) about the
/// recorded center.
pub fn coords_to_motion(c: &MotionCoords) -> Result<RigidMotion> {
    match c {
        MotionCoords::AtInfinity { .. } => Err(Error::CoordsAtInfinity),
        MotionCoords::Finite { center, z } => {
            // atan2(1, z) has range (0, pi), exactly the half-angle range.
            let theta = 2.0 * 1.0f64.atan2(*z);
            Ok(RigidMotion::rotation2_about(theta, *center))
        }
    }
}

/// A line in the chart space R^3, parameterized as anchor + t * dir.
#[derive(Debug, Clone, Copy)]
pub struct ParamLine3 {
    pub anchor: [f64; 3],
    /// Unit direction.
    pub dir: [f64; 3],
    /// Set when the two source points coincide: the line is the vertical
    /// stabilizer {(x1, z)}.
    pub degenerate: bool,
}

impl ParamLine3 {
    pub fn point_at(&self, t: f64) -> [f64; 3] {
        [
            self.anchor[0] + t * self.dir[0],
            self.anchor[1] + t * self.dir[1],
            self.anchor[2] + t * self.dir[2],
        ]
    }

    /// Chart coordinates of the line point at parameter `t`.
    pub fn coords_at(&self, t: f64) -> MotionCoords {
        let p = self.point_at(t);
        MotionCoords::Finite {
            center: [p[0], p[1]],
            z: p[2],
        }
    }
}

/// The line of rotations carrying `x3` to `x1`.
///
/// Fixed points lie on the perpendicular bisector: x0 = midpoint + t u with
/// u the unit counterclockwise perpendicular of (x1 - x3), and the chart
/// height is z = cot(theta/2) = 2t / |x1 - x3|. Eliminating t gives the
/// direction ((x1 - x3)^perp / 2, 1) through ((x1+x3)/2, 0).
pub fn pair_line(x1: &Point, x3: &Point) -> Result<ParamLine3> {
    if x1.dim() != 2 || x3.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: x1.dim().max(x3.dim()),
        });
    }
    let a = x1.raw();
    let b = x3.raw();
    let diff = [a[0] - b[0], a[1] - b[1]];
    let mid = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
    let len = (diff[0] * diff[0] + diff[1] * diff[1]).sqrt();
    if len == 0.0 {
        return Ok(ParamLine3 {
            anchor: [a[0], a[1], 0.0],
            dir: [0.0, 0.0, 1.0],
            degenerate: true,
        });
    }
    // Counterclockwise perpendicular of diff, halved, with unit z-slope.
    let raw_dir = [-diff[1] / 2.0, diff[0] / 2.0, 1.0];
    let norm = (raw_dir[0] * raw_dir[0] + raw_dir[1] * raw_dir[1] + 1.0).sqrt();
    Ok(ParamLine3 {
        anchor: [mid[0], mid[1], 0.0],
        dir: [raw_dir[0] / norm, raw_dir[1] / norm, raw_dir[2] / norm],
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::SquareMat;
    use crate::rng::stream;
    use rand::Rng;

    #[test]
    fn half_turn_about_origin_maps_to_origin_coords() {
        let g = RigidMotion::rotation2_about(std::f64::consts::PI, [0.0, 0.0]);
        match motion_to_coords(&g).unwrap() {
            MotionCoords::Finite { center, z } => {
                assert!(center[0].abs() < 1e-12 && center[1].abs() < 1e-12);
                assert!(z.abs() < 1e-12);
            }
            other => panic!("expected finite coords, got {other:?}"),
        }
    }

    #[test]
    fn quarter_turn_about_point() {
        let g = RigidMotion::rotation2_about(std::f64::consts::FRAC_PI_2, [1.0, 2.0]);
        match motion_to_coords(&g).unwrap() {
            MotionCoords::Finite { center, z } => {
                assert!((center[0] - 1.0).abs() < 1e-12);
                assert!((center[1] - 2.0).abs() < 1e-12);
                assert!((z - 1.0).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn explicit_half_turn_with_shift() {
        // S = -I, s = (2,0): fixed point (1,0), z = cot(pi/2) = 0.
        let s = SquareMat::from_rows(2, &[-1.0, 0.0, 0.0, -1.0]);
        let g = RigidMotion::new(s, &[2.0, 0.0]).unwrap();
        match motion_to_coords(&g).unwrap() {
            MotionCoords::Finite { center, z } => {
                assert!((center[0] - 1.0).abs() < 1e-12);
                assert!(center[1].abs() < 1e-12);
                assert!(z.abs() < 1e-12);
                let fixed = g.apply(&Point::new(&[1.0, 0.0]).unwrap()).unwrap();
                assert!(fixed.dist(&Point::new(&[1.0, 0.0]).unwrap()) < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn translations_map_to_infinity() {
        let g = RigidMotion::translation_of(2, &[0.4, -0.7]).unwrap();
        let c = motion_to_coords(&g).unwrap();
        assert!(!c.is_finite());
        assert!(coords_to_motion(&c).is_err());
    }

    #[test]
    fn reflections_are_rejected() {
        let g = RigidMotion::reflection2(0.3);
        assert!(matches!(
            motion_to_coords(&g),
            Err(Error::ReflectionPresent)
        ));
    }

    #[test]
    fn inverse_chart_examples() {
        let g = coords_to_motion(&MotionCoords::Finite {
            center: [0.0, 0.0],
            z: 0.0,
        })
        .unwrap();
        let image = g.apply(&Point::new(&[0.3, -0.2]).unwrap()).unwrap();
        assert!(image.dist(&Point::new(&[-0.3, 0.2]).unwrap()) < 1e-12);

        let g = coords_to_motion(&MotionCoords::Finite {
            center: [1.0, 2.0],
            z: 1.0,
        })
        .unwrap();
        assert!((g.angle2().unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn chart_roundtrip_on_random_motions() {
        // Rotation angles bounded away from zero, matching the angular window
        // the tube experiments run in; the chart blows up near the identity.
        let mut rng = stream(100, 0);
        let mut worst: f64 = 0.0;
        for _ in 0..10_000 {
            let theta = 0.1 + rng.gen::<f64>() * (std::f64::consts::TAU - 0.2);
            let center = [rng.gen::<f64>() * 6.0 - 3.0, rng.gen::<f64>() * 6.0 - 3.0];
            let g = RigidMotion::rotation2_about(theta, center);
            let c = motion_to_coords(&g).unwrap();
            let back = coords_to_motion(&c).unwrap();
            let lin_err = (0..2)
                .flat_map(|i| (0..2).map(move |j| (i, j)))
                .map(|(i, j)| (g.linear_part().get(i, j) - back.linear_part().get(i, j)).abs())
                .fold(0.0f64, f64::max);
            let tr_err = g
                .translation()
                .iter()
                .zip(back.translation())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            worst = worst.max(lin_err).max(tr_err);
        }
        assert!(worst <= 1e-10, "worst roundtrip error {worst}");
    }

    #[test]
    fn pair_line_examples() {
        // Antipodal pair on the x-axis: the line {(0, t, t)}.
        let x1 = Point::new(&[1.0, 0.0]).unwrap();
        let x3 = Point::new(&[-1.0, 0.0]).unwrap();
        let line = pair_line(&x1, &x3).unwrap();
        assert!(!line.degenerate);
        for t in [-2.0, -0.5, 0.0, 0.5, 2.0] {
            // Scale the parameter so the z-coordinate equals t.
            let scale = t / line.dir[2];
            let p = line.point_at(scale);
            assert!(p[0].abs() < 1e-12);
            assert!((p[1] - t).abs() < 1e-12);
            assert!((p[2] - t).abs() < 1e-12);
        }
        // At z = 0 the motion is the half turn about the origin.
        let g = coords_to_motion(&line.coords_at(0.0)).unwrap();
        let image = g.apply(&x3).unwrap();
        assert!(image.dist(&x1) < 1e-12);

        // At z = 1 it is the quarter turn about (0, 1).
        let scale = 1.0 / line.dir[2];
        let g = coords_to_motion(&line.coords_at(scale)).unwrap();
        assert!((g.angle2().unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert!(g.apply(&x3).unwrap().dist(&x1) < 1e-12);
    }

    #[test]
    fn coincident_pair_gives_vertical_stabilizer() {
        let p = Point::new(&[0.4, 0.7]).unwrap();
        let line = pair_line(&p, &p).unwrap();
        assert!(line.degenerate);
        assert_eq!(line.dir, [0.0, 0.0, 1.0]);
        let g = coords_to_motion(&line.coords_at(2.0)).unwrap();
        assert!(g.apply(&p).unwrap().dist(&p) < 1e-12);
    }

    #[test]
    fn pair_line_oracle_soundness() {
        // Every chart point on the pair line converts to a motion carrying
        // x3 to x1.
        let mut rng = stream(321, 0);
        let mut done = 0;
        while done < 1000 {
            let x1 = Point::new(&[rng.gen::<f64>(), rng.gen::<f64>()]).unwrap();
            let x3 = Point::new(&[rng.gen::<f64>(), rng.gen::<f64>()]).unwrap();
            if x1.dist(&x3) < 0.5 {
                continue;
            }
            done += 1;
            let line = pair_line(&x1, &x3).unwrap();
            for _ in 0..10 {
                let t = rng.gen::<f64>() * 6.0 - 3.0;
                let g = coords_to_motion(&line.coords_at(t)).unwrap();
                let err = g.apply(&x3).unwrap().dist(&x1);
                assert!(err <= 1e-9, "pair-line error {err}");
            }
        }
    }
}
