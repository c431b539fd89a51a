//! Construction of tube families: bushes, fans, random placements and the
//! pair tubes induced by planar point clouds in the motion chart.

use rand::Rng;

use super::pair_line;
use crate::error::{Error, Result};
use crate::geom::{segment_distance, PointCloud, Tube};
use crate::rng::stream;

/// Tubes of one shared radius in R^2 or R^3.
#[derive(Debug, Clone)]
pub struct TubeFamily {
    dim: usize,
    radius: f64,
    tubes: Vec<Tube>,
    /// Pairwise direction separation guaranteed by construction, when one is.
    dir_separation: Option<f64>,
}

impl TubeFamily {
    pub fn new(dim: usize, radius: f64, tubes: Vec<Tube>) -> Result<Self> {
        if tubes.is_empty() {
            return Err(Error::EmptyInput("tube family is empty".into()));
        }
        for t in &tubes {
            if t.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: t.dim(),
                });
            }
            if (t.radius() - radius).abs() > 1e-15 {
                return Err(Error::InvalidParameter(
                    "all tubes in a family share one radius".into(),
                ));
            }
        }
        Ok(TubeFamily {
            dim,
            radius,
            tubes,
            dir_separation: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.tubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tubes.is_empty()
    }

    pub fn tubes(&self) -> &[Tube] {
        &self.tubes
    }

    pub fn dir_separation(&self) -> Option<f64> {
        self.dir_separation
    }

    fn with_separation(mut self, sep: f64) -> Self {
        self.dir_separation = Some(sep);
        self
    }

    /// Joint bounding box of all tubes thickened to `radius`.
    pub fn bounding_box(&self, radius: f64) -> ([f64; 3], [f64; 3]) {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for t in &self.tubes {
            let (tlo, thi) = t.bounding_box(radius);
            for a in 0..self.dim {
                lo[a] = lo[a].min(tlo[a]);
                hi[a] = hi[a].max(thi[a]);
            }
        }
        for a in self.dim..3 {
            lo[a] = 0.0;
            hi[a] = 0.0;
        }
        (lo, hi)
    }

    /// Smallest direction gap among pairs of tubes whose axes pass within
    /// `2 * radius` of each other; `None` when no pair comes that close.
    pub fn min_intersecting_direction_gap(&self) -> Option<f64> {
        let mut best: Option<f64> = None;
        for i in 0..self.tubes.len() {
            for j in (i + 1)..self.tubes.len() {
                if segment_distance(&self.tubes[i], &self.tubes[j]) <= 2.0 * self.radius {
                    let gap = self.tubes[i].direction_gap(&self.tubes[j]);
                    best = Some(best.map_or(gap, |b: f64| b.min(gap)));
                }
            }
        }
        best
    }
}

/// Quasi-uniform points on the upper hemisphere via the Fibonacci lattice.
fn fibonacci_hemisphere(n: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            // z sweeps (0, 1]: upper half of the usual full-sphere lattice.
            let z = (i as f64 + 0.5) / n as f64;
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            [rho * phi.cos(), rho * phi.sin(), z]
        })
        .collect()
}

/// Acute angle between lines spanned by two unit vectors.
#[inline]
fn line_angle(a: [f64; 3], b: [f64; 3]) -> f64 {
    let c = (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]).abs().min(1.0);
    c.acos()
}

/// Greedy selection of directions with pairwise line angle >= `min_gap`,
/// visiting candidates in a seeded random order so any prefix stays spread
/// over the hemisphere. Stops at `target` directions when given.
fn line_separated_directions(
    min_gap: f64,
    target: Option<usize>,
    candidates: usize,
    seed: u64,
) -> Vec<[f64; 3]> {
    let mut order: Vec<usize> = (0..candidates).collect();
    let mut rng = stream(seed, 0);
    // Fisher-Yates with the counter-based stream.
    for i in (1..order.len()).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }
    let pts = fibonacci_hemisphere(candidates);
    let mut kept: Vec<[f64; 3]> = Vec::new();
    for idx in order {
        let cand = pts[idx];
        if kept.iter().all(|k| line_angle(*k, cand) >= min_gap) {
            kept.push(cand);
            if let Some(t) = target {
                if kept.len() == t {
                    break;
                }
            }
        }
    }
    kept
}

/// All-through-origin bush in R^3: unit segments with pairwise line-angle
/// separation `sep_mult * delta` (10 delta by default use), radius `delta`.
pub fn bush_3d(delta: f64, sep_mult: f64) -> Result<TubeFamily> {
    if !(delta > 0.0 && sep_mult > 0.0) {
        return Err(Error::InvalidParameter(
            "bush needs positive delta and separation".into(),
        ));
    }
    let gap = sep_mult * delta;
    let candidates = ((16.0 / (gap * gap)).ceil() as usize).clamp(1024, 1 << 20);
    let dirs = line_separated_directions(gap, None, candidates, 0x5eed);
    let tubes = dirs
        .into_iter()
        .map(|d| Tube::through(3, [0.0; 3], d, 1.0, delta))
        .collect::<Result<Vec<_>>>()?;
    Ok(TubeFamily::new(3, delta, tubes)?.with_separation(gap))
}

/// All-through-origin planar bush: angles k * sep_mult * delta sweeping the
/// half circle.
pub fn bush_2d(delta: f64, sep_mult: f64) -> Result<TubeFamily> {
    if !(delta > 0.0 && sep_mult > 0.0) {
        return Err(Error::InvalidParameter(
            "bush needs positive delta and separation".into(),
        ));
    }
    let gap = sep_mult * delta;
    let count = (std::f64::consts::PI / gap).floor() as usize;
    if count == 0 {
        return Err(Error::InvalidParameter(
            "separation exceeds the half circle".into(),
        ));
    }
    fan_2d(delta, count, gap)
}

/// Planar fan: `count` unit segments through the origin at consecutive
/// angular gap `gap` (the tightest packing allowed by a gap-separation
/// hypothesis).
pub fn fan_2d(delta: f64, count: usize, gap: f64) -> Result<TubeFamily> {
    if count == 0 {
        return Err(Error::EmptyInput("fan needs at least one tube".into()));
    }
    if !(gap > 0.0) || count as f64 * gap > std::f64::consts::PI {
        return Err(Error::InvalidParameter(
            "fan angles must fit inside the half circle".into(),
        ));
    }
    let tubes = (0..count)
        .map(|k| {
            let theta = k as f64 * gap;
            Tube::through(2, [0.0; 3], [theta.cos(), theta.sin(), 0.0], 1.0, delta)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TubeFamily::new(2, delta, tubes)?.with_separation(gap))
}

/// `count` unit tubes with delta-separated directions and centers uniform in
/// the unit cube.
pub fn random_family_3d(delta: f64, count: usize, seed: u64) -> Result<TubeFamily> {
    if !(delta > 0.0) || count == 0 {
        return Err(Error::InvalidParameter(
            "random family needs positive delta and count".into(),
        ));
    }
    // Separation threshold: as coarse as the requested count allows (cap
    // packing ~ 8/gap^2 on the hemisphere, greedy reaches about half), but
    // never below delta.
    let packing_gap = (2.0 / count as f64).sqrt();
    let gap = packing_gap.max(delta);
    let candidates = ((64.0 / (gap * gap)).ceil() as usize).clamp(4096, 1 << 21);
    let dirs = line_separated_directions(gap, Some(count), candidates, seed ^ 0xd1f5);
    if dirs.len() < count {
        return Err(Error::InvalidParameter(format!(
            "cannot place {count} directions with separation {gap:.4}; got {}",
            dirs.len()
        )));
    }
    let mut rng = stream(seed, 1);
    let tubes = dirs
        .into_iter()
        .map(|d| {
            let center = [rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()];
            Tube::through(3, center, d, 1.0, delta)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TubeFamily::new(3, delta, tubes)?.with_separation(gap))
}

/// Chart box for pair tubes: fixed points within `xy_bound` of the origin
/// and |z| at most `z_bound` (rotation angle bounded away from zero).
#[derive(Debug, Clone, Copy)]
pub struct PairTubeBox {
    pub xy_bound: f64,
    pub z_bound: f64,
}

impl Default for PairTubeBox {
    fn default() -> Self {
        PairTubeBox {
            // Translations of the compact motion window live in the ball of
            // radius 3; rotation angle >= 0.1 caps |cot(theta/2)|.
            xy_bound: 3.0,
            z_bound: 1.0 / 0.05f64.tan(),
        }
    }
}

fn pair_tube(
    x1: &crate::geom::Point,
    x3: &crate::geom::Point,
    delta: f64,
    chart_box: &PairTubeBox,
) -> Result<Option<Tube>> {
    let lo = [
        -chart_box.xy_bound,
        -chart_box.xy_bound,
        -chart_box.z_bound,
    ];
    let hi = [chart_box.xy_bound, chart_box.xy_bound, chart_box.z_bound];
    let line = pair_line(x1, x3)?;
    Ok(
        match clip_line_to_box(line.anchor, line.dir, lo, hi) {
            Some((t_lo, t_hi)) if t_hi - t_lo > 1e-12 => {
                let mid = line.point_at((t_lo + t_hi) / 2.0);
                Some(Tube::new(3, mid, line.dir, t_hi - t_lo, delta)?)
            }
            _ => None,
        },
    )
}

fn validate_pair_inputs(f1: &PointCloud, f2: &PointCloud, delta: f64) -> Result<()> {
    if f1.is_empty() || f2.is_empty() {
        return Err(Error::EmptyInput("pair tubes need nonempty clouds".into()));
    }
    if f1.dim() != 2 || f2.dim() != 2 {
        return Err(Error::InvalidParameter(
            "pair tubes are defined for planar clouds".into(),
        ));
    }
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter("delta must be positive".into()));
    }
    Ok(())
}

/// One tube per pair (x1, x3) in F1 x F2: the pair line clipped to the chart
/// box, thickened to `delta`.
pub fn build_pair_tubes(
    f1: &PointCloud,
    f2: &PointCloud,
    delta: f64,
    chart_box: PairTubeBox,
) -> Result<TubeFamily> {
    validate_pair_inputs(f1, f2, delta)?;
    let mut tubes = Vec::with_capacity(f1.len() * f2.len());
    for x1 in f1.iter() {
        for x3 in f2.iter() {
            if let Some(t) = pair_tube(x1, x3, delta, &chart_box)? {
                tubes.push(t);
            }
        }
    }
    if tubes.is_empty() {
        return Err(Error::EmptyInput(
            "no pair line meets the chart box".into(),
        ));
    }
    TubeFamily::new(3, delta, tubes)
}

/// Direction gaps among intersecting pair tubes, split by whether the two
/// generating pairs share a point.
///
/// Pairs sharing a leg have chart directions separated by about
/// |difference| / 2 >= delta / 2, far above 0.01 delta. Pairs differing in
/// both legs can realize near-parallelogram geometry (x1 - x3 close to
/// y1 - y3) whose chart lines are almost parallel yet whose tubes still
/// meet, so their minimum gap is reported as data rather than asserted.
#[derive(Debug, Clone, Copy)]
pub struct PairSeparationReport {
    /// Smallest gap over all intersecting tube pairs.
    pub min_gap_all: f64,
    /// Smallest gap over intersecting pairs sharing a source point.
    pub min_gap_shared_leg: f64,
    pub intersecting_pairs: u64,
}

pub fn pair_direction_witness(
    f1: &PointCloud,
    f2: &PointCloud,
    delta: f64,
    chart_box: PairTubeBox,
) -> Result<PairSeparationReport> {
    validate_pair_inputs(f1, f2, delta)?;
    let mut tubes: Vec<(usize, usize, Tube)> = Vec::new();
    for (i1, x1) in f1.iter().enumerate() {
        for (i3, x3) in f2.iter().enumerate() {
            if let Some(t) = pair_tube(x1, x3, delta, &chart_box)? {
                tubes.push((i1, i3, t));
            }
        }
    }
    let mut min_all = f64::INFINITY;
    let mut min_shared = f64::INFINITY;
    let mut hits = 0u64;
    for a in 0..tubes.len() {
        for b in (a + 1)..tubes.len() {
            let (i1, i3, ref ta) = tubes[a];
            let (j1, j3, ref tb) = tubes[b];
            if segment_distance(ta, tb) > 2.0 * delta {
                continue;
            }
            hits += 1;
            let gap = ta.direction_gap(tb);
            min_all = min_all.min(gap);
            if i1 == j1 || i3 == j3 {
                min_shared = min_shared.min(gap);
            }
        }
    }
    Ok(PairSeparationReport {
        min_gap_all: min_all,
        min_gap_shared_leg: min_shared,
        intersecting_pairs: hits,
    })
}

/// Slab clipping of the parameter interval of anchor + t dir against an
/// axis-aligned box.
fn clip_line_to_box(
    anchor: [f64; 3],
    dir: [f64; 3],
    lo: [f64; 3],
    hi: [f64; 3],
) -> Option<(f64, f64)> {
    let mut t_lo = f64::NEG_INFINITY;
    let mut t_hi = f64::INFINITY;
    for a in 0..3 {
        if dir[a].abs() < 1e-15 {
            if anchor[a] < lo[a] || anchor[a] > hi[a] {
                return None;
            }
            continue;
        }
        let t1 = (lo[a] - anchor[a]) / dir[a];
        let t2 = (hi[a] - anchor[a]) / dir[a];
        let (t1, t2) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        t_lo = t_lo.max(t1);
        t_hi = t_hi.min(t2);
        if t_lo > t_hi {
            return None;
        }
    }
    Some((t_lo, t_hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::delta_net;
    use crate::geom::Point;

    #[test]
    fn bush_directions_are_separated() {
        let delta = 1.0 / 32.0;
        let fam = bush_3d(delta, 10.0).unwrap();
        assert!(fam.len() > 20, "bush only has {} tubes", fam.len());
        let gap = fam.dir_separation().unwrap();
        for i in 0..fam.len() {
            for j in (i + 1)..fam.len() {
                let a = fam.tubes()[i].direction_gap(&fam.tubes()[j]);
                assert!(a >= gap - 1e-12, "pair ({i},{j}) gap {a}");
            }
        }
    }

    #[test]
    fn planar_bush_counts() {
        let delta = 1.0 / 512.0;
        let fam = bush_2d(delta, 10.0).unwrap();
        let expect = (std::f64::consts::PI / (10.0 * delta)).floor() as usize;
        assert_eq!(fam.len(), expect);
    }

    #[test]
    fn fan_rejects_oversized_sector() {
        assert!(fan_2d(0.01, 300, 0.01).is_ok());
        assert!(fan_2d(0.01, 400, 0.01).is_err());
    }

    #[test]
    fn random_family_has_separated_directions() {
        let fam = random_family_3d(1.0 / 64.0, 256, 7).unwrap();
        assert_eq!(fam.len(), 256);
        let want = fam.dir_separation().unwrap();
        assert!(want >= 1.0 / 64.0);
        for i in 0..fam.len() {
            for j in (i + 1)..fam.len() {
                assert!(
                    fam.tubes()[i].direction_gap(&fam.tubes()[j]) >= want - 1e-12,
                    "pair ({i},{j})"
                );
            }
        }
    }

    #[test]
    fn random_family_is_seeded() {
        let a = random_family_3d(1.0 / 32.0, 64, 3).unwrap();
        let b = random_family_3d(1.0 / 32.0, 64, 3).unwrap();
        for (s, t) in a.tubes().iter().zip(b.tubes()) {
            assert_eq!(s.center(), t.center());
        }
        let c = random_family_3d(1.0 / 32.0, 64, 4).unwrap();
        assert!(a.tubes()[0].center() != c.tubes()[0].center());
    }

    fn separated_nets(delta: f64) -> (PointCloud, PointCloud) {
        // Two arcs at distance >= 0.5, delta-netted. Distinct radii and
        // phases: exact translates of one net produce parallelogram pairs
        // whose chart lines are exactly parallel, the degenerate case the
        // separation claim excludes.
        let arc = |cx: f64, cy: f64, r: f64, phase: f64| {
            let pts: Vec<Point> = (0..200)
                .map(|i| {
                    let t = phase + i as f64 / 200.0 * std::f64::consts::PI;
                    Point::new(&[cx + r * t.cos(), cy + r * t.sin()]).unwrap()
                })
                .collect();
            PointCloud::new(2, pts).unwrap()
        };
        let f1 = delta_net(&arc(0.0, 0.0, 0.2, 0.0), delta).unwrap();
        let f2 = delta_net(&arc(0.9, 0.04, 0.16, 0.35), delta).unwrap();
        (f1, f2)
    }

    #[test]
    fn pair_tube_count_is_the_product() {
        let (f1, f2) = separated_nets(0.05);
        let fam = build_pair_tubes(&f1, &f2, 0.05, PairTubeBox::default()).unwrap();
        assert_eq!(fam.len(), f1.len() * f2.len());

        let single1 = PointCloud::from_coords(2, &[&[0.0, 0.0]]).unwrap();
        let single2 = PointCloud::from_coords(2, &[&[1.0, 0.0]]).unwrap();
        let one = build_pair_tubes(&single1, &single2, 0.05, PairTubeBox::default()).unwrap();
        assert_eq!(one.len(), 1);
    }

    #[test]
    fn intersecting_pair_tubes_have_separated_directions() {
        let delta = 0.05;
        let (f1, f2) = separated_nets(delta);
        assert!(f1.distance_to(&f2) >= 0.5);
        let report =
            pair_direction_witness(&f1, &f2, delta, PairTubeBox::default()).unwrap();
        assert!(report.intersecting_pairs > 0);
        // The shared-leg gap is forced by the net separation.
        assert!(
            report.min_gap_shared_leg >= 0.01 * delta,
            "shared-leg pair with direction gap {}",
            report.min_gap_shared_leg
        );
        // Generic nets avoid exactly parallel intersecting lines; the
        // universal minimum is measured, not fixed (near-parallelograms can
        // push it below 0.01 delta).
        assert!(report.min_gap_all > 0.0);
    }

    #[test]
    fn clip_misses_box() {
        let out = clip_line_to_box(
            [10.0, 10.0, 0.0],
            [0.0, 0.0, 1.0],
            [-1.0; 3],
            [1.0; 3],
        );
        assert!(out.is_none());
    }
}
