//! Cell-grid rasterization of tube families and the richness statistics
//! built on it.
//!
//! A cell is counted for a tube when its center lies within the tube radius
//! plus half the cell diagonal of the axis segment — conservative in the
//! direction of never undercounting rich cells.

use std::collections::HashMap;

use rayon::prelude::*;

use super::families::TubeFamily;
use super::laws::pairwise_intersection_sum;
use crate::error::{Error, Result};
use crate::geom::Tube;

/// Cap on dense grid allocation (cells).
pub const DEFAULT_GRID_CAP: u64 = 60_000_000;

/// Storage strategy for the cell grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RasterMode {
    /// Flat array over the bounding box; errors beyond the cap.
    Dense,
    /// Hash map keyed by cell index; slower but bounded by occupied cells.
    Sparse,
}

enum GridData {
    Dense(Vec<u32>),
    Sparse(HashMap<[i32; 3], u32>),
}

/// Per-cell tube counts over the bounding box of a family.
pub struct CellGrid {
    dim: usize,
    cell: f64,
    origin: [f64; 3],
    dims: [usize; 3],
    data: GridData,
}

impl CellGrid {
    pub fn cell_size(&self) -> f64 {
        self.cell
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    /// Number of cells with count >= r.
    pub fn cells_at_least(&self, r: u32) -> usize {
        if r == 0 {
            return self.dims[0] * self.dims[1] * self.dims[2];
        }
        match &self.data {
            GridData::Dense(v) => v.iter().filter(|&&c| c >= r).count(),
            GridData::Sparse(m) => m.values().filter(|&&c| c >= r).count(),
        }
    }

    /// Lebesgue measure of the r-rich set: cells_at_least(r) * cell^dim.
    pub fn measure_at_least(&self, r: u32) -> f64 {
        self.cells_at_least(r) as f64 * self.cell.powi(self.dim as i32)
    }

    /// Histogram of exact counts k -> number of k-cells, k >= 1.
    pub fn histogram(&self) -> Vec<(u32, u64)> {
        let mut hist: HashMap<u32, u64> = HashMap::new();
        let mut bump = |c: u32| {
            if c > 0 {
                *hist.entry(c).or_insert(0) += 1;
            }
        };
        match &self.data {
            GridData::Dense(v) => v.iter().for_each(|&c| bump(c)),
            GridData::Sparse(m) => m.values().for_each(|&c| bump(c)),
        }
        let mut out: Vec<(u32, u64)> = hist.into_iter().collect();
        out.sort_unstable();
        out
    }

    /// Largest center norm among cells with count >= r; None when no cell
    /// qualifies.
    pub fn max_center_norm_at_least(&self, r: u32) -> Option<f64> {
        let mut best: Option<f64> = None;
        let mut visit = |idx: [i32; 3], c: u32| {
            if c >= r {
                let mut sq = 0.0;
                for a in 0..self.dim {
                    let x = self.origin[a] + (idx[a] as f64 + 0.5) * self.cell;
                    sq += x * x;
                }
                let norm = sq.sqrt();
                best = Some(best.map_or(norm, |b: f64| b.max(norm)));
            }
        };
        match &self.data {
            GridData::Dense(v) => {
                for iz in 0..self.dims[2] {
                    for iy in 0..self.dims[1] {
                        let row = (iz * self.dims[1] + iy) * self.dims[0];
                        for ix in 0..self.dims[0] {
                            visit([ix as i32, iy as i32, iz as i32], v[row + ix]);
                        }
                    }
                }
            }
            GridData::Sparse(m) => {
                for (idx, &c) in m {
                    visit(*idx, c);
                }
            }
        }
        best
    }
}

/// Rasterizes the family at the given cell size: each cell center is tested
/// against every nearby tube at the effective radius.
pub fn rasterize(
    family: &TubeFamily,
    cell: f64,
    effective_radius: f64,
    mode: RasterMode,
    cap: u64,
) -> Result<CellGrid> {
    if !(cell > 0.0) || !(effective_radius > 0.0) {
        return Err(Error::InvalidParameter(
            "cell size and effective radius must be positive".into(),
        ));
    }
    let dim = family.dim();
    let (lo, hi) = family.bounding_box(effective_radius + cell);
    let mut origin = [0.0; 3];
    let mut dims = [1usize; 3];
    let mut total: u128 = 1;
    for a in 0..dim {
        origin[a] = (lo[a] / cell).floor() * cell;
        dims[a] = (((hi[a] - origin[a]) / cell).ceil() as usize).max(1) + 1;
        total *= dims[a] as u128;
    }
    if mode == RasterMode::Dense && total > u128::from(cap) {
        return Err(Error::GridCap {
            cells: total,
            cap,
        });
    }

    // Each tube rasterizes its own cell set; integer counts merge
    // associatively, so the parallel reduction is deterministic.
    let per_tube: Vec<Vec<(usize, [i32; 3])>> = family
        .tubes()
        .par_iter()
        .map(|t| tube_cells(t, cell, effective_radius, origin, dims, dim))
        .collect();

    let data = match mode {
        RasterMode::Dense => {
            let mut v = vec![0u32; total as usize];
            for cells in &per_tube {
                for &(flat, _) in cells {
                    v[flat] += 1;
                }
            }
            GridData::Dense(v)
        }
        RasterMode::Sparse => {
            let mut m: HashMap<[i32; 3], u32> = HashMap::new();
            for cells in &per_tube {
                for &(_, idx) in cells {
                    *m.entry(idx).or_insert(0) += 1;
                }
            }
            GridData::Sparse(m)
        }
    };
    Ok(CellGrid {
        dim,
        cell,
        origin,
        dims,
        data,
    })
}

/// Cells whose centers lie within `radius` of the tube axis, walking slabs
/// of the dominant axis so each candidate cell is tested exactly once.
fn tube_cells(
    tube: &Tube,
    cell: f64,
    radius: f64,
    origin: [f64; 3],
    dims: [usize; 3],
    dim: usize,
) -> Vec<(usize, [i32; 3])> {
    let dir = tube.dir();
    let mut axis = 0;
    for a in 1..dim {
        if dir[a].abs() > dir[axis].abs() {
            axis = a;
        }
    }
    let (p0, p1) = tube.endpoints();
    let a_min = p0[axis].min(p1[axis]) - radius;
    let a_max = p0[axis].max(p1[axis]) + radius;
    let i_min = (((a_min - origin[axis]) / cell).floor() as i64).max(0);
    let i_max = (((a_max - origin[axis]) / cell).ceil() as i64).min(dims[axis] as i64 - 1);
    // A cell within `radius` of the segment lies within radius * (1 + sqrt d)
    // of the segment point sharing its slab coordinate.
    let block = ((radius * (1.0 + (dim as f64).sqrt())) / cell).ceil() as i64 + 1;
    let half_len = tube.length() / 2.0;
    let center = tube.center();

    let others: Vec<usize> = (0..dim).filter(|&a| a != axis).collect();
    let mut out = Vec::new();
    for i in i_min..=i_max {
        let coord = origin[axis] + (i as f64 + 0.5) * cell;
        // Segment point with this slab coordinate, clamped to the segment.
        let t = ((coord - center[axis]) / dir[axis]).clamp(-half_len, half_len);
        let mut probe = [0.0; 3];
        for a in 0..dim {
            probe[a] = center[a] + t * dir[a];
        }
        let mut scan = |idx2: [i64; 2]| {
            let mut cidx = [0i64; 3];
            cidx[axis] = i;
            for (slot, &a) in others.iter().enumerate() {
                cidx[a] = idx2[slot];
            }
            for a in 0..dim {
                if cidx[a] < 0 || cidx[a] >= dims[a] as i64 {
                    return;
                }
            }
            let mut p = [0.0; 3];
            for a in 0..dim {
                p[a] = origin[a] + (cidx[a] as f64 + 0.5) * cell;
            }
            if tube.axis_distance(p) <= radius {
                let flat = (cidx[2] as usize * dims[1] + cidx[1] as usize) * dims[0]
                    + cidx[0] as usize;
                out.push((flat, [cidx[0] as i32, cidx[1] as i32, cidx[2] as i32]));
            }
        };
        match others.len() {
            1 => {
                let a = others[0];
                let c = ((probe[a] - origin[a]) / cell).floor() as i64;
                for u in (c - block)..=(c + block) {
                    scan([u, 0]);
                }
            }
            _ => {
                let a = others[0];
                let b = others[1];
                let ca = ((probe[a] - origin[a]) / cell).floor() as i64;
                let cb = ((probe[b] - origin[b]) / cell).floor() as i64;
                for u in (ca - block)..=(ca + block) {
                    for v in (cb - block)..=(cb + block) {
                        scan([u, v]);
                    }
                }
            }
        }
    }
    out
}

/// The map r -> Lebesgue measure of the r-rich set, at the family radius.
#[derive(Debug, Clone)]
pub struct RichnessProfile {
    /// Family tube radius (the delta of the arrangement).
    pub tube_delta: f64,
    /// Rasterization cell size.
    pub cell: f64,
    /// Number of tubes L.
    pub tube_count: usize,
    /// (r, lambda(P_r)) pairs with r ascending.
    pub entries: Vec<(u64, f64)>,
}

impl RichnessProfile {
    pub fn to_csv_with_bound<F: Fn(u64) -> f64>(&self, bound: F) -> String {
        let mut out = String::from("r,measure,bound_value,ratio\n");
        for &(r, m) in &self.entries {
            let b = bound(r);
            let ratio = if b > 0.0 { m / b } else { f64::NAN };
            out.push_str(&format!("{r},{m},{b},{ratio}\n"));
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,measure\n");
        for &(r, m) in &self.entries {
            out.push_str(&format!("{r},{m}\n"));
        }
        out
    }
}

/// Richness profile of the family: conservative cell counting at the tube
/// radius, measured at each requested richness level.
pub fn rich_profile(
    family: &TubeFamily,
    cell: f64,
    r_list: &[u64],
    mode: RasterMode,
) -> Result<RichnessProfile> {
    if r_list.is_empty() {
        return Err(Error::EmptyInput("no richness levels requested".into()));
    }
    if r_list.iter().any(|&r| r == 0) {
        return Err(Error::InvalidParameter("richness levels start at 1".into()));
    }
    let dim = family.dim() as f64;
    let eff = family.radius() + dim.sqrt() / 2.0 * cell;
    let grid = rasterize(family, cell, eff, mode, DEFAULT_GRID_CAP)?;
    let mut rs: Vec<u64> = r_list.to_vec();
    rs.sort_unstable();
    rs.dedup();
    let entries = rs
        .into_iter()
        .map(|r| {
            let clipped = u32::try_from(r.min(u64::from(u32::MAX))).unwrap();
            (r, grid.measure_at_least(clipped))
        })
        .collect();
    Ok(RichnessProfile {
        tube_delta: family.radius(),
        cell,
        tube_count: family.len(),
        entries,
    })
}

/// Measure of the union of the tubes inflated by `inflate` times their
/// radius.
pub fn union_volume(
    family: &TubeFamily,
    cell: f64,
    inflate: f64,
    mode: RasterMode,
) -> Result<f64> {
    let dim = family.dim() as f64;
    let eff = inflate * family.radius() + dim.sqrt() / 2.0 * cell;
    let grid = rasterize(family, cell, eff, mode, DEFAULT_GRID_CAP)?;
    Ok(grid.measure_at_least(1))
}

/// Largest distance from the origin of any cell center counted in at least
/// `r` tubes (zero when none is).
pub fn bush_radius_check(family: &TubeFamily, cell: f64, r: u64) -> Result<f64> {
    let dim = family.dim() as f64;
    let eff = family.radius() + dim.sqrt() / 2.0 * cell;
    let grid = rasterize(family, cell, eff, RasterMode::Dense, DEFAULT_GRID_CAP)?;
    let clipped = u32::try_from(r.min(u64::from(u32::MAX))).unwrap();
    Ok(grid.max_center_norm_at_least(clipped).unwrap_or(0.0))
}

/// Cell-level double counting check: the left side sums k(k-1) over k-cells
/// times the cell measure, the right side is twice the pairwise inflated
/// intersection sum. With cell <= tube radius and inflate >= 3 every counted
/// cell is contained in both inflated tubes, so lhs <= rhs holds exactly.
pub fn counting_identity(
    family: &TubeFamily,
    cell: f64,
    inflate: f64,
    mode: RasterMode,
) -> Result<(f64, f64)> {
    let dim = family.dim() as f64;
    let eff = family.radius() + dim.sqrt() / 2.0 * cell;
    let grid = rasterize(family, cell, eff, mode, DEFAULT_GRID_CAP)?;
    let cell_measure = cell.powi(family.dim() as i32);
    let lhs: f64 = grid
        .histogram()
        .into_iter()
        .filter(|&(k, _)| k >= 2)
        .map(|(k, n)| f64::from(k) * f64::from(k - 1) * n as f64 * cell_measure)
        .sum();
    let rhs = 2.0 * pairwise_intersection_sum(family, inflate);
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::incidence::families::{bush_2d, fan_2d, TubeFamily};

    fn axis_tube(center: [f64; 3], radius: f64) -> Tube {
        Tube::through(3, center, [1.0, 0.0, 0.0], 1.0, radius).unwrap()
    }

    #[test]
    fn single_tube_volume_matches_cylinder() {
        let radius = 3.0 * 0.01;
        let fam = TubeFamily::new(3, radius, vec![axis_tube([0.0; 3], radius)]).unwrap();
        // Fine cells keep the conservative half-diagonal inflation small.
        let cell = radius / 36.0;
        let vol = union_volume(&fam, cell, 1.0, RasterMode::Dense).unwrap();
        let cylinder = std::f64::consts::PI * radius * radius * 1.0;
        // Caps add (4/3) pi r^3, about 4% here.
        let caps = 4.0 / 3.0 * std::f64::consts::PI * radius.powi(3);
        let expect = cylinder + caps;
        assert!(
            (vol - expect).abs() / expect < 0.15,
            "vol {vol} expect {expect}"
        );
    }

    #[test]
    fn disjoint_tubes_add_up() {
        let radius = 0.02;
        let tubes: Vec<Tube> = (0..4)
            .map(|i| axis_tube([0.0, 0.3 * i as f64, 0.0], radius))
            .collect();
        let fam = TubeFamily::new(3, radius, tubes).unwrap();
        let cell = 0.005;
        let one = union_volume(
            &TubeFamily::new(3, radius, vec![axis_tube([0.0; 3], radius)]).unwrap(),
            cell,
            1.0,
            RasterMode::Sparse,
        )
        .unwrap();
        let four = union_volume(&fam, cell, 1.0, RasterMode::Sparse).unwrap();
        assert!((four - 4.0 * one).abs() / (4.0 * one) < 0.10);
    }

    #[test]
    fn two_perpendicular_strips() {
        // lambda(P_2) of two perpendicular radius-3delta tubes in the plane
        // is (6 delta)^2 up to cell quantization.
        let delta = 0.01;
        let radius = 3.0 * delta;
        let tubes = vec![
            Tube::through(2, [0.0; 3], [1.0, 0.0, 0.0], 1.0, radius).unwrap(),
            Tube::through(2, [0.0; 3], [0.0, 1.0, 0.0], 1.0, radius).unwrap(),
        ];
        let fam = TubeFamily::new(2, radius, tubes).unwrap();
        let profile = rich_profile(&fam, delta / 4.0, &[1, 2], RasterMode::Dense).unwrap();
        let p2 = profile.entries[1].1;
        let expect = (6.0 * delta) * (6.0 * delta);
        assert!((p2 - expect).abs() / expect < 0.20, "p2 {p2} expect {expect}");
    }

    #[test]
    fn single_tube_profile_is_a_rectangle() {
        let delta = 0.01;
        let fam = TubeFamily::new(
            2,
            delta,
            vec![Tube::through(2, [0.0; 3], [1.0, 0.0, 0.0], 1.0, delta).unwrap()],
        )
        .unwrap();
        let profile = rich_profile(&fam, delta / 32.0, &[1], RasterMode::Dense).unwrap();
        let area = profile.entries[0].1;
        let expect = 2.0 * delta * 1.0;
        assert!((area - expect).abs() / expect < 0.10, "area {area}");
    }

    #[test]
    fn profile_vanishes_beyond_tube_count() {
        let fam = fan_2d(0.01, 8, 0.05).unwrap();
        let profile =
            rich_profile(&fam, 0.005, &[1, 2, 4, 8, 9, 16], RasterMode::Dense).unwrap();
        for &(r, m) in &profile.entries {
            if r > 8 {
                assert_eq!(m, 0.0, "r={r}");
            }
        }
        // Monotone nonincreasing in r.
        for w in profile.entries.windows(2) {
            assert!(w[1].1 <= w[0].1 + 1e-15);
        }
    }

    #[test]
    fn refinement_stability() {
        // Halving the cell changes the measures by a bounded factor when the
        // tubes are much wider than the cells.
        let fam = bush_2d(0.02, 10.0).unwrap();
        let coarse = rich_profile(&fam, 0.004, &[1, 2, 4], RasterMode::Dense).unwrap();
        let fine = rich_profile(&fam, 0.002, &[1, 2, 4], RasterMode::Dense).unwrap();
        for (c, f) in coarse.entries.iter().zip(&fine.entries) {
            if c.1 > 0.0 && f.1 > 0.0 {
                let rel = (c.1 - f.1).abs() / c.1.max(f.1);
                assert!(rel < 0.30, "r={} coarse={} fine={}", c.0, c.1, f.1);
            }
        }
    }

    #[test]
    fn dense_and_sparse_agree() {
        let fam = fan_2d(0.01, 16, 0.03).unwrap();
        let a = rich_profile(&fam, 0.005, &[1, 2, 4, 8], RasterMode::Dense).unwrap();
        let b = rich_profile(&fam, 0.005, &[1, 2, 4, 8], RasterMode::Sparse).unwrap();
        for (x, y) in a.entries.iter().zip(&b.entries) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn grid_cap_errors_dense() {
        let fam = TubeFamily::new(3, 0.001, vec![Tube::through(3, [0.0; 3], [1.0, 0.0, 0.0], 1.0, 0.001).unwrap()]).unwrap();
        let out = rasterize(&fam, 1e-5, 0.002, RasterMode::Dense, 1000);
        assert!(matches!(out, Err(Error::GridCap { .. })));
    }
}
