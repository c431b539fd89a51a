//! Configuration cells, pushed measures and group-theoretic energies.
//!
//! The central objects: for a discrete probability measure m and an
//! orthogonal g, the pushed measure nu_g is the law of u - g(v) for
//! independent m-samples; the k-energy at scale delta is the probability
//! that k independent draws from nu_g are pairwise delta-close. Exact
//! enumeration is used below a tuple cap, uniform tuple sampling above it.

use std::collections::HashSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geom::{dist, sub3, RigidMotion};
use crate::measure::DiscreteMeasure;
use crate::rng::{parallel_mc, stream};

/// Atoms closer than this (in every coordinate) are merged when building a
/// pushed measure.
const CONSOLIDATION_TOL: f64 = 1e-12;

/// Default cap on exactly enumerated tuples.
pub const DEFAULT_TUPLE_CAP: u64 = 1 << 24;
/// Default cap for configuration-cell enumeration.
pub const DEFAULT_CELL_CAP: u64 = 1 << 20;

/// Enumeration limits: exact below the cap, optional sampling above it.
#[derive(Debug, Clone, Copy)]
pub struct EnumLimits {
    pub cap: u64,
    /// Samples drawn when the exact count would exceed `cap`; `None`
    /// disables sampling and turns overflow into an error.
    pub samples: Option<u64>,
    pub seed: u64,
}

impl EnumLimits {
    pub fn exact_only() -> Self {
        EnumLimits {
            cap: DEFAULT_TUPLE_CAP,
            samples: None,
            seed: 0,
        }
    }

    /// Default for configuration-cell enumeration, which walks N^k tuples
    /// rather than N^{2k}.
    pub fn exact_cells() -> Self {
        EnumLimits {
            cap: DEFAULT_CELL_CAP,
            samples: None,
            seed: 0,
        }
    }

    pub fn with_sampling(samples: u64, seed: u64) -> Self {
        EnumLimits {
            cap: DEFAULT_TUPLE_CAP,
            samples: Some(samples),
            seed,
        }
    }
}

impl Default for EnumLimits {
    fn default() -> Self {
        Self::exact_only()
    }
}

/// How a value was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    Exact,
    Sampled { samples: u64 },
}

/// A group-energy value in [0, 1] with its evaluation mode and, when
/// sampled, a standard error.
#[derive(Debug, Clone, Copy)]
pub struct EnergyResult {
    pub value: f64,
    pub mode: EvalMode,
    pub std_error: f64,
}

/// The distribution of u - g(v) for independent draws of a discrete
/// measure, with coinciding atoms merged.
#[derive(Debug, Clone)]
pub struct PushedMeasure {
    dim: usize,
    atoms: Vec<[f64; 3]>,
    weights: Vec<f64>,
}

impl PushedMeasure {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn atoms(&self) -> &[[f64; 3]] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Mass of the closed ball of radius `r` around `z`.
    pub fn ball_mass(&self, z: [f64; 3], r: f64) -> f64 {
        self.atoms
            .iter()
            .zip(&self.weights)
            .filter(|(a, _)| dist(**a, z) <= r)
            .map(|(_, w)| w)
            .sum()
    }
}

/// Pushes `m` through a zero-translation motion g: atoms u - g(v) over all
/// ordered pairs, weights multiplied, coincident atoms consolidated.
pub fn push_measure(m: &DiscreteMeasure, g: &RigidMotion) -> Result<PushedMeasure> {
    if g.dim() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            got: g.dim(),
        });
    }
    if !g.is_linear() {
        return Err(Error::InvalidParameter(
            "push_measure requires a zero-translation (orthogonal) motion".into(),
        ));
    }
    let n = m.len();
    let cloud = m.support();
    let mut raw: Vec<([f64; 3], f64)> = Vec::with_capacity(n * n);
    let images: Vec<[f64; 3]> = cloud.iter().map(|p| g.apply_raw(p.raw())).collect();
    for (u, &wu) in cloud.iter().zip(m.weights()) {
        for (gv, &wv) in images.iter().zip(m.weights()) {
            raw.push((sub3(u.raw(), *gv), wu * wv));
        }
    }
    // Consolidate: sort lexicographically, then sweep a window in x and merge
    // atoms that agree in every coordinate within the tolerance.
    raw.sort_by(|a, b| {
        a.0[0]
            .total_cmp(&b.0[0])
            .then(a.0[1].total_cmp(&b.0[1]))
            .then(a.0[2].total_cmp(&b.0[2]))
    });
    let mut atoms: Vec<[f64; 3]> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    for (z, w) in raw {
        let mut merged = false;
        for k in (0..atoms.len()).rev() {
            if z[0] - atoms[k][0] > CONSOLIDATION_TOL {
                break;
            }
            if (z[0] - atoms[k][0]).abs() <= CONSOLIDATION_TOL
                && (z[1] - atoms[k][1]).abs() <= CONSOLIDATION_TOL
                && (z[2] - atoms[k][2]).abs() <= CONSOLIDATION_TOL
            {
                weights[k] += w;
                merged = true;
                break;
            }
        }
        if !merged {
            atoms.push(z);
            weights.push(w);
        }
    }
    Ok(PushedMeasure {
        dim: m.dim(),
        atoms,
        weights,
    })
}

/// Number of tuple evaluations an exact pass would need: base^exp.
fn power_checked(base: u64, exp: u32) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(u128::from(base));
    }
    acc
}

fn validate_k(m: &DiscreteMeasure, k: u32) -> Result<()> {
    let d = m.dim() as u32;
    if !(2..=d + 1).contains(&k) {
        return Err(Error::InvalidParameter(format!(
            "k must lie in {{2,...,d+1}} = {{2,...,{}}}, got {k}",
            d + 1
        )));
    }
    Ok(())
}

/// Result of a configuration-cell count.
#[derive(Debug, Clone, Copy)]
pub struct CellCount {
    pub cells: usize,
    pub mode: EvalMode,
}

/// Draws an index from the weight table via inverse CDF on a uniform draw.
#[inline]
fn sample_index(cdf: &[f64], u: f64) -> usize {
    match cdf.binary_search_by(|probe| probe.total_cmp(&u)) {
        Ok(i) => (i + 1).min(cdf.len() - 1),
        Err(i) => i.min(cdf.len() - 1),
    }
}

fn cumulative(weights: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    weights
        .iter()
        .map(|w| {
            acc += w;
            acc
        })
        .collect()
}

/// The vector of pairwise distances |x_i - x_j|, 1 <= i < j <= k, in
/// lexicographic (i, j) order, for the tuple of cloud points indexed by
/// `idx`.
fn config_vector(m: &DiscreteMeasure, idx: &[usize], out: &mut [f64]) {
    let mut slot = 0;
    for a in 0..idx.len() {
        for b in (a + 1)..idx.len() {
            out[slot] = m.support().point(idx[a]).dist(m.support().point(idx[b]));
            slot += 1;
        }
    }
}

/// Counts occupied cells of side `delta` hit by the configuration vectors of
/// k-tuples (repeats allowed unless `distinct`). Exact enumeration of all
/// N^k tuples below the cap, uniform tuple sampling above it.
pub fn config_cells(
    m: &DiscreteMeasure,
    k: u32,
    delta: f64,
    distinct: bool,
    limits: &EnumLimits,
) -> Result<CellCount> {
    validate_k(m, k)?;
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter("cell size must be positive".into()));
    }
    let n = m.len();
    if distinct && n < k as usize {
        return Err(Error::InvalidParameter(format!(
            "distinct {k}-tuples need at least {k} atoms, cloud has {n}"
        )));
    }
    let dim_vec = (k * (k - 1) / 2) as usize;
    let needed = power_checked(n as u64, k);
    let mut cells: HashSet<[i64; 6]> = HashSet::new();
    let mut vector = vec![0.0; dim_vec];
    let record = |vector: &[f64], cells: &mut HashSet<[i64; 6]>| {
        let mut key = [0i64; 6];
        for (slot, v) in vector.iter().enumerate() {
            key[slot] = (v / delta).floor() as i64;
        }
        cells.insert(key);
    };

    if needed <= u128::from(limits.cap) {
        let mut idx = vec![0usize; k as usize];
        loop {
            let has_repeat = {
                let mut seen = false;
                'outer: for a in 0..idx.len() {
                    for b in (a + 1)..idx.len() {
                        if idx[a] == idx[b] {
                            seen = true;
                            break 'outer;
                        }
                    }
                }
                seen
            };
            if !(distinct && has_repeat) {
                config_vector(m, &idx, &mut vector);
                record(&vector, &mut cells);
            }
            // Odometer increment.
            let mut pos = idx.len();
            loop {
                if pos == 0 {
                    return Ok(CellCount {
                        cells: cells.len(),
                        mode: EvalMode::Exact,
                    });
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < n {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }

    let samples = limits.samples.ok_or(Error::EnumerationCap {
        required: needed,
        cap: limits.cap,
    })?;
    let cdf = cumulative(m.weights());
    let mut rng = stream(limits.seed, 0);
    let mut idx = vec![0usize; k as usize];
    for _ in 0..samples {
        loop {
            for slot in idx.iter_mut() {
                *slot = sample_index(&cdf, rng.gen::<f64>());
            }
            let has_repeat = (0..idx.len())
                .any(|a| ((a + 1)..idx.len()).any(|b| idx[a] == idx[b]));
            if !(distinct && has_repeat) {
                break;
            }
        }
        config_vector(m, &idx, &mut vector);
        record(&vector, &mut cells);
    }
    Ok(CellCount {
        cells: cells.len(),
        mode: EvalMode::Sampled { samples },
    })
}

/// The k-energy of m at scale delta with respect to g: the m^{2k} mass of
/// 2k-tuples (x_1..x_k, y_1..y_k) whose pushed differences x_i - g(y_i) are
/// pairwise within delta.
///
/// Exact when N^{2k} fits under the cap: the event depends only on the k
/// independent draws from the pushed measure, so enumeration runs over its
/// consolidated atoms with neighbour pruning.
pub fn group_energy(
    m: &DiscreteMeasure,
    g: &RigidMotion,
    k: u32,
    delta: f64,
    limits: &EnumLimits,
) -> Result<EnergyResult> {
    validate_k(m, k)?;
    if !(delta >= 0.0) {
        return Err(Error::InvalidParameter("delta must be >= 0".into()));
    }
    let n = m.len() as u64;
    let needed = power_checked(n, 2 * k);
    if needed <= u128::from(limits.cap) {
        let pushed = push_measure(m, g)?;
        let value = exact_pushed_energy(&pushed, k, delta);
        return Ok(EnergyResult {
            value: value.clamp(0.0, 1.0),
            mode: EvalMode::Exact,
            std_error: 0.0,
        });
    }
    let samples = limits.samples.ok_or(Error::EnumerationCap {
        required: needed,
        cap: limits.cap,
    })?;
    let cdf = cumulative(m.weights());
    let cloud = m.support();
    let images: Vec<[f64; 3]> = cloud.iter().map(|p| g.apply_raw(p.raw())).collect();
    let kk = k as usize;
    let stats = parallel_mc(samples, limits.seed, |rng| {
        let mut z = [[0.0f64; 3]; 4];
        for slot in z.iter_mut().take(kk) {
            let xu = sample_index(&cdf, rng.gen::<f64>());
            let yv = sample_index(&cdf, rng.gen::<f64>());
            *slot = sub3(cloud.point(xu).raw(), images[yv]);
        }
        let mut ok = true;
        'pairs: for a in 0..kk {
            for b in (a + 1)..kk {
                if dist(z[a], z[b]) > delta {
                    ok = false;
                    break 'pairs;
                }
            }
        }
        if ok {
            1.0
        } else {
            0.0
        }
    });
    Ok(EnergyResult {
        value: stats.mean.clamp(0.0, 1.0),
        mode: EvalMode::Sampled { samples },
        std_error: stats.std_error(),
    })
}

/// Sum over k-tuples of pushed atoms that are pairwise delta-close, with
/// neighbour-list pruning. Exact.
fn exact_pushed_energy(pushed: &PushedMeasure, k: u32, delta: f64) -> f64 {
    let m = pushed.atom_count();
    let atoms = pushed.atoms();
    let w = pushed.weights();
    // Neighbour lists include the atom itself (distance zero).
    let neighbours: Vec<Vec<u32>> = (0..m)
        .map(|i| {
            (0..m)
                .filter(|&j| dist(atoms[i], atoms[j]) <= delta)
                .map(|j| j as u32)
                .collect()
        })
        .collect();
    match k {
        2 => (0..m)
            .map(|i| {
                let wi = w[i];
                neighbours[i].iter().map(|&j| wi * w[j as usize]).sum::<f64>()
            })
            .sum(),
        3 => (0..m)
            .map(|i| {
                let mut acc = 0.0;
                for &j in &neighbours[i] {
                    let j = j as usize;
                    let wij = w[i] * w[j];
                    // Third atom must neighbour both i and j.
                    for &l in &neighbours[j] {
                        let l = l as usize;
                        if dist(atoms[i], atoms[l]) <= delta {
                            acc += wij * w[l];
                        }
                    }
                }
                acc
            })
            .sum(),
        _ => {
            // k = 4: candidates are intersections of three neighbour lists.
            (0..m)
                .map(|i| {
                    let mut acc = 0.0;
                    for &j in &neighbours[i] {
                        let j = j as usize;
                        for &l in &neighbours[j] {
                            let l = l as usize;
                            if dist(atoms[i], atoms[l]) > delta {
                                continue;
                            }
                            let wijl = w[i] * w[j] * w[l];
                            for &q in &neighbours[l] {
                                let q = q as usize;
                                if dist(atoms[i], atoms[q]) <= delta
                                    && dist(atoms[j], atoms[q]) <= delta
                                {
                                    acc += wijl * w[q];
                                }
                            }
                        }
                    }
                    acc
                })
                .sum()
        }
    }
}

/// The closed-form right side of the energy comparison: sum over pushed
/// atoms z of nu_g(z) * nu_g(B_{2.5 delta}(z))^{k-1}, computed exactly.
pub fn energy_rhs(m: &DiscreteMeasure, g: &RigidMotion, k: u32, delta: f64) -> Result<f64> {
    validate_k(m, k)?;
    let pushed = push_measure(m, g)?;
    Ok(rhs_from_pushed(&pushed, k, 2.5 * delta))
}

/// Same comparison with the ball radius replaced by `radius` (used to probe
/// the tighter 2-delta variant alongside the stated 2.5-delta form).
pub fn energy_rhs_with_radius(
    m: &DiscreteMeasure,
    g: &RigidMotion,
    k: u32,
    radius: f64,
) -> Result<f64> {
    validate_k(m, k)?;
    let pushed = push_measure(m, g)?;
    Ok(rhs_from_pushed(&pushed, k, radius))
}

fn rhs_from_pushed(pushed: &PushedMeasure, k: u32, radius: f64) -> f64 {
    let atoms = pushed.atoms();
    let w = pushed.weights();
    (0..atoms.len())
        .map(|i| {
            let ball: f64 = (0..atoms.len())
                .filter(|&j| dist(atoms[i], atoms[j]) <= radius)
                .map(|j| w[j])
                .sum();
            w[i] * ball.powi(k as i32 - 1)
        })
        .sum()
}

/// Monte Carlo average of the group energy over Haar-uniform orthogonal g,
/// with the standard error across g-samples.
pub fn haar_energy(
    m: &DiscreteMeasure,
    k: u32,
    delta: f64,
    g_samples: u64,
    seed: u64,
    limits: &EnumLimits,
) -> Result<EnergyResult> {
    validate_k(m, k)?;
    if g_samples == 0 {
        return Err(Error::InvalidParameter("need at least one g sample".into()));
    }
    let dim = m.dim();
    let values: Vec<f64> = (0..g_samples)
        .map(|i| {
            let mut rng = stream(seed, i);
            let g = RigidMotion::haar_orthogonal(dim, &mut rng);
            let inner = EnumLimits {
                cap: limits.cap,
                samples: limits.samples,
                seed: crate::rng::component_seed(limits.seed, "haar-inner").wrapping_add(i),
            };
            group_energy(m, &g, k, delta, &inner).map(|r| r.value)
        })
        .collect::<Result<Vec<_>>>()?;
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(EnergyResult {
        value: mean,
        mode: if values.len() as u64 == g_samples && limits.samples.is_none() {
            EvalMode::Exact
        } else {
            EvalMode::Sampled { samples: g_samples }
        },
        std_error: (var / n).sqrt(),
    })
}

/// Collision-probability proxy for the squared L2 mass of the smoothed
/// configuration measure: delta^{-k(k-1)/2} times the probability that two
/// independent configuration vectors are within delta in sup norm.
pub fn nu_l2_mass(
    m: &DiscreteMeasure,
    k: u32,
    delta: f64,
    limits: &EnumLimits,
) -> Result<EnergyResult> {
    validate_k(m, k)?;
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter("delta must be positive".into()));
    }
    let n = m.len() as u64;
    let needed = power_checked(n, 2 * k);
    let dim_vec = (k * (k - 1) / 2) as usize;
    let scale = delta.powi(-(dim_vec as i32));
    if needed <= u128::from(limits.cap) {
        // Enumerate the N^k configuration vectors with weights, then the
        // collision probability over ordered pairs.
        let tuples = enumerate_config_vectors(m, k);
        let mut prob = 0.0;
        for (va, wa) in &tuples {
            for (vb, wb) in &tuples {
                if sup_close(va, vb, delta) {
                    prob += wa * wb;
                }
            }
        }
        return Ok(EnergyResult {
            value: scale * prob,
            mode: EvalMode::Exact,
            std_error: 0.0,
        });
    }
    let samples = limits.samples.ok_or(Error::EnumerationCap {
        required: needed,
        cap: limits.cap,
    })?;
    let cdf = cumulative(m.weights());
    let kk = k as usize;
    let stats = parallel_mc(samples, limits.seed, |rng| {
        let draw = |rng: &mut ChaCha8Rng, out: &mut [f64]| {
            let mut idx = [0usize; 4];
            for slot in idx.iter_mut().take(kk) {
                *slot = sample_index(&cdf, rng.gen::<f64>());
            }
            config_vector_idx(m, &idx[..kk], out);
        };
        let mut va = [0.0f64; 6];
        let mut vb = [0.0f64; 6];
        draw(rng, &mut va[..dim_vec]);
        draw(rng, &mut vb[..dim_vec]);
        if sup_close(&va[..dim_vec], &vb[..dim_vec], delta) {
            1.0
        } else {
            0.0
        }
    });
    Ok(EnergyResult {
        value: scale * stats.mean,
        mode: EvalMode::Sampled { samples },
        std_error: scale * stats.std_error(),
    })
}

fn config_vector_idx(m: &DiscreteMeasure, idx: &[usize], out: &mut [f64]) {
    let mut slot = 0;
    for a in 0..idx.len() {
        for b in (a + 1)..idx.len() {
            out[slot] = m.support().point(idx[a]).dist(m.support().point(idx[b]));
            slot += 1;
        }
    }
}

fn sup_close(a: &[f64], b: &[f64], delta: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= delta)
}

fn enumerate_config_vectors(m: &DiscreteMeasure, k: u32) -> Vec<(Vec<f64>, f64)> {
    let n = m.len();
    let kk = k as usize;
    let dim_vec = (k * (k - 1) / 2) as usize;
    let mut out = Vec::new();
    let mut idx = vec![0usize; kk];
    loop {
        let mut v = vec![0.0; dim_vec];
        config_vector_idx(m, &idx, &mut v);
        let w: f64 = idx.iter().map(|&i| m.weight(i)).product();
        out.push((v, w));
        let mut pos = kk;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < n {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Support point for the chain experiments: the ratio
/// nu_l2_mass / (delta^{-d(k-1)} * haar_energy).
pub fn chain_ratio(
    m: &DiscreteMeasure,
    k: u32,
    delta: f64,
    g_samples: u64,
    seed: u64,
    limits: &EnumLimits,
) -> Result<f64> {
    let nu = nu_l2_mass(
        m,
        k,
        delta,
        &EnumLimits {
            cap: limits.cap,
            samples: limits.samples,
            seed: crate::rng::component_seed(seed, "nu-l2"),
        },
    )?;
    let haar = haar_energy(
        m,
        k,
        delta,
        g_samples,
        crate::rng::component_seed(seed, "haar-g"),
        limits,
    )?;
    let d = m.dim() as i32;
    let denom = delta.powi(-d * (k as i32 - 1)) * haar.value;
    if denom <= 0.0 {
        return Err(Error::InvalidParameter(
            "haar energy vanished; cannot form chain ratio".into(),
        ));
    }
    Ok(nu.value / denom)
}

/// Convenience tuple for reports.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct EnergyReport {
    #[serde(rename = "E")]
    pub energy: f64,
    pub rhs: f64,
    pub lemma52_holds: bool,
    pub chain_ratio: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{PointCloud, SquareMat};

    fn two_point_cloud() -> DiscreteMeasure {
        DiscreteMeasure::uniform(
            PointCloud::from_coords(2, &[&[0.0, 0.0], &[1.0, 0.0]]).unwrap(),
        )
        .unwrap()
    }

    fn point_mass() -> DiscreteMeasure {
        DiscreteMeasure::uniform(PointCloud::from_coords(2, &[&[0.3, 0.4]]).unwrap()).unwrap()
    }

    #[test]
    fn push_point_mass_to_origin() {
        let g = RigidMotion::identity(2);
        let p = push_measure(&point_mass(), &g).unwrap();
        assert_eq!(p.atom_count(), 1);
        assert!(dist(p.atoms()[0], [0.0, 0.0, 0.0]) < 1e-15);
        assert!((p.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn push_two_points_under_identity() {
        let p = push_measure(&two_point_cloud(), &RigidMotion::identity(2)).unwrap();
        assert_eq!(p.atom_count(), 3);
        assert!((p.ball_mass([0.0, 0.0, 0.0], 1e-9) - 0.5).abs() < 1e-12);
        assert!((p.ball_mass([1.0, 0.0, 0.0], 1e-9) - 0.25).abs() < 1e-12);
        assert!((p.ball_mass([-1.0, 0.0, 0.0], 1e-9) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn push_two_points_under_half_turn() {
        // Rotation by pi sends v to -v, so atoms are u + v.
        let g = RigidMotion::rotation2(std::f64::consts::PI);
        let p = push_measure(&two_point_cloud(), &g).unwrap();
        assert_eq!(p.atom_count(), 3);
        assert!((p.ball_mass([0.0, 0.0, 0.0], 1e-9) - 0.25).abs() < 1e-12);
        assert!((p.ball_mass([1.0, 0.0, 0.0], 1e-9) - 0.5).abs() < 1e-12);
        assert!((p.ball_mass([2.0, 0.0, 0.0], 1e-9) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn push_rejects_translations() {
        let g = RigidMotion::translation_of(2, &[0.5, 0.0]).unwrap();
        assert!(push_measure(&two_point_cloud(), &g).is_err());
    }

    #[test]
    fn config_cells_point_mass() {
        let m = point_mass();
        for k in [2u32, 3] {
            let c = config_cells(&m, k, 0.05, false, &EnumLimits::exact_only()).unwrap();
            assert_eq!(c.cells, 1);
        }
    }

    #[test]
    fn config_cells_right_triangle() {
        let m = DiscreteMeasure::uniform(
            PointCloud::from_coords(2, &[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]).unwrap(),
        )
        .unwrap();
        // Distances {0, 1, sqrt 2} at cell 0.1.
        let c = config_cells(&m, 2, 0.1, false, &EnumLimits::exact_only()).unwrap();
        assert_eq!(c.cells, 3);

        // Brute-force oracle over all 27 ordered triples at cell 0.01.
        let mut cells = HashSet::new();
        let pts = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        for a in 0..3 {
            for b in 0..3 {
                for c3 in 0..3 {
                    let d = |p: [f64; 2], q: [f64; 2]| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
                    let v = [
                        d(pts[a], pts[b]),
                        d(pts[a], pts[c3]),
                        d(pts[b], pts[c3]),
                    ];
                    cells.insert([
                        (v[0] / 0.01).floor() as i64,
                        (v[1] / 0.01).floor() as i64,
                        (v[2] / 0.01).floor() as i64,
                    ]);
                }
            }
        }
        let got = config_cells(&m, 3, 0.01, false, &EnumLimits::exact_only()).unwrap();
        assert_eq!(got.cells, cells.len());
    }

    #[test]
    fn group_energy_brute_force_oracle() {
        // All 16 quadruples of the two-point cloud, identity g, delta = 0.1.
        let m = two_point_cloud();
        let pts = [[0.0f64, 0.0], [1.0, 0.0]];
        let mut acc = 0.0;
        for x1 in 0..2 {
            for x2 in 0..2 {
                for y1 in 0..2 {
                    for y2 in 0..2 {
                        let z1 = [pts[x1][0] - pts[y1][0], pts[x1][1] - pts[y1][1]];
                        let z2 = [pts[x2][0] - pts[y2][0], pts[x2][1] - pts[y2][1]];
                        let d = ((z1[0] - z2[0]).powi(2) + (z1[1] - z2[1]).powi(2)).sqrt();
                        if d <= 0.1 {
                            acc += 0.0625;
                        }
                    }
                }
            }
        }
        assert_eq!(acc, 0.375);
        let e = group_energy(&m, &RigidMotion::identity(2), 2, 0.1, &EnumLimits::exact_only())
            .unwrap();
        assert_eq!(e.value, 0.375);
        assert_eq!(e.mode, EvalMode::Exact);
    }

    #[test]
    fn group_energy_point_mass_is_one() {
        let mut rng = stream(3, 0);
        let g = RigidMotion::haar_orthogonal(2, &mut rng);
        let e = group_energy(&point_mass(), &g, 2, 0.01, &EnumLimits::exact_only()).unwrap();
        assert_eq!(e.value, 1.0);
    }

    #[test]
    fn group_energy_saturates_at_large_delta() {
        let m = two_point_cloud();
        let e = group_energy(&m, &RigidMotion::identity(2), 2, 5.0, &EnumLimits::exact_only())
            .unwrap();
        assert_eq!(e.value, 1.0);
    }

    #[test]
    fn energy_rhs_examples() {
        let m = two_point_cloud();
        let rhs = energy_rhs(&m, &RigidMotion::identity(2), 2, 0.1).unwrap();
        assert_eq!(rhs, 0.375);
        assert_eq!(energy_rhs(&point_mass(), &RigidMotion::identity(2), 2, 0.1).unwrap(), 1.0);
        // Radius beyond the atom diameter captures all mass.
        let rhs_big = energy_rhs(&m, &RigidMotion::identity(2), 2, 2.0).unwrap();
        assert!((rhs_big - 1.0).abs() < 1e-12);
    }

    #[test]
    fn comparison_inequality_on_random_clouds() {
        let mut rng = stream(41, 0);
        for trial in 0..60 {
            let n = 2 + (trial % 7);
            let pts: Vec<Vec<f64>> = (0..n)
                .map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()])
                .collect();
            let refs: Vec<&[f64]> = pts.iter().map(|p| p.as_slice()).collect();
            let cloud = PointCloud::from_coords(2, &refs).unwrap();
            let m = DiscreteMeasure::uniform(cloud).unwrap();
            let g = RigidMotion::haar_orthogonal(2, &mut rng);
            for k in [2u32, 3] {
                for delta in [0.05, 0.1, 0.3] {
                    let e = group_energy(&m, &g, k, delta, &EnumLimits::exact_only())
                        .unwrap()
                        .value;
                    let rhs = energy_rhs(&m, &g, k, delta).unwrap();
                    assert!(
                        e <= rhs + 1e-12,
                        "violation: e={e} rhs={rhs} k={k} delta={delta}"
                    );
                }
            }
        }
    }

    #[test]
    fn rotation_invariance_of_group_energy() {
        let mut rng = stream(4242, 0);
        let m = DiscreteMeasure::uniform(
            PointCloud::from_coords(
                2,
                &[&[0.1, 0.2], &[0.8, 0.3], &[0.4, 0.9], &[0.55, 0.5]],
            )
            .unwrap(),
        )
        .unwrap();
        for _ in 0..10 {
            let g = RigidMotion::haar_orthogonal(2, &mut rng);
            let h = RigidMotion::haar_rotation(2, &mut rng);
            let moved = DiscreteMeasure::new(
                m.support().map_motion(&h).unwrap(),
                m.weights().to_vec(),
            )
            .unwrap();
            let conj = h.compose(&g).compose(&h.inverse());
            let a = group_energy(&m, &g, 2, 0.2, &EnumLimits::exact_only()).unwrap();
            let b = group_energy(&moved, &conj, 2, 0.2, &EnumLimits::exact_only()).unwrap();
            assert!((a.value - b.value).abs() < 1e-10);
        }
    }

    #[test]
    fn energies_monotone_in_delta() {
        let mut rng = stream(7, 0);
        let pts: Vec<Vec<f64>> = (0..5).map(|_| vec![rng.gen(), rng.gen()]).collect();
        let refs: Vec<&[f64]> = pts.iter().map(|p| p.as_slice()).collect();
        let m = DiscreteMeasure::uniform(PointCloud::from_coords(2, &refs).unwrap()).unwrap();
        let g = RigidMotion::haar_orthogonal(2, &mut rng);
        let mut prev_e = 0.0;
        let mut prev_rhs = 0.0;
        for delta in [0.02, 0.05, 0.1, 0.2, 0.4, 0.8] {
            let e = group_energy(&m, &g, 2, delta, &EnumLimits::exact_only()).unwrap().value;
            let rhs = energy_rhs(&m, &g, 2, delta).unwrap();
            assert!(e >= prev_e - 1e-12);
            assert!(rhs >= prev_rhs - 1e-12);
            prev_e = e;
            prev_rhs = rhs;
        }
    }

    #[test]
    fn haar_energy_point_mass_has_zero_variance() {
        let r = haar_energy(&point_mass(), 2, 0.1, 16, 5, &EnumLimits::exact_only()).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.std_error, 0.0);
    }

    #[test]
    fn haar_energy_matches_angle_quadrature() {
        // Dense deterministic quadrature over SO(2) and the reflection coset
        // as the oracle for the Haar average of the two-point cloud energy.
        let m = two_point_cloud();
        let nodes = 10_000;
        let mut acc = 0.0;
        for i in 0..nodes {
            let theta = (i as f64 + 0.5) / nodes as f64 * std::f64::consts::TAU;
            for reflect in [false, true] {
                let g = if reflect {
                    RigidMotion::new(SquareMat::reflection2(theta / 2.0), &[0.0, 0.0]).unwrap()
                } else {
                    RigidMotion::rotation2(theta)
                };
                acc += group_energy(&m, &g, 2, 0.1, &EnumLimits::exact_only())
                    .unwrap()
                    .value;
            }
        }
        let oracle = acc / (2.0 * nodes as f64);
        let est = haar_energy(&m, 2, 0.1, 4_000, 11, &EnumLimits::exact_only()).unwrap();
        assert!(
            (est.value - oracle).abs() <= 3.0 * est.std_error,
            "est {} +- {} vs oracle {}",
            est.value,
            est.std_error,
            oracle
        );
    }

    #[test]
    fn haar_energy_monotone_in_delta_same_seed() {
        let m = two_point_cloud();
        let small = haar_energy(&m, 2, 0.1, 64, 9, &EnumLimits::exact_only()).unwrap();
        let big = haar_energy(&m, 2, 0.2, 64, 9, &EnumLimits::exact_only()).unwrap();
        assert!(big.value >= small.value);
    }

    #[test]
    fn nu_l2_point_mass() {
        let m = point_mass();
        let r = nu_l2_mass(&m, 2, 0.1, &EnumLimits::exact_only()).unwrap();
        assert!((r.value - 10.0).abs() < 1e-9);
    }

    #[test]
    fn nu_l2_two_points() {
        // Distance distribution {0: 1/2, 1: 1/2}; collision probability 1/2.
        let m = two_point_cloud();
        let r = nu_l2_mass(&m, 2, 0.1, &EnumLimits::exact_only()).unwrap();
        assert!((r.value - 5.0).abs() < 1e-9);
    }

    #[test]
    fn nu_l2_decreases_with_spread() {
        let spread = DiscreteMeasure::uniform(
            PointCloud::from_coords(2, &[&[0.0, 0.0], &[1.0, 0.0], &[0.31, 0.77]]).unwrap(),
        )
        .unwrap();
        let tight = two_point_cloud();
        let a = nu_l2_mass(&tight, 2, 0.1, &EnumLimits::exact_only()).unwrap();
        let b = nu_l2_mass(&spread, 2, 0.1, &EnumLimits::exact_only()).unwrap();
        assert!(b.value < a.value);
    }

    #[test]
    fn sampled_energy_agrees_with_exact() {
        let m = two_point_cloud();
        let exact = group_energy(&m, &RigidMotion::identity(2), 2, 0.1, &EnumLimits::exact_only())
            .unwrap();
        let sampled = group_energy(
            &m,
            &RigidMotion::identity(2),
            2,
            0.1,
            &EnumLimits {
                cap: 4, // force sampling
                samples: Some(200_000),
                seed: 3,
            },
        )
        .unwrap();
        assert!(matches!(sampled.mode, EvalMode::Sampled { .. }));
        assert!(
            (sampled.value - exact.value).abs() <= 3.0 * sampled.std_error,
            "{} vs {}",
            sampled.value,
            exact.value
        );
    }

    #[test]
    fn cap_errors_without_sampling() {
        let m = two_point_cloud();
        let limits = EnumLimits {
            cap: 4,
            samples: None,
            seed: 0,
        };
        assert!(matches!(
            group_energy(&m, &RigidMotion::identity(2), 2, 0.1, &limits),
            Err(Error::EnumerationCap { .. })
        ));
    }
}
