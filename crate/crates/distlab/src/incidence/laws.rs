//! Scaling-law verifiers: pairwise intersection sums, richness exponents and
//! the named incidence bounds.

use super::families::TubeFamily;
use super::raster::RichnessProfile;
use crate::error::{Error, Result};
use crate::fit::loglog_slope;
use crate::geom::segment_distance;

/// Named incidence bounds the profiles are measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IncidenceBound {
    /// delta^2 L^1.5 / r^2 — direction-separated segments in R^3.
    Weak,
    /// delta^3 (L^1.5 / r^2 + L / r) — the conjectured discrete-analogue
    /// shape in R^3.
    Guess,
    /// delta^3 L^2 / r^3 — a Szemeredi-Trotter-shaped strengthening.
    Szt,
    /// delta L log L / r^2 — planar direction-separated segments.
    Cordoba,
    /// delta^3 L^2 / r^2 — the elementary bound for pair tubes of planar
    /// clouds (tubes live in the 3-d chart).
    WeakPlanar,
}

impl IncidenceBound {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "weak" => IncidenceBound::Weak,
            "guess" => IncidenceBound::Guess,
            "szt" => IncidenceBound::Szt,
            "cordoba" => IncidenceBound::Cordoba,
            "weak_planar" => IncidenceBound::WeakPlanar,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown bound `{other}` (weak|guess|szt|cordoba|weak_planar)"
                )))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            IncidenceBound::Weak => "weak",
            IncidenceBound::Guess => "guess",
            IncidenceBound::Szt => "szt",
            IncidenceBound::Cordoba => "cordoba",
            IncidenceBound::WeakPlanar => "weak_planar",
        }
    }

    /// Ambient dimension the formula is stated for.
    pub fn dim(&self) -> usize {
        match self {
            IncidenceBound::Cordoba => 2,
            _ => 3,
        }
    }
}

/// The bound formula evaluated at (delta, L, r), constant-free.
pub fn bound_value(bound: IncidenceBound, delta: f64, tube_count: usize, r: u64) -> f64 {
    let l = tube_count as f64;
    let r = r as f64;
    match bound {
        IncidenceBound::Weak => delta.powi(2) * l.powf(1.5) / (r * r),
        IncidenceBound::Guess => delta.powi(3) * (l.powf(1.5) / (r * r) + l / r),
        IncidenceBound::Szt => delta.powi(3) * l * l / (r * r * r),
        IncidenceBound::Cordoba => delta * l * l.ln() / (r * r),
        IncidenceBound::WeakPlanar => delta.powi(3) * l * l / (r * r),
    }
}

/// Largest empirical constant lambda(P_r) / bound(r) over the profile
/// entries with r >= 2 and positive measure.
pub fn verify_bound(profile: &RichnessProfile, bound: IncidenceBound) -> Result<f64> {
    let mut best: Option<f64> = None;
    for &(r, measure) in &profile.entries {
        if r < 2 || measure <= 0.0 {
            continue;
        }
        let b = bound_value(bound, profile.tube_delta, profile.tube_count, r);
        if b > 0.0 {
            let ratio = measure / b;
            best = Some(best.map_or(ratio, |x: f64| x.max(ratio)));
        }
    }
    best.ok_or_else(|| {
        Error::InvalidParameter("profile has no entries with r >= 2 and positive measure".into())
    })
}

/// Least-squares slope of log lambda(P_r) against log r over the window
/// r in [4, L/4], positive entries only.
pub fn fit_richness_exponent(profile: &RichnessProfile) -> Result<f64> {
    let nonzero = profile.entries.iter().filter(|(_, m)| *m > 0.0).count();
    if nonzero < 3 {
        return Err(Error::InvalidParameter(format!(
            "profile has only {nonzero} nonzero entries; need at least 3"
        )));
    }
    let hi = (profile.tube_count as f64 / 4.0).floor() as u64;
    let window: Vec<(f64, f64)> = profile
        .entries
        .iter()
        .filter(|&&(r, m)| r >= 4 && r <= hi && m > 0.0)
        .map(|&(r, m)| (r as f64, m))
        .collect();
    if window.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "only {} usable entries in the fit window [4, {hi}]",
            window.len()
        )));
    }
    loglog_slope(&window)
        .ok_or_else(|| Error::InvalidParameter("degenerate fit window".into()))
}

/// Sum over tube pairs of the measure of the intersection of the tubes
/// inflated by `inflate`, via the transversal upper bound
/// min(c_d rho^d / sin angle, capsule measure); disjoint pairs contribute
/// zero. Every term dominates the true intersection measure.
pub fn pairwise_intersection_sum(family: &TubeFamily, inflate: f64) -> f64 {
    let rho = family.radius() * inflate;
    let tubes = family.tubes();
    let mut sum = 0.0;
    for i in 0..tubes.len() {
        for j in (i + 1)..tubes.len() {
            sum += pair_intersection_measure(family.dim(), rho, &tubes[i], &tubes[j]);
        }
    }
    sum
}

fn pair_intersection_measure(
    dim: usize,
    rho: f64,
    a: &crate::geom::Tube,
    b: &crate::geom::Tube,
) -> f64 {
    if segment_distance(a, b) > 2.0 * rho {
        return 0.0;
    }
    let len = a.length().min(b.length());
    let capsule = match dim {
        2 => 2.0 * rho * len + std::f64::consts::PI * rho * rho,
        _ => {
            std::f64::consts::PI * rho * rho * len
                + 4.0 / 3.0 * std::f64::consts::PI * rho.powi(3)
        }
    };
    let angle = a.direction_gap(b);
    let s = angle.sin();
    if s < 1e-12 {
        return capsule;
    }
    let transversal = match dim {
        // Infinite strips of width 2 rho crossing at `angle`.
        2 => (2.0 * rho) * (2.0 * rho) / s,
        // Infinite cylinders of radius rho crossing at `angle`.
        _ => 16.0 / 3.0 * rho.powi(3) / s,
    };
    transversal.min(capsule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Tube;
    use crate::incidence::families::fan_2d;
    use crate::incidence::raster::{rich_profile, RasterMode};

    #[test]
    fn parallel_far_tubes_contribute_zero() {
        let radius = 0.01;
        let tubes = vec![
            Tube::through(2, [0.0; 3], [1.0, 0.0, 0.0], 1.0, radius).unwrap(),
            Tube::through(2, [0.0, 0.5, 0.0], [1.0, 0.0, 0.0], 1.0, radius).unwrap(),
        ];
        let fam = TubeFamily::new(2, radius, tubes).unwrap();
        assert_eq!(pairwise_intersection_sum(&fam, 3.0), 0.0);
    }

    #[test]
    fn perpendicular_strips_give_the_square() {
        let delta = 0.01;
        let tubes = vec![
            Tube::through(2, [0.0; 3], [1.0, 0.0, 0.0], 1.0, delta).unwrap(),
            Tube::through(2, [0.0; 3], [0.0, 1.0, 0.0], 1.0, delta).unwrap(),
        ];
        let fam = TubeFamily::new(2, delta, tubes).unwrap();
        let sum = pairwise_intersection_sum(&fam, 3.0);
        let expect = (6.0 * delta) * (6.0 * delta);
        assert!((sum - expect).abs() < 1e-12, "sum {sum}");
    }

    #[test]
    fn transversal_formula_tracks_grid_counting() {
        // Cross-validation of the analytic pair term against a rasterized
        // intersection on a sampled pair of crossing planar tubes.
        let delta = 0.01;
        let rho = 3.0 * delta;
        let angle: f64 = 0.7;
        let t1 = Tube::through(2, [0.0; 3], [1.0, 0.0, 0.0], 1.0, rho).unwrap();
        let t2 = Tube::through(2, [0.0; 3], [angle.cos(), angle.sin(), 0.0], 1.0, rho).unwrap();
        let analytic = pair_intersection_measure(2, rho, &t1, &t2);
        // Grid count of cells inside both tubes.
        let cell = delta / 8.0;
        let mut count = 0u64;
        let steps = (1.4 / cell) as i64;
        for ix in -steps..=steps {
            for iy in -steps..=steps {
                let p = [ix as f64 * cell, iy as f64 * cell, 0.0];
                if t1.axis_distance(p) <= rho && t2.axis_distance(p) <= rho {
                    count += 1;
                }
            }
        }
        let grid = count as f64 * cell * cell;
        assert!(
            (analytic - grid).abs() / grid < 0.1,
            "analytic {analytic} grid {grid}"
        );
    }

    #[test]
    fn planar_bush_sum_scales_like_l_log_l() {
        let delta = 1.0 / 512.0;
        let mut ratios = Vec::new();
        for exp in 5..=9u32 {
            let l = 1usize << exp;
            let fam = fan_2d(delta, l, delta).unwrap();
            let sum = pairwise_intersection_sum(&fam, 3.0);
            ratios.push(sum / (delta * l as f64 * (l as f64).ln()));
        }
        let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
        let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
        assert!(
            max / min < 2.5,
            "L log L ratios spread too far: {ratios:?}"
        );
    }

    #[test]
    fn bound_formula_values() {
        assert!((bound_value(IncidenceBound::Weak, 0.5, 4, 2) - 0.25 * 8.0 / 4.0).abs() < 1e-15);
        assert!(
            (bound_value(IncidenceBound::Szt, 0.5, 4, 2) - 0.125 * 16.0 / 8.0).abs() < 1e-15
        );
        assert!(IncidenceBound::parse("cordoba").unwrap() == IncidenceBound::Cordoba);
        assert!(IncidenceBound::parse("nope").is_err());
    }

    #[test]
    fn exponent_fit_recovers_power_law() {
        let profile = RichnessProfile {
            tube_delta: 0.01,
            cell: 0.005,
            tube_count: 256,
            entries: (0..8)
                .map(|j| {
                    let r = 1u64 << j;
                    (r, 100.0 * (r as f64).powf(-1.5))
                })
                .collect(),
        };
        let slope = fit_richness_exponent(&profile).unwrap();
        assert!((slope + 1.5).abs() < 1e-9);
    }

    #[test]
    fn exponent_fit_needs_enough_entries() {
        let profile = RichnessProfile {
            tube_delta: 0.01,
            cell: 0.005,
            tube_count: 64,
            entries: vec![(1, 1.0), (2, 0.5), (4, 0.0), (8, 0.0)],
        };
        assert!(fit_richness_exponent(&profile).is_err());
    }

    #[test]
    fn cordoba_constant_for_a_small_fan() {
        let delta = 1.0 / 128.0;
        let fam = fan_2d(delta, 64, delta).unwrap();
        let profile = rich_profile(
            &fam,
            delta / 2.0,
            &[1, 2, 4, 8, 16],
            RasterMode::Dense,
        )
        .unwrap();
        let c = verify_bound(&profile, IncidenceBound::Cordoba).unwrap();
        assert!(c.is_finite() && c > 0.0);
    }
}
