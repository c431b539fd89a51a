//! Energy integrals, Frostman exponents and Fourier-side diagnostics for
//! discrete measures.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::DiscreteMeasure;
use crate::error::{Error, Result};
use crate::fit::least_squares_slope;
use crate::geom::Point;
use crate::rng::{parallel_mc, McStats};

/// Default inner cutoff excluding the singularity of the weight |w|^{-t}.
pub const DEFAULT_INNER_CUTOFF: f64 = 0.01;

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
}

impl Estimate {
    fn from_stats(stats: McStats, scale: f64) -> Self {
        Estimate {
            value: stats.mean * scale,
            std_error: stats.std_error() * scale,
            samples: stats.samples,
        }
    }

    /// |value - reference| measured in standard errors (with an absolute
    /// floor so exact estimators with zero variance still compare).
    pub fn sigmas_from(&self, reference: f64) -> f64 {
        let se = self.std_error.max(1e-300);
        (self.value - reference).abs() / se
    }

    pub fn within_sigmas(&self, reference: f64, k: f64) -> bool {
        (self.value - reference).abs() <= k * self.std_error + 1e-12
    }
}

/// Double sum over off-diagonal pairs of w_i w_j |x_i - x_j|^{-t}.
pub fn energy_integral(m: &DiscreteMeasure, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "energy exponent must be positive, got {t}"
        )));
    }
    let cloud = m.support();
    let mut sum = 0.0;
    for i in 0..cloud.len() {
        for j in (i + 1)..cloud.len() {
            let d = cloud.point(i).dist(cloud.point(j));
            if d == 0.0 {
                return Err(Error::DuplicatePoints {
                    first: i,
                    second: j,
                });
            }
            sum += 2.0 * m.weight(i) * m.weight(j) * d.powf(-t);
        }
    }
    Ok(sum)
}

/// Largest exponent s certified by the probed balls: the minimum over
/// centers x in supp(m) and probed radii r of log m(B_r(x)) / log r.
pub fn frostman_exponent(m: &DiscreteMeasure, radii: &[f64]) -> Result<f64> {
    if radii.is_empty() {
        return Err(Error::EmptyInput("no radii to probe".into()));
    }
    if radii.iter().any(|r| !(*r > 0.0 && *r < 1.0)) {
        return Err(Error::InvalidParameter(
            "all radii must lie in (0,1)".into(),
        ));
    }
    let mut best = f64::INFINITY;
    for center in m.support().iter() {
        for &r in radii {
            let mass = m.ball_mass(center, r);
            // mass >= weight of the center itself > 0
            let ratio = mass.ln() / r.ln();
            best = best.min(ratio);
        }
    }
    Ok(best)
}

/// Fourier transform of the measure at frequency `omega`:
/// sum of w_j exp(-2 pi i <omega, x_j>).
pub fn fourier_amplitude(m: &DiscreteMeasure, omega: &Point) -> Result<Complex64> {
    if omega.dim() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            got: omega.dim(),
        });
    }
    Ok(amplitude_raw(m, omega.raw()))
}

#[inline]
fn amplitude_raw(m: &DiscreteMeasure, omega: [f64; 3]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (p, &w) in m.support().iter().zip(m.weights()) {
        let phase = -std::f64::consts::TAU * crate::geom::dot3(omega, p.raw());
        let (s, c) = phase.sin_cos();
        acc += Complex64::new(w * c, w * s);
    }
    acc
}

fn vol_ball(dim: usize, r: f64) -> f64 {
    match dim {
        1 => 2.0 * r,
        2 => std::f64::consts::PI * r * r,
        _ => 4.0 / 3.0 * std::f64::consts::PI * r * r * r,
    }
}

fn sphere_surface(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        2 => std::f64::consts::TAU,
        _ => 4.0 * std::f64::consts::PI,
    }
}

fn unit_sphere_dir(dim: usize, rng: &mut ChaCha8Rng) -> [f64; 3] {
    match dim {
        1 => {
            if rng.gen::<bool>() {
                [1.0, 0.0, 0.0]
            } else {
                [-1.0, 0.0, 0.0]
            }
        }
        2 => {
            let phi = rng.gen::<f64>() * std::f64::consts::TAU;
            [phi.cos(), phi.sin(), 0.0]
        }
        _ => {
            // Archimedes: z uniform, azimuth uniform.
            let z = rng.gen::<f64>() * 2.0 - 1.0;
            let phi = rng.gen::<f64>() * std::f64::consts::TAU;
            let rho = (1.0 - z * z).max(0.0).sqrt();
            [rho * phi.cos(), rho * phi.sin(), z]
        }
    }
}

/// Monte Carlo estimate of the L2 ball average of the Fourier transform:
/// the integral of |m-hat|^2 over the ball of radius `r`.
pub fn ball_average(m: &DiscreteMeasure, r: f64, samples: u64, seed: u64) -> Result<Estimate> {
    if !(r > 0.0) || samples == 0 {
        return Err(Error::InvalidParameter(
            "ball average needs r > 0 and at least one sample".into(),
        ));
    }
    let dim = m.dim();
    let stats = parallel_mc(samples, seed, |rng| {
        let dir = unit_sphere_dir(dim, rng);
        let u: f64 = rng.gen();
        let radius = r * u.powf(1.0 / dim as f64);
        amplitude_raw(m, crate::geom::scale3(dir, radius)).norm_sqr()
    });
    Ok(Estimate::from_stats(stats, vol_ball(dim, r)))
}

/// Importance-sampled estimate of the weighted average
/// integral over the annulus r0 <= |w| <= r of |m-hat(w)|^2 |w|^{-t} dw.
///
/// The radial density is proportional to rho^{d-1-t}, which carries the whole
/// weight, so the estimator averages only |m-hat|^2.
pub fn weighted_ball_average(
    m: &DiscreteMeasure,
    r: f64,
    t: f64,
    inner_cutoff: f64,
    samples: u64,
    seed: u64,
) -> Result<Estimate> {
    let dim = m.dim();
    if !(t >= 0.0) || t >= dim as f64 {
        return Err(Error::InvalidParameter(format!(
            "weight exponent must satisfy 0 <= t < d = {dim}, got {t}"
        )));
    }
    if !(inner_cutoff > 0.0 && inner_cutoff < r) {
        return Err(Error::InvalidParameter(
            "inner cutoff must satisfy 0 < r0 < R".into(),
        ));
    }
    if samples == 0 {
        return Err(Error::InvalidParameter("at least one sample".into()));
    }
    // integral of rho^{d-1-t} over [r0, R]; the exponent d-t is positive.
    let p = dim as f64 - t;
    let lo = inner_cutoff.powf(p);
    let hi = r.powf(p);
    let radial_mass = (hi - lo) / p;
    let total = sphere_surface(dim) * radial_mass;
    let stats = parallel_mc(samples, seed, |rng| {
        let dir = unit_sphere_dir(dim, rng);
        let u: f64 = rng.gen();
        let radius = (lo + u * (hi - lo)).powf(1.0 / p);
        amplitude_raw(m, crate::geom::scale3(dir, radius)).norm_sqr()
    });
    Ok(Estimate::from_stats(stats, total))
}

/// Monte Carlo average of |m-hat(R sigma)|^2 over the unit sphere; always in
/// [0, 1].
pub fn spherical_average(m: &DiscreteMeasure, r: f64, samples: u64, seed: u64) -> Result<Estimate> {
    if r < 0.0 || samples == 0 {
        return Err(Error::InvalidParameter(
            "spherical average needs r >= 0 and at least one sample".into(),
        ));
    }
    let dim = m.dim();
    let stats = parallel_mc(samples, seed, |rng| {
        let dir = unit_sphere_dir(dim, rng);
        amplitude_raw(m, crate::geom::scale3(dir, r)).norm_sqr()
    });
    let mut est = Estimate::from_stats(stats, 1.0);
    // |m-hat|^2 <= 1 up to rounding; clamp the float noise.
    est.value = est.value.clamp(0.0, 1.0);
    Ok(est)
}

/// d minus the fitted slope of log A(m, R) against log R over the given
/// scales.
pub fn l2_dimension(m: &DiscreteMeasure, scales: &[f64], samples: u64, seed: u64) -> Result<f64> {
    if scales.len() < 3 {
        return Err(Error::InvalidParameter(
            "l2 dimension needs at least three scales".into(),
        ));
    }
    let mut pts = Vec::with_capacity(scales.len());
    for (k, &r) in scales.iter().enumerate() {
        let est = ball_average(m, r, samples, seed.wrapping_add(k as u64))?;
        if !(est.value > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "ball average vanished at scale {r}"
            )));
        }
        pts.push((r.ln(), est.value.ln()));
    }
    let slope = least_squares_slope(&pts)
        .ok_or_else(|| Error::InvalidParameter("degenerate scale list".into()))?;
    Ok(m.dim() as f64 - slope)
}
