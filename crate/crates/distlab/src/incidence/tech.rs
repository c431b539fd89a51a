//! The technical angular-mass condition: how much of the squared
//! near-coincidence mass over the compact motion window comes from motions
//! whose rotation part is at least 0.1 from the identity in operator norm.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom::RigidMotion;
use crate::measure::DiscreteMeasure;
use crate::rng::stream;

/// Operator-norm distance from the identity below which a rotation is "too
/// close": |e^{i theta} - 1| = 2 |sin(theta/2)| < 0.1.
const NEAR_IDENTITY: f64 = 0.1;
/// Translations sampled uniformly from the ball of this radius.
const TRANSLATION_RADIUS: f64 = 3.0;

/// Monte Carlo estimate of the restricted-to-full ratio of the squared
/// coincidence mass.
#[derive(Debug, Clone, Copy)]
pub struct TechRatio {
    /// Ratio in [0, 1].
    pub ratio: f64,
    /// Delta-method standard error of the ratio.
    pub std_error: f64,
    /// Samples with a positive coincidence mass.
    pub hits: u64,
    pub samples: u64,
}

impl TechRatio {
    pub fn satisfied(&self) -> bool {
        self.ratio >= 0.5
    }
}

/// Fraction of rotation angles with operator norm distance >= 0.1 from the
/// identity; the expected ratio for rotation-invariant inputs.
pub fn wide_angle_fraction() -> f64 {
    let arc = 2.0 * (NEAR_IDENTITY / 2.0).asin();
    (std::f64::consts::TAU - 2.0 * arc) / std::f64::consts::TAU
}

/// Samples rotations with uniform angle and translations uniform in the
/// radius-3 ball, accumulating F(g)^2 with
/// F(g) = (m1 x m2){ (x1, x3) : |x1 - g(x3)| <= 2 delta }, split by whether
/// the rotation part is 0.1-far from the identity.
pub fn tech_ratio(
    m1: &DiscreteMeasure,
    m2: &DiscreteMeasure,
    delta: f64,
    g_samples: u64,
    seed: u64,
) -> Result<TechRatio> {
    if m1.dim() != 2 || m2.dim() != 2 {
        return Err(Error::InvalidParameter(
            "the angular-mass condition is planar".into(),
        ));
    }
    if !(delta > 0.0) || g_samples == 0 {
        return Err(Error::InvalidParameter(
            "need positive delta and at least one motion sample".into(),
        ));
    }
    let radius = 2.0 * delta;
    const CHUNK: u64 = 512;
    // Per-chunk sums of (num, den, num^2, den^2, num*den, hits); combined in
    // chunk order so the estimate is thread-count independent.
    let partials: Vec<[f64; 6]> = (0..g_samples.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(g_samples);
            let mut acc = [0.0f64; 6];
            for i in lo..hi {
                let mut rng = stream(seed, i);
                let theta = rng.gen::<f64>() * std::f64::consts::TAU;
                let r = TRANSLATION_RADIUS * rng.gen::<f64>().sqrt();
                let phi = rng.gen::<f64>() * std::f64::consts::TAU;
                let shift = [r * phi.cos(), r * phi.sin()];
                let g = RigidMotion::rotation2_about(theta, [0.0, 0.0]);
                let mut mass = 0.0;
                for (x1, &w1) in m1.support().iter().zip(m1.weights()) {
                    for (x3, &w3) in m2.support().iter().zip(m2.weights()) {
                        let gz = g.apply_raw(x3.raw());
                        let dx = x1.raw()[0] - gz[0] - shift[0];
                        let dy = x1.raw()[1] - gz[1] - shift[1];
                        if (dx * dx + dy * dy).sqrt() <= radius {
                            mass += w1 * w3;
                        }
                    }
                }
                let sq = mass * mass;
                let wide = 2.0 * (theta / 2.0).sin().abs() >= NEAR_IDENTITY;
                if wide {
                    acc[0] += sq;
                    acc[2] += sq * sq;
                }
                acc[1] += sq;
                acc[3] += sq * sq;
                if wide {
                    acc[4] += sq * sq;
                }
                if mass > 0.0 {
                    acc[5] += 1.0;
                }
            }
            acc
        })
        .collect();
    let mut sums = [0.0f64; 6];
    for p in partials {
        for (a, b) in sums.iter_mut().zip(p) {
            *a += b;
        }
    }
    let n = g_samples as f64;
    let (sn, sd, snn, sdd, snd, hits) = (sums[0], sums[1], sums[2], sums[3], sums[4], sums[5]);
    if sd <= 0.0 {
        return Err(Error::InvalidParameter(
            "no coincidence mass observed; increase delta or samples".into(),
        ));
    }
    let mean_n = sn / n;
    let mean_d = sd / n;
    let ratio = mean_n / mean_d;
    // Delta method for a ratio of correlated means.
    let var_n = (snn / n - mean_n * mean_n).max(0.0);
    let var_d = (sdd / n - mean_d * mean_d).max(0.0);
    let cov = snd / n - mean_n * mean_d;
    let rel =
        var_n / (mean_n * mean_n).max(1e-300) + var_d / (mean_d * mean_d) - 2.0 * cov / (mean_n * mean_d).max(1e-300);
    let std_error = (ratio * ratio * rel.max(0.0) / n).sqrt();
    Ok(TechRatio {
        ratio: ratio.clamp(0.0, 1.0),
        std_error,
        hits: hits as u64,
        samples: g_samples,
    })
}
