//! Closed-form bound calculators: the piecewise spherical-decay exponent
//! profile gamma_s, the k-point configuration dimension bound, absolute
//! continuity thresholds and the asymmetric two-set criterion.

use crate::error::{Error, Result};

/// Which piece of the gamma profile fired. Ties at branch points break to
/// the lower-s branch; the values agree there.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaBranch {
    /// gamma = s on (0, (n-1)/2]
    Low,
    /// gamma = (n-1)/2 on [(n-1)/2, n/2]
    Plateau,
    /// gamma = (n+2s-2)/4 on [n/2, (n+2)/2]
    Ramp,
    /// gamma = s - 1 on [(n+2)/2, n)
    Linear,
}

impl std::fmt::Display for GammaBranch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let label = match self {
            GammaBranch::Low => "s",
            GammaBranch::Plateau => "(n-1)/2",
            GammaBranch::Ramp => "(n+2s-2)/4",
            GammaBranch::Linear => "s-1",
        };
        f.write_str(label)
    }
}

fn validate_ns(n: u32, s: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "ambient dimension must be >= 2, got {n}"
        )));
    }
    if !(s > 0.0 && s <= n as f64) {
        return Err(Error::InvalidParameter(format!(
            "s must lie in (0, n] = (0, {n}], got {s}"
        )));
    }
    Ok(())
}

/// The spherical-average decay exponent together with its branch label.
///
/// The four pieces meet continuously; s = n is admitted with the ramp branch
/// extended (the endpoint where the pushed measures become bounded
/// densities).
pub fn gamma_s_branch(n: u32, s: f64) -> Result<(f64, GammaBranch)> {
    validate_ns(n, s)?;
    let nf = n as f64;
    let b1 = (nf - 1.0) / 2.0;
    let b2 = nf / 2.0;
    let b3 = (nf + 2.0) / 2.0;
    Ok(if s <= b1 {
        (s, GammaBranch::Low)
    } else if s <= b2 {
        (b1, GammaBranch::Plateau)
    } else if s <= b3 {
        ((nf + 2.0 * s - 2.0) / 4.0, GammaBranch::Ramp)
    } else if s < nf {
        (s - 1.0, GammaBranch::Linear)
    } else {
        // s = n: ramp value (3n-2)/4
        ((nf + 2.0 * s - 2.0) / 4.0, GammaBranch::Ramp)
    })
}

/// The decay exponent alone.
pub fn gamma_s(n: u32, s: f64) -> Result<f64> {
    gamma_s_branch(n, s).map(|(v, _)| v)
}

/// Dimension bound report for k-point configuration sets.
#[derive(Debug, Clone, Copy)]
pub struct BoundReport {
    /// The clamped bound min{unclamped, k(k-1)/2}.
    pub value: f64,
    /// k(k-1)/2 - n(k-1) + s(k-1) + gamma_s before clamping.
    pub unclamped: f64,
    /// Set when the unclamped value reaches k(k-1)/2: the configuration set
    /// has positive Lebesgue measure.
    pub lebesgue_positive: bool,
    /// Branch of the gamma profile that fired.
    pub branch: GammaBranch,
}

fn validate_k(n: u32, k: u32) -> Result<()> {
    if !(2..=n + 1).contains(&k) {
        return Err(Error::InvalidParameter(format!(
            "k must lie in {{2,...,n+1}} = {{2,...,{}}}, got {k}",
            n + 1
        )));
    }
    Ok(())
}

/// Lower bound for the dimension of the k-point configuration set of an
/// s-dimensional source in R^n.
pub fn config_dim_bound(n: u32, k: u32, s: f64) -> Result<BoundReport> {
    validate_k(n, k)?;
    let (gamma, branch) = gamma_s_branch(n, s)?;
    let kf = k as f64;
    let nf = n as f64;
    let full = kf * (kf - 1.0) / 2.0;
    let unclamped = full - nf * (kf - 1.0) + s * (kf - 1.0) + gamma;
    Ok(BoundReport {
        value: unclamped.min(full),
        unclamped,
        lebesgue_positive: unclamped >= full,
        branch,
    })
}

/// Smallest s in (0, n) with (n - s)(k - 1) < gamma_s, solved exactly per
/// branch. The defect h(s) = gamma_s - (n-s)(k-1) is strictly increasing, so
/// the root is unique; `n` is returned as a sentinel when no branch solves.
pub fn abs_continuity_threshold(n: u32, k: u32) -> Result<f64> {
    validate_k(n, k)?;
    let nf = n as f64;
    let km1 = (k - 1) as f64;
    let b1 = (nf - 1.0) / 2.0;
    let b2 = nf / 2.0;
    let b3 = (nf + 2.0) / 2.0;
    // Branches as (alpha, beta, lo, hi) for gamma = alpha + beta s on [lo, hi].
    let branches = [
        (0.0, 1.0, 0.0, b1),
        (b1, 0.0, b1, b2),
        ((nf - 2.0) / 4.0, 0.5, b2, b3.min(nf)),
        (-1.0, 1.0, b3, nf),
    ];
    for (alpha, beta, lo, hi) in branches {
        if lo >= hi {
            continue;
        }
        // Solve (n - s)(k-1) = alpha + beta s for s.
        let root = (nf * km1 - alpha) / (km1 + beta);
        if root >= lo - 1e-12 && root <= hi + 1e-12 {
            return Ok(root.clamp(lo, hi));
        }
    }
    Ok(nf)
}

/// Strict positivity criterion for the asymmetric distance set of sources of
/// dimensions s1 and s2: max(gamma_{s1} + s2, gamma_{s2} + s1) > n.
pub fn asymmetric_positive(n: u32, s1: f64, s2: f64) -> Result<bool> {
    let g1 = gamma_s(n, s1)?;
    let g2 = gamma_s(n, s2)?;
    Ok((g1 + s2).max(g2 + s1) > n as f64)
}
