//! Least-squares utilities for log-log scaling fits.

/// Slope of the ordinary least-squares line through `(x, y)` points.
/// Returns `None` for fewer than two points or degenerate abscissae.
pub fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in points {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

/// Slope of log(y) against log(x); entries with non-positive coordinates are
/// skipped by the caller.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let transformed: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    least_squares_slope(&transformed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let pts = [(1.0, 3.0), (2.0, 5.0), (3.0, 7.0)];
        assert!((least_squares_slope(&pts).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn power_law() {
        let pts: Vec<(f64, f64)> = (1..6).map(|i| (i as f64, (i as f64).powf(-1.5))).collect();
        assert!((loglog_slope(&pts).unwrap() + 1.5).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(least_squares_slope(&[(1.0, 1.0)]).is_none());
        assert!(least_squares_slope(&[(1.0, 1.0), (1.0, 2.0)]).is_none());
    }
}
