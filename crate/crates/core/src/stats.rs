//! Small statistical helpers shared by runs, reports and acceptance checks.

/// Standard error of a binomial proportion with success probability `p`
/// estimated from `n` trials.
pub fn binomial_stderr(p: f64, n: u64) -> f64 {
    if n == 0 {
        return f64::INFINITY;
    }
    let p = p.clamp(0.0, 1.0);
    (p * (1.0 - p) / n as f64).sqrt()
}

/// `true` when `measured` lies within `k` standard errors of `expected`.
///
/// A zero standard error demands exact agreement.
pub fn within_sigma(measured: f64, expected: f64, stderr: f64, k: f64) -> bool {
    (measured - expected).abs() <= k * stderr
}

/// Standard error of the correlation estimator `E` formed from `n_joint`
/// joint events: `sqrt((1 − E²) / n_joint)`.
pub fn correlation_stderr(e: f64, n_joint: u64) -> f64 {
    if n_joint == 0 {
        return f64::INFINITY;
    }
    ((1.0 - e * e).max(0.0) / n_joint as f64).sqrt()
}
