use crate::geometry::PluckerLine;

/// Error norm below which an observer counts as converged.
pub const CONVERGENCE_THRESHOLD: f64 = 0.01;

/// Angle between estimated and true directions. Opposite directions score π.
pub fn direction_error(est: &PluckerLine, truth: &PluckerLine) -> f64 {
    est.direction().dot(&truth.direction()).clamp(-1.0, 1.0).acos()
}

pub fn depth_error(est: &PluckerLine, truth: &PluckerLine) -> f64 {
    (est.depth() - truth.depth()).abs()
}

/// Time from which the error stays below [`CONVERGENCE_THRESHOLD`] until the
/// end of the series. Non-finite samples count as above threshold.
pub fn detect_convergence(errors: &[f64], dt: f64) -> Option<f64> {
    let start = match errors.iter().rposition(|e| !(*e < CONVERGENCE_THRESHOLD)) {
        Some(i) => i + 1,
        None => 0,
    };
    (start < errors.len()).then(|| start as f64 * dt)
}

/// Mean over the last half of a series; any NaN in it propagates.
pub fn tail_mean(values: &[f64]) -> f64 {
    let tail = &values[values.len() / 2..];
    if tail.is_empty() {
        return f64::NAN;
    }
    tail.iter().sum::<f64>() / tail.len() as f64
}
