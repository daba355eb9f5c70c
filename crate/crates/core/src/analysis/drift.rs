use crate::error::{Error, Result};
use crate::polarmap::Point;
use crate::scalar::Scalar;

/// Drift of a k-integral along a trajectory.
///
/// An invariant of the k-th iterate is sampled every `stride` steps, so the
/// samples fall into `stride` classes by starting offset. Each class should
/// be constant; drift is measured against its first sample.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftReport<S> {
    /// `series[r]` holds the samples at offsets r, r + stride, ….
    pub series: Vec<Vec<S>>,
    pub max_abs_drift: f64,
    /// Drift relative to the largest sample magnitude of its class.
    pub max_rel_drift: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl<S> DriftReport<S> {
    pub fn samples(&self) -> usize {
        self.series.iter().map(Vec::len).sum()
    }
}

/// Evaluates `invariant` on every run of `span` consecutive points and
/// compares values `stride` steps apart. Passes when the relative drift is
/// at most `tolerance` (exact modes use the exact difference).
pub fn drift_series<S, F>(
    trajectory: &[Point<S>],
    span: usize,
    stride: usize,
    tolerance: f64,
    invariant: F,
) -> Result<DriftReport<S>>
where
    S: Scalar,
    F: Fn(&[Point<S>]) -> Result<S>,
{
    if stride == 0 || span == 0 {
        return Err(Error::Invalid("span and stride must be positive".into()));
    }
    let needed = span + stride;
    if trajectory.len() < needed {
        return Err(Error::ShortTrajectory {
            needed,
            have: trajectory.len(),
        });
    }
    let count = trajectory.len() + 1 - span;
    let values = (0..count)
        .map(|j| invariant(&trajectory[j..j + span]))
        .collect::<Result<Vec<S>>>()?;
    let series: Vec<Vec<S>> = (0..stride)
        .map(|r| values.iter().skip(r).step_by(stride).cloned().collect())
        .collect();

    let mut max_abs_drift: f64 = 0.0;
    let mut max_rel_drift: f64 = 0.0;
    for class in series.iter().filter(|c| !c.is_empty()) {
        let scale = class.iter().map(Scalar::magnitude).fold(0.0, f64::max);
        for v in &class[1..] {
            let d = (v.clone() - class[0].clone()).magnitude();
            max_abs_drift = max_abs_drift.max(d);
            if d > 0.0 {
                max_rel_drift = max_rel_drift.max(if scale > 0.0 { d / scale } else { f64::INFINITY });
            }
        }
    }
    Ok(DriftReport {
        series,
        max_abs_drift,
        max_rel_drift,
        tolerance,
        passed: max_rel_drift <= tolerance,
    })
}
