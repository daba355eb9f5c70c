use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyfield::PolyVectorField;
use crate::scalar::Scalar;

use super::{Point, PolarWindow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BootstrapMethod {
    /// Classical RK4 in double precision with several substeps per step.
    ReferenceFlow,
    /// The caller supplies all k starting points.
    ExactProvided,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BootstrapConfig {
    pub method: BootstrapMethod,
    #[serde(default = "default_substeps")]
    pub substeps: u32,
}

fn default_substeps() -> u32 {
    100
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            method: BootstrapMethod::ReferenceFlow,
            substeps: default_substeps(),
        }
    }
}

/// Approximates the flow of `f` over time `t` with `substeps` RK4 steps.
pub fn rk4_flow(f: &PolyVectorField<f64>, x: &[f64], t: f64, substeps: u32) -> Result<Vec<f64>> {
    let n = substeps.max(1);
    let dt = t / n as f64;
    let mut y = x.to_vec();
    let shifted = |y: &[f64], k: &[f64], s: f64| -> Vec<f64> { y.iter().zip(k).map(|(a, b)| a + s * b).collect() };
    for step in 0..n {
        let k1 = f.evaluate(&y)?;
        let k2 = f.evaluate(&shifted(&y, &k1, dt / 2.0))?;
        let k3 = f.evaluate(&shifted(&y, &k2, dt / 2.0))?;
        let k4 = f.evaluate(&shifted(&y, &k3, dt))?;
        for i in 0..y.len() {
            y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Overflow(step as usize));
        }
    }
    Ok(y)
}

/// Builds the k-point starting window.
///
/// With [`BootstrapMethod::ReferenceFlow`] only `points[0]` is used and the
/// remaining points are x_j ≈ φ_{jh}(x_0), computed in double precision and
/// converted back into the working scalar. Prime-field runs must supply
/// their points.
pub fn bootstrap<S: Scalar>(
    f: &PolyVectorField<S>,
    points: &[Point<S>],
    k: usize,
    h: &S,
    config: &BootstrapConfig,
) -> Result<PolarWindow<S>> {
    if k == 0 {
        return Err(Error::Invalid("window size must be at least 1".into()));
    }
    match config.method {
        BootstrapMethod::ExactProvided => {
            if points.len() != k {
                return Err(Error::ShortTrajectory {
                    needed: k,
                    have: points.len(),
                });
            }
            PolarWindow::new(points.to_vec(), h.clone())
        }
        BootstrapMethod::ReferenceFlow => {
            let Some(x0) = points.first() else {
                return Err(Error::ShortTrajectory { needed: 1, have: 0 });
            };
            if x0.len() != f.dim() {
                return Err(Error::DimensionMismatch {
                    expected: f.dim(),
                    found: x0.len(),
                });
            }
            let unsupported = || Error::Unsupported("reference-flow bootstrap needs real scalars");
            let f64_field = f.try_map_coeffs(|c| c.to_f64().ok_or_else(unsupported))?;
            let hf = h.to_f64().ok_or_else(unsupported)?;
            let mut y: Vec<f64> = x0.iter().map(|v| v.to_f64().ok_or_else(unsupported)).collect::<Result<_>>()?;
            let mut window = vec![x0.clone()];
            for _ in 1..k {
                y = rk4_flow(&f64_field, &y, hf, config.substeps)?;
                window.push(y.iter().map(|v| S::from_f64(*v)).collect::<Result<_>>()?);
            }
            PolarWindow::new(window, h.clone())
        }
    }
}
