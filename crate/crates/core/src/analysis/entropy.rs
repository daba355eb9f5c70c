//! Arithmetic height growth as an integrability probe.
//!
//! Exact iterates of an integrable birational map have heights growing
//! polynomially; nonintegrable maps show exponential growth. The ratios
//! r_n = h_{n+1}/h_n of a polynomially growing sequence behave like
//! 1 + d/n, so ln r_n is fitted against A + B/n over the tail and e^A is
//! read as the asymptotic growth factor.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::Matrix;
use crate::polarize::SymMultilinearForm;
use crate::polarmap::{polar_step, Point, PolarWindow};
use crate::scalar::{log_height, Rational};

pub const DEFAULT_ITERS: usize = 14;
/// Growth factors at or below this are read as subexponential.
pub const SUBEXPONENTIAL_MAX: f64 = 1.05;
/// Growth factors at or above this are read as exponential.
pub const EXPONENTIAL_MIN: f64 = 1.2;
/// Fewer iterates than this are always inconclusive.
pub const MIN_ITERS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GrowthClass {
    Subexponential,
    Exponential,
    Inconclusive,
}

impl std::fmt::Display for GrowthClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GrowthClass::Subexponential => "subexponential",
            GrowthClass::Exponential => "exponential",
            GrowthClass::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    /// Height of each new iterate: max over coordinates of
    /// ln max(|numerator|, denominator).
    pub heights: Vec<f64>,
    /// h_{n+1}/h_n over the nonzero heights.
    pub growth_ratios: Vec<f64>,
    pub classification: GrowthClass,
    /// e^A from the tail fit, when one was made.
    pub growth_factor: Option<f64>,
    /// Number of trailing ratios used by the fit.
    pub fit_window: usize,
    /// Set when fewer than [`MIN_ITERS`] iterates were available.
    pub insufficient_data: bool,
    /// Iteration at which a singular step stopped the run.
    pub singular_at: Option<usize>,
}

impl EntropyEstimate {
    /// Whether the last `count` ratios all exceed `threshold`.
    pub fn tail_ratios_exceed(&self, count: usize, threshold: f64) -> bool {
        self.growth_ratios.len() >= count && self.growth_ratios[self.growth_ratios.len() - count..].iter().all(|r| *r > threshold)
    }
}

pub fn point_height(p: &[Rational]) -> f64 {
    p.iter().map(log_height).fold(0.0, f64::max)
}

/// Iterates the polar map exactly and classifies height growth.
pub fn height_growth(form: &SymMultilinearForm<Rational>, window: &PolarWindow<Rational>, iters: usize) -> Result<EntropyEstimate> {
    let h = window.h().clone();
    height_growth_with(window.points().to_vec(), iters, |pts| {
        let w = PolarWindow::new(pts.to_vec(), h.clone())?;
        Ok(polar_step(form, &w)?.new_point)
    })
}

/// Same as [`height_growth`] for any multistep map; `step` receives the
/// current window and returns the next point, or `None` when singular.
pub fn height_growth_with<F>(mut window: Vec<Point<Rational>>, iters: usize, mut step: F) -> Result<EntropyEstimate>
where
    F: FnMut(&[Point<Rational>]) -> Result<Option<Point<Rational>>>,
{
    let mut heights = Vec::with_capacity(iters);
    let mut singular_at = None;
    for i in 0..iters {
        match step(&window)? {
            Some(next) => {
                heights.push(point_height(&next));
                window.remove(0);
                window.push(next);
            }
            None => {
                singular_at = Some(i);
                break;
            }
        }
    }
    Ok(classify(heights, iters, singular_at))
}

fn classify(heights: Vec<f64>, iters: usize, singular_at: Option<usize>) -> EntropyEstimate {
    let nonzero: Vec<f64> = heights.iter().copied().filter(|h| *h > 0.0).collect();
    let growth_ratios: Vec<f64> = nonzero.windows(2).map(|w| w[1] / w[0]).collect();
    let fit_window = (iters / 3).max(4).min(growth_ratios.len());
    let insufficient_data = heights.len() < MIN_ITERS;
    let growth_factor = if insufficient_data || fit_window < 3 {
        None
    } else {
        let start = growth_ratios.len() - fit_window;
        let samples: Vec<(f64, f64)> = (start..growth_ratios.len())
            .map(|i| (1.0 / (i + 1) as f64, growth_ratios[i].ln()))
            .collect();
        fit_intercept(&samples).map(f64::exp)
    };
    let classification = match growth_factor {
        Some(g) if g <= SUBEXPONENTIAL_MAX => GrowthClass::Subexponential,
        Some(g) if g >= EXPONENTIAL_MIN => GrowthClass::Exponential,
        _ => GrowthClass::Inconclusive,
    };
    EntropyEstimate {
        heights,
        growth_ratios,
        classification,
        growth_factor,
        fit_window,
        insufficient_data,
        singular_at,
    }
}

/// Intercept A of the least-squares line y ≈ A + B x.
fn fit_intercept(samples: &[(f64, f64)]) -> Option<f64> {
    let coeffs = least_squares(samples, 2)?;
    Some(coeffs[0])
}

/// Polynomial least squares of the given number of coefficients.
fn least_squares(samples: &[(f64, f64)], terms: usize) -> Option<Vec<f64>> {
    let mut normal = Matrix::zeros(terms, terms);
    let mut rhs = vec![0.0; terms];
    for &(x, y) in samples {
        let powers: Vec<f64> = (0..terms).map(|p| x.powi(p as i32)).collect();
        for i in 0..terms {
            rhs[i] += powers[i] * y;
            for j in 0..terms {
                normal[(i, j)] += powers[i] * powers[j];
            }
        }
    }
    normal.solve(&rhs)
}

/// R² of the fit h_n ≈ α + βn + γn² over n = 1, 2, ….
pub fn quadratic_fit_r2(heights: &[f64]) -> Option<f64> {
    if heights.len() < 4 {
        return None;
    }
    let samples: Vec<(f64, f64)> = heights.iter().enumerate().map(|(i, h)| ((i + 1) as f64, *h)).collect();
    let c = least_squares(&samples, 3)?;
    let mean = heights.iter().sum::<f64>() / heights.len() as f64;
    let total: f64 = heights.iter().map(|h| (h - mean).powi(2)).sum();
    let residual: f64 = samples
        .iter()
        .map(|(x, y)| (y - (c[0] + c[1] * x + c[2] * x * x)).powi(2))
        .sum();
    Some(if total == 0.0 { 1.0 } else { 1.0 - residual / total })
}
