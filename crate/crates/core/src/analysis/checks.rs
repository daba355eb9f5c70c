use crate::error::{Error, Result};
use crate::hamiltonian::{self, HamiltonianSpec};
use crate::linalg::{self, Matrix};
use crate::polarize::SymMultilinearForm;
use crate::polarmap::{polar_step, Point, PolarWindow};
use crate::scalar::Scalar;

/// Relative tolerance for double-precision identity checks.
pub const DOUBLE_IDENTITY_TOL: f64 = 1e-12;

/// Outcome of an identity check: residual 0 in exact modes, relative
/// residual in double mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckOutcome {
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
}

impl CheckOutcome {
    fn compare<S: Scalar>(got: &[S], expected: &[S]) -> Self {
        let diff = linalg::max_abs_diff(got, expected);
        if S::EXACT {
            CheckOutcome {
                passed: got == expected,
                residual: diff,
                tolerance: 0.0,
            }
        } else {
            let residual = diff / linalg::max_abs(expected).max(1.0);
            CheckOutcome {
                passed: residual <= DOUBLE_IDENTITY_TOL,
                residual,
                tolerance: DOUBLE_IDENTITY_TOL,
            }
        }
    }

    fn compare_scalar<S: Scalar>(got: &S, expected: &S) -> Self {
        Self::compare(std::slice::from_ref(got), std::slice::from_ref(expected))
    }

    fn and(self, other: CheckOutcome) -> Self {
        CheckOutcome {
            passed: self.passed && other.passed,
            residual: self.residual.max(other.residual),
            tolerance: self.tolerance.max(other.tolerance),
        }
    }
}

/// Steps forward to x_k, then from (x_k, …, x_1) with −h, and compares the
/// result with x_0.
pub fn check_self_adjoint<S: Scalar>(form: &SymMultilinearForm<S>, window: &PolarWindow<S>) -> Result<CheckOutcome> {
    let xk = polar_step(form, window)?.into_point()?;
    let mut reversed: Vec<Point<S>> = window.points()[1..].iter().rev().cloned().collect();
    reversed.insert(0, xk);
    let back_window = PolarWindow::new(reversed, -window.h().clone())?;
    let back = polar_step(form, &back_window)?.into_point()?;
    Ok(CheckOutcome::compare(&back, &window.points()[0]))
}

/// The three determinants of one window-map step.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureJacobianReport<S> {
    /// Finite-difference determinant of (x_0…x_{k−1}) ↦ (x_1…x_k), with the
    /// block-shift sign (−1)^{n(k−1)} removed.
    pub finite_difference: Option<f64>,
    /// det of (I − cKT₀)⁻¹(I + cKT₁).
    pub closed_form: S,
    /// det(I − cKT₁)/det(I − cKT₀).
    pub ratio: S,
    /// Whether `closed_form` and `ratio` agree (exactly, or to 1e-12).
    pub closed_form_matches: bool,
    /// |finite_difference − ratio| / |ratio|.
    pub fd_relative_error: Option<f64>,
}

/// Central differences on V^k in double precision.
fn window_map_fd_det(spec: &HamiltonianSpec<f64>, window: &PolarWindow<f64>, fd_step: f64) -> Result<f64> {
    let k = window.k();
    let n = window.dim();
    let flat: Vec<f64> = window.points().iter().flatten().copied().collect();
    let image = |v: &[f64]| -> Result<Vec<f64>> {
        let pts: Vec<Vec<f64>> = v.chunks(n).map(<[f64]>::to_vec).collect();
        let w = PolarWindow::new(pts, *window.h())?;
        let xk = hamiltonian::polar_hamiltonian_step(spec, &w)?.into_point()?;
        Ok(v[n..].iter().copied().chain(xk).collect())
    };
    let dim = n * k;
    let mut jac = Matrix::zeros(dim, dim);
    for j in 0..dim {
        let mut up = flat.clone();
        let mut dn = flat.clone();
        up[j] += fd_step;
        dn[j] -= fd_step;
        let (fu, fd) = (image(&up)?, image(&dn)?);
        for i in 0..dim {
            jac[(i, j)] = (fu[i] - fd[i]) / (2.0 * fd_step);
        }
    }
    let sign = if (n * (k - 1)) % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * jac.det())
}

/// Compares the closed-form Jacobian determinant with the density ratio,
/// and with a finite-difference Jacobian when `fd_step` is given.
pub fn check_measure_jacobian<S: Scalar>(
    spec: &HamiltonianSpec<S>,
    window: &PolarWindow<S>,
    fd_step: Option<f64>,
) -> Result<MeasureJacobianReport<S>> {
    let xk = hamiltonian::polar_hamiltonian_step(spec, window)?.into_point()?;
    let mut extended = window.points().to_vec();
    extended.push(xk);
    let h = window.h();
    let closed_form = hamiltonian::closed_form_jacobian(spec, &extended, h)?.det();
    let ratio = hamiltonian::sylvester_ratio(spec, &extended, h)?;
    let closed_form_matches = CheckOutcome::compare_scalar(&closed_form, &ratio).passed;
    let (finite_difference, fd_relative_error) = match fd_step {
        Some(step) => {
            let unsupported = || Error::Unsupported("finite differences need real scalars");
            let spec64 = spec.try_map_coeffs(|c| c.to_f64().ok_or_else(unsupported))?;
            let w64 = window.try_map(|c| c.to_f64().ok_or_else(unsupported))?;
            let fd = window_map_fd_det(&spec64, &w64, step)?;
            let r = ratio.to_f64().ok_or_else(unsupported)?;
            (Some(fd), Some((fd - r).abs() / r.abs().max(f64::MIN_POSITIVE)))
        }
        None => (None, None),
    };
    Ok(MeasureJacobianReport {
        finite_difference,
        closed_form,
        ratio,
        closed_form_matches,
        fd_relative_error,
    })
}

fn scaled_points<S: Scalar>(points: &[Point<S>], lambdas: &[S]) -> Vec<Point<S>> {
    points
        .iter()
        .zip(lambdas.iter().cycle())
        .map(|(p, l)| linalg::scale_vec(l, p))
        .collect()
}

fn check_unit_product<S: Scalar>(lambdas: &[S], k: usize) -> Result<()> {
    if lambdas.len() != k {
        return Err(Error::Arity {
            expected: k,
            found: lambdas.len(),
        });
    }
    let product = lambdas.iter().fold(S::one(), |acc, l| acc * l.clone());
    let off = (product - S::one()).magnitude();
    if off > if S::EXACT { 0.0 } else { 1e-14 } {
        return Err(Error::Invalid("scaling factors must multiply to 1".into()));
    }
    Ok(())
}

/// φ(λ₀x₀, …, λ_{k−1}x_{k−1}) = λ₀ φ(x₀, …, x_{k−1}) for ∏λ = 1.
pub fn check_scaling<S: Scalar>(form: &SymMultilinearForm<S>, window: &PolarWindow<S>, lambdas: &[S]) -> Result<CheckOutcome> {
    check_unit_product(lambdas, window.k())?;
    let base = polar_step(form, window)?.into_point()?;
    let scaled_window = PolarWindow::new(scaled_points(window.points(), lambdas), window.h().clone())?;
    let scaled = polar_step(form, &scaled_window)?.into_point()?;
    Ok(CheckOutcome::compare(&scaled, &linalg::scale_vec(&lambdas[0], &base)))
}

/// Scaling results for a Hamiltonian system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingReport {
    pub equivariance: CheckOutcome,
    pub density: CheckOutcome,
    /// Product integral, when Ω exists.
    pub product_integral: Option<CheckOutcome>,
    /// Both even-k 2-integrals, when k is even and Ω exists.
    pub two_integrals: Option<CheckOutcome>,
}

impl ScalingReport {
    pub fn passed(&self) -> bool {
        self.equivariance.passed
            && self.density.passed
            && self.product_integral.map_or(true, |c| c.passed)
            && self.two_integrals.map_or(true, |c| c.passed)
    }

    pub fn max_residual(&self) -> f64 {
        [Some(self.equivariance), Some(self.density), self.product_integral, self.two_integrals]
            .into_iter()
            .flatten()
            .map(|c| c.residual)
            .fold(0.0, f64::max)
    }
}

/// [`check_scaling`] plus invariance of the density, the product integral
/// and, for even k, the two 2-integrals.
pub fn check_scaling_hamiltonian<S: Scalar>(
    spec: &HamiltonianSpec<S>,
    window: &PolarWindow<S>,
    lambdas: &[S],
) -> Result<ScalingReport> {
    let equivariance = check_scaling(spec.field_form(), window, lambdas)?;
    let scaled_window = PolarWindow::new(scaled_points(window.points(), lambdas), window.h().clone())?;
    let density = CheckOutcome::compare_scalar(
        &hamiltonian::measure_density(spec, &scaled_window)?.determinant,
        &hamiltonian::measure_density(spec, window)?.determinant,
    );
    let (product_integral, two_integrals) = if spec.symplectic_form().is_some() {
        let h = window.h();
        let mut extended = window.points().to_vec();
        extended.push(hamiltonian::polar_hamiltonian_step(spec, window)?.into_point()?);
        // x_k scales like x_0
        let scaled_ext = scaled_points(&extended, lambdas);
        let product = CheckOutcome::compare_scalar(
            &hamiltonian::product_integral(spec, &scaled_ext, h)?,
            &hamiltonian::product_integral(spec, &extended, h)?,
        );
        let pair = if spec.k() % 2 == 0 {
            let (a0, b0) = hamiltonian::even_k_two_integrals(spec, &extended, h)?;
            let (a1, b1) = hamiltonian::even_k_two_integrals(spec, &scaled_ext, h)?;
            Some(CheckOutcome::compare_scalar(&a1, &a0).and(CheckOutcome::compare_scalar(&b1, &b0)))
        } else {
            None
        };
        (Some(product), pair)
    } else {
        (None, None)
    };
    Ok(ScalingReport {
        equivariance,
        density,
        product_integral,
        two_integrals,
    })
}
