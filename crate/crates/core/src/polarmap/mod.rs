//! Kahan's map and the k-step polar map.
//!
//! For a homogeneous field of degree k+1 with polarization F, one step
//! solves the linear system
//!
//! ```text
//! (x_k − x_0) / (k h) = F(x_0, …, x_{k−1}, x_k)
//! ```
//!
//! for x_k, i.e. `(I − k h M) x_k = x_0` with `M v = F(x_0, …, x_{k−1}, v)`.
//! Singular systems are reported, never perturbed: they mark the
//! indeterminacy locus of the birational map.

mod bootstrap;

pub use bootstrap::{bootstrap, rk4_flow, BootstrapConfig, BootstrapMethod};

use log::debug;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::polarize::SymMultilinearForm;
use crate::polyfield::PolyVectorField;
use crate::scalar::Scalar;

pub type Point<S> = Vec<S>;

/// The k most recent points x_0, …, x_{k−1} and the step size.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarWindow<S> {
    points: Vec<Point<S>>,
    h: S,
    /// Time index of the last point, x_{k−1}.
    step_index: i64,
}

impl<S: Scalar> PolarWindow<S> {
    pub fn new(points: Vec<Point<S>>, h: S) -> Result<Self> {
        let step_index = points.len() as i64 - 1;
        Self::with_step_index(points, h, step_index)
    }

    pub fn with_step_index(points: Vec<Point<S>>, h: S, step_index: i64) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::Invalid("a window needs at least one point".into()));
        };
        let n = first.len();
        if let Some(p) = points.iter().find(|p| p.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: p.len(),
            });
        }
        Ok(PolarWindow {
            points,
            h,
            step_index,
        })
    }

    pub fn k(&self) -> usize {
        self.points.len()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn points(&self) -> &[Point<S>] {
        &self.points
    }

    pub fn h(&self) -> &S {
        &self.h
    }

    pub fn step_index(&self) -> i64 {
        self.step_index
    }

    pub fn first_index(&self) -> i64 {
        self.step_index - (self.k() as i64 - 1)
    }

    /// Drops x_0 and appends x_k.
    pub fn advance(&mut self, next: Point<S>) {
        self.points.remove(0);
        self.points.push(next);
        self.step_index += 1;
    }

    /// Same points with a different step size.
    pub fn with_h(&self, h: S) -> Self {
        PolarWindow {
            points: self.points.clone(),
            h,
            step_index: self.step_index,
        }
    }

    pub fn try_map<T: Scalar>(&self, f: impl Fn(&S) -> Result<T>) -> Result<PolarWindow<T>> {
        let points = self
            .points
            .iter()
            .map(|p| p.iter().map(&f).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(PolarWindow {
            points,
            h: f(&self.h)?,
            step_index: self.step_index,
        })
    }
}

/// Outcome of one linear solve.
#[derive(Debug, Clone, PartialEq)]
pub struct StepResult<S> {
    /// x_k, absent when the system was singular.
    pub new_point: Option<Point<S>>,
    /// 1-norm condition estimate of the system matrix (double image).
    pub solve_condition: Option<f64>,
    /// Set for suspended steps of fields of degree > 2, where equivalence
    /// with Kahan's method is not established.
    pub extension: bool,
}

impl<S: Scalar> StepResult<S> {
    pub fn singular(&self) -> bool {
        self.new_point.is_none()
    }

    pub fn into_point(self) -> Result<Point<S>> {
        self.new_point.ok_or(Error::Singular(None))
    }

    fn from_solve(a: &Matrix<S>, rhs: &[S]) -> Self {
        let new_point = a.solve(rhs);
        if new_point.is_none() {
            debug!("singular polar-step system");
        }
        StepResult {
            solve_condition: new_point.as_ref().and_then(|_| a.condition_estimate()),
            new_point,
            extension: false,
        }
    }
}

/// Stepping matrix I + sign·k·h·M.
fn system_matrix<S: Scalar>(m: &Matrix<S>, k: usize, h: &S, sign: i64) -> Matrix<S> {
    let factor = S::from_i64(sign * k as i64) * h.clone();
    Matrix::identity(m.rows()).add(&m.scale(&factor))
}

fn check_window<S: Scalar>(form: &SymMultilinearForm<S>, k: usize, dim: usize) -> Result<()> {
    if form.is_scalar_valued() {
        return Err(Error::Invalid("the polar map needs a vector-valued form".into()));
    }
    if form.order() != k + 1 {
        return Err(Error::Arity {
            expected: form.order() - 1,
            found: k,
        });
    }
    if form.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: form.dim(),
            found: dim,
        });
    }
    Ok(())
}

/// One polar-map step: x_k from x_0, …, x_{k−1}.
pub fn polar_step<S: Scalar>(form: &SymMultilinearForm<S>, window: &PolarWindow<S>) -> Result<StepResult<S>> {
    let k = window.k();
    check_window(form, k, window.dim())?;
    let m = form.contract_to_matrix(window.points())?;
    let a = system_matrix(&m, k, window.h(), -1);
    Ok(StepResult::from_solve(&a, &window.points()[0]))
}

/// Backward step: x_0 from x_1, …, x_k (`later` holds those k points).
pub fn inverse_polar_step<S: Scalar>(form: &SymMultilinearForm<S>, later: &[Point<S>], h: &S) -> Result<StepResult<S>> {
    let k = later.len();
    let dim = later.first().map_or(form.dim(), Vec::len);
    check_window(form, k, dim)?;
    let m = form.contract_to_matrix(later)?;
    let a = system_matrix(&m, k, h, 1);
    Ok(StepResult::from_solve(&a, &later[k - 1]))
}

/// (x_k − x_0)/(k h) − F(x_0, …, x_k) for an extended window of k+1 points.
pub fn polar_residual<S: Scalar>(form: &SymMultilinearForm<S>, extended: &[Point<S>], h: &S) -> Result<Vec<S>> {
    if extended.len() < 2 {
        return Err(Error::Arity {
            expected: form.order(),
            found: extended.len(),
        });
    }
    let k = extended.len() - 1;
    let f = form.eval(extended)?;
    let denom = S::from_i64(k as i64) * h.clone();
    Ok(extended[k]
        .iter()
        .zip(&extended[0])
        .zip(f)
        .map(|((xk, x0), fv)| (xk.clone() - x0.clone()) / denom.clone() - fv)
        .collect())
}

/// Kahan's map for a field of degree ≤ 2:
/// (x′ − x)/h = Q(x, x′) + ½B(x + x′) + c.
pub fn kahan_step<S: Scalar>(f: &PolyVectorField<S>, x: &[S], h: &S) -> Result<Point<S>> {
    if f.degree().unwrap_or(0) > 2 {
        return Err(Error::Invalid(format!(
            "Kahan's map needs a field of degree at most 2, got {}",
            f.degree().unwrap_or(0)
        )));
    }
    let n = f.dim();
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x.len(),
        });
    }
    let parts = f.degree_split();
    let q = match parts.get(&2) {
        Some(quad) => SymMultilinearForm::from_field(quad, 2)?.contract_to_matrix(&[x])?,
        None => Matrix::zeros(n, n),
    };
    let b = f.linear_part();
    let c = f.constant_part();
    let half_h = h.clone() * S::from_ratio(1, 2);
    let a = Matrix::identity(n).sub(&q.scale(h)).sub(&b.scale(&half_h));
    let bx = b.mul_vec(x);
    let rhs: Vec<S> = (0..n)
        .map(|i| x[i].clone() + half_h.clone() * bx[i].clone() + h.clone() * c[i].clone())
        .collect();
    a.solve(&rhs).ok_or(Error::Singular(Some("Kahan system".into())))
}

/// Polar step of a nonhomogeneous field through its suspension.
///
/// The field is homogenized to degree k+1 in R^{n+1}, each window point is
/// lifted to (x, 1), the polar step is taken there and the result projected
/// back by dividing by the last coordinate.
pub fn suspended_step<S: Scalar>(f: &PolyVectorField<S>, window: &PolarWindow<S>) -> Result<StepResult<S>> {
    let k = window.k();
    let lifted_field = f.homogenize_to(k as u32 + 1)?;
    let form = SymMultilinearForm::from_field(&lifted_field, k + 1)?;
    let lifted = lift_window(window);
    let mut result = polar_step(&form, &lifted)?;
    result.extension = f.degree().unwrap_or(0) > 2;
    result.new_point = result.new_point.and_then(|y| project(&y));
    Ok(result)
}

fn lift_window<S: Scalar>(window: &PolarWindow<S>) -> PolarWindow<S> {
    let points = window
        .points()
        .iter()
        .map(|p| {
            let mut q = p.clone();
            q.push(S::one());
            q
        })
        .collect();
    PolarWindow {
        points,
        h: window.h().clone(),
        step_index: window.step_index(),
    }
}

fn project<S: Scalar>(y: &[S]) -> Option<Point<S>> {
    let (w, head) = y.split_last()?;
    if w.is_zero() {
        return None;
    }
    Some(head.iter().map(|v| v.clone() / w.clone()).collect())
}

/// Points visited by an integration run, each recorded once.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<S> {
    pub h: S,
    /// (time index, point) pairs in increasing index order.
    pub points: Vec<(i64, Point<S>)>,
    /// Index of the step that hit a singular system, if any.
    pub singular_at: Option<i64>,
    pub extension: bool,
}

impl<S: Scalar> Trajectory<S> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point_slice(&self) -> Vec<Point<S>> {
        self.points.iter().map(|(_, p)| p.clone()).collect()
    }
}

fn run<S: Scalar>(
    window: &PolarWindow<S>,
    steps: usize,
    mut step: impl FnMut(&PolarWindow<S>) -> Result<StepResult<S>>,
) -> Result<Trajectory<S>> {
    let mut w = window.clone();
    let mut points: Vec<(i64, Point<S>)> = w
        .points()
        .iter()
        .enumerate()
        .map(|(i, p)| (w.first_index() + i as i64, p.clone()))
        .collect();
    let mut singular_at = None;
    let mut extension = false;
    for _ in 0..steps {
        let r = step(&w)?;
        extension |= r.extension;
        match r.new_point {
            Some(x) => {
                w.advance(x.clone());
                points.push((w.step_index(), x));
            }
            None => {
                singular_at = Some(w.step_index() + 1);
                break;
            }
        }
    }
    Ok(Trajectory {
        h: window.h().clone(),
        points,
        singular_at,
        extension,
    })
}

/// Advances the window `steps` times, stopping early at a singular step.
pub fn integrate<S: Scalar>(form: &SymMultilinearForm<S>, window: &PolarWindow<S>, steps: usize) -> Result<Trajectory<S>> {
    run(window, steps, |w| polar_step(form, w))
}

/// [`integrate`] for a nonhomogeneous field via [`suspended_step`].
pub fn integrate_suspended<S: Scalar>(f: &PolyVectorField<S>, window: &PolarWindow<S>, steps: usize) -> Result<Trajectory<S>> {
    let k = window.k();
    let lifted_field = f.homogenize_to(k as u32 + 1)?;
    let form = SymMultilinearForm::from_field(&lifted_field, k + 1)?;
    let extension = f.degree().unwrap_or(0) > 2;
    run(window, steps, |w| {
        let mut r = polar_step(&form, &lift_window(w))?;
        r.new_point = r.new_point.and_then(|y| project(&y));
        r.extension = extension;
        Ok(r)
    })
}

/// Max-norm of the defining residual relative to ‖x_k‖.
pub fn relative_residual<S: Scalar>(form: &SymMultilinearForm<S>, extended: &[Point<S>], h: &S) -> Result<f64> {
    let r = polar_residual(form, extended, h)?;
    let k = extended.len() - 1;
    let scale = linalg::max_abs(&extended[k]).max(f64::MIN_POSITIVE);
    // the residual is divided by k h; undo that so it compares with x_k
    let kh = (S::from_i64(k as i64) * h.clone()).magnitude();
    Ok(linalg::max_abs(&r) * kh / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polarize::polarize;
    use crate::polyfield::Monomial;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn mono(c: i64, e: &[u32]) -> Monomial<Rational> {
        Monomial::new(q(c, 1), e.to_vec())
    }

    fn scalar_power(k: u32) -> PolyVectorField<Rational> {
        PolyVectorField::new(1, vec![vec![mono(1, &[k + 1])]]).unwrap()
    }

    #[test]
    fn kahan_riccati() {
        let f = scalar_power(1);
        let x1 = kahan_step(&f, &[q(1, 1)], &q(1, 2)).unwrap();
        assert_eq!(x1, vec![q(2, 1)]);
    }

    #[test]
    fn kahan_identity_for_zero_field() {
        let f = PolyVectorField::<Rational>::zero(2);
        let x = vec![q(3, 1), q(-1, 7)];
        assert_eq!(kahan_step(&f, &x, &q(1, 3)).unwrap(), x);
    }

    #[test]
    fn kahan_lotka_volterra_pair() {
        // f = (xy, −xy), x = (1, 1), h = 1 -> (2, 0)
        let f = PolyVectorField::new(2, vec![vec![mono(1, &[1, 1])], vec![mono(-1, &[1, 1])]]).unwrap();
        let x1 = kahan_step(&f, &[q(1, 1), q(1, 1)], &q(1, 1)).unwrap();
        assert_eq!(x1, vec![q(2, 1), q(0, 1)]);
    }

    #[test]
    fn kahan_singular_reported() {
        // x' = x/(1 − h x): singular when h x = 1
        let f = scalar_power(1);
        assert!(matches!(kahan_step(&f, &[q(2, 1)], &q(1, 2)), Err(Error::Singular(_))));
    }

    #[test]
    fn polar_cubic_scalar() {
        let form = polarize(&scalar_power(2)).unwrap();
        let w = PolarWindow::new(vec![vec![q(1, 1)], vec![q(1, 1)]], q(1, 4)).unwrap();
        let r = polar_step(&form, &w).unwrap();
        assert_eq!(r.new_point, Some(vec![q(2, 1)]));
        assert!(r.solve_condition.unwrap() >= 1.0);
        let ext = vec![vec![q(1, 1)], vec![q(1, 1)], vec![q(2, 1)]];
        assert!(polar_residual(&form, &ext, &q(1, 4)).unwrap().iter().all(|v| v == &q(0, 1)));

        let back = inverse_polar_step(&form, &[vec![q(1, 1)], vec![q(2, 1)]], &q(1, 4)).unwrap();
        assert_eq!(back.new_point, Some(vec![q(1, 1)]));
    }

    #[test]
    fn polar_zero_field_is_identity() {
        let form = SymMultilinearForm::from_field(&PolyVectorField::<Rational>::zero(2), 3).unwrap();
        let w = PolarWindow::new(vec![vec![q(1, 2), q(3, 1)], vec![q(5, 1), q(-1, 1)]], q(1, 3)).unwrap();
        assert_eq!(polar_step(&form, &w).unwrap().new_point, Some(vec![q(1, 2), q(3, 1)]));
        let back = inverse_polar_step(&form, w.points(), &q(1, 3)).unwrap();
        assert_eq!(back.new_point, Some(vec![q(5, 1), q(-1, 1)]));
    }

    #[test]
    fn polar_singular_flagged() {
        // x2 = x0 / (1 − 2h x0 x1) with 2h x0 x1 = 1
        let form = polarize(&scalar_power(2)).unwrap();
        let w = PolarWindow::new(vec![vec![q(1, 1)], vec![q(2, 1)]], q(1, 4)).unwrap();
        let r = polar_step(&form, &w).unwrap();
        assert!(r.singular());
        assert!(r.into_point().is_err());
    }

    #[test]
    fn polar_arity_checked() {
        let form = polarize(&scalar_power(2)).unwrap();
        let w = PolarWindow::new(vec![vec![q(1, 1)]], q(1, 4)).unwrap();
        assert!(matches!(polar_step(&form, &w), Err(Error::Arity { .. })));
    }

    #[test]
    fn k1_polar_equals_kahan_homogeneous() {
        let f = PolyVectorField::new(
            2,
            vec![vec![mono(1, &[2, 0]), mono(-3, &[1, 1])], vec![mono(2, &[0, 2]), mono(1, &[1, 1])]],
        )
        .unwrap();
        let form = polarize(&f).unwrap();
        let x = vec![q(1, 3), q(-2, 5)];
        let h = q(1, 7);
        let w = PolarWindow::new(vec![x.clone()], h.clone()).unwrap();
        assert_eq!(polar_step(&form, &w).unwrap().new_point.unwrap(), kahan_step(&f, &x, &h).unwrap());
    }

    #[test]
    fn suspended_matches_kahan_on_riccati_with_linear_terms() {
        // x' = x^2 + x + 1, x = 1, h = 1/2 -> 7
        let f = PolyVectorField::new(1, vec![vec![mono(1, &[2]), mono(1, &[1]), mono(1, &[0])]]).unwrap();
        let w = PolarWindow::new(vec![vec![q(1, 1)]], q(1, 2)).unwrap();
        let r = suspended_step(&f, &w).unwrap();
        assert!(!r.extension);
        assert_eq!(r.new_point, Some(vec![q(7, 1)]));
        assert_eq!(kahan_step(&f, &[q(1, 1)], &q(1, 2)).unwrap(), vec![q(7, 1)]);
    }

    #[test]
    fn suspended_of_homogeneous_and_zero() {
        let f = scalar_power(2);
        let w = PolarWindow::new(vec![vec![q(1, 1)], vec![q(1, 1)]], q(1, 4)).unwrap();
        assert_eq!(suspended_step(&f, &w).unwrap().new_point, Some(vec![q(2, 1)]));
        let z = PolyVectorField::<Rational>::zero(1);
        assert_eq!(suspended_step(&z, &w).unwrap().new_point, Some(vec![q(1, 1)]));
    }

    #[test]
    fn suspended_higher_degree_is_flagged() {
        let f = PolyVectorField::new(1, vec![vec![mono(1, &[3]), mono(1, &[0])]]).unwrap();
        let w = PolarWindow::new(vec![vec![q(1, 2)], vec![q(1, 3)]], q(1, 10)).unwrap();
        assert!(suspended_step(&f, &w).unwrap().extension);
    }

    #[test]
    fn integrate_records_each_point_once() {
        let form = polarize(&scalar_power(2)).unwrap();
        let w = PolarWindow::new(vec![vec![q(1, 1)], vec![q(1, 1)]], q(1, 8)).unwrap();
        let t0 = integrate(&form, &w, 0).unwrap();
        assert_eq!(t0.points, vec![(0, vec![q(1, 1)]), (1, vec![q(1, 1)])]);
        let t = integrate(&form, &w, 3).unwrap();
        assert_eq!(t.len(), 5);
        assert_eq!(t.points[2], (2, vec![q(4, 3)]));
        assert_eq!(t.singular_at, None);
        // I_n = 1/(x_n x_{n+1}) drops by h k = 1/4 per step
        for n in 0..t.len() - 1 {
            let i_n = q(1, 1) / (t.points[n].1[0].clone() * t.points[n + 1].1[0].clone());
            assert_eq!(i_n, q(1, 1) - q(n as i64, 4));
        }
    }

    #[test]
    fn integrate_stops_at_singularity() {
        // I hits zero at n = 2 (I_0 = 1, hk = 1/2)
        let form = polarize(&scalar_power(2)).unwrap();
        let w = PolarWindow::new(vec![vec![q(1, 1)], vec![q(1, 1)]], q(1, 4)).unwrap();
        let t = integrate(&form, &w, 10).unwrap();
        assert_eq!(t.singular_at, Some(3));
        assert_eq!(t.len(), 3);
    }
}
