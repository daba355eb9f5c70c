use crate::error::Result;
use crate::polarmap::Point;
use crate::polyfield::PolyVectorField;
use crate::scalar::Scalar;

/// Two-step leapfrog (x_{n+2} − x_n)/(2h) = f(x_{n+1}).
///
/// Kept as a control: it is birational but has no k-integrals, so the
/// drift checks are expected to fail on it.
pub fn leapfrog_trajectory<S: Scalar>(
    f: &PolyVectorField<S>,
    x0: Point<S>,
    x1: Point<S>,
    h: &S,
    steps: usize,
) -> Result<Vec<Point<S>>> {
    let two_h = S::from_i64(2) * h.clone();
    let mut out = vec![x0, x1];
    for _ in 0..steps {
        let n = out.len();
        let fx = f.evaluate(&out[n - 1])?;
        let next = out[n - 2]
            .iter()
            .zip(fx)
            .map(|(a, b)| a.clone() + two_h.clone() * b)
            .collect();
        out.push(next);
    }
    Ok(out)
}
