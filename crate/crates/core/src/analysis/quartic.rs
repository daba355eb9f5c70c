use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianSpec;
use crate::linalg::Matrix;
use crate::polyfield::{Monomial, ScalarPoly};
use crate::scalar::Scalar;

/// The closed-form polar map of H = a q⁴ + 4b q³p + 6c q²p² + 4d qp³ + e p⁴
/// with K = [[0, 1], [−1, 0]] on V² (k = 2, n = 2).
///
/// This step size h corresponds to step h/4 in the general polar map of
/// K∇H. The common denominator is 1 + 4h²Δ.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplicitQuarticMap<S> {
    pub a: S,
    pub b: S,
    pub c: S,
    pub d: S,
    pub e: S,
    pub h: S,
}

fn minor<S: Scalar>(w: &S, x: &S, y: &S, z: &S) -> S {
    w.clone() * z.clone() - x.clone() * y.clone()
}

impl<S: Scalar> ExplicitQuarticMap<S> {
    pub fn new(coeffs: [S; 5], h: S) -> Self {
        let [a, b, c, d, e] = coeffs;
        ExplicitQuarticMap { a, b, c, d, e, h }
    }

    /// Sum of the six 2×2-minor terms.
    pub fn delta(&self, x0: &[S], x1: &[S]) -> S {
        let (q0, p0, q1, p1) = (x0[0].clone(), x0[1].clone(), x1[0].clone(), x1[1].clone());
        let (a, b, c, d, e) = (&self.a, &self.b, &self.c, &self.d, &self.e);
        let sq = |v: &S| v.clone() * v.clone();
        minor(c, d, d, e) * sq(&p0) * sq(&p1)
            + minor(b, c, d, e) * (sq(&p0) * p1.clone() * q1.clone() + p0.clone() * sq(&p1) * q0.clone())
            + minor(b, c, c, d) * (sq(&p0) * sq(&q1) + sq(&p1) * sq(&q0))
            + minor(a, b, c, d) * (p1.clone() * sq(&q0) * q1.clone() + p0.clone() * q0.clone() * sq(&q1))
            + minor(a, c, c, e) * p0 * p1 * q0.clone() * q1.clone()
            + minor(a, b, b, c) * sq(&q0) * sq(&q1)
    }

    pub fn denominator(&self, x0: &[S], x1: &[S]) -> S {
        S::one() + S::from_i64(4) * self.h.clone() * self.h.clone() * self.delta(x0, x1)
    }

    /// Invariant density 1/(1 + 4h²Δ) at the window (x0, x1).
    pub fn measure(&self, x0: &[S], x1: &[S]) -> Result<S> {
        let den = self.denominator(x0, x1);
        if den.is_zero() {
            return Err(Error::DensityUndefined);
        }
        Ok(S::one() / den)
    }

    /// (q₂, p₂) from ((q₀, p₀), (q₁, p₁)).
    pub fn step(&self, x0: &[S], x1: &[S]) -> Result<Vec<S>> {
        if x0.len() != 2 || x1.len() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: if x0.len() != 2 { x0.len() } else { x1.len() },
            });
        }
        let den = self.denominator(x0, x1);
        if den.is_zero() {
            return Err(Error::Singular(Some("explicit quartic map denominator".into())));
        }
        let (q0, p0, q1, p1) = (x0[0].clone(), x0[1].clone(), x1[0].clone(), x1[1].clone());
        let two = S::from_i64(2);
        let (a, b, c, d, e) = (&self.a, &self.b, &self.c, &self.d, &self.e);
        let q0q0 = q0.clone() * q0.clone();
        let p0p0 = p0.clone() * p0.clone();
        let mixed_q = two.clone() * p0.clone() * q0.clone() * q1.clone() + p1.clone() * q0q0.clone();
        let mixed_p = two.clone() * p0.clone() * p1.clone() * q0.clone() + p0p0.clone() * q1.clone();
        let dq = b.clone() * q0q0.clone() * q1.clone()
            + c.clone() * mixed_q.clone()
            + d.clone() * mixed_p.clone()
            + e.clone() * p0p0.clone() * p1.clone();
        let dp = a.clone() * q0q0 * q1
            + b.clone() * mixed_q
            + c.clone() * mixed_p
            + d.clone() * p0p0 * p1;
        let two_h = two * self.h.clone();
        Ok(vec![
            (q0 + two_h.clone() * dq) / den.clone(),
            (p0 - two_h * dp) / den,
        ])
    }

    /// The same system as a [`HamiltonianSpec`].
    pub fn hamiltonian_spec(&self) -> Result<HamiltonianSpec<S>> {
        let weights = [1, 4, 6, 4, 1];
        let coeffs = [&self.a, &self.b, &self.c, &self.d, &self.e];
        let monomials = (0..5)
            .map(|i| Monomial::new(coeffs[i].clone() * S::from_i64(weights[i]), vec![4 - i as u32, i as u32]))
            .collect();
        let structure = Matrix::from_rows(vec![vec![S::zero(), S::one()], vec![-S::one(), S::zero()]])
            .expect("2x2 rows");
        HamiltonianSpec::with_k(ScalarPoly::new(2, monomials)?, structure, 2)
    }

    /// Step size of the general polar map that reproduces this map.
    pub fn general_step(&self) -> S {
        self.h.clone() / S::from_i64(4)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{measure_density, polar_hamiltonian_step};
    use crate::polarmap::PolarWindow;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn v(a: i64, b: i64) -> Vec<Rational> {
        vec![q(a, 1), q(b, 1)]
    }

    #[test]
    fn pure_q4_by_hand() {
        let m = ExplicitQuarticMap::new([q(1, 1), q(0, 1), q(0, 1), q(0, 1), q(0, 1)], q(1, 2));
        assert_eq!(m.delta(&v(1, 0), &v(1, 1)), q(0, 1));
        assert_eq!(m.step(&v(1, 0), &v(1, 1)).unwrap(), v(1, -1));
    }

    #[test]
    fn zero_coefficients_are_identity() {
        let m = ExplicitQuarticMap::new([q(0, 1), q(0, 1), q(0, 1), q(0, 1), q(0, 1)], q(3, 2));
        assert_eq!(m.step(&v(4, -7), &v(1, 1)).unwrap(), v(4, -7));
    }

    #[test]
    fn two_integrals_under_second_iterate() {
        let m = ExplicitQuarticMap::new([q(1, 1), q(-1, 2), q(2, 3), q(1, 5), q(-3, 1)], q(1, 3));
        let mut xs = vec![vec![q(1, 2), q(-1, 1)], vec![q(2, 1), q(1, 3)]];
        for i in 0..3 {
            let next = m.step(&xs[i], &xs[i + 1]).unwrap();
            xs.push(next);
        }
        let w = |u: &[Rational], v: &[Rational]| u[0].clone() * v[1].clone() - v[0].clone() * u[1].clone();
        assert_eq!(w(&xs[0], &xs[1]), w(&xs[2], &xs[3]));
        assert_eq!(w(&xs[1], &xs[2]), w(&xs[3], &xs[4]));
    }

    #[test]
    fn matches_general_polar_map_at_quarter_step() {
        let m = ExplicitQuarticMap::new([q(2, 1), q(1, 3), q(-1, 1), q(1, 2), q(5, 4)], q(2, 5));
        let spec = m.hamiltonian_spec().unwrap();
        let x0 = vec![q(1, 2), q(-2, 3)];
        let x1 = vec![q(3, 4), q(1, 5)];
        let w = PolarWindow::new(vec![x0.clone(), x1.clone()], m.general_step()).unwrap();
        let general = polar_hamiltonian_step(&spec, &w).unwrap().into_point().unwrap();
        assert_eq!(general, m.step(&x0, &x1).unwrap());
        assert_eq!(measure_density(&spec, &w).unwrap().density, m.measure(&x0, &x1).unwrap());
    }
}
