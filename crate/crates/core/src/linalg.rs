//! Small dense matrices and the linear solves behind each polar step.
//!
//! Sizes here are tiny (n ≤ ~10), so everything is row-major `Vec` storage.
//! Doubles use LU with partial pivoting; rationals use fraction-free
//! (Bareiss) elimination after clearing row denominators.

use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::scalar::{Rational, Scalar};

/// Pivots smaller than this multiple of the row's max-norm count as zero.
pub const SINGULAR_PIVOT_RATIO: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    /// Builds a matrix from rows; all rows must share one length.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Option<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return None;
        }
        Some(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub(crate) fn from_vec(rows: usize, cols: usize, data: Vec<S>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn scale(&self, s: &S) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v.clone() * s.clone()).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-S::one()))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = &self[(i, l)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out[(i, j)].clone() + a.clone() * other[(l, j)].clone();
                    out[(i, j)] = v;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    /// uᵀ A v.
    pub fn bilinear(&self, u: &[S], v: &[S]) -> S {
        dot(u, &self.mul_vec(v))
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| self[(i, j)] == -self[(j, i)].clone())
            })
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..self.cols).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn det(&self) -> S {
        assert!(self.is_square(), "determinant of a non-square matrix");
        S::determinant(self)
    }

    /// Solves A x = b; `None` when A is (numerically) singular.
    pub fn solve(&self, b: &[S]) -> Option<Vec<S>> {
        assert!(self.is_square());
        assert_eq!(b.len(), self.rows);
        S::solve_system(self, b)
    }

    pub fn inverse(&self) -> Option<Self> {
        let n = self.rows;
        let mut inv = Self::zeros(n, n);
        for j in 0..n {
            let mut e = vec![S::zero(); n];
            e[j] = S::one();
            let col = self.solve(&e)?;
            for (i, v) in col.into_iter().enumerate() {
                inv[(i, j)] = v;
            }
        }
        Some(inv)
    }

    /// Double image, when every entry has one.
    pub fn to_f64(&self) -> Option<Matrix<f64>> {
        let data = self
            .data
            .iter()
            .map(|v| v.to_f64())
            .collect::<Option<Vec<_>>>()?;
        Some(Matrix::from_vec(self.rows, self.cols, data))
    }

    /// 1-norm condition number of the double image.
    pub fn condition_estimate(&self) -> Option<f64> {
        let a = self.to_f64()?;
        let inv = a.inverse()?;
        Some(a.norm1() * inv.norm1())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix::from_vec(self.rows, self.cols, self.data.iter().map(f).collect())
    }

    pub fn try_map<T: Scalar, E>(&self, f: impl Fn(&S) -> Result<T, E>) -> Result<Matrix<T>, E> {
        let data = self.data.iter().map(f).collect::<Result<Vec<_>, E>>()?;
        Ok(Matrix::from_vec(self.rows, self.cols, data))
    }
}

impl Matrix<f64> {
    pub fn norm1(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot<S: Scalar>(u: &[S], v: &[S]) -> S {
    assert_eq!(u.len(), v.len());
    u.iter()
        .zip(v)
        .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
}

pub fn axpy<S: Scalar>(alpha: &S, x: &[S], y: &[S]) -> Vec<S> {
    x.iter()
        .zip(y)
        .map(|(a, b)| alpha.clone() * a.clone() + b.clone())
        .collect()
}

pub fn scale_vec<S: Scalar>(alpha: &S, x: &[S]) -> Vec<S> {
    x.iter().map(|a| alpha.clone() * a.clone()).collect()
}

pub fn sub_vec<S: Scalar>(x: &[S], y: &[S]) -> Vec<S> {
    x.iter().zip(y).map(|(a, b)| a.clone() - b.clone()).collect()
}

/// Largest absolute component of x − y.
pub fn max_abs_diff<S: Scalar>(x: &[S], y: &[S]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a.clone() - b.clone()).magnitude())
        .fold(0.0, f64::max)
}

pub fn max_abs<S: Scalar>(x: &[S]) -> f64 {
    x.iter().map(Scalar::magnitude).fold(0.0, f64::max)
}

/// Gaussian elimination taking the first nonzero pivot. Exact fields only.
pub(crate) fn gauss_solve<S: Scalar>(a: &Matrix<S>, b: &[S]) -> Option<Vec<S>> {
    let n = a.rows;
    let mut m: Vec<Vec<S>> = (0..n)
        .map(|i| {
            let mut r = a.row(i).to_vec();
            r.push(b[i].clone());
            r
        })
        .collect();
    for k in 0..n {
        let p = (k..n).find(|&i| !m[i][k].is_zero())?;
        m.swap(k, p);
        let piv = m[k][k].clone();
        for i in k + 1..n {
            if m[i][k].is_zero() {
                continue;
            }
            let f = m[i][k].clone() / piv.clone();
            for j in k..=n {
                let v = m[i][j].clone() - f.clone() * m[k][j].clone();
                m[i][j] = v;
            }
        }
    }
    Some(back_substitute(&m))
}

pub(crate) fn gauss_det<S: Scalar>(a: &Matrix<S>) -> S {
    let n = a.rows;
    let mut m = a.to_rows();
    let mut det = S::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !m[i][k].is_zero()) else {
            return S::zero();
        };
        if p != k {
            m.swap(k, p);
            det = -det;
        }
        let piv = m[k][k].clone();
        det = det * piv.clone();
        for i in k + 1..n {
            if m[i][k].is_zero() {
                continue;
            }
            let f = m[i][k].clone() / piv.clone();
            for j in k..n {
                let v = m[i][j].clone() - f.clone() * m[k][j].clone();
                m[i][j] = v;
            }
        }
    }
    det
}

fn back_substitute<S: Scalar>(upper: &[Vec<S>]) -> Vec<S> {
    let n = upper.len();
    let mut x = vec![S::zero(); n];
    for i in (0..n).rev() {
        let mut acc = upper[i][n].clone();
        for j in i + 1..n {
            acc = acc - upper[i][j].clone() * x[j].clone();
        }
        x[i] = acc / upper[i][i].clone();
    }
    x
}

/// LU with partial pivoting on the augmented system.
pub(crate) fn lu_solve(a: &Matrix<f64>, b: &[f64]) -> Option<Vec<f64>> {
    let n = a.rows;
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut r = a.row(i).to_vec();
            r.push(b[i]);
            r
        })
        .collect();
    let mut scale: Vec<f64> = (0..n)
        .map(|i| a.row(i).iter().fold(0.0_f64, |s, v| s.max(v.abs())))
        .collect();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs()))
            .expect("non-empty pivot range");
        let piv = m[p][k];
        if !piv.is_finite() || scale[p] == 0.0 || piv.abs() < SINGULAR_PIVOT_RATIO * scale[p] {
            return None;
        }
        m.swap(k, p);
        scale.swap(k, p);
        for i in k + 1..n {
            let f = m[i][k] / piv;
            if f == 0.0 {
                continue;
            }
            for j in k..=n {
                m[i][j] -= f * m[k][j];
            }
        }
    }
    let x = back_substitute(&m);
    x.iter().all(|v| v.is_finite()).then_some(x)
}

pub(crate) fn lu_det(a: &Matrix<f64>) -> f64 {
    let n = a.rows;
    let mut m = a.to_rows();
    let mut det = 1.0;
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs()))
            .expect("non-empty pivot range");
        if m[p][k] == 0.0 {
            return 0.0;
        }
        if p != k {
            m.swap(k, p);
            det = -det;
        }
        det *= m[k][k];
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            for j in k..n {
                m[i][j] -= f * m[k][j];
            }
        }
    }
    det
}

/// Clears denominators row by row. Returns the integer rows and the
/// per-row multipliers.
fn integer_rows(rows: &[Vec<Rational>]) -> (Vec<Vec<BigInt>>, Vec<BigInt>) {
    let mut out = Vec::with_capacity(rows.len());
    let mut mult = Vec::with_capacity(rows.len());
    for row in rows {
        let l = row
            .iter()
            .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        out.push(
            row.iter()
                .map(|v| v.numer() * (&l / v.denom()))
                .collect(),
        );
        mult.push(l);
    }
    (out, mult)
}

/// In-place Bareiss elimination over the first `n` columns. Returns the
/// row-swap sign, or `None` when a zero column is met.
fn bareiss(m: &mut [Vec<BigInt>], n: usize) -> Option<i32> {
    let width = m.first().map_or(0, Vec::len);
    let mut sign = 1;
    let mut prev = BigInt::one();
    for k in 0..n {
        let p = (k..n).find(|&i| !m[i][k].is_zero())?;
        if p != k {
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..width {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    Some(sign)
}

/// Fraction-free Gaussian elimination for exact rational systems.
pub(crate) fn bareiss_solve(a: &Matrix<Rational>, b: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.rows;
    let aug: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            let mut r = a.row(i).to_vec();
            r.push(b[i].clone());
            r
        })
        .collect();
    let (mut m, _) = integer_rows(&aug);
    bareiss(&mut m, n)?;
    let upper: Vec<Vec<Rational>> = m
        .into_iter()
        .map(|r| r.into_iter().map(Rational::from_integer).collect())
        .collect();
    Some(back_substitute(&upper))
}

pub(crate) fn bareiss_det(a: &Matrix<Rational>) -> Rational {
    let n = a.rows;
    if n == 0 {
        return Rational::one();
    }
    let (mut m, mult) = integer_rows(&a.to_rows());
    let Some(sign) = bareiss(&mut m, n) else {
        return Rational::zero();
    };
    let scale = mult.iter().fold(BigInt::one(), |acc, v| acc * v);
    let det = Rational::new(m[n - 1][n - 1].clone(), scale);
    if sign < 0 {
        -det
    } else {
        det
    }
}

/// True when |det| is zero (exact) or tiny relative to the entries (double).
pub fn det_is_negligible<S: Scalar>(det: &S, a: &Matrix<S>) -> bool {
    if S::EXACT {
        return det.is_zero();
    }
    let n = a.rows() as i32;
    let scale = a
        .to_f64()
        .map(|m| m.max_abs().max(1.0))
        .unwrap_or(1.0);
    det.magnitude() < SINGULAR_PIVOT_RATIO * scale.powi(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Mod61;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn qm(rows: &[&[(i64, i64)]]) -> Matrix<Rational> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&(n, d)| q(n, d)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn bareiss_matches_hand_solution() {
        // 2x + y = 3, x + 3y = 5  ->  x = 4/5, y = 7/5
        let a = qm(&[&[(2, 1), (1, 1)], &[(1, 1), (3, 1)]]);
        let x = a.solve(&[q(3, 1), q(5, 1)]).unwrap();
        assert_eq!(x, vec![q(4, 5), q(7, 5)]);
        assert_eq!(a.det(), q(5, 1));
    }

    #[test]
    fn bareiss_with_fractions_and_swap() {
        let a = qm(&[
            &[(0, 1), (1, 2), (1, 3)],
            &[(1, 4), (0, 1), (2, 1)],
            &[(3, 1), (1, 5), (0, 1)],
        ]);
        let b = vec![q(1, 1), q(-1, 2), q(2, 7)];
        let x = a.solve(&b).unwrap();
        assert_eq!(a.mul_vec(&x), b);
        assert_eq!(a.det(), gauss_det(&a));
        let inv = a.inverse().unwrap();
        assert_eq!(a.matmul(&inv), Matrix::identity(3));
    }

    #[test]
    fn singular_detected_in_every_mode() {
        let a = qm(&[&[(1, 1), (2, 1)], &[(2, 1), (4, 1)]]);
        assert!(a.solve(&[q(1, 1), q(1, 1)]).is_none());
        assert_eq!(a.det(), q(0, 1));

        let f = Matrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(f.solve(&[1.0, 1.0]).is_none());

        let tiny = Matrix::from_rows(vec![vec![1.0, 1.0], vec![1.0, 1.0 + 1e-15]]).unwrap();
        assert!(tiny.solve(&[1.0, 2.0]).is_none());

        let p = a.map(|v| Mod61::from_rational(v).unwrap());
        assert!(p.solve(&[Mod61::one(), Mod61::one()]).is_none());
        assert!(p.det().is_zero());
    }

    #[test]
    fn lu_agrees_with_rational_image() {
        let a = qm(&[&[(3, 1), (1, 7), (2, 1)], &[(1, 2), (5, 1), (1, 1)], &[(1, 1), (1, 3), (4, 1)]]);
        let b = vec![q(1, 1), q(2, 1), q(3, 1)];
        let exact = a.solve(&b).unwrap();
        let af = a.to_f64().unwrap();
        let approx = af.solve(&[1.0, 2.0, 3.0]).unwrap();
        for (e, x) in exact.iter().zip(&approx) {
            assert!((e.to_f64().unwrap() - x).abs() < 1e-14);
        }
        assert!((a.det().to_f64().unwrap() - af.det()).abs() < 1e-12);
        assert!(a.condition_estimate().unwrap() >= 1.0);
    }

    #[test]
    fn antisymmetry() {
        let k = qm(&[&[(0, 1), (1, 1)], &[(-1, 1), (0, 1)]]);
        assert!(k.is_antisymmetric());
        assert!(!Matrix::<Rational>::identity(2).is_antisymmetric());
    }
}
