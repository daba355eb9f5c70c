//! Seeded generators for fields, Hamiltonians and windows.
//!
//! Everything is drawn from small rationals ±p/q with p, q in 1..=5, so the
//! same seed reproduces the same case in every scalar mode.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::Matrix;
use crate::polarmap::Point;
use crate::polyfield::{Monomial, PolyVectorField, ScalarPoly};
use crate::scalar::{Rational, Scalar};

pub type CaseRng = ChaCha8Rng;

pub fn case_rng(seed: u64) -> CaseRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// ±p/q with p, q uniform in 1..=5.
pub fn small_rational(rng: &mut CaseRng) -> Rational {
    let p: i64 = rng.random_range(1..=5);
    let q: i64 = rng.random_range(1..=5);
    let sign = if rng.random_bool(0.5) { 1 } else { -1 };
    Rational::from_ratio(sign * p, q)
}

/// All exponent vectors of total degree `d` in `n` variables, in
/// lexicographic order.
pub fn exponents_of_degree(n: usize, d: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == n {
            prefix.push(d);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=d).rev() {
            prefix.push(e);
            rec(n, d - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(n, d, &mut Vec::new(), &mut out);
    }
    out
}

fn random_terms(rng: &mut CaseRng, n: usize, degrees: &[u32], keep: f64) -> Vec<Monomial<Rational>> {
    let mut terms = Vec::new();
    for e in degrees.iter().flat_map(|&d| exponents_of_degree(n, d)) {
        if rng.random_bool(keep) {
            terms.push(Monomial::new(small_rational(rng), e));
        }
    }
    terms
}

/// Homogeneous field of degree `d`, nonzero, each monomial kept with
/// probability ½.
pub fn random_field(rng: &mut CaseRng, n: usize, d: u32) -> PolyVectorField<Rational> {
    loop {
        let components = (0..n).map(|_| random_terms(rng, n, &[d], 0.5)).collect();
        let f = PolyVectorField::new(n, components).expect("consistent exponents");
        if !f.is_zero() {
            return f;
        }
    }
}

/// Field with a nonzero quadratic part and random linear and constant parts.
pub fn random_quadratic_field(rng: &mut CaseRng, n: usize) -> PolyVectorField<Rational> {
    loop {
        let components = (0..n).map(|_| random_terms(rng, n, &[0, 1, 2], 0.5)).collect();
        let f = PolyVectorField::new(n, components).expect("consistent exponents");
        if f.degree() == Some(2) && f.homogeneous_degree().is_none() {
            return f;
        }
    }
}

/// Nonzero homogeneous Hamiltonian of degree `d`.
pub fn random_hamiltonian(rng: &mut CaseRng, n: usize, d: u32) -> ScalarPoly<Rational> {
    loop {
        let h = ScalarPoly::new(n, random_terms(rng, n, &[d], 0.6)).expect("consistent exponents");
        if !h.is_zero() {
            return h;
        }
    }
}

/// Σ (ℓᵢ·x)^d over n + 1 random linear forms, for even `d`. Positive
/// definite with probability one, which keeps Hamiltonian orbits bounded.
pub fn random_definite_hamiltonian(rng: &mut CaseRng, n: usize, d: u32) -> ScalarPoly<Rational> {
    assert!(d % 2 == 0, "definite forms need even degree");
    let mut acc: Vec<Monomial<Rational>> = Vec::new();
    for _ in 0..=n {
        let l: Vec<Rational> = (0..n).map(|_| small_rational(rng)).collect();
        // expand (l·x)^d by multinomial coefficients
        for e in exponents_of_degree(n, d) {
            let weight = Rational::from_integer(crate::polarize::multinomial(&e));
            let c = e.iter().zip(&l).fold(weight, |c, (&ei, li)| c * li.pow_u32(ei));
            acc.push(Monomial::new(c, e));
        }
    }
    ScalarPoly::new(n, acc).expect("consistent exponents")
}

/// Invertible antisymmetric structure matrix; `n` must be even.
pub fn random_structure(rng: &mut CaseRng, n: usize) -> Matrix<Rational> {
    assert!(n % 2 == 0, "invertible antisymmetric matrices need even size");
    loop {
        let mut k = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                let v = small_rational(rng);
                k[(i, j)] = v.clone();
                k[(j, i)] = -v;
            }
        }
        if !k.det().is_zero() {
            return k;
        }
    }
}

pub fn random_point(rng: &mut CaseRng, n: usize) -> Point<Rational> {
    (0..n).map(|_| small_rational(rng)).collect()
}

pub fn random_points(rng: &mut CaseRng, n: usize, k: usize) -> Vec<Point<Rational>> {
    (0..k).map(|_| random_point(rng, n)).collect()
}

/// k factors with product one; the last is fixed by the others.
pub fn unit_product_scaling(rng: &mut CaseRng, k: usize) -> Vec<Rational> {
    let mut lambdas: Vec<Rational> = (0..k.saturating_sub(1)).map(|_| small_rational(rng)).collect();
    let product = lambdas.iter().fold(Rational::from_i64(1), |acc, l| acc * l.clone());
    lambdas.push(Rational::from_i64(1) / product);
    lambdas
}

/// Converts a rational case into another scalar mode.
pub fn convert_point<S: Scalar>(p: &[Rational]) -> crate::error::Result<Point<S>> {
    p.iter().map(S::from_rational).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_enumeration() {
        assert_eq!(exponents_of_degree(2, 2), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(exponents_of_degree(3, 3).len(), 10);
        assert_eq!(exponents_of_degree(1, 4), vec![vec![4]]);
    }

    #[test]
    fn same_seed_same_case() {
        let a = random_field(&mut case_rng(7), 3, 3);
        let b = random_field(&mut case_rng(7), 3, 3);
        assert_eq!(a, b);
        assert!(a.is_homogeneous_of(3));
    }

    #[test]
    fn generated_shapes() {
        let mut rng = case_rng(1);
        let k = random_structure(&mut rng, 4);
        assert!(k.is_antisymmetric() && !k.det().is_zero());
        let f = random_quadratic_field(&mut rng, 3);
        assert_eq!(f.degree(), Some(2));
        let l = unit_product_scaling(&mut rng, 3);
        assert_eq!(l.iter().fold(Rational::from_i64(1), |a, b| a * b.clone()), Rational::from_i64(1));
        let h = random_definite_hamiltonian(&mut rng, 2, 4);
        assert!(h.is_homogeneous_of(4));
        assert!(h.evaluate(&random_point(&mut rng, 2)).unwrap() > Rational::from_i64(0));
    }
}
