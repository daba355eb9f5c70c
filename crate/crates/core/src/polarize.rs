//! Symmetric multilinear forms obtained by polarizing homogeneous
//! polynomials.
//!
//! A homogeneous degree-m polynomial term `c·x^e` polarizes to
//! `c / multinomial(m; e)` times the sum over every distinct way of
//! assigning the m argument slots to the variables of `x^e` (variable i
//! taking exactly `e_i` slots). Only that one symmetric coefficient per
//! multi-index is stored; the assignments are enumerated on the fly as
//! multiset permutations.

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::polyfield::{Monomial, PolyVectorField, ScalarPoly};
use crate::scalar::{Rational, Scalar};

#[derive(Debug, Clone, PartialEq)]
struct FormTerm<S> {
    exponents: Vec<u32>,
    coeff: S,
    /// Variable index of each factor, sorted; length = order.
    slots: Vec<usize>,
}

/// Symmetric m-linear form V^m → R^arity.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMultilinearForm<S> {
    order: usize,
    dim: usize,
    scalar_valued: bool,
    outputs: Vec<Vec<FormTerm<S>>>,
}

/// m! / ∏ e_i!, exactly.
pub fn multinomial(exponents: &[u32]) -> BigInt {
    let m: u32 = exponents.iter().sum();
    let fact = |n: u32| (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i));
    exponents.iter().fold(fact(m), |acc, &e| acc / fact(e))
}

/// Rearranges `v` into the next lexicographic permutation; false once the
/// last one has been reached. Repeated entries give distinct permutations
/// only.
fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

fn check_args<S, A: AsRef<[S]>>(args: &[A], expected: usize, dim: usize) -> Result<()> {
    if args.len() != expected {
        return Err(Error::Arity {
            expected,
            found: args.len(),
        });
    }
    match args.iter().find(|a| a.as_ref().len() != dim) {
        Some(a) => Err(Error::DimensionMismatch {
            expected: dim,
            found: a.as_ref().len(),
        }),
        None => Ok(()),
    }
}

impl<S: Scalar> SymMultilinearForm<S> {
    fn from_rows(dim: usize, rows: &[Vec<Monomial<S>>], order: usize, scalar_valued: bool) -> Result<Self> {
        let outputs = rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|t| {
                        if t.degree() as usize != order {
                            return Err(Error::NotHomogeneous {
                                expected: Some(order as u32),
                            });
                        }
                        let weight = S::from_rational(&Rational::from_integer(multinomial(&t.exponents)))?;
                        let slots = t
                            .exponents
                            .iter()
                            .enumerate()
                            .flat_map(|(i, &e)| std::iter::repeat_n(i, e as usize))
                            .collect();
                        Ok(FormTerm {
                            exponents: t.exponents.clone(),
                            coeff: t.coeff.clone() / weight,
                            slots,
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SymMultilinearForm {
            order,
            dim,
            scalar_valued,
            outputs,
        })
    }

    /// Polarizes a homogeneous field of known degree. The zero field is
    /// accepted at any order.
    pub fn from_field(f: &PolyVectorField<S>, order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::Invalid("polarization order must be at least 1".into()));
        }
        Self::from_rows(f.dim(), f.components(), order, false)
    }

    /// Polarizes a homogeneous scalar polynomial (output arity 1).
    pub fn from_scalar(h: &ScalarPoly<S>, order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::Invalid("polarization order must be at least 1".into()));
        }
        Self::from_rows(h.dim(), &[h.monomials().to_vec()], order, true)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn output_arity(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_scalar_valued(&self) -> bool {
        self.scalar_valued
    }

    /// Form multiplied by a constant.
    pub fn scaled(&self, factor: &S) -> Self {
        let mut out = self.clone();
        for term in out.outputs.iter_mut().flatten() {
            term.coeff = term.coeff.clone() * factor.clone();
        }
        out
    }

    /// Symmetric coefficients per output component, in canonical order.
    pub fn coefficients(&self) -> Vec<Vec<(Vec<u32>, S)>> {
        self.outputs
            .iter()
            .map(|row| row.iter().map(|t| (t.exponents.clone(), t.coeff.clone())).collect())
            .collect()
    }

    /// Every distinct slot → variable assignment of one stored term.
    pub fn assignments(exponents: &[u32]) -> Vec<Vec<usize>> {
        let mut slots: Vec<usize> = exponents
            .iter()
            .enumerate()
            .flat_map(|(i, &e)| std::iter::repeat_n(i, e as usize))
            .collect();
        let mut out = vec![slots.clone()];
        while next_permutation(&mut slots) {
            out.push(slots.clone());
        }
        out
    }

    /// Fixes the first `order − free` slots and accumulates the remaining
    /// `free` slots into a dense tensor of shape arity × n^free.
    fn contract<A: AsRef<[S]>>(&self, fixed: &[A], free: usize) -> Vec<S> {
        let n = self.dim;
        let width = n.pow(free as u32);
        let mut out = vec![S::zero(); self.outputs.len() * width];
        let nfixed = self.order - free;
        for (o, row) in self.outputs.iter().enumerate() {
            for term in row {
                let mut perm = term.slots.clone();
                loop {
                    let mut prod = term.coeff.clone();
                    for (s, &var) in perm[..nfixed].iter().enumerate() {
                        prod = prod * fixed[s].as_ref()[var].clone();
                        if prod.is_zero() {
                            break;
                        }
                    }
                    if !prod.is_zero() {
                        let idx = perm[nfixed..].iter().fold(0, |acc, &v| acc * n + v);
                        let slot = &mut out[o * width + idx];
                        *slot = slot.clone() + prod;
                    }
                    if !next_permutation(&mut perm) {
                        break;
                    }
                }
            }
        }
        out
    }

    /// F(args[0], …, args[m−1]).
    pub fn eval<A: AsRef<[S]>>(&self, args: &[A]) -> Result<Vec<S>> {
        check_args(args, self.order, self.dim)?;
        Ok(self.contract(args, 0))
    }

    /// Matrix M with F(args…, v) = M v. Requires order − 1 arguments.
    pub fn contract_to_matrix<A: AsRef<[S]>>(&self, args: &[A]) -> Result<Matrix<S>> {
        check_args(args, self.order - 1, self.dim)?;
        let data = self.contract(args, 1);
        Ok(Matrix::from_vec(self.outputs.len(), self.dim, data))
    }

    /// Symmetric S with uᵀ S v = F(args…, u, v) for a scalar form.
    /// Requires order − 2 arguments.
    pub fn contract_to_bilinear<A: AsRef<[S]>>(&self, args: &[A]) -> Result<Matrix<S>> {
        if !self.scalar_valued {
            return Err(Error::Invalid("bilinear contraction needs a scalar-valued form".into()));
        }
        if self.order < 2 {
            return Err(Error::Arity {
                expected: 2,
                found: self.order,
            });
        }
        check_args(args, self.order - 2, self.dim)?;
        let data = self.contract(args, 2);
        Ok(Matrix::from_vec(self.dim, self.dim, data))
    }
}

/// Polarizes a homogeneous field, inferring the order from its degree.
pub fn polarize<S: Scalar>(f: &PolyVectorField<S>) -> Result<SymMultilinearForm<S>> {
    let d = f.homogeneous_degree().ok_or(Error::NotHomogeneous { expected: None })?;
    SymMultilinearForm::from_field(f, d as usize)
}

/// Inclusion–exclusion evaluation of the polarization of f:
///
/// F(x_0..x_k) = 1/(k+1)! Σ_{∅≠S} (−1)^{k+1−|S|} |S|^{k+1} f(mean of x_S)
///
/// This evaluates f at 2^{k+1} − 1 averaged points and never builds the
/// form. It serves as an independent check of [`SymMultilinearForm`].
pub fn eval_form_subsets<S: Scalar, A: AsRef<[S]>>(f: &PolyVectorField<S>, args: &[A]) -> Result<Vec<S>> {
    let m = args.len();
    if m == 0 {
        return Err(Error::Arity { expected: 1, found: 0 });
    }
    if !f.is_homogeneous_of(m as u32) {
        return Err(Error::NotHomogeneous {
            expected: Some(m as u32),
        });
    }
    check_args(args, m, f.dim())?;
    subset_sum(m, f.dim(), args, |x| f.evaluate(x))
}

/// Scalar-polynomial counterpart of [`eval_form_subsets`].
pub fn eval_scalar_form_subsets<S: Scalar, A: AsRef<[S]>>(h: &ScalarPoly<S>, args: &[A]) -> Result<S> {
    let m = args.len();
    if m == 0 {
        return Err(Error::Arity { expected: 1, found: 0 });
    }
    if !h.is_homogeneous_of(m as u32) {
        return Err(Error::NotHomogeneous {
            expected: Some(m as u32),
        });
    }
    check_args(args, m, h.dim())?;
    let v = subset_sum(m, h.dim(), args, |x| Ok(vec![h.evaluate(x)?]))?;
    Ok(v.into_iter().next().expect("one output"))
}

fn subset_sum<S: Scalar, A: AsRef<[S]>>(
    m: usize,
    n: usize,
    args: &[A],
    f: impl Fn(&[S]) -> Result<Vec<S>>,
) -> Result<Vec<S>> {
    let mut total: Option<Vec<S>> = None;
    for mask in 1u64..(1u64 << m) {
        let size = mask.count_ones() as i64;
        let mut point = vec![S::zero(); n];
        for (i, a) in args.iter().enumerate() {
            if mask >> i & 1 == 1 {
                for (p, v) in point.iter_mut().zip(a.as_ref()) {
                    *p = p.clone() + v.clone();
                }
            }
        }
        let inv = S::from_ratio(1, size);
        let point: Vec<S> = point.into_iter().map(|p| p * inv.clone()).collect();
        let mut weight = S::from_i64(size).pow_u32(m as u32);
        if (m as i64 - size) % 2 == 1 {
            weight = -weight;
        }
        let value = f(&point)?;
        let contrib = value.into_iter().map(|v| v * weight.clone());
        total = Some(match total {
            None => contrib.collect(),
            Some(t) => t.into_iter().zip(contrib).map(|(a, b)| a + b).collect(),
        });
    }
    let fact = (1..=m as i64).fold(S::one(), |acc, i| acc * S::from_i64(i));
    Ok(total
        .expect("at least one subset")
        .into_iter()
        .map(|v| v / fact.clone())
        .collect())
}
