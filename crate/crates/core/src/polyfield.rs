//! Polynomial vector fields and scalar polynomials in monomial form.
//!
//! Monomials are kept in canonical order (lexicographic on exponent
//! vectors) with duplicates merged and zero coefficients dropped, so two
//! equal polynomials have equal representations.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Monomial<S> {
    pub coeff: S,
    pub exponents: Vec<u32>,
}

impl<S: Scalar> Monomial<S> {
    pub fn new(coeff: S, exponents: Vec<u32>) -> Self {
        Monomial { coeff, exponents }
    }

    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }

    pub fn eval(&self, x: &[S]) -> S {
        self.exponents
            .iter()
            .zip(x)
            .fold(self.coeff.clone(), |acc, (&e, xi)| acc * xi.pow_u32(e))
    }
}

fn canonicalize<S: Scalar>(mut terms: Vec<Monomial<S>>) -> Vec<Monomial<S>> {
    terms.sort_by(|a, b| a.exponents.cmp(&b.exponents));
    let mut out: Vec<Monomial<S>> = Vec::with_capacity(terms.len());
    for t in terms {
        match out.last_mut() {
            Some(last) if last.exponents == t.exponents => {
                last.coeff = last.coeff.clone() + t.coeff;
            }
            _ => out.push(t),
        }
    }
    out.retain(|t| !t.coeff.is_zero());
    out
}

fn check_lengths<S>(dim: usize, terms: &[Monomial<S>]) -> Result<()> {
    match terms.iter().find(|t| t.exponents.len() != dim) {
        Some(t) => Err(Error::DimensionMismatch {
            expected: dim,
            found: t.exponents.len(),
        }),
        None => Ok(()),
    }
}

fn eval_terms<S: Scalar>(terms: &[Monomial<S>], x: &[S]) -> S {
    terms.iter().fold(S::zero(), |acc, t| acc + t.eval(x))
}

/// Degree shared by every term, or `None` when degrees differ or there
/// are no terms.
fn common_degree<'a, S: Scalar + 'a>(mut terms: impl Iterator<Item = &'a Monomial<S>>) -> Option<u32> {
    let d = terms.next()?.degree();
    terms.all(|t| t.degree() == d).then_some(d)
}

/// A polynomial map R^n → R^n.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyVectorField<S> {
    dim: usize,
    components: Vec<Vec<Monomial<S>>>,
}

impl<S: Scalar> PolyVectorField<S> {
    pub fn new(dim: usize, components: Vec<Vec<Monomial<S>>>) -> Result<Self> {
        if components.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: components.len(),
            });
        }
        for c in &components {
            check_lengths(dim, c)?;
        }
        Ok(PolyVectorField {
            dim,
            components: components.into_iter().map(canonicalize).collect(),
        })
    }

    pub fn zero(dim: usize) -> Self {
        PolyVectorField {
            dim,
            components: vec![Vec::new(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[Vec<Monomial<S>>] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Vec::is_empty)
    }

    fn terms(&self) -> impl Iterator<Item = &Monomial<S>> {
        self.components.iter().flatten()
    }

    pub fn evaluate(&self, x: &[S]) -> Result<Vec<S>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(self.components.iter().map(|c| eval_terms(c, x)).collect())
    }

    /// Largest monomial degree; `None` for the zero field.
    pub fn degree(&self) -> Option<u32> {
        self.terms().map(Monomial::degree).max()
    }

    pub fn homogeneous_degree(&self) -> Option<u32> {
        common_degree(self.terms())
    }

    /// The zero field counts as homogeneous of every degree.
    pub fn is_homogeneous_of(&self, d: u32) -> bool {
        self.terms().all(|t| t.degree() == d)
    }

    /// Splits into homogeneous parts keyed by degree.
    pub fn degree_split(&self) -> BTreeMap<u32, PolyVectorField<S>> {
        let mut parts: BTreeMap<u32, Vec<Vec<Monomial<S>>>> = BTreeMap::new();
        for (i, comp) in self.components.iter().enumerate() {
            for t in comp {
                parts
                    .entry(t.degree())
                    .or_insert_with(|| vec![Vec::new(); self.dim])[i]
                    .push(t.clone());
            }
        }
        parts
            .into_iter()
            .map(|(d, comps)| {
                (
                    d,
                    PolyVectorField {
                        dim: self.dim,
                        components: comps,
                    },
                )
            })
            .collect()
    }

    /// Homogenizes to degree max(deg f, 1) in one extra coordinate.
    pub fn homogenize(&self) -> PolyVectorField<S> {
        let d = self.degree().unwrap_or(0).max(1);
        self.homogenize_to(d).expect("degree bound holds by construction")
    }

    /// Appends a coordinate w with ẇ = 0 and multiplies every degree-m
    /// monomial by w^(d−m).
    pub fn homogenize_to(&self, d: u32) -> Result<PolyVectorField<S>> {
        if let Some(max) = self.degree() {
            if max > d {
                return Err(Error::Invalid(format!(
                    "cannot homogenize a degree-{max} field to degree {d}"
                )));
            }
        }
        let mut components: Vec<Vec<Monomial<S>>> = self
            .components
            .iter()
            .map(|c| {
                c.iter()
                    .map(|t| {
                        let mut e = t.exponents.clone();
                        e.push(d - t.degree());
                        Monomial::new(t.coeff.clone(), e)
                    })
                    .collect()
            })
            .collect();
        components.push(Vec::new());
        PolyVectorField::new(self.dim + 1, components)
    }

    /// Matrix of the degree-1 part.
    pub fn linear_part(&self) -> Matrix<S> {
        let mut b: Matrix<S> = Matrix::zeros(self.dim, self.dim);
        for (i, comp) in self.components.iter().enumerate() {
            for t in comp.iter().filter(|t| t.degree() == 1) {
                let j = t.exponents.iter().position(|&e| e == 1).expect("degree-1 term");
                b[(i, j)] = b[(i, j)].clone() + t.coeff.clone();
            }
        }
        b
    }

    /// Degree-0 part as a vector.
    pub fn constant_part(&self) -> Vec<S> {
        self.components
            .iter()
            .map(|c| {
                c.iter()
                    .filter(|t| t.degree() == 0)
                    .fold(S::zero(), |acc, t| acc + t.coeff.clone())
            })
            .collect()
    }

    /// Field x ↦ A f(x).
    pub fn apply_matrix(&self, a: &Matrix<S>) -> Result<PolyVectorField<S>> {
        if a.cols() != self.dim || a.rows() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: a.cols(),
            });
        }
        let mut components = vec![Vec::new(); self.dim];
        for (i, out) in components.iter_mut().enumerate() {
            for (j, comp) in self.components.iter().enumerate() {
                let aij = &a[(i, j)];
                if aij.is_zero() {
                    continue;
                }
                out.extend(
                    comp.iter()
                        .map(|t| Monomial::new(aij.clone() * t.coeff.clone(), t.exponents.clone())),
                );
            }
        }
        PolyVectorField::new(self.dim, components)
    }

    pub fn try_map_coeffs<T: Scalar>(&self, f: impl Fn(&S) -> Result<T>) -> Result<PolyVectorField<T>> {
        let components = self
            .components
            .iter()
            .map(|c| {
                c.iter()
                    .map(|t| Ok(Monomial::new(f(&t.coeff)?, t.exponents.clone())))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        PolyVectorField::new(self.dim, components)
    }

    pub fn from_spec(spec: &FieldSpec) -> Result<Self> {
        let components = spec
            .components
            .iter()
            .map(|c| c.iter().map(MonomialSpec::to_monomial).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(spec.dimension, components)
    }

    pub fn to_spec(&self) -> FieldSpec {
        FieldSpec {
            dimension: self.dim,
            components: self
                .components
                .iter()
                .map(|c| c.iter().map(MonomialSpec::from_monomial).collect())
                .collect(),
        }
    }

    /// Parses the JSON field description.
    pub fn parse(text: &str) -> Result<Self> {
        let spec: FieldSpec =
            serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        Self::from_spec(&spec)
    }
}

/// A scalar polynomial R^n → R, such as a Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarPoly<S> {
    dim: usize,
    monomials: Vec<Monomial<S>>,
}

impl<S: Scalar> ScalarPoly<S> {
    pub fn new(dim: usize, monomials: Vec<Monomial<S>>) -> Result<Self> {
        check_lengths(dim, &monomials)?;
        Ok(ScalarPoly {
            dim,
            monomials: canonicalize(monomials),
        })
    }

    pub fn zero(dim: usize) -> Self {
        ScalarPoly {
            dim,
            monomials: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn monomials(&self) -> &[Monomial<S>] {
        &self.monomials
    }

    pub fn is_zero(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn evaluate(&self, x: &[S]) -> Result<S> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(eval_terms(&self.monomials, x))
    }

    pub fn degree(&self) -> Option<u32> {
        self.monomials.iter().map(Monomial::degree).max()
    }

    pub fn homogeneous_degree(&self) -> Option<u32> {
        common_degree(self.monomials.iter())
    }

    pub fn is_homogeneous_of(&self, d: u32) -> bool {
        self.monomials.iter().all(|t| t.degree() == d)
    }

    /// Exact partial derivative in coordinate i.
    pub fn partial(&self, i: usize) -> ScalarPoly<S> {
        let monomials = self
            .monomials
            .iter()
            .filter(|t| t.exponents[i] > 0)
            .map(|t| {
                let mut e = t.exponents.clone();
                let p = e[i];
                e[i] -= 1;
                Monomial::new(t.coeff.clone() * S::from_i64(p as i64), e)
            })
            .collect();
        ScalarPoly::new(self.dim, monomials).expect("exponent lengths preserved")
    }

    pub fn gradient(&self) -> PolyVectorField<S> {
        let components = (0..self.dim).map(|i| self.partial(i).monomials).collect();
        PolyVectorField {
            dim: self.dim,
            components,
        }
    }

    /// Exact Hessian matrix evaluated at x.
    pub fn hessian_at(&self, x: &[S]) -> Result<Matrix<S>> {
        let mut h = Matrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            let di = self.partial(i);
            for j in 0..self.dim {
                h[(i, j)] = di.partial(j).evaluate(x)?;
            }
        }
        Ok(h)
    }

    pub fn try_map_coeffs<T: Scalar>(&self, f: impl Fn(&S) -> Result<T>) -> Result<ScalarPoly<T>> {
        let monomials = self
            .monomials
            .iter()
            .map(|t| Ok(Monomial::new(f(&t.coeff)?, t.exponents.clone())))
            .collect::<Result<Vec<_>>>()?;
        ScalarPoly::new(self.dim, monomials)
    }

    pub fn from_specs(dim: usize, monomials: &[MonomialSpec]) -> Result<Self> {
        let terms = monomials
            .iter()
            .map(MonomialSpec::to_monomial)
            .collect::<Result<Vec<_>>>()?;
        Self::new(dim, terms)
    }

    pub fn to_specs(&self) -> Vec<MonomialSpec> {
        self.monomials.iter().map(MonomialSpec::from_monomial).collect()
    }
}

/// One monomial in the JSON description; the coefficient stays a raw JSON
/// value until the scalar mode is known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonomialSpec {
    pub coeff: Value,
    pub exponents: Vec<u32>,
}

impl MonomialSpec {
    pub fn to_monomial<S: Scalar>(&self) -> Result<Monomial<S>> {
        Ok(Monomial::new(S::parse_json(&self.coeff)?, self.exponents.clone()))
    }

    pub fn from_monomial<S: Scalar>(m: &Monomial<S>) -> Self {
        MonomialSpec {
            coeff: m.coeff.to_json(),
            exponents: m.exponents.clone(),
        }
    }
}

/// `{"dimension": n, "components": [[{"coeff", "exponents"}, ...], ...]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub dimension: usize,
    pub components: Vec<Vec<MonomialSpec>>,
}

/// `{"dimension": n, "monomials": [...], "K": [[...], ...]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianFileSpec {
    pub dimension: usize,
    pub monomials: Vec<MonomialSpec>,
    #[serde(rename = "K")]
    pub structure: Vec<Vec<Value>>,
}

impl HamiltonianFileSpec {
    pub fn structure_matrix<S: Scalar>(&self) -> Result<Matrix<S>> {
        if self.structure.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                found: self.structure.len(),
            });
        }
        let rows = self
            .structure
            .iter()
            .map(|r| {
                if r.len() != self.dimension {
                    return Err(Error::DimensionMismatch {
                        expected: self.dimension,
                        found: r.len(),
                    });
                }
                r.iter().map(S::parse_json).collect::<Result<Vec<S>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Matrix::from_rows(rows).ok_or_else(|| Error::Malformed("ragged K".into()))
    }

    pub fn hamiltonian<S: Scalar>(&self) -> Result<ScalarPoly<S>> {
        ScalarPoly::from_specs(self.dimension, &self.monomials)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn mono(c: i64, e: &[u32]) -> Monomial<Rational> {
        Monomial::new(q(c, 1), e.to_vec())
    }

    #[test]
    fn parse_worked_monomial() {
        let f = PolyVectorField::<Rational>::parse(
            r#"{"dimension": 3, "components": [[{"coeff": 3, "exponents": [2,1,0]}], [], []]}"#,
        )
        .unwrap();
        assert_eq!(f.components()[0], vec![mono(3, &[2, 1, 0])]);
        assert!(f.components()[1].is_empty() && f.components()[2].is_empty());
        // coordinates are (y, z, w): 3 y^2 z
        assert_eq!(f.evaluate(&[q(1, 1), q(2, 1), q(1, 1)]).unwrap(), vec![q(6, 1), q(0, 1), q(0, 1)]);
        assert_eq!(f.evaluate(&[q(1, 1), q(1, 1), q(2, 1)]).unwrap(), vec![q(3, 1), q(0, 1), q(0, 1)]);
    }

    #[test]
    fn parse_zero_and_cancellation() {
        let z = PolyVectorField::<Rational>::parse(r#"{"dimension": 2, "components": [[], []]}"#).unwrap();
        assert!(z.is_zero());
        assert_eq!(z.evaluate(&[q(3, 1), q(-1, 2)]).unwrap(), vec![q(0, 1); 2]);

        let c = PolyVectorField::<Rational>::parse(
            r#"{"dimension": 1, "components": [[{"coeff": 1, "exponents": [2]}, {"coeff": "-1", "exponents": [2]}]]}"#,
        )
        .unwrap();
        assert!(c.components()[0].is_empty());
    }

    #[test]
    fn parse_canonical_order_and_merge() {
        let f = PolyVectorField::<Rational>::parse(
            r#"{"dimension": 2, "components": [[
                {"coeff": "1/2", "exponents": [0,2]},
                {"coeff": 1, "exponents": [2,0]},
                {"coeff": "1/2", "exponents": [0,2]}], []]}"#,
        )
        .unwrap();
        assert_eq!(f.components()[0], vec![mono(1, &[0, 2]), mono(1, &[2, 0])]);
    }

    #[test]
    fn parse_errors() {
        let bad_len = PolyVectorField::<Rational>::parse(
            r#"{"dimension": 2, "components": [[{"coeff": 1, "exponents": [1,0,0]}], []]}"#,
        );
        assert!(matches!(bad_len, Err(Error::DimensionMismatch { expected: 2, found: 3 })));
        let bad_coeff = PolyVectorField::<Rational>::parse(
            r#"{"dimension": 1, "components": [[{"coeff": "x", "exponents": [1]}]]}"#,
        );
        assert!(matches!(bad_coeff, Err(Error::InvalidCoefficient(_))));
        let bad_json = PolyVectorField::<Rational>::parse(r#"{"dimension": 1"#);
        assert!(matches!(bad_json, Err(Error::Malformed(_))));
        let negative = PolyVectorField::<Rational>::parse(
            r#"{"dimension": 1, "components": [[{"coeff": 1, "exponents": [-1]}]]}"#,
        );
        assert!(matches!(negative, Err(Error::Malformed(_))));
        let wrong_count = PolyVectorField::<Rational>::parse(r#"{"dimension": 2, "components": [[]]}"#);
        assert!(wrong_count.is_err());
    }

    #[test]
    fn evaluate_examples() {
        let f = PolyVectorField::new(1, vec![vec![mono(1, &[2])]]).unwrap();
        assert_eq!(f.evaluate(&[q(2, 1)]).unwrap(), vec![q(4, 1)]);
        assert!(matches!(f.evaluate(&[q(1, 1), q(1, 1)]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn degree_split_quadratic() {
        // x^2 + b x + c with b = 2, c = 5
        let f = PolyVectorField::new(1, vec![vec![mono(1, &[2]), mono(2, &[1]), mono(5, &[0])]]).unwrap();
        let parts = f.degree_split();
        assert_eq!(parts.keys().copied().collect::<Vec<_>>(), vec![0, 1, 2]);
        assert_eq!(parts[&2].components()[0], vec![mono(1, &[2])]);
        assert_eq!(parts[&1].components()[0], vec![mono(2, &[1])]);
        assert_eq!(parts[&0].components()[0], vec![mono(5, &[0])]);
        assert!(PolyVectorField::<Rational>::zero(2).degree_split().is_empty());

        let cubic = PolyVectorField::new(2, vec![vec![mono(1, &[3, 0])], vec![mono(2, &[1, 2])]]).unwrap();
        assert_eq!(cubic.degree_split().len(), 1);
        assert_eq!(cubic.homogeneous_degree(), Some(3));
    }

    #[test]
    fn homogenize_quadratic() {
        let f = PolyVectorField::new(1, vec![vec![mono(1, &[2]), mono(3, &[1]), mono(7, &[0])]]).unwrap();
        let g = f.homogenize();
        assert_eq!(g.dim(), 2);
        assert_eq!(
            g.components()[0],
            vec![mono(7, &[0, 2]), mono(3, &[1, 1]), mono(1, &[2, 0])]
        );
        assert!(g.components()[1].is_empty());
        assert_eq!(g.homogeneous_degree(), Some(2));
    }

    #[test]
    fn homogenize_constant_gets_degree_one() {
        let f = PolyVectorField::new(1, vec![vec![mono(4, &[0])]]).unwrap();
        let g = f.homogenize();
        assert_eq!(g.components()[0], vec![mono(4, &[0, 1])]);
    }

    #[test]
    fn homogenize_already_homogeneous() {
        let f = PolyVectorField::new(2, vec![vec![mono(1, &[1, 1])], vec![mono(-1, &[0, 2])]]).unwrap();
        let g = f.homogenize();
        assert_eq!(g.components()[0], vec![mono(1, &[1, 1, 0])]);
        assert_eq!(g.components()[1], vec![mono(-1, &[0, 2, 0])]);
        assert!(g.components()[2].is_empty());
    }

    #[test]
    fn gradient_power_rule() {
        let h = ScalarPoly::new(2, vec![mono(1, &[4, 0])]).unwrap();
        let g = h.gradient();
        assert_eq!(g.components()[0], vec![mono(4, &[3, 0])]);
        assert!(g.components()[1].is_empty());
        assert!(ScalarPoly::<Rational>::zero(3).gradient().is_zero());
    }

    #[test]
    fn quartic_example_gradient() {
        // H = a q^4 + 4b q^3 p + 6c q^2 p^2 + 4d q p^3 + e p^4 with a..e = 2,3,5,7,11
        let (a, b, c, d, e) = (2, 3, 5, 7, 11);
        let h = ScalarPoly::new(
            2,
            vec![
                mono(a, &[4, 0]),
                mono(4 * b, &[3, 1]),
                mono(6 * c, &[2, 2]),
                mono(4 * d, &[1, 3]),
                mono(e, &[0, 4]),
            ],
        )
        .unwrap();
        let g = h.gradient();
        let expect_q = PolyVectorField::new(
            2,
            vec![
                vec![mono(4 * a, &[3, 0]), mono(12 * b, &[2, 1]), mono(12 * c, &[1, 2]), mono(4 * d, &[0, 3])],
                vec![mono(4 * b, &[3, 0]), mono(12 * c, &[2, 1]), mono(12 * d, &[1, 2]), mono(4 * e, &[0, 3])],
            ],
        )
        .unwrap();
        assert_eq!(g, expect_q);
    }

    #[test]
    fn hamiltonian_file_spec() {
        let spec: HamiltonianFileSpec = serde_json::from_str(
            r#"{"dimension": 2, "monomials": [{"coeff": 1, "exponents": [4,0]}], "K": [[0, 1], [-1, 0]]}"#,
        )
        .unwrap();
        let k = spec.structure_matrix::<Rational>().unwrap();
        assert!(k.is_antisymmetric());
        assert_eq!(spec.hamiltonian::<Rational>().unwrap().degree(), Some(4));
    }
}
