//! Polar maps of Hamiltonian fields ẋ = K∇H with H homogeneous of degree
//! k+2 and K constant antisymmetric.
//!
//! With Ω = K⁻¹ and ω(u, v) = uᵀΩv, the quantities ω(x_m, x_{m+1}) are
//! k-integrals of the polar map, and the product measure on V^k weighted by
//! 1/det(I − c K T(x_0, …, x_{k−1})) is invariant. Here T is the polarized
//! Hessian (T(x, …, x) = H″(x)) and c = kh/(k+1).

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::polarize::SymMultilinearForm;
use crate::polarmap::{self, Point, PolarWindow, StepResult};
use crate::polyfield::{HamiltonianFileSpec, PolyVectorField, ScalarPoly};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec<S> {
    energy: ScalarPoly<S>,
    structure: Matrix<S>,
    symplectic: Option<Matrix<S>>,
    k: usize,
    field: PolyVectorField<S>,
    field_form: SymMultilinearForm<S>,
    energy_form: SymMultilinearForm<S>,
}

impl<S: Scalar> HamiltonianSpec<S> {
    /// Infers k from the degree of H, which must be at least 3.
    pub fn new(energy: ScalarPoly<S>, structure: Matrix<S>) -> Result<Self> {
        let d = energy.homogeneous_degree().ok_or(Error::NotHomogeneous { expected: None })?;
        if d < 3 {
            return Err(Error::Invalid(format!("H must have degree at least 3, got {d}")));
        }
        Self::with_k(energy, structure, d as usize - 2)
    }

    /// Explicit k, needed when H is zero.
    pub fn with_k(energy: ScalarPoly<S>, structure: Matrix<S>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Invalid("k must be at least 1".into()));
        }
        let n = energy.dim();
        if structure.rows() != n || structure.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: structure.rows(),
            });
        }
        if !structure.is_antisymmetric() {
            return Err(Error::NotAntisymmetric);
        }
        if !energy.is_homogeneous_of(k as u32 + 2) {
            return Err(Error::NotHomogeneous {
                expected: Some(k as u32 + 2),
            });
        }
        let symplectic = structure.inverse();
        let field = energy.gradient().apply_matrix(&structure)?;
        let field_form = SymMultilinearForm::from_field(&field, k + 1)?;
        let energy_form = SymMultilinearForm::from_scalar(&energy, k + 2)?;
        Ok(HamiltonianSpec {
            energy,
            structure,
            symplectic,
            k,
            field,
            field_form,
            energy_form,
        })
    }

    pub fn from_file_spec(spec: &HamiltonianFileSpec) -> Result<Self> {
        Self::new(spec.hamiltonian()?, spec.structure_matrix()?)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.energy.dim()
    }

    pub fn energy(&self) -> &ScalarPoly<S> {
        &self.energy
    }

    pub fn structure(&self) -> &Matrix<S> {
        &self.structure
    }

    /// Ω = K⁻¹, absent when K is singular.
    pub fn symplectic_form(&self) -> Option<&Matrix<S>> {
        self.symplectic.as_ref()
    }

    /// K∇H, homogeneous of degree k+1.
    pub fn field(&self) -> &PolyVectorField<S> {
        &self.field
    }

    /// Polarization of [`Self::field`].
    pub fn field_form(&self) -> &SymMultilinearForm<S> {
        &self.field_form
    }

    /// Scalar polarization P of H, so that H(x) = P(x, …, x).
    pub fn energy_form(&self) -> &SymMultilinearForm<S> {
        &self.energy_form
    }

    pub fn try_map_coeffs<T: Scalar>(&self, f: impl Fn(&S) -> Result<T> + Copy) -> Result<HamiltonianSpec<T>> {
        HamiltonianSpec::with_k(self.energy.try_map_coeffs(f)?, self.structure.try_map(f)?, self.k)
    }

    /// ω(u, v) = uᵀΩv.
    pub fn omega(&self, u: &[S], v: &[S]) -> Result<S> {
        let o = self.symplectic.as_ref().ok_or(Error::NoSymplecticForm)?;
        Ok(o.bilinear(u, v))
    }

    /// Polarized Hessian T(x_0, …, x_{k−1}), symmetric n×n.
    pub fn hessian_polar<A: AsRef<[S]>>(&self, points: &[A]) -> Result<Matrix<S>> {
        let b = self.energy_form.contract_to_bilinear(points)?;
        let scale = S::from_i64(((self.k + 2) * (self.k + 1)) as i64);
        Ok(b.scale(&scale))
    }

    /// c = kh/(k+1).
    pub fn measure_constant(&self, h: &S) -> S {
        S::from_ratio(self.k as i64, self.k as i64 + 1) * h.clone()
    }

    /// I + sign·c·K·T(points).
    fn measure_matrix<A: AsRef<[S]>>(&self, points: &[A], h: &S, sign: i64) -> Result<Matrix<S>> {
        let t = self.hessian_polar(points)?;
        let c = self.measure_constant(h) * S::from_i64(sign);
        Ok(Matrix::identity(self.dim()).add(&self.structure.matmul(&t).scale(&c)))
    }
}

/// Values ω(x_m, x_{m+1}) and the modified energies ω/(h(k+2)).
#[derive(Debug, Clone, PartialEq)]
pub struct KIntegralSet<S> {
    pub values: Vec<S>,
    pub normalized: Vec<S>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureDensity<S> {
    pub c_measure: S,
    /// det(I − c K T(x_0, …, x_{k−1})).
    pub determinant: S,
    pub density: S,
}

/// Same as `polar_step(spec.field_form(), window)`.
pub fn polar_hamiltonian_step<S: Scalar>(spec: &HamiltonianSpec<S>, window: &PolarWindow<S>) -> Result<StepResult<S>> {
    polarmap::polar_step(spec.field_form(), window)
}

fn check_extended<S>(spec: &HamiltonianSpec<S>, extended: &[Point<S>]) -> Result<()>
where
    S: Scalar,
{
    if extended.len() != spec.k() + 1 {
        return Err(Error::Arity {
            expected: spec.k() + 1,
            found: extended.len(),
        });
    }
    if let Some(p) = extended.iter().find(|p| p.len() != spec.dim()) {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            found: p.len(),
        });
    }
    Ok(())
}

/// ω(x_m, x_{m+1}) for m < k over the extended window x_0, …, x_k.
pub fn k_integrals<S: Scalar>(spec: &HamiltonianSpec<S>, extended: &[Point<S>], h: &S) -> Result<KIntegralSet<S>> {
    check_extended(spec, extended)?;
    let values = extended
        .windows(2)
        .map(|w| spec.omega(&w[0], &w[1]))
        .collect::<Result<Vec<_>>>()?;
    let scale = h.clone() * S::from_i64(spec.k() as i64 + 2);
    let normalized = values.iter().map(|v| v.clone() / scale.clone()).collect();
    Ok(KIntegralSet { values, normalized })
}

/// Product of the k values of [`k_integrals`].
pub fn product_integral<S: Scalar>(spec: &HamiltonianSpec<S>, extended: &[Point<S>], h: &S) -> Result<S> {
    let set = k_integrals(spec, extended, h)?;
    Ok(set.values.into_iter().fold(S::one(), |acc, v| acc * v))
}

/// For even k, the products of ω over even and over odd consecutive pairs.
pub fn even_k_two_integrals<S: Scalar>(spec: &HamiltonianSpec<S>, extended: &[Point<S>], h: &S) -> Result<(S, S)> {
    if spec.k() % 2 != 0 {
        return Err(Error::OddK(spec.k()));
    }
    let set = k_integrals(spec, extended, h)?;
    let mut even = S::one();
    let mut odd = S::one();
    for (m, v) in set.values.into_iter().enumerate() {
        if m % 2 == 0 {
            even = even * v;
        } else {
            odd = odd * v;
        }
    }
    Ok((even, odd))
}

/// Density 1/det(I − c K T(x_0, …, x_{k−1})) of the invariant measure.
pub fn measure_density<S: Scalar>(spec: &HamiltonianSpec<S>, window: &PolarWindow<S>) -> Result<MeasureDensity<S>> {
    let a = spec.measure_matrix(window.points(), window.h(), -1)?;
    let determinant = a.det();
    if determinant.is_zero() || (!S::EXACT && crate::linalg::det_is_negligible(&determinant, &a)) {
        return Err(Error::DensityUndefined);
    }
    Ok(MeasureDensity {
        c_measure: spec.measure_constant(window.h()),
        density: S::one() / determinant.clone(),
        determinant,
    })
}

/// ∂x_k/∂x_0 = (I − cKT(x_0…x_{k−1}))⁻¹ (I + cKT(x_1…x_k)).
pub fn closed_form_jacobian<S: Scalar>(spec: &HamiltonianSpec<S>, extended: &[Point<S>], h: &S) -> Result<Matrix<S>> {
    check_extended(spec, extended)?;
    let k = spec.k();
    let lhs = spec.measure_matrix(&extended[..k], h, -1)?;
    let rhs = spec.measure_matrix(&extended[1..], h, 1)?;
    let inv = lhs.inverse().ok_or(Error::DensityUndefined)?;
    Ok(inv.matmul(&rhs))
}

/// det(I − cKT(x_1…x_k)) / det(I − cKT(x_0…x_{k−1})), the density ratio.
pub fn sylvester_ratio<S: Scalar>(spec: &HamiltonianSpec<S>, extended: &[Point<S>], h: &S) -> Result<S> {
    check_extended(spec, extended)?;
    let k = spec.k();
    let before = spec.measure_matrix(&extended[..k], h, -1)?.det();
    let after = spec.measure_matrix(&extended[1..], h, -1)?.det();
    if before.is_zero() {
        return Err(Error::DensityUndefined);
    }
    Ok(after / before)
}
