//! Polar maps: linearly implicit, k-step integrators for homogeneous
//! polynomial vector fields, generalizing Kahan's method to any degree.
//!
//! All algorithms are generic over [`Scalar`], so the same code runs in
//! double precision, exact rationals, or the prime field 2^61 − 1.
//!
//! ```
//! use polarint_core::{polarize, polar_step, PolarWindow, PolyVectorField, Rational, Scalar};
//!
//! // x' = x³ from x₀ = x₁ = 1 with h = 1/4
//! let f: PolyVectorField<Rational> = PolyVectorField::parse(r#"{"dimension": 1,
//!     "components": [[{"coeff": "1", "exponents": [3]}]]}"#).unwrap();
//! let one = vec![Rational::from_i64(1)];
//! let w = PolarWindow::new(vec![one.clone(), one], Rational::from_ratio(1, 4)).unwrap();
//! let x2 = polar_step(&polarize(&f).unwrap(), &w).unwrap().into_point().unwrap();
//! assert_eq!(x2, vec![Rational::from_i64(2)]);
//! ```

pub mod analysis;
pub mod error;
pub mod hamiltonian;
pub mod linalg;
pub mod polarize;
pub mod polarmap;
pub mod polyfield;
pub mod random;
pub mod scalar;

pub use error::{Error, Result};
pub use hamiltonian::{HamiltonianSpec, KIntegralSet, MeasureDensity};
pub use linalg::Matrix;
pub use polarize::{polarize, SymMultilinearForm};
pub use polarmap::{
    bootstrap, integrate, integrate_suspended, inverse_polar_step, kahan_step, polar_step, suspended_step,
    BootstrapConfig, BootstrapMethod, Point, PolarWindow, StepResult, Trajectory,
};
pub use polyfield::{FieldSpec, HamiltonianFileSpec, Monomial, MonomialSpec, PolyVectorField, ScalarPoly};
pub use scalar::{Mod61, Rational, Scalar, ScalarMode};
