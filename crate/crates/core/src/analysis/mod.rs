//! Verification engines and closed-form oracles.

mod checks;
mod drift;
mod entropy;
mod leapfrog;
mod oracle;
mod quartic;

pub use checks::{
    check_measure_jacobian, check_scaling, check_scaling_hamiltonian, check_self_adjoint, CheckOutcome,
    MeasureJacobianReport, ScalingReport, DOUBLE_IDENTITY_TOL,
};
pub use drift::{drift_series, DriftReport};
pub use entropy::{
    height_growth, height_growth_with, point_height, quadratic_fit_r2, EntropyEstimate, GrowthClass, DEFAULT_ITERS,
    EXPONENTIAL_MIN, MIN_ITERS, SUBEXPONENTIAL_MAX,
};
#[doc(hidden)]
pub use leapfrog::leapfrog_trajectory;
pub use oracle::{scalar_oracle_step, ScalarOracleState};
pub use quartic::ExplicitQuarticMap;
