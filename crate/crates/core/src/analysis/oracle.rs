use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Closed-form recurrence for ẋ = x^{k+1}.
///
/// With I_n = 1/(x_n ⋯ x_{n+k−1}) the polar map reduces to
/// I_{n+1} = I_n − hk, so x_{n+k} = 1/(x_{n+1} ⋯ x_{n+k−1} · I_{n+1}).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarOracleState<S> {
    h: S,
    points: Vec<S>,
    invariant: S,
}

impl<S: Scalar> ScalarOracleState<S> {
    pub fn new(points: Vec<S>, h: S) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Invalid("the oracle needs at least one point".into()));
        }
        let product = points.iter().fold(S::one(), |acc, x| acc * x.clone());
        if product.is_zero() {
            return Err(Error::Invalid("window product is zero".into()));
        }
        Ok(ScalarOracleState {
            h,
            invariant: S::one() / product,
            points,
        })
    }

    pub fn k(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[S] {
        &self.points
    }

    /// Current I_n.
    pub fn invariant(&self) -> &S {
        &self.invariant
    }

    /// Advances one step and returns x_{n+k}. Fails when I_{n+1} = 0.
    pub fn step(&mut self) -> Result<S> {
        let k = self.k();
        let next_invariant = self.invariant.clone() - self.h.clone() * S::from_i64(k as i64);
        if next_invariant.is_zero() {
            return Err(Error::Singular(Some("scalar oracle: invariant reached zero".into())));
        }
        let middle = self.points[1..].iter().fold(S::one(), |acc, x| acc * x.clone());
        let next = S::one() / (middle * next_invariant.clone());
        self.points.remove(0);
        self.points.push(next.clone());
        self.invariant = next_invariant;
        Ok(next)
    }
}

/// Single step of [`ScalarOracleState`], returning the next scalar.
pub fn scalar_oracle_step<S: Scalar>(state: &mut ScalarOracleState<S>) -> Result<S> {
    state.step()
}
