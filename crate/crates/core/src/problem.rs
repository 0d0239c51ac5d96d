//! The composite problem abstraction consumed by every solver.

use crate::error::CoreError;
use crate::stream::RandomStream;
use crate::vector::DenseVector;

/// A stochastic composite objective F(x) = f(x) + h(x).
///
/// The smooth part f is sampleable: `sample_gradient` returns one
/// unbiased draw g(x, ξ) of ∇f(x). The nonsmooth part h is available
/// through its value and proximal operator. `full_gradient` and
/// `smooth_value` are optional capabilities, present for finite-sum
/// and quadratic oracle problems; solvers that need them fail fast
/// with [`CoreError::MissingCapability`].
pub trait CompositeProblem: Sync {
    fn dimension(&self) -> usize;

    /// One draw of g(x, ξ); must be unbiased for ∇f(x).
    fn sample_gradient(&self, x: &DenseVector, stream: &mut RandomStream) -> DenseVector;

    /// Exact ∇f(x), when the problem exposes it.
    fn full_gradient(&self, _x: &DenseVector) -> Option<DenseVector> {
        None
    }

    /// Exact f(x), when the problem exposes it.
    fn smooth_value(&self, _x: &DenseVector) -> Option<f64> {
        None
    }

    /// h(x).
    fn nonsmooth_value(&self, x: &DenseVector) -> f64;

    /// prox_{step·h}(x) for step > 0.
    fn prox(&self, x: &DenseVector, step: f64) -> DenseVector;

    /// Gradient Lipschitz constant L of f.
    fn lipschitz(&self) -> f64;

    /// Strong convexity modulus μ ≥ 0 of f.
    fn strong_convexity(&self) -> f64;

    /// Optimal point, when known exactly (oracle problems).
    fn known_optimum(&self) -> Option<&DenseVector> {
        None
    }

    /// F(x) = f(x) + h(x), when the smooth value is available.
    fn objective(&self, x: &DenseVector) -> Option<f64> {
        self.smooth_value(x).map(|f| f + self.nonsmooth_value(x))
    }

    fn require_full_gradient(
        &self,
        x: &DenseVector,
        needed_by: &'static str,
    ) -> Result<DenseVector, CoreError> {
        self.full_gradient(x).ok_or(CoreError::MissingCapability {
            capability: "full_gradient",
            needed_by,
        })
    }
}
