//! Lasso toy with an orthogonal design, so the optimum has the exact
//! closed form x⋆ = soft_threshold(Qᵀb, λ). Sampling is noise-free
//! (sample_gradient ≡ full_gradient); this is the oracle problem for
//! the exactness tests.

use crate::error::CoreError;
use crate::problem::CompositeProblem;
use crate::prox::{prox_apply, Regularizer};
use crate::stream::RandomStream;
use crate::vector::DenseVector;

/// f(x) = ½‖Qx − b‖² with QᵀQ = I,  h(x) = λ‖x‖₁.
#[derive(Debug, Clone)]
pub struct LassoToyProblem {
    /// Row-major d×d orthogonal design.
    design: Vec<f64>,
    targets: DenseVector,
    pub lambda: f64,
    optimum: DenseVector,
}

impl LassoToyProblem {
    pub fn new(design: Vec<f64>, targets: Vec<f64>, lambda: f64) -> Result<Self, CoreError> {
        let b = DenseVector::new(targets)?;
        let d = b.dim();
        if design.len() != d * d {
            return Err(CoreError::InvalidOptions(format!(
                "design must be {d}x{d}, got {} values",
                design.len()
            )));
        }
        if lambda < 0.0 {
            return Err(CoreError::NonPositive {
                context: "lasso lambda",
                value: lambda,
            });
        }
        // orthogonality check: Q^T Q = I within 1e-10
        for i in 0..d {
            for j in 0..d {
                let dot: f64 = (0..d).map(|k| design[k * d + i] * design[k * d + j]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                if (dot - want).abs() > 1e-10 {
                    return Err(CoreError::InvalidOptions(format!(
                        "design is not orthogonal at ({i},{j}): {dot}"
                    )));
                }
            }
        }
        // x* = soft_threshold(Q^T b, lambda)
        let mut qtb = vec![0.0; d];
        for (i, q) in qtb.iter_mut().enumerate() {
            *q = (0..d).map(|k| design[k * d + i] * b[k]).sum();
        }
        let optimum = DenseVector::from_raw(
            qtb.iter()
                .map(|&v| v.signum() * (v.abs() - lambda).max(0.0))
                .collect(),
        );
        Ok(Self {
            design,
            targets: b,
            lambda,
            optimum,
        })
    }

    /// Q = I, so x⋆ = soft_threshold(b, λ).
    pub fn identity_design(targets: Vec<f64>, lambda: f64) -> Result<Self, CoreError> {
        let d = targets.len();
        let mut q = vec![0.0; d * d];
        for i in 0..d {
            q[i * d + i] = 1.0;
        }
        Self::new(q, targets, lambda)
    }

    /// Random rotation design from a stream.
    pub fn rotated(
        targets: Vec<f64>,
        lambda: f64,
        stream: &mut RandomStream,
    ) -> Result<Self, CoreError> {
        let d = targets.len();
        let q = crate::linalg::random_orthogonal(d, stream);
        Self::new(q, targets, lambda)
    }

    pub fn closed_form_optimum(&self) -> &DenseVector {
        &self.optimum
    }

    fn regularizer(&self) -> Regularizer {
        Regularizer::L1 { lambda: self.lambda }
    }
}

impl CompositeProblem for LassoToyProblem {
    fn dimension(&self) -> usize {
        self.targets.dim()
    }

    fn sample_gradient(&self, x: &DenseVector, _stream: &mut RandomStream) -> DenseVector {
        self.full_gradient(x).expect("lasso gradient is exact")
    }

    fn full_gradient(&self, x: &DenseVector) -> Option<DenseVector> {
        // grad = Q^T(Qx - b)
        let d = self.targets.dim();
        let mut qx = vec![0.0; d];
        for (i, q) in qx.iter_mut().enumerate() {
            let row = &self.design[i * d..(i + 1) * d];
            *q = row.iter().zip(x.as_slice()).map(|(a, b)| a * b).sum::<f64>() - self.targets[i];
        }
        let mut g = vec![0.0; d];
        for (j, gj) in g.iter_mut().enumerate() {
            *gj = (0..d).map(|k| self.design[k * d + j] * qx[k]).sum();
        }
        Some(DenseVector::from_raw(g))
    }

    fn smooth_value(&self, x: &DenseVector) -> Option<f64> {
        let d = self.targets.dim();
        let mut total = 0.0;
        for i in 0..d {
            let row = &self.design[i * d..(i + 1) * d];
            let r = row.iter().zip(x.as_slice()).map(|(a, b)| a * b).sum::<f64>() - self.targets[i];
            total += r * r;
        }
        Some(0.5 * total)
    }

    fn nonsmooth_value(&self, x: &DenseVector) -> f64 {
        self.regularizer().value(x)
    }

    fn prox(&self, x: &DenseVector, step: f64) -> DenseVector {
        prox_apply(&self.regularizer(), x, step).expect("positive step")
    }

    fn lipschitz(&self) -> f64 {
        1.0
    }

    fn strong_convexity(&self) -> f64 {
        1.0
    }

    fn known_optimum(&self) -> Option<&DenseVector> {
        Some(&self.optimum)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prox::gradient_mapping;

    #[test]
    fn closed_form_optimum_zeroes_the_gradient_mapping() {
        let mut s = RandomStream::derive(17, 0);
        let p = LassoToyProblem::rotated(vec![1.1, -0.4, 0.05, 2.0], 0.3, &mut s).unwrap();
        let xstar = p.closed_form_optimum().clone();
        let g = p.full_gradient(&xstar).unwrap();
        let m = gradient_mapping(&p, &xstar, &g, 1.0).unwrap();
        assert!(m.norm() <= 1e-10, "|G(x*)| = {}", m.norm());
    }

    #[test]
    fn identity_design_optimum_is_soft_threshold_of_targets() {
        let p = LassoToyProblem::identity_design(vec![1.5, -0.2, 0.7], 0.5).unwrap();
        let x = p.closed_form_optimum();
        assert!((x[0] - 1.0).abs() < 1e-15);
        assert_eq!(x[1], 0.0);
        assert!((x[2] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn non_orthogonal_design_rejected() {
        let q = vec![1.0, 0.0, 1.0, 1.0];
        assert!(LassoToyProblem::new(q, vec![1.0, 1.0], 0.1).is_err());
    }
}
