//! Proximal operators for the supported regularizers and the
//! (sample) gradient mapping.

use crate::error::CoreError;
use crate::problem::CompositeProblem;
use crate::vector::DenseVector;

/// Closed catalog of nonsmooth terms h with exact closed-form proxes.
///
/// Restricting to this catalog keeps every h proper, closed and convex
/// by construction. `l2_squared(λ)` is h(x) = (λ/2)‖x‖²;
/// `elastic_net(λ₁, λ₂)` is h(x) = λ₁‖x‖₁ + (λ₂/2)‖x‖².
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regularizer {
    None,
    L1 { lambda: f64 },
    L2Squared { lambda: f64 },
    ElasticNet { l1: f64, l2: f64 },
}

impl Regularizer {
    pub fn value(&self, x: &DenseVector) -> f64 {
        match *self {
            Regularizer::None => 0.0,
            Regularizer::L1 { lambda } => lambda * x.as_slice().iter().map(|c| c.abs()).sum::<f64>(),
            Regularizer::L2Squared { lambda } => 0.5 * lambda * x.norm_sq(),
            Regularizer::ElasticNet { l1, l2 } => {
                l1 * x.as_slice().iter().map(|c| c.abs()).sum::<f64>() + 0.5 * l2 * x.norm_sq()
            }
        }
    }
}

fn soft_threshold(v: f64, t: f64) -> f64 {
    // Ties |v| = t map to 0, the max(·,0) convention of the closed form.
    v.signum() * (v.abs() - t).max(0.0)
}

/// prox_{step·h}(x), the exact closed-form minimizer of
/// h(u) + (1/(2·step))‖u − x‖².
pub fn prox_apply(reg: &Regularizer, x: &DenseVector, step: f64) -> Result<DenseVector, CoreError> {
    if step <= 0.0 || !step.is_finite() {
        return Err(CoreError::NonPositive {
            context: "prox_apply step",
            value: step,
        });
    }
    let out = match *reg {
        Regularizer::None => x.clone(),
        Regularizer::L1 { lambda } => DenseVector::from_raw(
            x.as_slice()
                .iter()
                .map(|&v| soft_threshold(v, step * lambda))
                .collect(),
        ),
        Regularizer::L2Squared { lambda } => x.scale(1.0 / (1.0 + step * lambda)),
        Regularizer::ElasticNet { l1, l2 } => DenseVector::from_raw(
            x.as_slice()
                .iter()
                .map(|&v| soft_threshold(v, step * l1) / (1.0 + step * l2))
                .collect(),
        ),
    };
    Ok(out)
}

/// The gradient mapping G_α(x) = (1/α)[x − prox_{αh}(x − α·g)] with
/// g = `grad_at_x`. Supplying the exact gradient gives G_α; supplying
/// an estimated gradient gives the sample gradient mapping Ĝ_α.
pub fn gradient_mapping(
    problem: &dyn CompositeProblem,
    x: &DenseVector,
    grad_at_x: &DenseVector,
    alpha: f64,
) -> Result<DenseVector, CoreError> {
    if alpha <= 0.0 || !alpha.is_finite() {
        return Err(CoreError::NonPositive {
            context: "gradient_mapping alpha",
            value: alpha,
        });
    }
    if grad_at_x.dim() != x.dim() {
        return Err(CoreError::DimensionMismatch {
            left: x.dim(),
            right: grad_at_x.dim(),
        });
    }
    let stepped = x.axpy(-alpha, grad_at_x)?;
    let proxed = problem.prox(&stepped, alpha);
    Ok(x.sub(&proxed)?.scale(1.0 / alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::LassoToyProblem;
    use crate::problem::CompositeProblem;

    /// Numeric prox oracle: minimizes h(u) + ½‖u−x‖²/step per component
    /// by golden-section search, independent of the closed forms.
    pub(crate) fn numeric_prox_1d(h: impl Fn(f64) -> f64, x: f64, step: f64) -> f64 {
        let obj = |u: f64| h(u) + (u - x) * (u - x) / (2.0 * step);
        let (mut lo, mut hi) = (x.min(0.0) - 1.0 - x.abs(), x.max(0.0) + 1.0 + x.abs());
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let m1 = hi - phi * (hi - lo);
            let m2 = lo + phi * (hi - lo);
            if obj(m1) < obj(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn l1_zero_lambda_is_identity() {
        let x = DenseVector::new(vec![1.2, -0.3, 0.0]).unwrap();
        let reg = Regularizer::L1 { lambda: 0.0 };
        assert_eq!(prox_apply(&reg, &x, 0.7).unwrap(), x);
    }

    #[test]
    fn l1_soft_threshold_matches_numeric_oracle() {
        let x = DenseVector::new(vec![1.2, -0.3]).unwrap();
        let reg = Regularizer::L1 { lambda: 1.0 };
        let got = prox_apply(&reg, &x, 0.5).unwrap();
        assert!((got[0] - 0.7).abs() < 1e-12);
        assert_eq!(got[1], 0.0);
        for (i, &xi) in x.as_slice().iter().enumerate() {
            let oracle = numeric_prox_1d(|u| 1.0 * u.abs(), xi, 0.5);
            assert!((got[i] - oracle).abs() < 1e-6, "component {i}");
        }
    }

    #[test]
    fn l2_squared_shrink_matches_numeric_oracle() {
        let x = DenseVector::new(vec![3.0]).unwrap();
        let reg = Regularizer::L2Squared { lambda: 2.0 };
        let got = prox_apply(&reg, &x, 0.5).unwrap();
        assert!((got[0] - 1.5).abs() < 1e-12);
        let oracle = numeric_prox_1d(|u| 1.0 * u * u, 3.0, 0.5);
        assert!((got[0] - oracle).abs() < 1e-6);
    }

    #[test]
    fn elastic_net_is_threshold_then_shrink() {
        let x = DenseVector::new(vec![2.0, -0.05]).unwrap();
        let reg = Regularizer::ElasticNet { l1: 1.0, l2: 2.0 };
        let got = prox_apply(&reg, &x, 0.5).unwrap();
        assert!((got[0] - (2.0 - 0.5) / 2.0).abs() < 1e-12);
        assert_eq!(got[1], 0.0);
        for (i, &xi) in x.as_slice().iter().enumerate() {
            let oracle = numeric_prox_1d(|u| u.abs() + u * u, xi, 0.5);
            assert!((got[i] - oracle).abs() < 1e-6, "component {i}");
        }
    }

    #[test]
    fn tie_at_kink_maps_to_zero() {
        let reg = Regularizer::L1 { lambda: 2.0 };
        let x = DenseVector::new(vec![1.0, -1.0]).unwrap();
        let got = prox_apply(&reg, &x, 0.5).unwrap();
        assert_eq!(got.as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn nonpositive_step_rejected() {
        let x = DenseVector::zeros(1);
        assert!(prox_apply(&Regularizer::None, &x, 0.0).is_err());
        assert!(prox_apply(&Regularizer::None, &x, -1.0).is_err());
    }

    #[test]
    fn mapping_without_regularizer_returns_the_gradient() {
        let p = LassoToyProblem::identity_design(vec![1.0, -2.0], 0.0).unwrap();
        let x = DenseVector::new(vec![2.0, -1.0]).unwrap();
        let g = DenseVector::new(vec![0.3, 0.4]).unwrap();
        let m = gradient_mapping(&p, &x, &g, 0.7).unwrap();
        for i in 0..2 {
            assert!((m[i] - g[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn mapping_vanishes_at_known_optimum() {
        let p = LassoToyProblem::identity_design(vec![1.5, -0.2, 0.0, 3.0], 0.5).unwrap();
        let xstar = p.known_optimum().unwrap().clone();
        let grad = p.full_gradient(&xstar).unwrap();
        for alpha in [1.0 / p.lipschitz(), 0.1 / p.lipschitz()] {
            let m = gradient_mapping(&p, &xstar, &grad, alpha).unwrap();
            assert!(m.norm() <= 1e-10, "alpha={alpha}, |G|={}", m.norm());
        }
    }

    #[test]
    fn mapping_error_dominated_by_gradient_error() {
        let p = LassoToyProblem::identity_design(vec![0.4, -1.1, 2.2], 0.3).unwrap();
        let x = DenseVector::new(vec![1.0, 0.2, -0.5]).unwrap();
        let g = p.full_gradient(&x).unwrap();
        let delta = DenseVector::new(vec![0.05, -0.2, 0.11]).unwrap();
        let gp = g.add(&delta).unwrap();
        let alpha = 0.8;
        let m1 = gradient_mapping(&p, &x, &gp, alpha).unwrap();
        let m2 = gradient_mapping(&p, &x, &g, alpha).unwrap();
        assert!(m1.sub(&m2).unwrap().norm() <= delta.norm() + 1e-12);
    }
}
