//! Parameter-estimation quadratic: recover a planted x⋆ from scalar
//! measurements l = uᵀx⋆ + v with u ~ Normal(0, R_u), v ~ Normal(0, σ_v²).
//!
//! The smooth part is f(x) = (x−x⋆)ᵀR_u(x−x⋆) + σ_v² with exact
//! gradient 2R_u(x−x⋆); the per-sample estimator is g(x,u,v) = 2(uuᵀx − lu).

use crate::error::CoreError;
use crate::linalg::{random_orthogonal, SymMatrix};
use crate::problem::CompositeProblem;
use crate::prox::{prox_apply, Regularizer};
use crate::stream::RandomStream;
use crate::vector::DenseVector;

#[derive(Debug, Clone)]
pub struct ParamEstimationProblem {
    covariance: SymMatrix,
    /// Lower-triangular Cholesky factor of R_u, row-major.
    chol: Vec<f64>,
    planted: DenseVector,
    pub sigma_v: f64,
    pub lambda: f64,
    mu: f64,
    lipschitz: f64,
}

impl ParamEstimationProblem {
    /// Errors if R_u is not positive definite.
    pub fn new(
        covariance: SymMatrix,
        planted: Vec<f64>,
        sigma_v: f64,
        lambda: f64,
    ) -> Result<Self, CoreError> {
        let chol = covariance.cholesky()?;
        let eig = covariance.eigenvalues();
        let lam_min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        let lam_max = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if lam_min <= 0.0 {
            return Err(CoreError::NotPositiveDefinite { pivot: 0 });
        }
        Ok(Self {
            covariance,
            chol,
            planted: DenseVector::new(planted)?,
            sigma_v,
            lambda,
            mu: 2.0 * lam_min,
            lipschitz: 2.0 * lam_max,
        })
    }

    /// R_u = σ_u²·I.
    pub fn isotropic(
        dim: usize,
        variance: f64,
        sigma_v: f64,
        lambda: f64,
        planted: Vec<f64>,
    ) -> Result<Self, CoreError> {
        let mut m = SymMatrix::zeros(dim);
        for i in 0..dim {
            m.set(i, i, variance);
        }
        Self::new(m, planted, sigma_v, lambda)
    }

    /// Randomly generated R_u = Qᵀ·diag(spectrum)·Q with a geometric
    /// spectrum running from 1 down to 1/cond, rotated by a random
    /// orthogonal Q drawn from `stream`.
    pub fn generated(
        dim: usize,
        cond: f64,
        sigma_v: f64,
        lambda: f64,
        planted: Vec<f64>,
        stream: &mut RandomStream,
    ) -> Result<Self, CoreError> {
        if cond < 1.0 {
            return Err(CoreError::InvalidOptions(format!(
                "condition number must be >= 1, got {cond}"
            )));
        }
        let q = random_orthogonal(dim, stream);
        let mut m = SymMatrix::zeros(dim);
        let spectrum: Vec<f64> = (0..dim)
            .map(|i| {
                if dim == 1 {
                    1.0
                } else {
                    (1.0 / cond).powf(i as f64 / (dim - 1) as f64)
                }
            })
            .collect();
        for i in 0..dim {
            for j in 0..dim {
                let mut s = 0.0;
                for (k, lam) in spectrum.iter().enumerate() {
                    s += q[k * dim + i] * lam * q[k * dim + j];
                }
                m.set(i, j, s);
            }
        }
        Self::new(m, planted, sigma_v, lambda)
    }

    pub fn planted(&self) -> &DenseVector {
        &self.planted
    }

    pub fn covariance(&self) -> &SymMatrix {
        &self.covariance
    }

    fn regularizer(&self) -> Regularizer {
        Regularizer::L1 { lambda: self.lambda }
    }

    /// One draw of the regression vector u ~ Normal(0, R_u).
    fn draw_u(&self, stream: &mut RandomStream) -> Vec<f64> {
        let d = self.planted.dim();
        let z: Vec<f64> = (0..d).map(|_| stream.standard_normal()).collect();
        let mut u = vec![0.0; d];
        for i in 0..d {
            let mut s = 0.0;
            for j in 0..=i {
                s += self.chol[i * d + j] * z[j];
            }
            u[i] = s;
        }
        u
    }
}

impl CompositeProblem for ParamEstimationProblem {
    fn dimension(&self) -> usize {
        self.planted.dim()
    }

    fn sample_gradient(&self, x: &DenseVector, stream: &mut RandomStream) -> DenseVector {
        let u = self.draw_u(stream);
        let v = self.sigma_v * stream.standard_normal();
        let l: f64 = u.iter().zip(self.planted.as_slice()).map(|(a, b)| a * b).sum::<f64>() + v;
        let ux: f64 = u.iter().zip(x.as_slice()).map(|(a, b)| a * b).sum();
        let resid = 2.0 * (ux - l);
        DenseVector::from_raw(u.iter().map(|ui| resid * ui).collect())
    }

    fn full_gradient(&self, x: &DenseVector) -> Option<DenseVector> {
        let e: Vec<f64> = x
            .as_slice()
            .iter()
            .zip(self.planted.as_slice())
            .map(|(a, b)| a - b)
            .collect();
        Some(DenseVector::from_raw(
            self.covariance.matvec(&e).into_iter().map(|g| 2.0 * g).collect(),
        ))
    }

    fn smooth_value(&self, x: &DenseVector) -> Option<f64> {
        let e: Vec<f64> = x
            .as_slice()
            .iter()
            .zip(self.planted.as_slice())
            .map(|(a, b)| a - b)
            .collect();
        let re = self.covariance.matvec(&e);
        let quad: f64 = e.iter().zip(&re).map(|(a, b)| a * b).sum();
        Some(quad + self.sigma_v * self.sigma_v)
    }

    fn nonsmooth_value(&self, x: &DenseVector) -> f64 {
        self.regularizer().value(x)
    }

    fn prox(&self, x: &DenseVector, step: f64) -> DenseVector {
        prox_apply(&self.regularizer(), x, step).expect("positive step")
    }

    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    fn strong_convexity(&self) -> f64 {
        self.mu
    }

    fn known_optimum(&self) -> Option<&DenseVector> {
        // With an l1 term the composite optimum is not the planted
        // vector; it must come from the full-gradient oracle instead.
        if self.lambda == 0.0 {
            Some(&self.planted)
        } else {
            None
        }
    }
}
