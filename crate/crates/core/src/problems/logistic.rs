//! Binary logistic regression with ℓ₂ (smooth) and ℓ₁ (nonsmooth)
//! regularization. The ℓ₂ term is folded into the smooth part, so the
//! problem is λ₁-strongly convex whenever λ₁ > 0.

use crate::error::CoreError;
use crate::problem::CompositeProblem;
use crate::prox::{prox_apply, Regularizer};
use crate::stream::RandomStream;
use crate::vector::DenseVector;

/// f(x) = (1/N) Σᵢ log(1 + exp(−zᵢ·yᵢᵀx)) + (λ₁/2)‖x‖²,  h(x) = λ₂‖x‖₁.
#[derive(Debug, Clone)]
pub struct LogisticProblem {
    /// Row-major N×d feature matrix.
    data: Vec<f64>,
    labels: Vec<f64>,
    n_rows: usize,
    dim: usize,
    pub lambda1: f64,
    pub lambda2: f64,
    lipschitz: f64,
}

/// ln(1 + e^t) without overflow.
fn ln1p_exp(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

/// 1/(1 + e^t) without overflow.
fn inv1p_exp(t: f64) -> f64 {
    if t > 0.0 {
        let e = (-t).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + t.exp())
    }
}

impl LogisticProblem {
    /// Builds the problem from a dense matrix and ±1 labels. L is
    /// estimated as 0.25·λ_max(YᵀY/N) + λ₁ by power iteration through
    /// the data (50 iterations, tolerance 1e-6).
    pub fn new(
        data: Vec<f64>,
        labels: Vec<f64>,
        dim: usize,
        lambda1: f64,
        lambda2: f64,
    ) -> Result<Self, CoreError> {
        if dim == 0 || labels.is_empty() || data.len() != labels.len() * dim {
            return Err(CoreError::InvalidOptions(format!(
                "inconsistent logistic data: {} values, {} labels, dim {}",
                data.len(),
                labels.len(),
                dim
            )));
        }
        if let Some(z) = labels.iter().find(|z| **z != 1.0 && **z != -1.0) {
            return Err(CoreError::InvalidOptions(format!(
                "labels must be -1 or +1, got {z}"
            )));
        }
        let n_rows = labels.len();
        let mut p = Self {
            data,
            labels,
            n_rows,
            dim,
            lambda1,
            lambda2,
            lipschitz: 0.0,
        };
        p.lipschitz = 0.25 * p.gram_largest_eigenvalue(50, 1e-6) + lambda1;
        Ok(p)
    }

    /// Synthetic generator: features ~ Normal(0, I/√d), a planted unit
    /// separator, labels flipped with probability `noise_rate`.
    pub fn synthetic(
        n_rows: usize,
        dim: usize,
        lambda1: f64,
        lambda2: f64,
        noise_rate: f64,
        stream: &mut RandomStream,
    ) -> Result<Self, CoreError> {
        let feature_sd = (1.0 / (dim as f64).sqrt()).sqrt();
        let mut separator: Vec<f64> = (0..dim).map(|_| stream.standard_normal()).collect();
        let norm = separator.iter().map(|x| x * x).sum::<f64>().sqrt();
        separator.iter_mut().for_each(|x| *x /= norm);

        let mut data = Vec::with_capacity(n_rows * dim);
        let mut labels = Vec::with_capacity(n_rows);
        for _ in 0..n_rows {
            let row: Vec<f64> = (0..dim).map(|_| feature_sd * stream.standard_normal()).collect();
            let margin: f64 = row.iter().zip(&separator).map(|(a, b)| a * b).sum();
            let mut z = if margin >= 0.0 { 1.0 } else { -1.0 };
            if stream.uniform() < noise_rate {
                z = -z;
            }
            data.extend(row);
            labels.push(z);
        }
        Self::new(data, labels, dim, lambda1, lambda2)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn label(&self, i: usize) -> f64 {
        self.labels[i]
    }

    /// λ_max(YᵀY/N) by power iteration with matvecs through the data.
    fn gram_largest_eigenvalue(&self, iterations: usize, tol: f64) -> f64 {
        let d = self.dim;
        let n = self.n_rows as f64;
        let mut v: Vec<f64> = (0..d).map(|i| 1.0 + 0.1 * i as f64).collect();
        let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= nv);
        let mut lambda = 0.0;
        for _ in 0..iterations {
            // w = Yᵀ(Y v)/N
            let mut w = vec![0.0; d];
            for i in 0..self.n_rows {
                let row = self.row(i);
                let dot: f64 = row.iter().zip(&v).map(|(a, b)| a * b).sum();
                for (wj, rj) in w.iter_mut().zip(row) {
                    *wj += dot * rj;
                }
            }
            w.iter_mut().for_each(|x| *x /= n);
            let nw = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if nw == 0.0 {
                return 0.0;
            }
            let new_lambda = nw;
            w.iter_mut().for_each(|x| *x /= nw);
            let done = (new_lambda - lambda).abs() <= tol * new_lambda.max(1e-300);
            lambda = new_lambda;
            v = w;
            if done {
                break;
            }
        }
        lambda
    }

    fn regularizer(&self) -> Regularizer {
        Regularizer::L1 {
            lambda: self.lambda2,
        }
    }
}

impl CompositeProblem for LogisticProblem {
    fn dimension(&self) -> usize {
        self.dim
    }

    fn sample_gradient(&self, x: &DenseVector, stream: &mut RandomStream) -> DenseVector {
        let i = stream.uniform_index(self.n_rows);
        let row = self.row(i);
        let z = self.labels[i];
        let margin: f64 = row.iter().zip(x.as_slice()).map(|(a, b)| a * b).sum();
        let factor = -z * inv1p_exp(z * margin);
        let mut g: Vec<f64> = row.iter().map(|r| factor * r).collect();
        if self.lambda1 > 0.0 {
            for (gj, xj) in g.iter_mut().zip(x.as_slice()) {
                *gj += self.lambda1 * xj;
            }
        }
        DenseVector::from_raw(g)
    }

    fn full_gradient(&self, x: &DenseVector) -> Option<DenseVector> {
        let mut g = vec![0.0; self.dim];
        for i in 0..self.n_rows {
            let row = self.row(i);
            let z = self.labels[i];
            let margin: f64 = row.iter().zip(x.as_slice()).map(|(a, b)| a * b).sum();
            let factor = -z * inv1p_exp(z * margin);
            for (gj, rj) in g.iter_mut().zip(row) {
                *gj += factor * rj;
            }
        }
        let n = self.n_rows as f64;
        for (gj, xj) in g.iter_mut().zip(x.as_slice()) {
            *gj = *gj / n + self.lambda1 * xj;
        }
        Some(DenseVector::from_raw(g))
    }

    fn smooth_value(&self, x: &DenseVector) -> Option<f64> {
        let mut total = 0.0;
        for i in 0..self.n_rows {
            let row = self.row(i);
            let z = self.labels[i];
            let margin: f64 = row.iter().zip(x.as_slice()).map(|(a, b)| a * b).sum();
            total += ln1p_exp(-z * margin);
        }
        Some(total / self.n_rows as f64 + 0.5 * self.lambda1 * x.norm_sq())
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
        self.lambda1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_problem(lambda1: f64) -> LogisticProblem {
        let mut s = RandomStream::derive(77, 0);
        LogisticProblem::synthetic(40, 5, lambda1, 0.01, 0.1, &mut s).unwrap()
    }

    #[test]
    fn sample_gradient_at_zero_is_half_label_row() {
        // exp(0) = 1 so the logistic factor is 1/2.
        let p = small_problem(0.0);
        let x = DenseVector::zeros(5);
        let mut s = RandomStream::derive(3, 1);
        let g = p.sample_gradient(&x, &mut s);
        // find which row it was by matching against all rows
        let matched = (0..p.n_rows()).any(|i| {
            let row = p.row(i);
            let z = p.label(i);
            (0..5).all(|j| (g[j] + (z / 2.0) * row[j]).abs() < 1e-12)
        });
        assert!(matched, "gradient draw is -(z/2)*row for the drawn row");
    }

    #[test]
    fn single_row_dataset_sampling_is_exact() {
        let p = LogisticProblem::new(vec![0.5, -1.0], vec![1.0], 2, 0.3, 0.0).unwrap();
        let x = DenseVector::new(vec![0.2, 0.4]).unwrap();
        let mut s = RandomStream::derive(1, 0);
        let g = p.sample_gradient(&x, &mut s);
        let full = p.full_gradient(&x).unwrap();
        for j in 0..2 {
            assert!((g[j] - full[j]).abs() < 1e-15);
        }
    }

    #[test]
    fn monte_carlo_unbiasedness_within_six_sigma() {
        let p = small_problem(0.02);
        let x = DenseVector::new(vec![0.3, -0.2, 0.1, 0.5, -0.4]).unwrap();
        let full = p.full_gradient(&x).unwrap();
        let m = 10_000;
        let mut s = RandomStream::derive(99, 0);
        let mut sums = vec![0.0; 5];
        let mut sq = vec![0.0; 5];
        for _ in 0..m {
            let g = p.sample_gradient(&x, &mut s);
            for j in 0..5 {
                sums[j] += g[j];
                sq[j] += g[j] * g[j];
            }
        }
        for j in 0..5 {
            let mean = sums[j] / m as f64;
            let var = (sq[j] / m as f64 - mean * mean).max(1e-30);
            let se = (var / m as f64).sqrt();
            assert!(
                (mean - full[j]).abs() <= 6.0 * se,
                "component {j}: mean {mean} vs full {} (se {se})",
                full[j]
            );
        }
    }

    #[test]
    fn full_gradient_matches_finite_differences() {
        let p = small_problem(0.05);
        let mut s = RandomStream::derive(5, 0);
        for _ in 0..10 {
            let x = DenseVector::new((0..5).map(|_| s.standard_normal()).collect()).unwrap();
            let g = p.full_gradient(&x).unwrap();
            let h = 1e-6;
            for j in 0..5 {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[j] += h;
                xm[j] -= h;
                let fd = (p.smooth_value(&xp).unwrap() - p.smooth_value(&xm).unwrap()) / (2.0 * h);
                let denom = g[j].abs().max(1e-6);
                assert!(
                    ((g[j] - fd) / denom).abs() <= 1e-5,
                    "component {j}: {} vs fd {fd}",
                    g[j]
                );
            }
        }
    }

    #[test]
    fn huge_lambda1_dominates_gradient() {
        let p = LogisticProblem::new(vec![0.5, -1.0, 0.3, 0.8], vec![1.0, -1.0], 2, 1e6, 0.0).unwrap();
        let x = DenseVector::new(vec![(0.5f64).sqrt(), -(0.5f64).sqrt()]).unwrap();
        let g = p.full_gradient(&x).unwrap();
        let reg = x.scale(1e6);
        let rel = g.sub(&reg).unwrap().norm() / reg.norm();
        assert!(rel <= 0.01, "relative deviation {rel}");
    }

    #[test]
    fn symmetric_dataset_has_zero_gradient_at_origin() {
        // each feature row appears with both labels: contributions cancel
        let data = vec![1.0, 2.0, 1.0, 2.0, -0.5, 0.3, -0.5, 0.3];
        let labels = vec![1.0, -1.0, 1.0, -1.0];
        let p = LogisticProblem::new(data, labels, 2, 0.0, 0.0).unwrap();
        let g = p.full_gradient(&DenseVector::zeros(2)).unwrap();
        assert!(g.norm() < 1e-15);
    }

    #[test]
    fn lipschitz_uses_gram_eigenvalue() {
        // Y^T Y / N = diag(4, 1) for rows (2,0),(2,0),(0,sqrt2),(0,-sqrt2)... use explicit rows
        let s2 = 2.0f64.sqrt();
        let data = vec![2.0, 0.0, -2.0, 0.0, 0.0, s2, 0.0, -s2];
        let labels = vec![1.0, -1.0, 1.0, -1.0];
        let p = LogisticProblem::new(data, labels, 2, 0.125, 0.0).unwrap();
        // Y^T Y / N = diag((4+4)/4, (2+2)/4) = diag(2, 1); L = 0.25*2 + 0.125
        assert!((p.lipschitz() - 0.625).abs() < 1e-4, "L = {}", p.lipschitz());
    }
}
