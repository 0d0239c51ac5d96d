//! Small dense symmetric-matrix helpers: just enough linear algebra
//! for covariance factorization, spectral-norm estimation, and PSD
//! checks on desk-scale matrices.

use crate::error::CoreError;

/// Row-major symmetric matrix of order n.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    pub n: usize,
    pub data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            assert_eq!(r.len(), n);
            data.extend(r);
        }
        Self { n, data }
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n];
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            out[i] = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Lower-triangular Cholesky factor; errors if not positive definite.
    pub fn cholesky(&self) -> Result<Vec<f64>, CoreError> {
        let n = self.n;
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut s = self.at(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if s <= 0.0 {
                        return Err(CoreError::NotPositiveDefinite { pivot: i });
                    }
                    l[i * n + i] = s.sqrt();
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        Ok(l)
    }

    /// Largest eigenvalue by power iteration (symmetric PSD usage).
    pub fn largest_eigenvalue(&self, iterations: usize, tol: f64) -> f64 {
        let n = self.n;
        if n == 0 {
            return 0.0;
        }
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64) * 0.3).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        let mut lambda = 0.0;
        for _ in 0..iterations {
            let w = self.matvec(&v);
            let nw = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if nw == 0.0 {
                return 0.0;
            }
            let next: Vec<f64> = w.iter().map(|x| x / nw).collect();
            let new_lambda = next
                .iter()
                .zip(self.matvec(&next))
                .map(|(a, b)| a * b)
                .sum::<f64>();
            let done = (new_lambda - lambda).abs() <= tol * new_lambda.abs().max(1.0);
            lambda = new_lambda;
            v = next;
            if done {
                break;
            }
        }
        lambda
    }

    /// All eigenvalues via cyclic Jacobi rotations (symmetric input).
    pub fn eigenvalues(&self) -> Vec<f64> {
        let n = self.n;
        let mut a = self.data.clone();
        for _sweep in 0..100 {
            let mut off = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    off += a[i * n + j] * a[i * n + j];
                }
            }
            if off.sqrt() < 1e-13 * (1.0 + self.frobenius_norm()) {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[p * n + q];
                    if apq.abs() < 1e-300 {
                        continue;
                    }
                    let app = a[p * n + p];
                    let aqq = a[q * n + q];
                    let tau = (aqq - app) / (2.0 * apq);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + (1.0 + tau * tau).sqrt())
                    } else {
                        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[k * n + p];
                        let akq = a[k * n + q];
                        a[k * n + p] = c * akp - s * akq;
                        a[k * n + q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[p * n + k];
                        let aqk = a[q * n + k];
                        a[p * n + k] = c * apk - s * aqk;
                        a[q * n + k] = s * apk + c * aqk;
                    }
                }
            }
        }
        (0..n).map(|i| a[i * n + i]).collect()
    }
}

/// Draws a random orthogonal matrix (Haar-ish via Gram-Schmidt on a
/// Gaussian matrix) as flat row-major data.
pub fn random_orthogonal(n: usize, stream: &mut crate::stream::RandomStream) -> Vec<f64> {
    let mut q = vec![0.0; n * n];
    for r in 0..n {
        let mut row: Vec<f64> = (0..n).map(|_| stream.standard_normal()).collect();
        for prev in 0..r {
            let dot: f64 = (0..n).map(|j| row[j] * q[prev * n + j]).sum();
            for j in 0..n {
                row[j] -= dot * q[prev * n + j];
            }
        }
        let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
        for j in 0..n {
            q[r * n + j] = row[j] / norm;
        }
    }
    q
}
