//! Dense vectors over f64 with dimension-checked arithmetic.

use crate::error::CoreError;

/// A fixed-dimension dense vector of finite f64 components.
///
/// The dimension is set at construction and all binary operations
/// require matching dimensions. Constructors reject NaN/Inf so that
/// non-finite values cannot enter silently; hot-loop arithmetic is
/// unchecked and callers surface non-finite results through
/// [`DenseVector::validate`] at operation boundaries.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseVector(Vec<f64>);

impl DenseVector {
    /// Builds a vector from components, rejecting non-finite entries.
    pub fn new(components: Vec<f64>) -> Result<Self, CoreError> {
        if let Some(i) = components.iter().position(|c| !c.is_finite()) {
            return Err(CoreError::NonFinite {
                context: "DenseVector::new",
                index: i,
            });
        }
        Ok(Self(components))
    }

    /// Builds a vector without the finiteness scan. Used by internal
    /// arithmetic that is followed by an explicit `validate`.
    pub(crate) fn from_raw(components: Vec<f64>) -> Self {
        Self(components)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// Errors if any component is NaN or ±Inf.
    pub fn validate(&self, context: &'static str) -> Result<(), CoreError> {
        match self.0.iter().position(|c| !c.is_finite()) {
            Some(i) => Err(CoreError::NonFinite { context, index: i }),
            None => Ok(()),
        }
    }

    /// Inner product. Errors on dimension mismatch.
    pub fn dot(&self, other: &Self) -> Result<f64, CoreError> {
        if self.dim() != other.dim() {
            return Err(CoreError::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a * b)
            .sum())
    }

    /// Euclidean norm; 0 exactly iff the vector is zero.
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|a| a * a).sum()
    }

    pub fn add(&self, other: &Self) -> Result<Self, CoreError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, CoreError> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self(self.0.iter().map(|a| a * factor).collect())
    }

    /// self + factor * other, the workhorse of the solver updates.
    pub fn axpy(&self, factor: f64, other: &Self) -> Result<Self, CoreError> {
        self.zip_with(other, |a, b| a + factor * b)
    }

    /// In-place accumulate: self += other.
    pub fn add_assign(&mut self, other: &Self) -> Result<(), CoreError> {
        if self.dim() != other.dim() {
            return Err(CoreError::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += b;
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self, CoreError> {
        if self.dim() != other.dim() {
            return Err(CoreError::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(Self(
            self.0.iter().zip(&other.0).map(|(&a, &b)| f(a, b)).collect(),
        ))
    }
}

impl std::ops::Index<usize> for DenseVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl std::ops::IndexMut<usize> for DenseVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}
