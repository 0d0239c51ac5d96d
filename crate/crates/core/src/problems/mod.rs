//! Benchmark problem suite: regularized logistic regression (synthetic
//! or file-loaded), the parameter-estimation quadratic, and a lasso toy
//! with a closed-form optimum.

mod lasso;
mod loader;
mod logistic;
mod paramest;

pub use lasso::LassoToyProblem;
pub use loader::{load_sparse_dataset, DatasetFormat};
pub use logistic::LogisticProblem;
pub use paramest::ParamEstimationProblem;
