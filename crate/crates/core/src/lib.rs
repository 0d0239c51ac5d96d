//! Stochastic composite optimization toolkit: adaptive-sampling
//! Nesterov accelerated proximal gradient, deterministic-sampling
//! baselines, a benchmark problem suite, and replication analysis.

pub mod analysis;
pub mod error;
pub mod linalg;
pub mod prox;
pub mod problem;
pub mod problems;
pub mod sampling;
pub mod solver;
pub mod stream;
pub mod vector;

pub use error::CoreError;
pub use problem::CompositeProblem;
pub use stream::RandomStream;
pub use vector::DenseVector;
