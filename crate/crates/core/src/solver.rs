//! The adaptive-sampling accelerated proximal gradient solver and its
//! deterministic baselines.
//!
//! One solver run is strictly sequential; concurrency lives above this
//! module (replications are independent runs on independent streams).

use std::time::Instant;

use crate::error::CoreError;
use crate::problem::CompositeProblem;
use crate::prox::gradient_mapping;
use crate::sampling::{adaptive_acquire, schedule_size, SamplingSchedule};
use crate::stream::RandomStream;
use crate::vector::DenseVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    /// Accelerated proximal gradient driven by the adaptive sampling tests.
    AdaNapg,
    /// Non-accelerated proximal gradient (momentum ≡ 0), schedule-driven.
    ProxGradient,
    /// Accelerated proximal gradient, schedule-driven.
    AccelProxGradient,
    /// Accelerated proximal gradient with exact gradients (Kₙ ≡ 0).
    FullGradientAccel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// πₙ recursion with q = μα (covers μ = 0).
    General,
    /// Constant momentum β = (1−√(αμ))/(1+√(αμ)); requires μ > 0.
    StronglyConvex,
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub algorithm: Algorithm,
    pub mode: Mode,
    pub max_iterations: usize,
    /// Stop once ‖Ĝ_α(yₙ)‖ ≤ this; 0 stops only at exact optimality.
    pub stop_gmap_tol: f64,
    /// π₀ for general mode; must lie in (0, 1].
    pub pi0: f64,
    pub alpha_override: Option<f64>,
    /// Stop at the first iteration boundary where Γₙ reaches this.
    pub sample_budget: Option<u64>,
    /// Record w̃ₙ = ∇̂f(yₙ) − ∇f(yₙ) and the iterate xₙ per iteration.
    /// Requires the full-gradient capability.
    pub record_noise: bool,
}

impl SolverOptions {
    pub fn new(algorithm: Algorithm, mode: Mode, max_iterations: usize) -> Self {
        Self {
            algorithm,
            mode,
            max_iterations,
            stop_gmap_tol: 0.0,
            pi0: 1.0,
            alpha_override: None,
            sample_budget: None,
            record_noise: false,
        }
    }
}

/// Per-iteration telemetry. `objective`/`dist_sq` are present only when
/// the problem exposes the matching capability; the solver never
/// estimates F by sampling.
#[derive(Debug, Clone)]
pub struct IterationRecord {
    pub n: usize,
    pub batch_size: usize,
    pub cum_samples: u64,
    pub objective: Option<f64>,
    pub dist_sq: Option<f64>,
    pub gmap_norm: Option<f64>,
    pub test_rounds: usize,
    pub budget_capped: bool,
    pub elapsed_ns: u128,
    pub noise: Option<DenseVector>,
    pub iterate: Option<DenseVector>,
}

/// Solver state: iterates, momentum bookkeeping, and the cumulative
/// sample count Γₙ.
#[derive(Debug, Clone)]
pub struct SolverState {
    pub x_curr: DenseVector,
    pub x_prev: DenseVector,
    pub y: DenseVector,
    pub pi: f64,
    pub alpha: f64,
    pub q: f64,
    pub n: usize,
    pub cum_samples: u64,
}

/// ρ = 1 − √(μ/(L(θ²+ν²+1))), the geometric contraction factor for
/// strongly convex objectives.
pub fn rho(mu: f64, lipschitz: f64, theta: f64, nu: f64) -> f64 {
    1.0 - (mu / (lipschitz * (theta * theta + nu * nu + 1.0))).sqrt()
}

/// The unique positive root of πₙ₊₁² − (q − πₙ²)πₙ₊₁ − πₙ² = 0,
/// computed in the cancellation-free form when q < πₙ².
pub fn pi_next(pi_n: f64, q: f64) -> f64 {
    let b = q - pi_n * pi_n;
    let disc = (b * b + 4.0 * pi_n * pi_n).sqrt();
    if b >= 0.0 {
        0.5 * (b + disc)
    } else {
        2.0 * pi_n * pi_n / (disc - b)
    }
}

/// Momentum coefficient πₙ(1−πₙ)/(πₙ² + πₙ₊₁).
pub fn momentum_coeff(pi_n: f64, pi_next: f64) -> f64 {
    pi_n * (1.0 - pi_n) / (pi_n * pi_n + pi_next)
}

fn default_alpha(
    problem: &dyn CompositeProblem,
    options: &SolverOptions,
    schedule: &SamplingSchedule,
) -> f64 {
    if let Some(a) = options.alpha_override {
        return a;
    }
    match (options.algorithm, schedule) {
        (Algorithm::AdaNapg, SamplingSchedule::Adaptive(p)) => {
            1.0 / (problem.lipschitz() * (p.theta * p.theta + p.nu * p.nu + 1.0))
        }
        _ => 1.0 / problem.lipschitz(),
    }
}

fn validate(
    problem: &dyn CompositeProblem,
    options: &SolverOptions,
    schedule: &SamplingSchedule,
) -> Result<(), CoreError> {
    if options.max_iterations == 0 {
        return Err(CoreError::InvalidOptions("max_iterations must be >= 1".into()));
    }
    if let Some(a) = options.alpha_override {
        if a <= 0.0 || !a.is_finite() {
            return Err(CoreError::NonPositive {
                context: "alpha_override",
                value: a,
            });
        }
    }
    match options.mode {
        Mode::StronglyConvex => {
            if problem.strong_convexity() <= 0.0 {
                return Err(CoreError::InvalidOptions(
                    "strongly_convex mode requires strong_convexity_mu > 0".into(),
                ));
            }
        }
        Mode::General => {
            if !(options.pi0 > 0.0 && options.pi0 <= 1.0) {
                return Err(CoreError::InvalidOptions(format!(
                    "pi0 must lie in (0, 1], got {}",
                    options.pi0
                )));
            }
        }
    }
    match (options.algorithm, schedule) {
        (Algorithm::AdaNapg, SamplingSchedule::Adaptive(p)) => p.validate(),
        (Algorithm::AdaNapg, _) => Err(CoreError::InvalidOptions(
            "adanapg requires the adaptive sampling strategy".into(),
        )),
        (Algorithm::ProxGradient | Algorithm::AccelProxGradient, SamplingSchedule::Adaptive(_)) => {
            Err(CoreError::InvalidOptions(
                "schedule-driven baselines require a deterministic schedule".into(),
            ))
        }
        _ => Ok(()),
    }
}

/// Draws `k` samples at `y` and returns their mean without retaining
/// the batch (deterministic-schedule path).
fn mean_of_draws(
    problem: &dyn CompositeProblem,
    y: &DenseVector,
    k: usize,
    stream: &mut RandomStream,
) -> DenseVector {
    let mut acc = DenseVector::zeros(y.dim());
    for _ in 0..k {
        let g = problem.sample_gradient(y, stream);
        acc.add_assign(&g).expect("sample dimension");
    }
    acc.scale(1.0 / k as f64)
}

/// Runs the configured solver from `x0` and returns per-iteration
/// telemetry: one record per executed iteration plus a terminal record
/// for the final iterate (when the run ends by iteration count or
/// budget rather than by the gradient-mapping tolerance).
pub fn run(
    problem: &dyn CompositeProblem,
    options: &SolverOptions,
    schedule: &SamplingSchedule,
    x0: &DenseVector,
    stream: &mut RandomStream,
) -> Result<Vec<IterationRecord>, CoreError> {
    validate(problem, options, schedule)?;
    if x0.dim() != problem.dimension() {
        return Err(CoreError::DimensionMismatch {
            left: problem.dimension(),
            right: x0.dim(),
        });
    }
    x0.validate("run x0")?;
    if options.record_noise {
        // fail fast before any sampling
        problem.require_full_gradient(x0, "record_noise")?;
    }

    let alpha = default_alpha(problem, options, schedule);
    let mu = problem.strong_convexity();
    let q = (mu * alpha).min(1.0);
    let beta_const = {
        let s = q.sqrt();
        (1.0 - s) / (1.0 + s)
    };

    let mut state = SolverState {
        x_curr: x0.clone(),
        x_prev: x0.clone(),
        y: x0.clone(),
        pi: match options.mode {
            Mode::General => options.pi0,
            Mode::StronglyConvex => q.sqrt(),
        },
        alpha,
        q,
        n: 0,
        cum_samples: 0,
    };

    let mut carry_k = match schedule {
        SamplingSchedule::Adaptive(p) => p.k_initial,
        _ => 0,
    };
    let xstar = problem.known_optimum();
    let mut records = Vec::with_capacity(options.max_iterations + 1);
    let started = Instant::now();
    let mut last_elapsed = 0u128;
    let mut stopped_by_tol = false;

    while state.n < options.max_iterations {
        if let Some(budget) = options.sample_budget {
            if state.cum_samples >= budget {
                break;
            }
        }
        // gradient estimate at y_n
        let (grad_est, batch_size, gmap_norm_sq, rounds, capped) = match options.algorithm {
            Algorithm::FullGradientAccel => {
                let g = problem.require_full_gradient(&state.y, "full_gradient_accel")?;
                let m = gradient_mapping(problem, &state.y, &g, alpha)?;
                (g, 0usize, m.norm_sq(), 0usize, false)
            }
            Algorithm::AdaNapg => {
                let params = match schedule {
                    SamplingSchedule::Adaptive(p) => p,
                    _ => unreachable!("validated"),
                };
                let out = adaptive_acquire(problem, &state.y, alpha, params, carry_k, stream)?;
                carry_k = out.k_carry_out;
                (
                    out.batch.mean.clone(),
                    out.batch.size,
                    out.batch.gmap_norm_sq,
                    out.test_rounds,
                    out.budget_capped,
                )
            }
            Algorithm::ProxGradient | Algorithm::AccelProxGradient => {
                let k = schedule_size(schedule, state.n);
                let mean = mean_of_draws(problem, &state.y, k, stream);
                let m = gradient_mapping(problem, &state.y, &mean, alpha)?;
                (mean, k, m.norm_sq(), 0usize, false)
            }
        };
        grad_est.validate("gradient estimate")?;
        state.cum_samples += batch_size as u64;

        let noise = if options.record_noise {
            let full = problem.require_full_gradient(&state.y, "record_noise")?;
            Some(grad_est.sub(&full)?)
        } else {
            None
        };

        let gmap_norm = gmap_norm_sq.sqrt();
        let now = started.elapsed().as_nanos();
        records.push(IterationRecord {
            n: state.n,
            batch_size,
            cum_samples: state.cum_samples,
            objective: problem.objective(&state.x_curr),
            dist_sq: xstar.map(|xs| state.x_curr.sub(xs).map(|d| d.norm_sq())).transpose()?,
            gmap_norm: Some(gmap_norm),
            test_rounds: rounds,
            budget_capped: capped,
            elapsed_ns: now - last_elapsed,
            noise,
            iterate: options.record_noise.then(|| state.x_curr.clone()),
        });
        last_elapsed = now;

        if gmap_norm <= options.stop_gmap_tol {
            stopped_by_tol = true;
            break;
        }

        // x_{n+1} = prox_{αh}(y_n − α ∇̂f(y_n))
        let stepped = state.y.axpy(-alpha, &grad_est)?;
        let x_next = problem.prox(&stepped, alpha);
        x_next.validate("iterate")?;

        let momentum = match (options.algorithm, options.mode) {
            (Algorithm::ProxGradient, _) => 0.0,
            (_, Mode::StronglyConvex) => beta_const,
            (_, Mode::General) => {
                let next = pi_next(state.pi, state.q);
                let beta = momentum_coeff(state.pi, next);
                state.pi = next;
                beta
            }
        };
        let diff = x_next.sub(&state.x_curr)?;
        state.y = x_next.axpy(momentum, &diff)?;
        state.x_prev = std::mem::replace(&mut state.x_curr, x_next);
        state.n += 1;
    }

    if !stopped_by_tol {
        let now = started.elapsed().as_nanos();
        records.push(IterationRecord {
            n: state.n,
            batch_size: 0,
            cum_samples: state.cum_samples,
            objective: problem.objective(&state.x_curr),
            dist_sq: xstar.map(|xs| state.x_curr.sub(xs).map(|d| d.norm_sq())).transpose()?,
            gmap_norm: None,
            test_rounds: 0,
            budget_capped: false,
            elapsed_ns: now - last_elapsed,
            noise: None,
            iterate: options.record_noise.then(|| state.x_curr.clone()),
        });
    }
    Ok(records)
}

/// Full-gradient accelerated solve to a gradient-mapping tolerance,
/// used as the ground-truth oracle for x⋆ and F⋆. Uses α = 1/L.
pub fn solve_oracle(
    problem: &dyn CompositeProblem,
    max_iter: usize,
    tol: f64,
) -> Result<DenseVector, CoreError> {
    let alpha = 1.0 / problem.lipschitz();
    let mu = problem.strong_convexity();
    let q = (mu * alpha).min(1.0);
    let beta_const = {
        let s = q.sqrt();
        (1.0 - s) / (1.0 + s)
    };
    let strongly_convex = mu > 0.0;

    let dim = problem.dimension();
    let mut x = DenseVector::zeros(dim);
    let mut y = x.clone();
    let mut pi = 1.0f64;
    let mut achieved = f64::INFINITY;

    for _ in 0..max_iter {
        let gx = problem.require_full_gradient(&x, "solve_oracle")?;
        let gm = gradient_mapping(problem, &x, &gx, alpha)?;
        achieved = gm.norm();
        if achieved <= tol {
            return Ok(x);
        }
        let gy = problem.require_full_gradient(&y, "solve_oracle")?;
        let stepped = y.axpy(-alpha, &gy)?;
        let x_next = problem.prox(&stepped, alpha);
        let beta = if strongly_convex {
            beta_const
        } else {
            let next = pi_next(pi, 0.0);
            let b = momentum_coeff(pi, next);
            pi = next;
            b
        };
        let diff = x_next.sub(&x)?;
        y = x_next.axpy(beta, &diff)?;
        x = x_next;
    }
    // final check so a run that converges on the last step succeeds
    let gx = problem.require_full_gradient(&x, "solve_oracle")?;
    let gm = gradient_mapping(problem, &x, &gx, alpha)?;
    if gm.norm() <= tol {
        return Ok(x);
    }
    Err(CoreError::OracleDidNotConverge {
        tol,
        max_iter,
        achieved: gm.norm().min(achieved),
    })
}
