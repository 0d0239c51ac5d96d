//! Batch-size control: adaptive inner-product/orthogonality tests on
//! sample statistics, plus the deterministic geometric/polynomial/fixed
//! schedules.

use crate::error::CoreError;
use crate::problem::CompositeProblem;
use crate::prox::gradient_mapping;
use crate::stream::RandomStream;
use crate::vector::DenseVector;

/// Parameters of the adaptive sampling tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveTestParams {
    pub theta: f64,
    pub nu: f64,
    pub k_initial: usize,
    pub k_max: usize,
    pub max_augment_rounds: usize,
    /// ε-floor on ‖Ĝ_α(y)‖² so the tests cannot divide by a vanishing
    /// gradient-mapping norm at numerical convergence.
    pub gmap_floor: f64,
}

impl AdaptiveTestParams {
    pub fn new(theta: f64, nu: f64, k_initial: usize, k_max: usize) -> Result<Self, CoreError> {
        let p = Self {
            theta,
            nu,
            k_initial,
            k_max,
            max_augment_rounds: 6,
            gmap_floor: 1e-16,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), CoreError> {
        if self.theta <= 0.0 {
            return Err(CoreError::NonPositive {
                context: "AdaptiveTestParams theta",
                value: self.theta,
            });
        }
        if self.nu <= 0.0 {
            return Err(CoreError::NonPositive {
                context: "AdaptiveTestParams nu",
                value: self.nu,
            });
        }
        if self.k_initial < 2 {
            return Err(CoreError::InvalidOptions(format!(
                "k_initial must be >= 2 (sample variance needs two samples), got {}",
                self.k_initial
            )));
        }
        if self.k_max < self.k_initial {
            return Err(CoreError::InvalidOptions(format!(
                "k_max {} < k_initial {}",
                self.k_max, self.k_initial
            )));
        }
        if self.max_augment_rounds < 1 {
            return Err(CoreError::InvalidOptions(
                "max_augment_rounds must be >= 1".into(),
            ));
        }
        if self.gmap_floor < 0.0 {
            return Err(CoreError::NonPositive {
                context: "AdaptiveTestParams gmap_floor",
                value: self.gmap_floor,
            });
        }
        Ok(())
    }
}

/// A batch of per-sample gradients at a point, with its aggregate mean
/// and the projection/orthogonality statistics v₁, v₂.
///
/// Samples are retained in full (flat row-major storage) so a failed
/// test can augment the batch without discarding draws.
#[derive(Debug, Clone)]
pub struct GradientBatch {
    pub point: DenseVector,
    samples: Vec<f64>,
    dim: usize,
    pub mean: DenseVector,
    pub size: usize,
    /// Sample variance of projection lengths of gᵢ onto the mean.
    pub v1: f64,
    /// Sample mean-squared residual of gᵢ orthogonal to the mean.
    pub v2: f64,
    /// ‖Ĝ_α(y)‖² where Ĝ is the gradient mapping at the batch mean.
    pub gmap_norm_sq: f64,
}

impl GradientBatch {
    pub fn sample(&self, i: usize) -> &[f64] {
        &self.samples[i * self.dim..(i + 1) * self.dim]
    }

    pub fn samples_flat(&self) -> &[f64] {
        &self.samples
    }

    /// Recomputes the mean from the retained samples and returns the
    /// max componentwise deviation from the stored mean.
    pub fn mean_recompute_error(&self) -> f64 {
        let k = self.size as f64;
        let mut err: f64 = 0.0;
        for j in 0..self.dim {
            let s: f64 = (0..self.size).map(|i| self.sample(i)[j]).sum();
            err = err.max((s / k - self.mean[j]).abs());
        }
        err
    }
}

/// v₁/v₂ statistics of `samples` measured against a reference gradient
/// direction. `batch_statistics` uses the batch mean as reference (the
/// practical tests); the population variant uses the exact gradient.
fn directional_stats(samples: &[f64], dim: usize, k: usize, reference: &DenseVector) -> (f64, f64) {
    let ref_norm_sq = reference.norm_sq();
    let denom = (k - 1) as f64;
    if ref_norm_sq == 0.0 {
        // Degenerate direction: v1 := 0, v2 := mean squared sample norm.
        let v2 = samples.iter().map(|s| s * s).sum::<f64>() / denom;
        return (0.0, v2);
    }
    let ref_norm = ref_norm_sq.sqrt();
    let mut v1 = 0.0;
    let mut v2 = 0.0;
    for i in 0..k {
        let row = &samples[i * dim..(i + 1) * dim];
        let mut dot = 0.0;
        let mut norm_sq = 0.0;
        for (s, r) in row.iter().zip(reference.as_slice()) {
            dot += s * r;
            norm_sq += s * s;
        }
        let proj = dot / ref_norm;
        let d1 = proj - ref_norm;
        v1 += d1 * d1;
        // ‖gᵢ − (gᵢᵀr/‖r‖²) r‖² = ‖gᵢ‖² − proj², computed explicitly
        // against cancellation when the residual is tiny.
        v2 += (norm_sq - proj * proj).max(0.0);
    }
    (v1 / denom, v2 / denom)
}

/// Computes the batch mean, the sample gradient mapping at the mean,
/// and the test statistics v₁, v₂ for a list of gradient samples.
pub fn batch_statistics(
    samples: Vec<DenseVector>,
    y: &DenseVector,
    problem: &dyn CompositeProblem,
    alpha: f64,
) -> Result<GradientBatch, CoreError> {
    let k = samples.len();
    if k < 2 {
        return Err(CoreError::TooFewSamples { got: k });
    }
    let dim = y.dim();
    let mut flat = Vec::with_capacity(k * dim);
    for s in &samples {
        if s.dim() != dim {
            return Err(CoreError::DimensionMismatch {
                left: dim,
                right: s.dim(),
            });
        }
        flat.extend_from_slice(s.as_slice());
    }
    finish_batch(flat, dim, k, y, problem, alpha)
}

fn finish_batch(
    flat: Vec<f64>,
    dim: usize,
    k: usize,
    y: &DenseVector,
    problem: &dyn CompositeProblem,
    alpha: f64,
) -> Result<GradientBatch, CoreError> {
    let mut mean = vec![0.0; dim];
    for i in 0..k {
        for (m, s) in mean.iter_mut().zip(&flat[i * dim..(i + 1) * dim]) {
            *m += s;
        }
    }
    let kf = k as f64;
    for m in &mut mean {
        *m /= kf;
    }
    let mean = DenseVector::from_raw(mean);
    mean.validate("batch mean")?;
    let (v1, v2) = directional_stats(&flat, dim, k, &mean);
    let gmap = gradient_mapping(problem, y, &mean, alpha)?;
    Ok(GradientBatch {
        point: y.clone(),
        samples: flat,
        dim,
        mean,
        size: k,
        v1,
        v2,
        gmap_norm_sq: gmap.norm_sq(),
    })
}

/// Result of one adaptive acquisition.
#[derive(Debug)]
pub struct AcquireOutcome {
    pub batch: GradientBatch,
    /// Number of test evaluations performed (1 = passed first try).
    pub test_rounds: usize,
    /// Set when k_max was reached with the tests still failing.
    pub budget_capped: bool,
    /// Final batch size, the next iteration's starting size.
    pub k_carry_out: usize,
}

fn tests_pass(params: &AdaptiveTestParams, b: &GradientBatch) -> bool {
    let g = b.gmap_norm_sq.max(params.gmap_floor);
    let k = b.size as f64;
    b.v1 / k <= params.theta * params.theta * g && b.v2 / k <= params.nu * params.nu * g
}

fn required_k(params: &AdaptiveTestParams, b: &GradientBatch) -> usize {
    let g = b.gmap_norm_sq.max(params.gmap_floor);
    let k1 = b.v1 / (params.theta * params.theta * g);
    let k2 = b.v2 / (params.nu * params.nu * g);
    let req = k1.max(k2).ceil();
    if req.is_finite() && req > 0.0 {
        (req as usize).min(params.k_max)
    } else {
        params.k_max
    }
}

/// Draws a gradient batch at `y` that satisfies both sampling tests,
/// growing the batch to the variance-implied size on failure. Existing
/// draws are never discarded; the first `carry_k` samples of the final
/// batch are exactly the initial draws.
pub fn adaptive_acquire(
    problem: &dyn CompositeProblem,
    y: &DenseVector,
    alpha: f64,
    params: &AdaptiveTestParams,
    carry_k: usize,
    stream: &mut RandomStream,
) -> Result<AcquireOutcome, CoreError> {
    params.validate()?;
    let dim = y.dim();
    let start = carry_k.clamp(params.k_initial, params.k_max);
    let mut flat = Vec::with_capacity(start * dim);
    let mut k = 0usize;
    let mut draw_into = |flat: &mut Vec<f64>, count: usize, stream: &mut RandomStream| {
        for _ in 0..count {
            let g = problem.sample_gradient(y, stream);
            debug_assert_eq!(g.dim(), dim);
            flat.extend_from_slice(g.as_slice());
        }
    };
    draw_into(&mut flat, start, stream);
    k = start;

    let mut batch = finish_batch(flat, dim, k, y, problem, alpha)?;
    let mut rounds = 1;
    let mut budget_capped = false;
    while !tests_pass(params, &batch) {
        let req = required_k(params, &batch);
        if req <= k {
            // Tests fail but the cap (or the ceiling arithmetic) will
            // not let the batch grow further.
            budget_capped = k >= params.k_max;
            break;
        }
        if rounds >= params.max_augment_rounds {
            budget_capped = k >= params.k_max;
            break;
        }
        let mut flat = batch.samples;
        draw_into(&mut flat, req - k, stream);
        k = req;
        batch = finish_batch(flat, dim, k, y, problem, alpha)?;
        rounds += 1;
        if k >= params.k_max && !tests_pass(params, &batch) {
            budget_capped = true;
            break;
        }
    }
    Ok(AcquireOutcome {
        k_carry_out: k,
        test_rounds: rounds,
        budget_capped,
        batch,
    })
}

/// The population form of the sampling tests, usable when the exact
/// gradient at `y` is available (oracle problems). Returns the v₁/v₂
/// statistics measured against the exact gradient and the exact
/// gradient-mapping norm squared. Used only by tests and diagnostics.
pub fn population_statistics(
    batch: &GradientBatch,
    problem: &dyn CompositeProblem,
    alpha: f64,
) -> Result<(f64, f64, f64), CoreError> {
    let grad = problem.require_full_gradient(&batch.point, "population_statistics")?;
    let (v1, v2) = directional_stats(&batch.samples, batch.dim, batch.size, &grad);
    let gmap = gradient_mapping(problem, &batch.point, &grad, alpha)?;
    Ok((v1, v2, gmap.norm_sq()))
}

/// Deterministic batch-size sequences and the adaptive controller.
#[derive(Debug, Clone)]
pub enum SamplingSchedule {
    Adaptive(AdaptiveTestParams),
    /// Kₙ = ⌈k₀(1+γ₁)ⁿ⌉
    Geometric { k0: usize, gamma1: f64 },
    /// Kₙ = ⌈k₀·n^{γ₂}⌉ for n ≥ 1; n = 0 maps to k₀.
    Polynomial { k0: usize, gamma2: f64 },
    Fixed { k: usize },
}

/// Size prescribed by a deterministic schedule at iteration n.
/// Panics never; adaptive schedules are driven via `adaptive_acquire`.
pub fn schedule_size(schedule: &SamplingSchedule, n: usize) -> usize {
    match schedule {
        SamplingSchedule::Adaptive(p) => p.k_initial,
        SamplingSchedule::Geometric { k0, gamma1 } => {
            let v = (*k0 as f64) * (1.0 + gamma1).powi(n as i32);
            v.ceil().max(1.0) as usize
        }
        SamplingSchedule::Polynomial { k0, gamma2 } => {
            if n == 0 {
                (*k0).max(1)
            } else {
                ((*k0 as f64) * (n as f64).powf(*gamma2)).ceil().max(1.0) as usize
            }
        }
        SamplingSchedule::Fixed { k } => (*k).max(1),
    }
}
