//! Post-hoc statistics over replication ensembles: RMSE curves and
//! rate-slope fits, sample-efficiency curves, the rescaled noise
//! covariance-gap diagnostic, and moment-based normality diagnostics.

use crate::error::CoreError;
use crate::linalg::SymMatrix;
use crate::solver::IterationRecord;
use crate::vector::DenseVector;

/// Dimension guard for the d×d covariance diagnostics.
pub const COVARIANCE_DIM_GUARD: usize = 200;

/// Problem/config metadata an ensemble carries for the diagnostics.
#[derive(Debug, Clone)]
pub struct EnsembleMeta {
    pub x_star: Option<DenseVector>,
    pub mu: f64,
    pub lipschitz: f64,
    pub theta: f64,
    pub nu: f64,
    pub config_hash: Option<String>,
}

impl EnsembleMeta {
    pub fn rho(&self) -> f64 {
        crate::solver::rho(self.mu, self.lipschitz, self.theta, self.nu)
    }

    pub fn alpha(&self) -> f64 {
        1.0 / (self.lipschitz * (self.theta * self.theta + self.nu * self.nu + 1.0))
    }
}

/// Per-replication trajectories plus recorded noise/iterate vectors.
#[derive(Debug)]
pub struct ReplicationEnsemble {
    pub trajectories: Vec<Vec<IterationRecord>>,
    pub meta: EnsembleMeta,
}

impl ReplicationEnsemble {
    /// All replications must share the iteration count.
    pub fn new(
        trajectories: Vec<Vec<IterationRecord>>,
        meta: EnsembleMeta,
    ) -> Result<Self, CoreError> {
        if trajectories.is_empty() {
            return Err(CoreError::AnalysisPrecondition(
                "ensemble needs at least one replication".into(),
            ));
        }
        let len = trajectories[0].len();
        if let Some(j) = trajectories.iter().position(|t| t.len() != len) {
            return Err(CoreError::AnalysisPrecondition(format!(
                "replication {j} has {} records, expected {len}",
                trajectories[j].len()
            )));
        }
        Ok(Self { trajectories, meta })
    }

    pub fn replications(&self) -> usize {
        self.trajectories.len()
    }

    pub fn iterations(&self) -> usize {
        self.trajectories[0].len()
    }
}

/// OLS fit of ln RMSEₙ against n over a window.
#[derive(Debug, Clone, Copy)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// ½·ln ρ, the slope the geometric rate predicts.
    pub theoretical_slope: f64,
}

/// RMSEₙ = √((1/M) Σⱼ ‖xₙ⁽ʲ⁾ − x⋆‖²) from the recorded dist_sq column.
pub fn rmse_curve(ens: &ReplicationEnsemble) -> Result<Vec<(usize, f64)>, CoreError> {
    let m = ens.replications() as f64;
    let len = ens.iterations();
    let mut out = Vec::with_capacity(len);
    for n in 0..len {
        let mut acc = 0.0;
        for t in &ens.trajectories {
            let d = t[n].dist_sq.ok_or_else(|| {
                CoreError::AnalysisPrecondition(
                    "rmse_curve needs dist_sq (known optimum) on every record".into(),
                )
            })?;
            acc += d;
        }
        out.push((t_iter_n(ens, n), (acc / m).sqrt()));
    }
    Ok(out)
}

fn t_iter_n(ens: &ReplicationEnsemble, n: usize) -> usize {
    ens.trajectories[0][n].n
}

/// OLS of ln RMSE on the window [n_lo, n_hi] (inclusive bounds on the
/// iteration index). Errors on zero RMSE inside the window.
pub fn rate_fit(
    curve: &[(usize, f64)],
    window: (usize, usize),
    rho: f64,
) -> Result<RateFit, CoreError> {
    let pts: Vec<(f64, f64)> = curve
        .iter()
        .filter(|(n, _)| *n >= window.0 && *n <= window.1)
        .map(|&(n, r)| (n as f64, r))
        .collect();
    if pts.len() < 2 {
        return Err(CoreError::AnalysisPrecondition(format!(
            "rate_fit window [{}, {}] selects {} points",
            window.0,
            window.1,
            pts.len()
        )));
    }
    if let Some((n, _)) = pts.iter().find(|(_, r)| *r <= 0.0) {
        return Err(CoreError::AnalysisPrecondition(format!(
            "rate_fit: RMSE is zero at n = {n}, log fit is degenerate"
        )));
    }
    let k = pts.len() as f64;
    let mean_x = pts.iter().map(|(x, _)| x).sum::<f64>() / k;
    let mean_y = pts.iter().map(|(_, y)| y.ln()).sum::<f64>() / k;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (x, y) in &pts {
        let dx = x - mean_x;
        let dy = y.ln() - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok(RateFit {
        slope,
        intercept,
        r_squared,
        theoretical_slope: 0.5 * rho.ln(),
    })
}

fn noise_at<'a>(
    t: &'a [IterationRecord],
    n: usize,
) -> Result<&'a DenseVector, CoreError> {
    t[n].noise.as_ref().ok_or_else(|| {
        CoreError::AnalysisPrecondition("noise vectors were not recorded for this ensemble".into())
    })
}

/// Ŵₙ = ρ⁻ⁿ·(1/M)·Σⱼ w̃ₙ⁽ʲ⁾(w̃ₙ⁽ʲ⁾)ᵀ for every n with recorded noise.
fn rescaled_noise_covariance(
    ens: &ReplicationEnsemble,
    rho: f64,
    n: usize,
) -> Result<SymMatrix, CoreError> {
    let d = noise_at(&ens.trajectories[0], n)?.dim();
    if d > COVARIANCE_DIM_GUARD {
        return Err(CoreError::AnalysisPrecondition(format!(
            "dimension {d} exceeds the covariance guard {COVARIANCE_DIM_GUARD}"
        )));
    }
    let m = ens.replications() as f64;
    let scale = rho.powi(-(t_iter_n(ens, n) as i32)) / m;
    let mut w = SymMatrix::zeros(d);
    for t in &ens.trajectories {
        let v = noise_at(t, n)?;
        for i in 0..d {
            for j in 0..d {
                w.data[i * d + j] += scale * v[i] * v[j];
            }
        }
    }
    Ok(w)
}

/// ΔWₙ = ‖Ŵₙ₊₁ − Ŵₙ‖_F over every consecutive pair with recorded noise.
pub fn covariance_gap_curve(
    ens: &ReplicationEnsemble,
    rho: f64,
) -> Result<Vec<(usize, f64)>, CoreError> {
    // the terminal record carries no batch, hence no noise vector
    let usable = ens.trajectories[0]
        .iter()
        .take_while(|r| r.noise.is_some())
        .count();
    if usable < 2 {
        return Err(CoreError::AnalysisPrecondition(
            "covariance_gap_curve needs noise recorded on at least two iterations".into(),
        ));
    }
    let mut prev = rescaled_noise_covariance(ens, rho, 0)?;
    let mut out = Vec::with_capacity(usable - 1);
    for n in 1..usable {
        let next = rescaled_noise_covariance(ens, rho, n)?;
        out.push((t_iter_n(ens, n - 1), next.sub(&prev).frobenius_norm()));
        prev = next;
    }
    Ok(out)
}

/// Per-component moment diagnostics of the CLT-scaled error.
#[derive(Debug, Clone)]
pub struct ComponentMoments {
    pub component: usize,
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub skewness_pass: bool,
    pub kurtosis_pass: bool,
}

#[derive(Debug, Clone)]
pub struct NormalityReport {
    pub n_terminal: usize,
    pub components: Vec<ComponentMoments>,
    /// Empirical covariance of the scaled stacked error (xₙ−x⋆, xₙ₋₁−x⋆).
    pub covariance: SymMatrix,
    pub min_eigenvalue: f64,
}

/// The CLT-scaled stacked error α⁻¹ρ^{−n/2}(xₙ−x⋆, xₙ₋₁−x⋆) for one
/// replication, from recorded iterates.
fn scaled_stacked_error(
    t: &[IterationRecord],
    idx: usize,
    x_star: &DenseVector,
    scale: f64,
) -> Result<Vec<f64>, CoreError> {
    let cur = t[idx].iterate.as_ref().ok_or_else(|| {
        CoreError::AnalysisPrecondition("iterates were not recorded for this ensemble".into())
    })?;
    let prev = t[idx - 1].iterate.as_ref().ok_or_else(|| {
        CoreError::AnalysisPrecondition("iterates were not recorded for this ensemble".into())
    })?;
    let mut out = Vec::with_capacity(2 * cur.dim());
    for c in cur.as_slice().iter().zip(x_star.as_slice()) {
        out.push(scale * (c.0 - c.1));
    }
    for c in prev.as_slice().iter().zip(x_star.as_slice()) {
        out.push(scale * (c.0 - c.1));
    }
    Ok(out)
}

/// Empirical covariance of the scaled stacked error at record index
/// `idx` across replications. Shared by the normality report and the
/// covariance-stabilization acceptance check.
pub fn scaled_error_covariance(
    ens: &ReplicationEnsemble,
    idx: usize,
) -> Result<SymMatrix, CoreError> {
    let x_star = ens.meta.x_star.as_ref().ok_or_else(|| {
        CoreError::AnalysisPrecondition("scaled_error_covariance needs a known optimum".into())
    })?;
    if idx == 0 {
        return Err(CoreError::AnalysisPrecondition(
            "stacked error needs idx >= 1 (uses the lagged iterate)".into(),
        ));
    }
    if x_star.dim() > COVARIANCE_DIM_GUARD {
        return Err(CoreError::AnalysisPrecondition(format!(
            "dimension {} exceeds the covariance guard {COVARIANCE_DIM_GUARD}",
            x_star.dim()
        )));
    }
    let rho = ens.meta.rho();
    let n_iter = t_iter_n(ens, idx) as f64;
    let scale = rho.powf(-n_iter / 2.0) / ens.meta.alpha();
    let m = ens.replications();
    let dd = 2 * x_star.dim();
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(m);
    for t in &ens.trajectories {
        rows.push(scaled_stacked_error(t, idx, x_star, scale)?);
    }
    let mut mean = vec![0.0; dd];
    for r in &rows {
        for (m, v) in mean.iter_mut().zip(r) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|v| *v /= m as f64);
    let mut cov = SymMatrix::zeros(dd);
    for r in &rows {
        for i in 0..dd {
            let di = r[i] - mean[i];
            for j in 0..dd {
                cov.data[i * dd + j] += di * (r[j] - mean[j]);
            }
        }
    }
    let denom = (m - 1).max(1) as f64;
    cov.data.iter_mut().for_each(|v| *v /= denom);
    Ok(cov)
}

/// Moment-based normality diagnostics of the scaled error components
/// at the record index holding iteration `n_terminal`.
///
/// Flags pass when |skewness| ≤ 4√(6/M) and |excess kurtosis| ≤ 4√(24/M).
pub fn normality_report(
    ens: &ReplicationEnsemble,
    n_terminal: usize,
    components: &[usize],
) -> Result<NormalityReport, CoreError> {
    let m = ens.replications();
    if m < 200 {
        return Err(CoreError::AnalysisPrecondition(format!(
            "normality_report needs >= 200 replications, got {m}"
        )));
    }
    let x_star = ens.meta.x_star.as_ref().ok_or_else(|| {
        CoreError::AnalysisPrecondition("normality_report needs a known optimum".into())
    })?;
    let idx = ens.trajectories[0]
        .iter()
        .position(|r| r.n == n_terminal)
        .ok_or_else(|| {
            CoreError::AnalysisPrecondition(format!("iteration {n_terminal} not in ensemble"))
        })?;
    let rho = ens.meta.rho();
    let scale = rho.powf(-(n_terminal as f64) / 2.0) / ens.meta.alpha();
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(m);
    for t in &ens.trajectories {
        rows.push(scaled_stacked_error(t, idx, x_star, scale)?);
    }
    let dd = rows[0].len();
    let skew_tol = 4.0 * (6.0 / m as f64).sqrt();
    let kurt_tol = 4.0 * (24.0 / m as f64).sqrt();
    let mut comps = Vec::with_capacity(components.len());
    for &c in components {
        if c >= dd {
            return Err(CoreError::AnalysisPrecondition(format!(
                "component {c} out of range (stacked dimension {dd})"
            )));
        }
        let xs: Vec<f64> = rows.iter().map(|r| r[c]).collect();
        let mean = xs.iter().sum::<f64>() / m as f64;
        let mut m2 = 0.0;
        let mut m3 = 0.0;
        let mut m4 = 0.0;
        for &x in &xs {
            let d = x - mean;
            m2 += d * d;
            m3 += d * d * d;
            m4 += d * d * d * d;
        }
        m2 /= m as f64;
        m3 /= m as f64;
        m4 /= m as f64;
        let skewness = if m2 > 0.0 { m3 / m2.powf(1.5) } else { 0.0 };
        let excess_kurtosis = if m2 > 0.0 { m4 / (m2 * m2) - 3.0 } else { 0.0 };
        comps.push(ComponentMoments {
            component: c,
            mean,
            variance: m2 * m as f64 / (m - 1) as f64,
            skewness,
            excess_kurtosis,
            skewness_pass: skewness.abs() <= skew_tol,
            kurtosis_pass: excess_kurtosis.abs() <= kurt_tol,
        });
    }
    let covariance = scaled_error_covariance(ens, idx)?;
    let min_eigenvalue = covariance
        .eigenvalues()
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    Ok(NormalityReport {
        n_terminal,
        components: comps,
        covariance,
        min_eigenvalue,
    })
}

/// Pairs (mean Γₙ, mean F(xₙ)) across replications, per iteration.
pub fn efficiency_curve(ens: &ReplicationEnsemble) -> Result<Vec<(f64, f64)>, CoreError> {
    let m = ens.replications() as f64;
    let len = ens.iterations();
    let mut out = Vec::with_capacity(len);
    for n in 0..len {
        let mut gam = 0.0;
        let mut obj = 0.0;
        for t in &ens.trajectories {
            gam += t[n].cum_samples as f64;
            obj += t[n].objective.ok_or_else(|| {
                CoreError::AnalysisPrecondition("efficiency_curve needs recorded objectives".into())
            })?;
        }
        out.push((gam / m, obj / m));
    }
    Ok(out)
}

/// Per-iteration median across replications of Γₙ·‖xₙ−x⋆‖².
pub fn sample_complexity_check(
    ens: &ReplicationEnsemble,
) -> Result<Vec<(usize, f64)>, CoreError> {
    let len = ens.iterations();
    let mut out = Vec::with_capacity(len);
    for n in 0..len {
        let mut vals = Vec::with_capacity(ens.replications());
        for t in &ens.trajectories {
            let d = t[n].dist_sq.ok_or_else(|| {
                CoreError::AnalysisPrecondition(
                    "sample_complexity_check needs dist_sq (known optimum)".into(),
                )
            })?;
            vals.push(t[n].cum_samples as f64 * d);
        }
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mid = vals.len() / 2;
        let median = if vals.len() % 2 == 1 {
            vals[mid]
        } else {
            0.5 * (vals[mid - 1] + vals[mid])
        };
        out.push((t_iter_n(ens, n), median));
    }
    Ok(out)
}

/// C₁ = F(x₀) − F⋆ + (L/2)‖x₀ − x⋆‖², the convex-envelope constant.
pub fn convex_envelope_constant(lipschitz: f64, f0_gap: f64, dist0_sq: f64) -> f64 {
    f0_gap + 0.5 * lipschitz * dist0_sq
}

/// C₂ = (2/μ)[F(x₀) − F⋆ + (μ/2)‖x₀ − x⋆‖²], the geometric-envelope
/// constant for strongly convex objectives.
pub fn strongly_convex_envelope_constant(mu: f64, f0_gap: f64, dist0_sq: f64) -> f64 {
    (2.0 / mu) * (f0_gap + 0.5 * mu * dist0_sq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::RandomStream;

    fn record(n: usize, dist_sq: f64, cum: u64) -> IterationRecord {
        IterationRecord {
            n,
            batch_size: 1,
            cum_samples: cum,
            objective: Some(dist_sq),
            dist_sq: Some(dist_sq),
            gmap_norm: Some(0.0),
            test_rounds: 0,
            budget_capped: false,
            elapsed_ns: 0,
            noise: None,
            iterate: None,
        }
    }

    fn meta() -> EnsembleMeta {
        EnsembleMeta {
            x_star: None,
            mu: 1.0,
            lipschitz: 1.0,
            theta: 1.0,
            nu: 2f64.sqrt(),
            config_hash: None,
        }
    }

    #[test]
    fn rmse_hand_values() {
        // two paths with error norms 3 and 4 -> sqrt(12.5)
        let t1 = vec![record(0, 9.0, 1)];
        let t2 = vec![record(0, 16.0, 1)];
        let ens = ReplicationEnsemble::new(vec![t1, t2], meta()).unwrap();
        let c = rmse_curve(&ens).unwrap();
        assert!((c[0].1 - 12.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rmse_single_path_is_distance() {
        let t = vec![record(0, 4.0, 1), record(1, 1.0, 2)];
        let ens = ReplicationEnsemble::new(vec![t], meta()).unwrap();
        let c = rmse_curve(&ens).unwrap();
        assert_eq!(c[0].1, 2.0);
        assert_eq!(c[1].1, 1.0);
    }

    #[test]
    fn rmse_zero_when_all_paths_at_optimum() {
        let t1 = vec![record(0, 0.0, 1)];
        let t2 = vec![record(0, 0.0, 1)];
        let ens = ReplicationEnsemble::new(vec![t1, t2], meta()).unwrap();
        assert_eq!(rmse_curve(&ens).unwrap()[0].1, 0.0);
    }

    #[test]
    fn rmse_invariant_to_replication_order() {
        let t1: Vec<_> = (0..5).map(|n| record(n, (n + 1) as f64, 1)).collect();
        let t2: Vec<_> = (0..5).map(|n| record(n, (2 * n + 1) as f64, 1)).collect();
        let a = rmse_curve(&ReplicationEnsemble::new(vec![t1.clone(), t2.clone()], meta()).unwrap())
            .unwrap();
        let b = rmse_curve(&ReplicationEnsemble::new(vec![t2, t1], meta()).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rate_fit_exact_geometric_recovers_half_log_rho() {
        let rho: f64 = 0.7;
        for c in [1.0, 17.3] {
            let curve: Vec<(usize, f64)> =
                (0..100).map(|n| (n, c * rho.powf(n as f64 / 2.0))).collect();
            let fit = rate_fit(&curve, (0, 99), rho).unwrap();
            assert!((fit.slope - 0.5 * rho.ln()).abs() < 1e-12);
            assert!((fit.r_squared - 1.0).abs() < 1e-12);
            assert!((fit.slope - fit.theoretical_slope).abs() < 1e-12);
        }
    }

    #[test]
    fn rate_fit_with_multiplicative_noise() {
        let rho: f64 = 0.8;
        let mut s = RandomStream::derive(7, 0);
        let curve: Vec<(usize, f64)> = (0..200)
            .map(|n| {
                let noise = 0.9 + 0.2 * s.uniform();
                (n, noise * rho.powf(n as f64 / 2.0))
            })
            .collect();
        let fit = rate_fit(&curve, (0, 199), rho).unwrap();
        let want = 0.5 * rho.ln();
        assert!((fit.slope - want).abs() / want.abs() < 0.10);
        assert!(fit.r_squared >= 0.95);
    }

    #[test]
    fn rate_fit_constant_curve_has_zero_slope() {
        let curve: Vec<(usize, f64)> = (0..50).map(|n| (n, 2.5)).collect();
        let fit = rate_fit(&curve, (0, 49), 0.9).unwrap();
        assert_eq!(fit.slope, 0.0);
    }

    #[test]
    fn rate_fit_rejects_zero_rmse() {
        let curve = vec![(0, 1.0), (1, 0.0), (2, 0.5)];
        assert!(rate_fit(&curve, (0, 2), 0.9).is_err());
    }

    fn noisy_record(n: usize, noise: Vec<f64>, iterate: Vec<f64>) -> IterationRecord {
        IterationRecord {
            n,
            batch_size: 1,
            cum_samples: (n + 1) as u64,
            objective: None,
            dist_sq: Some(iterate.iter().map(|x| x * x).sum()),
            gmap_norm: Some(0.0),
            test_rounds: 0,
            budget_capped: false,
            elapsed_ns: 0,
            noise: Some(DenseVector::new(noise).unwrap()),
            iterate: Some(DenseVector::new(iterate).unwrap()),
        }
    }

    #[test]
    fn covariance_gap_zero_for_exactly_scaled_noise() {
        // w_n^(j) = rho^{n/2} * eps_j with eps_j fixed across n
        let m = meta();
        let rho = m.rho();
        let eps = [0.8, -1.3, 0.4];
        let trajectories: Vec<Vec<IterationRecord>> = eps
            .iter()
            .map(|&e| {
                (0..10)
                    .map(|n| noisy_record(n, vec![e * rho.powf(n as f64 / 2.0)], vec![0.0]))
                    .collect()
            })
            .collect();
        let ens = ReplicationEnsemble::new(trajectories, m).unwrap();
        let curve = covariance_gap_curve(&ens, rho).unwrap();
        for (n, gap) in curve {
            assert!(gap.abs() < 1e-12, "n = {n}: gap = {gap}");
        }
    }

    #[test]
    fn covariance_gap_requires_noise() {
        let t = vec![record(0, 1.0, 1), record(1, 1.0, 2)];
        let ens = ReplicationEnsemble::new(vec![t], meta()).unwrap();
        assert!(covariance_gap_curve(&ens, 0.9).is_err());
    }

    #[test]
    fn efficiency_curve_means() {
        let t1 = vec![record(0, 1.0, 2), record(1, 0.5, 5)];
        let t2 = vec![record(0, 1.0, 4), record(1, 0.5, 7)];
        let ens = ReplicationEnsemble::new(vec![t1, t2], meta()).unwrap();
        let c = efficiency_curve(&ens).unwrap();
        assert_eq!(c[0], (3.0, 1.0));
        assert_eq!(c[1], (6.0, 0.5));
    }

    #[test]
    fn sample_complexity_single_iteration() {
        let t = vec![record(0, 2.0, 3)];
        let ens = ReplicationEnsemble::new(vec![t], meta()).unwrap();
        let c = sample_complexity_check(&ens).unwrap();
        assert_eq!(c[0].1, 6.0);
    }

    #[test]
    fn normality_passes_on_true_gaussians() {
        // spec calibration: >= 99% flag pass rate over 100 regenerations
        let m_reps = 400;
        let mut passes = 0;
        let mut total = 0;
        for regen in 0..100u64 {
            let mut s = RandomStream::derive(5000 + regen, 0);
            let trajectories: Vec<Vec<IterationRecord>> = (0..m_reps)
                .map(|_| {
                    (0..2)
                        .map(|n| {
                            noisy_record(
                                n,
                                vec![0.0],
                                vec![s.standard_normal()],
                            )
                        })
                        .collect()
                })
                .collect();
            let mut meta0 = meta();
            meta0.x_star = Some(DenseVector::zeros(1));
            let ens = ReplicationEnsemble::new(trajectories, meta0).unwrap();
            let rep = normality_report(&ens, 1, &[0]).unwrap();
            for c in &rep.components {
                total += 2;
                passes += usize::from(c.skewness_pass) + usize::from(c.kurtosis_pass);
            }
            assert!(rep.min_eigenvalue >= -1e-10);
        }
        assert!(
            passes as f64 / total as f64 >= 0.99,
            "pass rate {}/{total}",
            passes
        );
    }

    #[test]
    fn normality_flags_heavy_tails() {
        // t_3 samples: kurtosis flag should fail with probability >= 0.9 at M = 1000
        let m_reps = 1000;
        let mut kurt_failures = 0;
        let regens = 40;
        for regen in 0..regens {
            let mut s = RandomStream::derive(9000 + regen, 0);
            let trajectories: Vec<Vec<IterationRecord>> = (0..m_reps)
                .map(|_| {
                    let z = s.standard_normal();
                    let chi: f64 = (0..3).map(|_| s.standard_normal().powi(2)).sum();
                    let t3 = z / (chi / 3.0).sqrt();
                    (0..2).map(|n| noisy_record(n, vec![0.0], vec![t3])).collect()
                })
                .collect();
            let mut meta0 = meta();
            meta0.x_star = Some(DenseVector::zeros(1));
            let ens = ReplicationEnsemble::new(trajectories, meta0).unwrap();
            let rep = normality_report(&ens, 1, &[0]).unwrap();
            if !rep.components[0].kurtosis_pass {
                kurt_failures += 1;
            }
        }
        assert!(
            kurt_failures as f64 / regens as f64 >= 0.9,
            "kurtosis failure rate {kurt_failures}/{regens}"
        );
    }

    #[test]
    fn normality_needs_enough_replications() {
        let t = vec![
            noisy_record(0, vec![0.0], vec![0.1]),
            noisy_record(1, vec![0.0], vec![0.1]),
        ];
        let mut meta0 = meta();
        meta0.x_star = Some(DenseVector::zeros(1));
        let ens = ReplicationEnsemble::new(vec![t], meta0).unwrap();
        assert!(normality_report(&ens, 1, &[0]).is_err());
    }

    #[test]
    fn envelope_constants() {
        assert_eq!(convex_envelope_constant(2.0, 1.0, 4.0), 5.0);
        assert_eq!(strongly_convex_envelope_constant(0.5, 1.0, 4.0), 8.0);
    }
}
