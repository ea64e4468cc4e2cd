//! Training-free denoiser: the previous front's members are treated as noisy
//! samples and walked back through a DDIM reverse chain whose clean-sample
//! estimate is a closed-form posterior mean under a prior around the
//! predicted knee. Also holds the prediction-error driven spread controller.

use std::f64::consts::PI;
use std::str::FromStr;

use log::warn;

use crate::error::{ensure_len, Error, Result};
use crate::population::{Bounds, DecisionVector};
use crate::random::RandomSource;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleKind {
    Cosine,
    Linear,
}

impl FromStr for ScheduleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cosine" => Ok(ScheduleKind::Cosine),
            "linear" => Ok(ScheduleKind::Linear),
            other => Err(Error::Config(format!("unknown noise schedule `{other}` (expected cosine or linear)"))),
        }
    }
}

/// Signal levels `α_0 = 1 > α_1 > … > α_K = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSchedule {
    alpha: Vec<f64>,
}

impl NoiseSchedule {
    pub fn new(kind: ScheduleKind, k: usize) -> Result<Self> {
        match kind {
            ScheduleKind::Cosine => Self::cosine(k),
            ScheduleKind::Linear => Self::linear(k),
        }
    }

    /// `α_k = ½(cos(kπ/K) + 1)`.
    pub fn cosine(k: usize) -> Result<Self> {
        Self::build(k, |i| 0.5 * ((i as f64 * PI / k as f64).cos() + 1.0))
    }

    /// `α_k = 1 − k/K`.
    pub fn linear(k: usize) -> Result<Self> {
        Self::build(k, |i| 1.0 - i as f64 / k as f64)
    }

    fn build(k: usize, f: impl Fn(usize) -> f64) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidArgument(format!("noise schedule needs K >= 2, got {k}")));
        }
        let mut alpha: Vec<f64> = (0..=k).map(f).collect();
        alpha[0] = 1.0;
        alpha[k] = 0.0;
        Ok(Self { alpha })
    }

    /// Number of steps `K`.
    pub fn steps(&self) -> usize {
        self.alpha.len() - 1
    }

    pub fn alpha(&self, k: usize) -> f64 {
        self.alpha[k]
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alpha
    }
}

/// `σ = √((1−α_prev)/(1−α_cur) · (1 − α_cur/α_prev))`.
pub fn ddim_sigma(alpha_prev: f64, alpha_cur: f64) -> Result<f64> {
    if !(alpha_prev > 0.0 && alpha_prev <= 1.0) || !(0.0..1.0).contains(&alpha_cur) {
        return Err(Error::InvalidArgument(format!(
            "ddim_sigma needs 0 < α_prev <= 1 and 0 <= α_cur < 1, got {alpha_prev}, {alpha_cur}"
        )));
    }
    let v = (1.0 - alpha_prev) / (1.0 - alpha_cur) * (1.0 - alpha_cur / alpha_prev);
    Ok(v.max(0.0).sqrt())
}

/// Log-density of the isotropic Gaussian `N(x; knee, ψ²I)`.
pub fn knee_prior_density(x: &[f64], knee: &[f64], psi: f64) -> f64 {
    let n = x.len() as f64;
    let d2: f64 = x.iter().zip(knee).map(|(a, b)| (a - b).powi(2)).sum();
    -0.5 * n * (2.0 * PI * psi * psi).ln() - d2 / (2.0 * psi * psi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PriorKind {
    Knee,
    Kde,
}

impl FromStr for PriorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "knee" => Ok(PriorKind::Knee),
            "kde" => Ok(PriorKind::Kde),
            other => Err(Error::Config(format!("unknown prior `{other}` (expected knee or kde)"))),
        }
    }
}

/// Prior over clean samples.
#[derive(Debug, Clone, PartialEq)]
pub enum Prior {
    /// Gaussian around a predicted knee with spread `psi`.
    Knee { knee: DecisionVector, psi: f64 },
    /// Gaussian kernel density over `points` with bandwidth `h`.
    Kde { points: Vec<DecisionVector>, h: f64 },
}

impl Prior {
    /// Kernel density prior with Silverman's rule-of-thumb bandwidth.
    pub fn kde(points: Vec<DecisionVector>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("kernel density prior needs at least one point".into()));
        }
        let m = points.len() as f64;
        let n = points[0].len();
        let mean_sd = (0..n)
            .map(|j| {
                let mu = points.iter().map(|p| p[j]).sum::<f64>() / m;
                (points.iter().map(|p| (p[j] - mu).powi(2)).sum::<f64>() / (m - 1.0).max(1.0)).sqrt()
            })
            .sum::<f64>()
            / n as f64;
        let nf = n as f64;
        let h = (4.0 / (nf + 2.0)).powf(1.0 / (nf + 4.0)) * m.powf(-1.0 / (nf + 4.0)) * mean_sd;
        // Identical points leave no spread to measure; fall back to a small fixed width.
        let h = if h > 1e-9 { h } else { 1e-3 };
        Ok(Prior::Kde { points, h })
    }

    pub fn log_density(&self, x: &[f64]) -> f64 {
        match self {
            Prior::Knee { knee, psi } => knee_prior_density(x, knee, *psi),
            Prior::Kde { points, h } => {
                let logs: Vec<f64> = points.iter().map(|p| knee_prior_density(x, p, *h)).collect();
                log_sum_exp(&logs) - (points.len() as f64).ln()
            }
        }
    }
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + v.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Posterior mean estimate of the clean sample and its mixture weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Posterior {
    pub x0: DecisionVector,
    pub weights: Vec<f64>,
}

/// `x̂_0 = Σ_j w_j Φ_j` with `w_j ∝ f(Φ_j)·N(x_k; √α_k Φ_j, (1−α_k)I)`,
/// normalized in log space.
pub fn posterior_x0(samples: &[&[f64]], x_k: &[f64], alpha_k: f64, prior: &Prior) -> Result<Posterior> {
    let log_prior: Vec<f64> = samples.iter().map(|s| prior.log_density(s)).collect();
    posterior_with_prior(samples, &log_prior, x_k, alpha_k)
}

fn posterior_with_prior(samples: &[&[f64]], log_prior: &[f64], x_k: &[f64], alpha_k: f64) -> Result<Posterior> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("posterior needs at least one sample".into()));
    }
    if !(0.0..1.0).contains(&alpha_k) {
        return Err(Error::InvalidArgument(format!("posterior needs 0 <= α_k < 1, got {alpha_k}")));
    }
    let n = x_k.len();
    let sa = alpha_k.sqrt();
    let var = 1.0 - alpha_k;
    let mut logw = Vec::with_capacity(samples.len());
    for (s, lp) in samples.iter().zip(log_prior) {
        ensure_len(n, s.len())?;
        let d2: f64 = x_k.iter().zip(s.iter()).map(|(x, p)| (x - sa * p).powi(2)).sum();
        // The likelihood's normalizing constant is shared by all samples and cancels.
        logw.push(lp - d2 / (2.0 * var));
    }
    let lse = log_sum_exp(&logw);
    let weights: Vec<f64> = if lse.is_finite() {
        // Weights below e^-700 are flushed to zero; left alone they become
        // subnormal and slow every later multiply-add by orders of magnitude.
        logw.iter().map(|l| if l - lse < -700.0 { 0.0 } else { (l - lse).exp() }).collect()
    } else {
        warn!("posterior weights degenerate; using uniform weights");
        vec![1.0 / samples.len() as f64; samples.len()]
    };
    let mut x0 = vec![0.0; n];
    for (s, w) in samples.iter().zip(&weights) {
        for (acc, v) in x0.iter_mut().zip(s.iter()) {
            *acc += w * v;
        }
    }
    Ok(Posterior { x0: x0.into(), weights })
}

/// `ε̃ = (x_k − √α_k x̂_0) / √(1−α_k)`.
pub fn implied_noise(x_k: &[f64], x0: &[f64], alpha_k: f64) -> Result<Vec<f64>> {
    if alpha_k >= 1.0 {
        return Err(Error::InvalidArgument("implied noise is undefined at α_k = 1".into()));
    }
    ensure_len(x_k.len(), x0.len())?;
    let (sa, sn) = (alpha_k.sqrt(), (1.0 - alpha_k).sqrt());
    Ok(x_k.iter().zip(x0).map(|(x, z)| (x - sa * z) / sn).collect())
}

/// `x_{k−1} = √α_prev x̂_0 + √(1−α_prev−σ²) ε̃ + σ ξ`, clamped to `bounds`.
pub fn denoise_step(
    x0: &[f64],
    eps: &[f64],
    alpha_prev: f64,
    sigma: f64,
    bounds: &Bounds,
    rng: &mut RandomSource,
) -> DecisionVector {
    let radicand = 1.0 - alpha_prev - sigma * sigma;
    assert!(radicand >= -1e-12, "noise schedule violates 1 - α_prev - σ² >= 0 ({radicand})");
    let (sa, se) = (alpha_prev.sqrt(), radicand.max(0.0).sqrt());
    let mut x: DecisionVector = x0.iter().zip(eps).map(|(z, e)| sa * z + se * e + sigma * rng.normal()).collect();
    bounds.clamp_in_place(&mut x);
    x
}

/// Which points the posterior mean averages over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleSet {
    /// The original members handed to the denoiser.
    History,
    /// The chain's states at the current step.
    Current,
}

impl FromStr for SampleSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "history" => Ok(SampleSet::History),
            "current" => Ok(SampleSet::Current),
            other => Err(Error::Config(format!("unknown sample set `{other}` (expected history or current)"))),
        }
    }
}

/// Runs the reverse chain `k = K … 2` from `subpop` and returns the `x_1` states.
pub fn denoise_population(
    subpop: &[DecisionVector],
    prior: &Prior,
    schedule: &NoiseSchedule,
    bounds: &Bounds,
    sample_set: SampleSet,
    rng: &mut RandomSource,
) -> Result<Vec<DecisionVector>> {
    denoise_from(subpop, subpop, prior, schedule, bounds, sample_set, rng)
}

/// Reverse chain starting at `starts`, with `members` as the historical
/// sample set (the starts may repeat members to fill a larger quota).
pub fn denoise_from(
    starts: &[DecisionVector],
    members: &[DecisionVector],
    prior: &Prior,
    schedule: &NoiseSchedule,
    bounds: &Bounds,
    sample_set: SampleSet,
    rng: &mut RandomSource,
) -> Result<Vec<DecisionVector>> {
    if starts.is_empty() {
        return Ok(Vec::new());
    }
    if members.is_empty() {
        return Err(Error::InvalidArgument("denoising needs at least one historical member".into()));
    }
    let history: Vec<&[f64]> = members.iter().map(|x| &x[..]).collect();
    let history_prior: Vec<f64> = history.iter().map(|s| prior.log_density(s)).collect();
    let mut states = starts.to_vec();
    for k in (2..=schedule.steps()).rev() {
        let (a_k, a_prev) = (schedule.alpha(k), schedule.alpha(k - 1));
        let sigma = ddim_sigma(a_prev, a_k)?;
        let current: Vec<DecisionVector>;
        let (samples, log_prior): (Vec<&[f64]>, Vec<f64>) = match sample_set {
            SampleSet::History => (history.clone(), history_prior.clone()),
            SampleSet::Current => {
                current = states.clone();
                let s: Vec<&[f64]> = current.iter().map(|x| &x[..]).collect();
                let lp = s.iter().map(|x| prior.log_density(x)).collect();
                (s, lp)
            }
        };
        let mut next = Vec::with_capacity(states.len());
        for x in &states {
            let post = posterior_with_prior(&samples, &log_prior, x, a_k)?;
            let eps = implied_noise(x, &post.x0, a_k)?;
            next.push(denoise_step(&post.x0, &eps, a_prev, sigma, bounds, rng));
        }
        states = next;
    }
    Ok(states)
}

/// Bounds and sensitivity of the adaptive prior spread.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuidanceConfig {
    pub psi_min: f64,
    pub psi_max: f64,
    pub lambda: f64,
}

impl Default for GuidanceConfig {
    fn default() -> Self {
        Self { psi_min: 0.1, psi_max: 0.5, lambda: 2.0 }
    }
}

impl GuidanceConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.psi_min > 0.0 && self.psi_min <= self.psi_max && self.lambda >= 0.0) {
            return Err(Error::Config(format!(
                "guidance needs 0 < psi_min <= psi_max and lambda >= 0 (got {}, {}, {})",
                self.psi_min, self.psi_max, self.lambda
            )));
        }
        Ok(())
    }
}

/// `ψ = min(ψ_max, max(ψ_min, ψ_min + λE))` with `E` the distance between the
/// previous predicted and true knees; `ψ_min` when either is missing.
pub fn adaptive_psi(knee_pred_prev: Option<&[f64]>, knee_true_prev: Option<&[f64]>, cfg: &GuidanceConfig) -> f64 {
    match (knee_pred_prev, knee_true_prev) {
        (Some(p), Some(t)) => {
            let e = p.iter().zip(t).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            psi_for_error(e, cfg)
        }
        _ => cfg.psi_min,
    }
}

pub fn psi_for_error(e: f64, cfg: &GuidanceConfig) -> f64 {
    cfg.psi_max.min(cfg.psi_min.max(cfg.psi_min + cfg.lambda * e))
}
