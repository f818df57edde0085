//! Performance-driven sampling probabilities over a motion library.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerConfig {
    /// Multiplier applied to failed motions, > 1.
    pub gamma_fail: f64,
    pub w_mean: f64,
    pub w_max: f64,
    /// Boost range for poorly tracked motions, `1 < beta_min ≤ beta_max`.
    pub beta_min: f64,
    pub beta_max: f64,
    /// Reduction range for well tracked motions, `0 < alpha_min ≤ alpha_max < 1`.
    pub alpha_min: f64,
    pub alpha_max: f64,
    /// Floor factor: every probability stays ≥ `lambda_minprob / N`.
    pub lambda_minprob: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            gamma_fail: 2.0,
            w_mean: 0.7,
            w_max: 0.3,
            beta_min: 1.2,
            beta_max: 2.0,
            alpha_min: 0.5,
            alpha_max: 0.9,
            lambda_minprob: 0.3,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.gamma_fail > 1.0
            && self.w_mean >= 0.0
            && self.w_max >= 0.0
            && 1.0 < self.beta_min
            && self.beta_min <= self.beta_max
            && 0.0 < self.alpha_min
            && self.alpha_min <= self.alpha_max
            && self.alpha_max < 1.0
            && 0.0 < self.lambda_minprob
            && self.lambda_minprob < 1.0;
        if !ok {
            return Err(Error::Config(format!("invalid sampler configuration {self:?}")));
        }
        Ok(())
    }
}

/// Percentile thresholds and extremes of one error channel over the
/// successful motions of an evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub tau_poor: f64,
    pub tau_good: f64,
    pub e_min: f64,
    pub e_max: f64,
}

/// Percentile with linear interpolation between order statistics
/// (`k` in `[0, 100]`); `sorted` must be ascending and non-empty.
pub fn percentile(sorted: &[f64], k: f64) -> f64 {
    let pos = (sorted.len() - 1) as f64 * k / 100.0;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// `τ_poor = P75`, `τ_good = P25`, plus min and max.
pub fn compute_thresholds(errors: &[f64]) -> Result<Thresholds> {
    if errors.is_empty() {
        return Err(Error::InvalidArgument("no successful motions to threshold".into()));
    }
    if errors.iter().any(|e| !e.is_finite()) {
        return Err(Error::InvalidArgument("non-finite tracking error".into()));
    }
    let mut sorted = errors.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(Thresholds {
        tau_poor: percentile(&sorted, 75.0),
        tau_good: percentile(&sorted, 25.0),
        e_min: sorted[0],
        e_max: sorted[sorted.len() - 1],
    })
}

/// Piecewise adjustment factor for one error channel: a boost in
/// `[β_min, β_max]` above `τ_poor`, a reduction in `[α_min, α_max]` below
/// `τ_good`, and 1 in between.
pub fn adjustment_f(e: f64, th: &Thresholds, cfg: &SamplerConfig) -> f64 {
    if e > th.tau_poor {
        let denom = th.e_max - th.tau_poor;
        if denom <= 0.0 {
            return cfg.beta_max;
        }
        let r = ((e - th.tau_poor) / denom).clamp(0.0, 1.0);
        cfg.beta_min + (cfg.beta_max - cfg.beta_min) * r
    } else if e < th.tau_good {
        let denom = th.tau_good - th.e_min;
        if denom <= 0.0 {
            return cfg.alpha_min;
        }
        let r = ((th.tau_good - e) / denom).clamp(0.0, 1.0);
        cfg.alpha_min + (cfg.alpha_max - cfg.alpha_min) * (1.0 - r)
    } else {
        1.0
    }
}

/// `g = 1 + w_mean (f_mean − 1) + w_max (f_max − 1)`.
pub fn adjustment_g(
    e_mean: f64,
    e_max: f64,
    mean_thresholds: &Thresholds,
    max_thresholds: &Thresholds,
    cfg: &SamplerConfig,
) -> f64 {
    combine_factors(
        adjustment_f(e_mean, mean_thresholds, cfg),
        adjustment_f(e_max, max_thresholds, cfg),
        cfg,
    )
}

pub fn combine_factors(f_mean: f64, f_max: f64, cfg: &SamplerConfig) -> f64 {
    1.0 + cfg.w_mean * (f_mean - 1.0) + cfg.w_max * (f_max - 1.0)
}

/// One periodic evaluation of every motion in the library. Errors are in
/// millimeters; entries for failed motions are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub failed: BTreeSet<usize>,
    pub mean_error: Vec<f64>,
    pub max_error: Vec<f64>,
}

impl EvalResult {
    pub fn successes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.mean_error.len()).filter(|i| !self.failed.contains(i))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerState {
    pub probabilities: Vec<f64>,
    pub config: SamplerConfig,
    pub iteration: u64,
}

impl SamplerState {
    /// Uniform distribution over `motions` entries.
    pub fn new(motions: usize, config: SamplerConfig) -> Result<Self> {
        config.validate()?;
        if motions == 0 {
            return Err(Error::InvalidArgument("empty motion library".into()));
        }
        Ok(Self {
            probabilities: vec![1.0 / motions as f64; motions],
            config,
            iteration: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn min_probability(&self) -> f64 {
        self.config.lambda_minprob / self.len() as f64
    }

    /// Back to uniform (e.g. between training phases).
    pub fn reset(&mut self) {
        let n = self.len();
        self.probabilities.fill(1.0 / n as f64);
        self.iteration = 0;
    }

    /// The multiplier each motion receives before normalization.
    pub fn multipliers(&self, eval: &EvalResult) -> Result<Vec<f64>> {
        let n = self.len();
        if eval.mean_error.len() != n || eval.max_error.len() != n {
            return Err(Error::InvalidArgument(format!(
                "evaluation covers {} motions, sampler has {n}",
                eval.mean_error.len()
            )));
        }
        if let Some(&bad) = eval.failed.iter().find(|&&i| i >= n) {
            return Err(Error::InvalidArgument(format!("failed motion id {bad} out of range")));
        }
        let succ: Vec<usize> = eval.successes().collect();
        let thresholds = if succ.is_empty() {
            None
        } else {
            let means: Vec<f64> = succ.iter().map(|&i| eval.mean_error[i]).collect();
            let maxes: Vec<f64> = succ.iter().map(|&i| eval.max_error[i]).collect();
            Some((compute_thresholds(&means)?, compute_thresholds(&maxes)?))
        };
        Ok((0..n)
            .map(|i| {
                if eval.failed.contains(&i) {
                    self.config.gamma_fail
                } else {
                    let (tm, tx) = thresholds.as_ref().expect("successes exist");
                    adjustment_g(eval.mean_error[i], eval.max_error[i], tm, tx, &self.config)
                }
            })
            .collect())
    }

    /// Scales, normalizes and floors the distribution in place.
    pub fn update(&mut self, eval: &EvalResult) -> Result<()> {
        let mult = self.multipliers(eval)?;
        let mut p: Vec<f64> = self.probabilities.iter().zip(&mult).map(|(p, g)| p * g).collect();
        let total: f64 = p.iter().sum();
        p.iter_mut().for_each(|v| *v /= total);
        floor_and_renormalize(&mut p, self.min_probability());
        self.probabilities = p;
        self.iteration += 1;
        Ok(())
    }

    /// Categorical draw.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (i, p) in self.probabilities.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        // u landed in the rounding slack above the last partial sum
        self.probabilities
            .iter()
            .rposition(|&p| p > 0.0)
            .unwrap_or(self.len() - 1)
    }
}

/// Raises entries below `floor` to `floor` and rescales the remaining mass
/// so the result sums to 1 with every entry ≥ `floor`. Requires
/// `floor · len < 1`.
fn floor_and_renormalize(p: &mut [f64], floor: f64) {
    let mut pinned = vec![false; p.len()];
    loop {
        let pinned_mass = floor * pinned.iter().filter(|&&b| b).count() as f64;
        let free: f64 = p.iter().zip(&pinned).filter(|(_, &b)| !b).map(|(v, _)| v).sum();
        let scale = (1.0 - pinned_mass) / free;
        let mut changed = false;
        for (v, pin) in p.iter_mut().zip(pinned.iter_mut()) {
            if !*pin && *v * scale < floor {
                *pin = true;
                changed = true;
            }
        }
        if !changed {
            for (v, pin) in p.iter_mut().zip(&pinned) {
                *v = if *pin { floor } else { *v * scale };
            }
            return;
        }
    }
}

/// Functional form of [`SamplerState::update`].
pub fn update_probabilities(state: &SamplerState, eval: &EvalResult) -> Result<SamplerState> {
    let mut next = state.clone();
    next.update(eval)?;
    Ok(next)
}

/// Seeded categorical draw from the state's distribution.
pub fn sample_motion(state: &SamplerState, seed: u64) -> usize {
    state.sample(&mut ChaCha8Rng::seed_from_u64(seed))
}
