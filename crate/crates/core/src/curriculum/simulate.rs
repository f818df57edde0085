//! A synthetic learner standing in for an RL policy, so that adaptive
//! sampling and shaping can be exercised end to end.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::sampler::{EvalResult, SamplerConfig, SamplerState};
use super::shaping::{ShapingConfig, ShapingState};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MotionSpec {
    /// Scales the learner's error on this motion.
    pub difficulty: f64,
    /// Every evaluation reports a failure regardless of exposure.
    #[serde(default)]
    pub always_fails: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LibrarySpec {
    pub motions: Vec<MotionSpec>,
}

impl LibrarySpec {
    /// `n` motions of equal difficulty.
    pub fn symmetric(n: usize, difficulty: f64) -> Self {
        Self {
            motions: vec![
                MotionSpec {
                    difficulty,
                    always_fails: false,
                };
                n
            ],
        }
    }

    pub fn len(&self) -> usize {
        self.motions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.motions.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.motions.is_empty() {
            return Err(Error::Config("empty motion library".into()));
        }
        if let Some(m) = self
            .motions
            .iter()
            .find(|m| !(m.difficulty >= 0.0) || !m.difficulty.is_finite())
        {
            return Err(Error::Config(format!("invalid difficulty {}", m.difficulty)));
        }
        Ok(())
    }
}

impl Default for LibrarySpec {
    fn default() -> Self {
        let mut lib = Self::symmetric(20, 1.0);
        for (i, m) in lib.motions.iter_mut().enumerate() {
            m.difficulty = 0.5 + 0.05 * i as f64;
        }
        lib
    }
}

/// Error model: `e_mean = floor + base · difficulty · exp(−exposure / scale)`,
/// perturbed by relative uniform noise, with `e_max = max_ratio · e_mean`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticLearner {
    /// Millimeters per unit difficulty at zero exposure.
    pub base_error_mm: f64,
    pub floor_error_mm: f64,
    /// Exposure (in samples) over which the error decays by `1/e`.
    pub learning_scale: f64,
    pub max_ratio: f64,
    /// Mean errors above this count as failures.
    pub failure_threshold_mm: f64,
    /// Relative noise amplitude in `[0, 1)`.
    pub noise: f64,
    /// Per body-part multiplier turning the mean error into that group's
    /// shaping error (meters); empty means 1 for every group.
    pub group_scales: Vec<f64>,
}

impl Default for SyntheticLearner {
    fn default() -> Self {
        Self {
            base_error_mm: 120.0,
            floor_error_mm: 10.0,
            learning_scale: 200.0,
            max_ratio: 2.5,
            failure_threshold_mm: 400.0,
            noise: 0.0,
            group_scales: Vec::new(),
        }
    }
}

/// One motion's evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearnerOutcome {
    pub failed: bool,
    pub mean_error_mm: f64,
    pub max_error_mm: f64,
}

impl SyntheticLearner {
    pub fn validate(&self) -> Result<()> {
        let ok = self.base_error_mm >= 0.0
            && self.floor_error_mm >= 0.0
            && self.learning_scale > 0.0
            && self.max_ratio >= 1.0
            && self.failure_threshold_mm > 0.0
            && (0.0..1.0).contains(&self.noise)
            && self.group_scales.iter().all(|s| *s >= 0.0 && s.is_finite());
        if !ok {
            return Err(Error::Config(format!("invalid learner model {self:?}")));
        }
        Ok(())
    }

    pub fn evaluate<R: Rng>(&self, motion: &MotionSpec, exposure: f64, rng: &mut R) -> LearnerOutcome {
        let jitter = 1.0 + self.noise * rng.gen_range(-1.0..=1.0);
        let mean = (self.floor_error_mm
            + self.base_error_mm * motion.difficulty * (-exposure / self.learning_scale).exp())
            * jitter;
        LearnerOutcome {
            failed: motion.always_fails || mean > self.failure_threshold_mm,
            mean_error_mm: mean,
            max_error_mm: mean * self.max_ratio,
        }
    }

    fn group_scale(&self, group: usize) -> f64 {
        self.group_scales.get(group).copied().unwrap_or(1.0)
    }
}

/// How a training epoch turns the sampling distribution into exposure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExposureModel {
    /// Each motion gains `p_i · samples_per_round`.
    Expected,
    /// `samples_per_round` categorical draws.
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    pub rounds: usize,
    pub samples_per_round: usize,
    pub exposure: ExposureModel,
    pub seed: u64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            rounds: 50,
            samples_per_round: 1000,
            exposure: ExposureModel::Expected,
            seed: 0,
        }
    }
}

/// Everything a curriculum simulation needs, as read from a config file.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CurriculumConfig {
    pub sampler: SamplerConfig,
    pub shaping: ShapingConfig,
    pub learner: SyntheticLearner,
    pub library: LibrarySpec,
    pub simulation: SimulationConfig,
}

impl CurriculumConfig {
    pub fn validate(&self) -> Result<()> {
        self.sampler.validate()?;
        self.shaping.validate()?;
        self.learner.validate()?;
        self.library.validate()
    }
}

/// State of one motion after a round. Round 0 carries the initial state
/// and no evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub round: usize,
    pub motion: usize,
    pub p: f64,
    pub failed: Option<bool>,
    pub e_mean: Option<f64>,
    pub e_max: Option<f64>,
    pub sigma: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurriculumTrace {
    pub records: Vec<TraceRecord>,
    pub motions: usize,
}

impl CurriculumTrace {
    pub fn rounds(&self) -> usize {
        self.records.len() / self.motions.max(1)
    }

    pub fn round(&self, round: usize) -> &[TraceRecord] {
        &self.records[round * self.motions..(round + 1) * self.motions]
    }

    pub fn probabilities(&self, round: usize) -> Vec<f64> {
        self.round(round).iter().map(|r| r.p).collect()
    }

    /// `σ` of one motion and group over all rounds.
    pub fn sigma_series(&self, motion: usize, group: &str) -> Vec<f64> {
        (0..self.rounds())
            .filter_map(|r| self.round(r)[motion].sigma.get(group).copied())
            .collect()
    }

    /// One JSON object per line.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for rec in &self.records {
            serde_json::to_writer(&mut out, rec)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

fn records(
    round: usize,
    sampler: &SamplerState,
    shaping: &ShapingState,
    eval: Option<&EvalResult>,
) -> Vec<TraceRecord> {
    (0..sampler.len())
        .map(|i| TraceRecord {
            round,
            motion: i,
            p: sampler.probabilities[i],
            failed: eval.map(|e| e.failed.contains(&i)),
            e_mean: eval.map(|e| e.mean_error[i]),
            e_max: eval.map(|e| e.max_error[i]),
            sigma: shaping
                .group_names
                .iter()
                .cloned()
                .zip(shaping.sigma[i].iter().copied())
                .collect(),
        })
        .collect()
}

/// Alternates training epochs (exposure accrues according to the current
/// sampling distribution) with evaluations that update the sampler and
/// the per-group tolerances.
pub fn simulate_curriculum(config: &CurriculumConfig) -> Result<CurriculumTrace> {
    config.validate()?;
    let lib = &config.library;
    let sim = &config.simulation;
    let n = lib.len();
    let mut sampler = SamplerState::new(n, config.sampler.clone())?;
    let mut shaping = ShapingState::new(n, &config.shaping)?;
    let mut exposure = vec![0.0; n];
    let mut out = records(0, &sampler, &shaping, None);

    for round in 1..=sim.rounds {
        let mut rng = ChaCha8Rng::seed_from_u64(sim.seed.wrapping_add(round as u64));
        match sim.exposure {
            ExposureModel::Expected => {
                for (x, p) in exposure.iter_mut().zip(&sampler.probabilities) {
                    *x += p * sim.samples_per_round as f64;
                }
            }
            ExposureModel::Sampled => {
                for _ in 0..sim.samples_per_round {
                    exposure[sampler.sample(&mut rng)] += 1.0;
                }
            }
        }

        let outcomes: Vec<LearnerOutcome> = lib
            .motions
            .iter()
            .zip(&exposure)
            .map(|(m, &x)| config.learner.evaluate(m, x, &mut rng))
            .collect();
        let eval = EvalResult {
            failed: outcomes
                .iter()
                .enumerate()
                .filter(|(_, o)| o.failed)
                .map(|(i, _)| i)
                .collect::<BTreeSet<_>>(),
            mean_error: outcomes.iter().map(|o| o.mean_error_mm).collect(),
            max_error: outcomes.iter().map(|o| o.max_error_mm).collect(),
        };
        sampler.update(&eval)?;
        for (i, o) in outcomes.iter().enumerate() {
            for g in 0..shaping.group_names.len() {
                shaping.update(i, g, o.mean_error_mm / 1000.0 * config.learner.group_scale(g))?;
            }
        }
        out.extend(records(round, &sampler, &shaping, Some(&eval)));
    }
    Ok(CurriculumTrace {
        records: out,
        motions: n,
    })
}
