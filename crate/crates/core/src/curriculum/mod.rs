//! Adaptive sampling over a motion library, adaptive reward shaping, and a
//! synthetic-learner harness that drives both.

mod sampler;
mod shaping;
mod simulate;

pub use sampler::{
    adjustment_f, adjustment_g, combine_factors, compute_thresholds, percentile, sample_motion, update_probabilities,
    EvalResult, SamplerConfig, SamplerState, Thresholds,
};
pub use shaping::{shaped_reward, update_sigma, BodyPartGroup, ShapingConfig, ShapingState};
pub use simulate::{
    simulate_curriculum, CurriculumConfig, CurriculumTrace, ExposureModel, LearnerOutcome, LibrarySpec, MotionSpec,
    SimulationConfig, SyntheticLearner, TraceRecord,
};
