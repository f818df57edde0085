//! Hybrid per-frame rewards gated by motion source, and tracking metrics.

mod metrics;
mod terms;

pub use metrics::{
    metric_contact_mismatch, metric_gmpjpe, metric_mpjpe, metric_slippage, metric_success, KeypointTrack, MetricReport,
    SUCCESS_THRESHOLD,
};
pub use terms::{
    balance_prior_reward, finite_difference_velocities, general_tracking_reward, hybrid_reward, infer_contacts,
    FrameState, MotionSource, RewardBreakdown, RewardConfig, TermSigmas, TermWeights,
};
