//! Two-stage trajectory optimization for balanced single-support motions.
//!
//! Stage 1 solves the kinematic problem (key-link tracking, joint limits,
//! rest posture, smoothness). Stage 2 starts from the stage-1 solution and
//! adds a hinge penalty on the ground-projected center of mass leaving the
//! support rectangle. Both are damped Gauss–Newton (Levenberg–Marquardt)
//! solves over all frames jointly; the normal equations are block
//! tridiagonal because only the smoothness terms couple adjacent frames.

mod banded;
mod generate;
mod problem;
mod residuals;
mod solver;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{so3_exp, JointVector, KinematicModel, Pose};

pub use banded::BlockTridiagonal;
pub use generate::{generate_motion, initial_trajectory, GenerationOutcome, Rejection, RejectionStage};
pub use problem::{CostTerm, LinkTarget, TrajectoryProblem};
pub use residuals::{
    balance_distance, balance_distance_xy, joint_limit_residuals, rest_pose_residuals, smoothness_residuals,
    tracking_residuals, SmoothHinge,
};
pub use solver::{solve_stage1, solve_stage2, LevenbergMarquardt};

/// Per-key-link 6-vector of tracking weights, `[angular (3), linear (3)]`.
pub type TrackingWeight = [f64; 6];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KeyLinkWeights {
    pub support: TrackingWeight,
    pub swing: TrackingWeight,
    pub pelvis: TrackingWeight,
}

impl Default for KeyLinkWeights {
    fn default() -> Self {
        Self {
            support: [1.0, 1.0, 1.0, 4.0, 4.0, 4.0],
            swing: [1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
            // pelvis xy stays loose so stage 2 can shift the body over the support foot
            pelvis: [1.0, 1.0, 1.0, 0.05, 0.05, 1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostWeights {
    pub lambda_track: f64,
    pub lambda_lim: f64,
    pub lambda_rest: f64,
    pub lambda_smooth: f64,
    pub lambda_bal: f64,
    pub tracking: KeyLinkWeights,
    /// Half-extents `(s_x, s_y)` of the support rectangle, meters.
    pub support_rect: [f64; 2],
    /// Balance tolerance ε, meters.
    pub epsilon: f64,
}

impl Default for CostWeights {
    fn default() -> Self {
        Self {
            lambda_track: 10.0,
            lambda_lim: 100.0,
            lambda_rest: 0.01,
            lambda_smooth: 1.0,
            lambda_bal: 100.0,
            tracking: KeyLinkWeights::default(),
            support_rect: [0.10, 0.05],
            epsilon: 0.01,
        }
    }
}

impl CostWeights {
    pub fn validate(&self) -> Result<()> {
        let lambdas = [
            self.lambda_track,
            self.lambda_lim,
            self.lambda_rest,
            self.lambda_smooth,
            self.lambda_bal,
        ];
        let w = &self.tracking;
        let all_nonneg = lambdas
            .iter()
            .chain(w.support.iter())
            .chain(w.swing.iter())
            .chain(w.pelvis.iter())
            .all(|v| v.is_finite() && *v >= 0.0);
        if !all_nonneg {
            return Err(Error::Config("cost weights must be finite and nonnegative".into()));
        }
        if !(self.epsilon > 0.0 && self.support_rect[0] > 0.0 && self.support_rect[1] > 0.0) {
            return Err(Error::Config("epsilon and support_rect must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub initial_damping: f64,
    pub damping_increase: f64,
    pub damping_decrease: f64,
    pub max_damping: f64,
    /// Stop when an accepted step lowers the cost by less than this fraction.
    pub relative_cost_tolerance: f64,
    pub gradient_tolerance: f64,
    pub absolute_cost_tolerance: f64,
    pub max_iterations: usize,
    /// Softness (m) of the smoothed balance hinge used inside the solver.
    pub balance_softness: f64,
    /// Keep the base pose fixed (fixed-base chains such as arms).
    pub fix_base: bool,
    /// Stage-1 gate: largest allowed foot position tracking error, meters.
    pub tracking_tolerance: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            initial_damping: 1e-3,
            damping_increase: 10.0,
            damping_decrease: 3.0,
            max_damping: 1e10,
            relative_cost_tolerance: 1e-8,
            gradient_tolerance: 1e-10,
            absolute_cost_tolerance: 1e-24,
            max_iterations: 200,
            balance_softness: 1e-4,
            fix_base: false,
            tracking_tolerance: 0.03,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.initial_damping > 0.0
            && self.damping_increase > 1.0
            && self.damping_decrease > 1.0
            && self.max_damping > self.initial_damping
            && self.relative_cost_tolerance >= 0.0
            && self.gradient_tolerance >= 0.0
            && self.absolute_cost_tolerance >= 0.0
            && self.balance_softness > 0.0
            && self.tracking_tolerance > 0.0;
        if !ok {
            return Err(Error::Config("invalid solver configuration".into()));
        }
        Ok(())
    }
}

/// Base poses and joint vectors over the horizon: the optimization variable
/// and, once accepted, the generated motion.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub base_poses: Vec<Pose>,
    pub joint_vectors: Vec<JointVector>,
    pub frame_dt: f64,
}

impl Trajectory {
    pub fn constant(base: Pose, q: JointVector, frames: usize, frame_dt: f64) -> Self {
        Self {
            base_poses: vec![base; frames],
            joint_vectors: vec![q; frames],
            frame_dt,
        }
    }

    pub fn len(&self) -> usize {
        self.base_poses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base_poses.is_empty()
    }

    pub fn dof(&self) -> usize {
        self.joint_vectors.first().map_or(0, |q| q.len())
    }

    pub fn validate(&self, model: &KinematicModel) -> Result<()> {
        if self.base_poses.len() != self.joint_vectors.len() {
            return Err(Error::dims(self.base_poses.len(), self.joint_vectors.len()));
        }
        if self.len() < 2 {
            return Err(Error::InvalidArgument("trajectory needs at least 2 frames".into()));
        }
        for q in &self.joint_vectors {
            model.check_dims(q)?;
        }
        Ok(())
    }

    /// Applies a per-frame tangent step `[ω, v, δq]` (world-frame base
    /// rotation, base translation, joints) and re-normalizes rotations.
    pub fn retract(&self, step: &[nalgebra::DVector<f64>]) -> Trajectory {
        let mut out = self.clone();
        for (t, d) in step.iter().enumerate() {
            let w = Vector3::new(d[0], d[1], d[2]);
            let v = Vector3::new(d[3], d[4], d[5]);
            let base = &mut out.base_poses[t];
            base.rotation = so3_exp(&w) * base.rotation;
            base.translation += v;
            *base = base.renormalized();
            let n = out.joint_vectors[t].len();
            out.joint_vectors[t] += d.rows(6, n);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    /// Linearizations performed (accepted plus rejected trial steps).
    pub iterations: usize,
    pub initial_cost: f64,
    pub final_cost: f64,
    pub converged: bool,
    /// `max_t d_t` of the returned trajectory (0 when no support is defined).
    pub max_balance_violation: f64,
    pub accepted: bool,
    /// Cost after each accepted step, starting with the initial cost.
    pub cost_history: Vec<f64>,
}
