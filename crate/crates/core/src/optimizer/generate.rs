use serde::{Deserialize, Serialize};

use super::problem::TrajectoryProblem;
use super::solver::{solve_stage1, solve_stage2};
use super::{CostWeights, SolveReport, SolverConfig, Trajectory};
use crate::error::Result;
use crate::kinematics::{KinematicModel, KinematicState};
use crate::reference::{build_reference, GenerationTask, ReferenceTrajectories};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectionStage {
    /// Stage 1 could not bring the feet onto their references.
    Stage1,
    /// Stage 2 left the projected CoM outside the support tolerance.
    Stage2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rejection {
    pub stage: RejectionStage,
    /// `max_t d_t` of the last solution, meters.
    pub balance_violation: f64,
    /// Largest foot position tracking error of the last solution, meters.
    pub tracking_error: f64,
    pub stage1: SolveReport,
    pub stage2: Option<SolveReport>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GenerationOutcome {
    Accepted {
        trajectory: Trajectory,
        references: ReferenceTrajectories,
        stage1: SolveReport,
        stage2: SolveReport,
        balance_distances: Vec<f64>,
    },
    Rejected(Rejection),
}

impl GenerationOutcome {
    pub fn is_accepted(&self) -> bool {
        matches!(self, GenerationOutcome::Accepted { .. })
    }

    pub fn trajectory(&self) -> Option<&Trajectory> {
        match self {
            GenerationOutcome::Accepted { trajectory, .. } => Some(trajectory),
            GenerationOutcome::Rejected(_) => None,
        }
    }
}

/// Every frame at the task's initial base pose and posture.
pub fn initial_trajectory(task: &GenerationTask) -> Trajectory {
    Trajectory::constant(
        task.initial_base,
        task.initial_joints.clone(),
        task.horizon,
        task.frame_dt,
    )
}

fn foot_tracking_error(model: &KinematicModel, traj: &Trajectory, problem: &TrajectoryProblem<'_>) -> Result<f64> {
    let feet = model.feet();
    let mut worst: f64 = 0.0;
    for t in 0..traj.len() {
        let state = KinematicState::new(model, &traj.base_poses[t], &traj.joint_vectors[t])?;
        for target in problem.targets.iter().filter(|tg| feet.contains(&tg.link)) {
            let err = (state.link_pose(target.link).translation - target.poses[t].translation).norm();
            worst = worst.max(err);
        }
    }
    Ok(worst)
}

/// Reference construction, stage 1, stage 2 and validation for one task.
pub fn generate_motion(
    task: &GenerationTask,
    model: &KinematicModel,
    weights: &CostWeights,
    config: &SolverConfig,
) -> Result<GenerationOutcome> {
    weights.validate()?;
    config.validate()?;
    let refs = build_reference(task, model)?;
    let problem = TrajectoryProblem::from_references(model, task, &refs, weights.clone())?;

    let (stage1_traj, stage1) = solve_stage1(&initial_trajectory(task), &problem, config)?;
    let tracking_error = foot_tracking_error(model, &stage1_traj, &problem)?;
    if tracking_error > config.tracking_tolerance {
        return Ok(GenerationOutcome::Rejected(Rejection {
            stage: RejectionStage::Stage1,
            balance_violation: stage1.max_balance_violation,
            tracking_error,
            stage1,
            stage2: None,
        }));
    }

    let (trajectory, stage2) = solve_stage2(&stage1_traj, &problem, config)?;
    let balance_distances = problem.balance_distances(&trajectory)?;
    let max_d = balance_distances.iter().copied().fold(0.0, f64::max);
    if max_d <= weights.epsilon {
        Ok(GenerationOutcome::Accepted {
            trajectory,
            references: refs,
            stage1,
            stage2,
            balance_distances,
        })
    } else {
        let tracking_error = foot_tracking_error(model, &trajectory, &problem)?;
        Ok(GenerationOutcome::Rejected(Rejection {
            stage: RejectionStage::Stage2,
            balance_violation: max_d,
            tracking_error,
            stage1,
            stage2: Some(stage2),
        }))
    }
}
