use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{JointVector, KinematicModel, KinematicState, Pose};

/// Default deviation above which a rollout counts as failed, m.
pub const SUCCESS_THRESHOLD: f64 = 0.5;

/// World keypoint positions per frame plus the root translation used for
/// root-relative comparisons.
#[derive(Debug, Clone, PartialEq)]
pub struct KeypointTrack {
    pub positions: Vec<Vec<Vector3<f64>>>,
    pub root: Vec<Vector3<f64>>,
}

impl KeypointTrack {
    pub fn from_motion(
        model: &KinematicModel,
        bases: &[Pose],
        joints: &[JointVector],
        keypoints: &[usize],
    ) -> Result<Self> {
        if bases.len() != joints.len() {
            return Err(Error::dims(bases.len(), joints.len()));
        }
        let mut positions = Vec::with_capacity(bases.len());
        for (base, q) in bases.iter().zip(joints) {
            let state = KinematicState::new(model, base, q)?;
            positions.push(keypoints.iter().map(|&k| state.link_pose(k).translation).collect());
        }
        Ok(Self {
            positions,
            root: bases.iter().map(|b| b.translation).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

fn check_compatible(a: &KeypointTrack, b: &KeypointTrack) -> Result<()> {
    if a.len() != b.len() || a.root.len() != a.len() || b.root.len() != b.len() {
        return Err(Error::InvalidArgument(format!(
            "trajectory lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::InvalidArgument("empty trajectory".into()));
    }
    for (t, (pa, pb)) in a.positions.iter().zip(&b.positions).enumerate() {
        if pa.len() != pb.len() || pa.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "frame {t}: keypoint counts differ ({} vs {})",
                pa.len(),
                pb.len()
            )));
        }
    }
    Ok(())
}

/// Mean keypoint distance of each frame, m.
fn frame_deviations(a: &KeypointTrack, b: &KeypointTrack, root_relative: bool) -> Vec<f64> {
    (0..a.len())
        .map(|t| {
            let (ra, rb) = if root_relative {
                (a.root[t], b.root[t])
            } else {
                (Vector3::zeros(), Vector3::zeros())
            };
            let k = a.positions[t].len();
            a.positions[t]
                .iter()
                .zip(&b.positions[t])
                .map(|(pa, pb)| ((pa - ra) - (pb - rb)).norm())
                .sum::<f64>()
                / k as f64
        })
        .collect()
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Global mean per-keypoint position error, mm.
pub fn metric_gmpjpe(traj: &KeypointTrack, reference: &KeypointTrack) -> Result<f64> {
    check_compatible(traj, reference)?;
    Ok(1000.0 * mean(&frame_deviations(traj, reference, false)))
}

/// Mean per-keypoint position error with each frame's root translation
/// removed, mm.
pub fn metric_mpjpe(traj: &KeypointTrack, reference: &KeypointTrack) -> Result<f64> {
    check_compatible(traj, reference)?;
    Ok(1000.0 * mean(&frame_deviations(traj, reference, true)))
}

/// `true` (pass) unless some frame's mean keypoint deviation exceeds
/// `threshold` meters; a deviation equal to the threshold still passes.
pub fn metric_success(traj: &KeypointTrack, reference: &KeypointTrack, threshold: f64) -> Result<bool> {
    check_compatible(traj, reference)?;
    Ok(frame_deviations(traj, reference, false).iter().all(|&d| d <= threshold))
}

/// Percentage of frames where any foot's contact flag differs.
pub fn metric_contact_mismatch(traj: &[Vec<bool>], reference: &[Vec<bool>]) -> Result<f64> {
    if traj.len() != reference.len() || traj.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "contact sequences of length {} and {}",
            traj.len(),
            reference.len()
        )));
    }
    let mut differing = 0usize;
    for (t, (a, b)) in traj.iter().zip(reference).enumerate() {
        if a.len() != b.len() {
            return Err(Error::InvalidArgument(format!("frame {t}: foot counts differ")));
        }
        if a != b {
            differing += 1;
        }
    }
    Ok(100.0 * differing as f64 / traj.len() as f64)
}

/// Mean planar speed of the support foot over frames flagged in contact,
/// m/s. Velocities are finite differences (forward at frame 0, backward
/// elsewhere).
pub fn metric_slippage(foot_positions: &[Vector3<f64>], in_contact: &[bool], frame_dt: f64) -> Result<f64> {
    if foot_positions.len() != in_contact.len() {
        return Err(Error::dims(foot_positions.len(), in_contact.len()));
    }
    if foot_positions.len() < 2 || !(frame_dt > 0.0) {
        return Err(Error::InvalidArgument(
            "slippage needs two frames and a positive frame_dt".into(),
        ));
    }
    let speeds: Vec<f64> = (0..foot_positions.len())
        .filter(|&t| in_contact[t])
        .map(|t| {
            let (a, b) = if t == 0 { (0, 1) } else { (t - 1, t) };
            let d = foot_positions[b] - foot_positions[a];
            d.xy().norm() / frame_dt
        })
        .collect();
    if speeds.is_empty() {
        return Err(Error::InvalidArgument(
            "no frames with the support foot in contact".into(),
        ));
    }
    Ok(mean(&speeds))
}

/// The five tracking metrics of one rollout against its reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub gmpjpe_mm: f64,
    pub mpjpe_mm: f64,
    pub success: bool,
    pub contact_mismatch_pct: f64,
    /// `None` when the support foot is never in contact.
    pub slippage_mps: Option<f64>,
}
