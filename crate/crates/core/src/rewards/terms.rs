use std::collections::BTreeMap;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::curriculum::shaped_reward;
use crate::error::{Error, Result};
use crate::kinematics::{project_xy, JointVector, KinematicModel, KinematicState, Pose};
use crate::optimizer::{balance_distance_xy, Trajectory};

/// Where a motion came from; balance priors only apply to synthetic ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MotionSource {
    Mocap,
    Synthetic,
}

impl MotionSource {
    pub fn as_str(self) -> &'static str {
        match self {
            MotionSource::Mocap => "mocap",
            MotionSource::Synthetic => "synthetic",
        }
    }
}

/// Kinematic snapshot of the robot at one frame. Per-foot arrays follow the
/// model's foot order; `link_positions` is indexed by link.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameState {
    pub base: Pose,
    pub joint_positions: JointVector,
    pub joint_velocities: JointVector,
    pub contacts: Vec<bool>,
    pub foot_velocities: Vec<Vector3<f64>>,
    pub link_positions: Vec<Vector3<f64>>,
    pub center_of_mass: Vector3<f64>,
}

impl FrameState {
    /// Fills link positions and CoM from forward kinematics.
    pub fn from_kinematics(
        model: &KinematicModel,
        base: Pose,
        joint_positions: JointVector,
        joint_velocities: JointVector,
        contacts: Vec<bool>,
        foot_velocities: Vec<Vector3<f64>>,
    ) -> Result<Self> {
        model.check_dims(&joint_velocities)?;
        let feet = model.feet().len();
        if contacts.len() != feet {
            return Err(Error::dims(feet, contacts.len()));
        }
        if foot_velocities.len() != feet {
            return Err(Error::dims(feet, foot_velocities.len()));
        }
        let state = KinematicState::new(model, &base, &joint_positions)?;
        Ok(Self {
            link_positions: state.link_poses().iter().map(|p| p.translation).collect(),
            center_of_mass: state.center_of_mass(model),
            base,
            joint_positions,
            joint_velocities,
            contacts,
            foot_velocities,
        })
    }
}

/// Nonnegative weights of the reward terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TermWeights {
    pub joint_position: f64,
    pub joint_velocity: f64,
    pub root_orientation: f64,
    pub com_alignment: f64,
    pub contact: f64,
}

impl Default for TermWeights {
    fn default() -> Self {
        Self {
            joint_position: 1.0,
            joint_velocity: 1.0,
            root_orientation: 1.0,
            com_alignment: 1.0,
            contact: 1.0,
        }
    }
}

/// Tolerances `σ` of the shaped terms (rad, rad/s, rad, m).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TermSigmas {
    pub joint_position: f64,
    pub joint_velocity: f64,
    pub root_orientation: f64,
    pub com_alignment: f64,
}

impl Default for TermSigmas {
    fn default() -> Self {
        Self {
            joint_position: 0.1,
            joint_velocity: 1.0,
            root_orientation: 0.2,
            com_alignment: 0.02,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RewardConfig {
    pub weights: TermWeights,
    pub sigmas: TermSigmas,
    /// Support rectangle half-extents used by the CoM term, m.
    pub support_rect: [f64; 2],
    /// A foot below this height and slower than `contact_speed` is in contact.
    pub contact_height: f64,
    pub contact_speed: f64,
    /// Links whose positions the metrics compare; `None` selects every link
    /// with mass.
    pub keypoints: Option<Vec<String>>,
}

impl Default for RewardConfig {
    fn default() -> Self {
        Self {
            weights: TermWeights::default(),
            sigmas: TermSigmas::default(),
            support_rect: [0.10, 0.05],
            contact_height: 0.01,
            contact_speed: 0.1,
            keypoints: None,
        }
    }
}

impl RewardConfig {
    pub fn validate(&self) -> Result<()> {
        let w = &self.weights;
        let s = &self.sigmas;
        let weights = [
            w.joint_position,
            w.joint_velocity,
            w.root_orientation,
            w.com_alignment,
            w.contact,
        ];
        let sigmas = [s.joint_position, s.joint_velocity, s.root_orientation, s.com_alignment];
        if weights.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::Config(format!("reward weights must be nonnegative: {w:?}")));
        }
        if sigmas.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::Config(format!("reward sigmas must be positive: {s:?}")));
        }
        if self.support_rect.iter().any(|v| !(*v >= 0.0))
            || !(self.contact_height >= 0.0)
            || !(self.contact_speed >= 0.0)
        {
            return Err(Error::Config("negative support rectangle or contact thresholds".into()));
        }
        Ok(())
    }

    /// Link indices selected by `keypoints`.
    pub fn keypoint_links(&self, model: &KinematicModel) -> Result<Vec<usize>> {
        match &self.keypoints {
            Some(names) => names.iter().map(|n| model.link_index(n)).collect(),
            None => Ok((0..model.links.len()).filter(|&i| model.links[i].mass > 0.0).collect()),
        }
    }

    /// Height-and-speed contact heuristic.
    pub fn in_contact(&self, foot_position: &Vector3<f64>, foot_velocity: &Vector3<f64>) -> bool {
        foot_position.z < self.contact_height && foot_velocity.norm() < self.contact_speed
    }
}

/// Per-term rewards and their weighted sum.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RewardBreakdown {
    pub terms: BTreeMap<String, f64>,
    pub total: f64,
}

impl RewardBreakdown {
    fn push(&mut self, name: &str, reward: f64, weight: f64) {
        self.terms.insert(name.to_string(), reward);
        self.total += weight * reward;
    }

    fn merge(mut self, other: RewardBreakdown) -> RewardBreakdown {
        self.terms.extend(other.terms);
        self.total += other.total;
        self
    }
}

fn mean_abs_diff(a: &JointVector, b: &JointVector) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::dims(b.len(), a.len()));
    }
    if a.is_empty() {
        return Ok(0.0);
    }
    Ok((a - b).abs().sum() / a.len() as f64)
}

/// Joint position, joint velocity and root orientation terms.
pub fn general_tracking_reward(
    state: &FrameState,
    reference: &FrameState,
    config: &RewardConfig,
) -> Result<RewardBreakdown> {
    let e_pos = mean_abs_diff(&state.joint_positions, &reference.joint_positions)?;
    let e_vel = mean_abs_diff(&state.joint_velocities, &reference.joint_velocities)?;
    let e_rot = state.base.angle_to(&reference.base);
    let (w, s) = (&config.weights, &config.sigmas);
    let mut out = RewardBreakdown::default();
    out.push(
        "joint_position",
        shaped_reward(e_pos, s.joint_position)?,
        w.joint_position,
    );
    out.push(
        "joint_velocity",
        shaped_reward(e_vel, s.joint_velocity)?,
        w.joint_velocity,
    );
    out.push(
        "root_orientation",
        shaped_reward(e_rot, s.root_orientation)?,
        w.root_orientation,
    );
    Ok(out)
}

/// CoM alignment over the support foot and contact agreement.
pub fn balance_prior_reward(
    state: &FrameState,
    reference: &FrameState,
    model: &KinematicModel,
    support_foot: Option<&str>,
    config: &RewardConfig,
) -> Result<RewardBreakdown> {
    let foot = support_foot.ok_or_else(|| Error::InvalidArgument("balance prior needs a support foot".into()))?;
    let link = model.link_index(foot)?;
    if !model.feet().contains(&link) {
        return Err(Error::InvalidArgument(format!("{foot} is not a foot")));
    }
    let foot_pos = state
        .link_positions
        .get(link)
        .ok_or_else(|| Error::dims(model.links.len(), state.link_positions.len()))?;
    let (d, _) = balance_distance_xy(
        &project_xy(&state.center_of_mass),
        &project_xy(foot_pos),
        config.support_rect,
    );
    let contact = if state.contacts == reference.contacts { 1.0 } else { 0.0 };
    let w = &config.weights;
    let mut out = RewardBreakdown::default();
    out.push(
        "com_alignment",
        shaped_reward(d, config.sigmas.com_alignment)?,
        w.com_alignment,
    );
    out.push("contact", contact, w.contact);
    Ok(out)
}

/// General tracking for every motion; balance priors added for synthetic
/// motions only.
pub fn hybrid_reward(
    state: &FrameState,
    reference: &FrameState,
    source: MotionSource,
    model: &KinematicModel,
    support_foot: Option<&str>,
    config: &RewardConfig,
) -> Result<RewardBreakdown> {
    let general = general_tracking_reward(state, reference, config)?;
    match source {
        MotionSource::Mocap => Ok(general),
        MotionSource::Synthetic => {
            let prior = balance_prior_reward(state, reference, model, support_foot, config)?;
            Ok(general.merge(prior))
        }
    }
}

/// Per-frame joint velocities by finite differences (forward at the first
/// frame, backward elsewhere).
pub fn finite_difference_velocities(positions: &[JointVector], frame_dt: f64) -> Result<Vec<JointVector>> {
    if positions.len() < 2 {
        return Err(Error::InvalidArgument("need at least two frames".into()));
    }
    if !(frame_dt > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "frame_dt must be positive, got {frame_dt}"
        )));
    }
    Ok((0..positions.len())
        .map(|t| {
            let (a, b) = if t == 0 { (0, 1) } else { (t - 1, t) };
            (&positions[b] - &positions[a]) / frame_dt
        })
        .collect())
}

/// Contact flags per frame and foot (model foot order) from the height and
/// speed heuristic, with finite-difference foot velocities.
pub fn infer_contacts(model: &KinematicModel, traj: &Trajectory, config: &RewardConfig) -> Result<Vec<Vec<bool>>> {
    traj.validate(model)?;
    if traj.len() < 2 {
        return Err(Error::InvalidArgument("need at least two frames".into()));
    }
    let feet = model.feet();
    let mut positions: Vec<Vec<Vector3<f64>>> = Vec::with_capacity(traj.len());
    for (base, q) in traj.base_poses.iter().zip(&traj.joint_vectors) {
        let state = KinematicState::new(model, base, q)?;
        positions.push(feet.iter().map(|&f| state.link_pose(f).translation).collect());
    }
    Ok((0..traj.len())
        .map(|t| {
            let (a, b) = if t == 0 { (0, 1) } else { (t - 1, t) };
            (0..feet.len())
                .map(|k| {
                    let v = (positions[b][k] - positions[a][k]) / traj.frame_dt;
                    config.in_contact(&positions[t][k], &v)
                })
                .collect()
        })
        .collect())
}
