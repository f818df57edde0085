//! Generation tasks and the key-link reference trajectories they induce.
//!
//! A task fixes a support foot, a target pose for the swing foot, a target
//! pelvis height and an initial posture. The references hold the support
//! foot still, interpolate the swing foot to its target in SE(3) and move
//! the pelvis to the requested height.

use std::collections::BTreeMap;

use nalgebra::{UnitQuaternion, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{so3_exp, so3_log, JointVector, KinematicModel, KinematicState, Pose};

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationTask {
    pub support_foot: String,
    pub target_foot_pose: Pose,
    pub target_pelvis_height: f64,
    pub initial_joints: JointVector,
    /// Base pose at frame 0; places the support sole on the ground plane.
    pub initial_base: Pose,
    pub horizon: usize,
    pub frame_dt: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceTrajectories {
    pub support: Vec<Pose>,
    pub swing: Vec<Pose>,
    pub pelvis: Vec<Pose>,
}

impl ReferenceTrajectories {
    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }
}

/// Closed interval `[lo, hi]`.
pub type Interval = [f64; 2];

/// Swing-foot target ranges, expressed in the support-sole ground frame:
/// `x` forward, `y` lateral towards the swing side, `z` height above the
/// support sole, `yaw` turning away from the support foot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SwingTargetRanges {
    pub x: Interval,
    pub y: Interval,
    pub z: Interval,
    pub yaw: Interval,
    /// Also sample roll and pitch of the target.
    pub full_orientation: bool,
    pub roll: Interval,
    pub pitch: Interval,
}

impl Default for SwingTargetRanges {
    fn default() -> Self {
        Self {
            x: [-0.06, 0.20],
            y: [0.18, 0.30],
            z: [0.03, 0.15],
            yaw: [-0.25, 0.25],

            full_orientation: false,
            roll: [-0.2, 0.2],
            pitch: [-0.3, 0.3],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingConfig {
    pub horizon: usize,
    pub frame_dt: f64,
    /// Fixed support foot link; `None` draws one of the two feet.
    pub support_foot: Option<String>,
    pub swing_target: SwingTargetRanges,
    pub pelvis_height: Interval,
    /// Joints whose name starts with one of these prefixes are lower-limb
    /// joints and are drawn from a narrow band around `lower_limb_nominal`.
    pub lower_limb_prefixes: Vec<String>,
    /// Nominal lower-limb posture; unlisted lower-limb joints default to 0.
    pub lower_limb_nominal: BTreeMap<String, f64>,
    pub lower_limb_half_width: f64,
    /// Fraction of each upper-body joint range (centered) to draw from.
    pub upper_body_range_scale: f64,
    /// Explicit per-joint initial ranges, overriding the rules above.
    pub joint_ranges: BTreeMap<String, Interval>,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        let prefixes = [
            "left_hip",
            "left_knee",
            "left_ankle",
            "right_hip",
            "right_knee",
            "right_ankle",
        ];
        let mut nominal = BTreeMap::new();
        for side in ["left", "right"] {
            nominal.insert(format!("{side}_hip_pitch_joint"), -0.2);
            nominal.insert(format!("{side}_knee_joint"), 0.4);
            nominal.insert(format!("{side}_ankle_pitch_joint"), -0.2);
        }
        Self {
            horizon: 100,
            frame_dt: 0.02,
            support_foot: None,
            swing_target: SwingTargetRanges::default(),
            pelvis_height: [0.68, 0.76],
            lower_limb_prefixes: prefixes.iter().map(|s| s.to_string()).collect(),
            lower_limb_nominal: nominal,
            lower_limb_half_width: 0.08,
            upper_body_range_scale: 1.0,
            joint_ranges: BTreeMap::new(),
        }
    }
}

fn check_interval(name: &str, iv: Interval) -> Result<()> {
    if !(iv[0].is_finite() && iv[1].is_finite() && iv[0] <= iv[1]) {
        return Err(Error::Config(format!(
            "range `{name}` = [{}, {}] is empty or inverted",
            iv[0], iv[1]
        )));
    }
    Ok(())
}

fn draw(rng: &mut ChaCha8Rng, iv: Interval) -> f64 {
    let u: f64 = rng.gen();
    iv[0] + (iv[1] - iv[0]) * u
}

impl SamplingConfig {
    /// Resolves the per-joint initial ranges, in model joint order.
    pub fn joint_intervals(&self, model: &KinematicModel) -> Result<Vec<Interval>> {
        for name in self.joint_ranges.keys() {
            if model.actuated_index(name).is_none() {
                return Err(Error::Config(format!("joint_ranges names unknown joint `{name}`")));
            }
        }
        check_interval("upper_body_range_scale", [0.0, self.upper_body_range_scale])?;
        if self.upper_body_range_scale > 1.0 || self.lower_limb_half_width < 0.0 {
            return Err(Error::Config(
                "upper_body_range_scale must lie in [0, 1] and lower_limb_half_width ≥ 0".into(),
            ));
        }
        model
            .actuated_joints()
            .map(|j| {
                let [lo, hi] = j.limits;
                let iv = if let Some(iv) = self.joint_ranges.get(&j.name) {
                    *iv
                } else if self.lower_limb_prefixes.iter().any(|p| j.name.starts_with(p)) {
                    let c = self.lower_limb_nominal.get(&j.name).copied().unwrap_or(0.0);
                    [
                        (c - self.lower_limb_half_width).max(lo),
                        (c + self.lower_limb_half_width).min(hi),
                    ]
                } else {
                    let mid = 0.5 * (lo + hi);
                    let half = 0.5 * (hi - lo) * self.upper_body_range_scale;
                    [mid - half, mid + half]
                };
                check_interval(&j.name, iv)?;
                if iv[0] < lo || iv[1] > hi {
                    return Err(Error::Config(format!(
                        "initial range for `{}` leaves its joint limits",
                        j.name
                    )));
                }
                Ok(iv)
            })
            .collect()
    }

    pub fn validate(&self, model: &KinematicModel) -> Result<()> {
        if self.horizon < 2 {
            return Err(Error::Config("horizon must be at least 2".into()));
        }
        if !(self.frame_dt > 0.0) {
            return Err(Error::Config("frame_dt must be positive".into()));
        }
        let st = &self.swing_target;
        check_interval("swing_target.x", st.x)?;
        check_interval("swing_target.y", st.y)?;
        check_interval("swing_target.z", st.z)?;
        check_interval("swing_target.yaw", st.yaw)?;
        check_interval("swing_target.roll", st.roll)?;
        check_interval("swing_target.pitch", st.pitch)?;
        check_interval("pelvis_height", self.pelvis_height)?;
        if model.feet().len() != 2 {
            return Err(Error::InvalidModel(format!(
                "model `{}` does not tag two feet",
                model.name
            )));
        }
        if let Some(f) = &self.support_foot {
            let idx = model.link_index(f)?;
            model.opposite_foot(idx)?;
        }
        self.joint_intervals(model)?;
        Ok(())
    }
}

/// Draws a generation task. Deterministic in `seed`.
pub fn sample_generation_task(seed: u64, config: &SamplingConfig, model: &KinematicModel) -> Result<GenerationTask> {
    config.validate(model)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let feet = model.feet();
    let support = match &config.support_foot {
        Some(name) => model.link_index(name)?,
        None => feet[usize::from(rng.gen::<bool>())],
    };
    let swing = model.opposite_foot(support)?;

    let intervals = config.joint_intervals(model)?;
    let q = JointVector::from_iterator(intervals.len(), intervals.iter().map(|iv| draw(&mut rng, *iv)));

    // Stand the support sole on the ground plane below an upright pelvis.
    let state = KinematicState::new(model, &Pose::identity(), &q)?;
    let sole = *state.link_pose(support);
    let initial_base = Pose::from_translation(0.0, 0.0, -sole.translation.z);
    let sole = initial_base.compose(&sole);
    let swing_sole = initial_base.compose(state.link_pose(swing));

    // Outward lateral direction points from the support foot to the swing foot.
    let side = if swing_sole.translation.y >= sole.translation.y {
        1.0
    } else {
        -1.0
    };
    let st = &config.swing_target;
    let dx = draw(&mut rng, st.x);
    let dy = draw(&mut rng, st.y) * side;
    let z = draw(&mut rng, st.z);
    let yaw = draw(&mut rng, st.yaw) * side;
    let (roll, pitch) = if st.full_orientation {
        (draw(&mut rng, st.roll) * side, draw(&mut rng, st.pitch))
    } else {
        (0.0, 0.0)
    };
    let pelvis_height = draw(&mut rng, config.pelvis_height);

    let (_, _, support_yaw) = sole.rotation.euler_angles();
    let heading = UnitQuaternion::from_euler_angles(0.0, 0.0, support_yaw);
    let offset = heading * Vector3::new(dx, dy, 0.0);
    let target = Pose::new(
        UnitQuaternion::from_euler_angles(roll, pitch, support_yaw + yaw),
        Vector3::new(sole.translation.x + offset.x, sole.translation.y + offset.y, z),
    );

    Ok(GenerationTask {
        support_foot: model.links[support].name.clone(),
        target_foot_pose: target,
        target_pelvis_height: pelvis_height,
        initial_joints: q,
        initial_base,
        horizon: config.horizon,
        frame_dt: config.frame_dt,
    })
}

/// Translation by linear interpolation, rotation along the shortest
/// geodesic. Endpoints are returned exactly.
pub fn interpolate_pose(start: &Pose, end: &Pose, fraction: f64) -> Result<Pose> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::InvalidArgument(format!(
            "interpolation fraction {fraction} outside [0, 1]"
        )));
    }
    if fraction == 0.0 {
        return Ok(*start);
    }
    if fraction == 1.0 {
        return Ok(*end);
    }
    let mut target = end.rotation;
    if start.rotation.coords.dot(&target.coords) < 0.0 {
        target = UnitQuaternion::new_unchecked(-target.into_inner());
    }
    let delta = so3_log(&(start.rotation.inverse() * target));
    let rotation = start.rotation * so3_exp(&(delta * fraction));
    let translation = start.translation + (end.translation - start.translation) * fraction;
    Ok(Pose::new(rotation, translation).renormalized())
}

impl GenerationTask {
    pub fn validate(&self, model: &KinematicModel) -> Result<()> {
        if self.horizon < 2 {
            return Err(Error::InvalidArgument("task horizon must be at least 2".into()));
        }
        if !(self.frame_dt > 0.0) {
            return Err(Error::InvalidArgument("task frame_dt must be positive".into()));
        }
        model.check_dims(&self.initial_joints)?;
        if !model.within_limits(&self.initial_joints) {
            return Err(Error::InvalidArgument("initial joints violate joint limits".into()));
        }
        let s = model.link_index(&self.support_foot)?;
        model.opposite_foot(s)?;
        Ok(())
    }

    pub fn support_link(&self, model: &KinematicModel) -> Result<usize> {
        model.link_index(&self.support_foot)
    }

    pub fn swing_link(&self, model: &KinematicModel) -> Result<usize> {
        model.opposite_foot(self.support_link(model)?)
    }
}

/// Support foot held at its initial pose, swing foot and pelvis
/// interpolated with fraction `t / (N − 1)`.
pub fn build_reference(task: &GenerationTask, model: &KinematicModel) -> Result<ReferenceTrajectories> {
    task.validate(model)?;
    let support = task.support_link(model)?;
    let swing = task.swing_link(model)?;
    let state = KinematicState::new(model, &task.initial_base, &task.initial_joints)?;

    let support0 = *state.link_pose(support);
    let swing0 = *state.link_pose(swing);
    let pelvis0 = *state.link_pose(model.base_link);
    let mut pelvis_target = pelvis0;
    pelvis_target.translation.z = task.target_pelvis_height;

    let n = task.horizon;
    let last = (n - 1) as f64;
    let mut refs = ReferenceTrajectories {
        support: vec![support0; n],
        swing: Vec::with_capacity(n),
        pelvis: Vec::with_capacity(n),
    };
    for t in 0..n {
        let f = t as f64 / last;
        refs.swing.push(interpolate_pose(&swing0, &task.target_foot_pose, f)?);
        refs.pelvis.push(interpolate_pose(&pelvis0, &pelvis_target, f)?);
    }
    Ok(refs)
}
