//! Residual blocks of the stage costs, unscaled by the λ weights.

use nalgebra::{DVector, Matrix3, Matrix6xX, Vector2, Vector6};

use super::problem::LinkTarget;
use super::Trajectory;
use crate::error::{Error, Result};
use crate::kinematics::{
    project_xy, so3_left_jacobian_inv, so3_log, JointVector, KinematicModel, KinematicState, Pose,
};

/// Pose tracking residual of one link against its reference, weighted by
/// `sqrt(w)` per component: `[log(R_refᵀ R); p − p_ref]`.
pub(crate) fn tracking_block(
    state: &KinematicState,
    model: &KinematicModel,
    link: usize,
    reference: &Pose,
    weights: &[f64; 6],
    with_jacobian: bool,
) -> (Vector6<f64>, Option<Matrix6xX<f64>>) {
    let pose = state.link_pose(link);
    let ref_inv = reference.rotation.inverse();
    let phi = so3_log(&(ref_inv * pose.rotation));
    let dp = pose.translation - reference.translation;
    let sw: [f64; 6] = weights.map(f64::sqrt);
    let r = Vector6::new(
        sw[0] * phi.x,
        sw[1] * phi.y,
        sw[2] * phi.z,
        sw[3] * dp.x,
        sw[4] * dp.y,
        sw[5] * dp.z,
    );
    if !with_jacobian {
        return (r, None);
    }
    let mut jac = state.pose_jacobian(model, link);
    let rot: Matrix3<f64> = so3_left_jacobian_inv(&phi) * ref_inv.to_rotation_matrix().matrix();
    let angular = rot * jac.fixed_rows::<3>(0);
    jac.fixed_rows_mut::<3>(0).copy_from(&angular);
    for (k, s) in sw.iter().enumerate() {
        jac.row_mut(k).scale_mut(*s);
    }
    (r, Some(jac))
}

/// One-sided hinge: distance outside `[lower, upper]`, signed.
pub(crate) fn limit_violation(q: f64, lower: f64, upper: f64) -> f64 {
    if q > upper {
        q - upper
    } else if q < lower {
        q - lower
    } else {
        0.0
    }
}

/// `d = ‖max(0, |p − c| − s)‖₂` and its gradient with respect to `p`.
pub fn balance_distance_xy(p: &Vector2<f64>, c: &Vector2<f64>, rect: [f64; 2]) -> (f64, Vector2<f64>) {
    let delta = p - c;
    let excess = Vector2::new((delta.x.abs() - rect[0]).max(0.0), (delta.y.abs() - rect[1]).max(0.0));
    let d = excess.norm();
    if d == 0.0 {
        return (0.0, Vector2::zeros());
    }
    let grad = Vector2::new(excess.x / d * delta.x.signum(), excess.y / d * delta.y.signum());
    (d, grad)
}

/// C¹ approximation of `max(0, x)`: zero below `−s`, quadratic on
/// `[−s, s]`, identity above `s`.
#[derive(Debug, Clone, Copy)]
pub struct SmoothHinge {
    pub softness: f64,
}

impl SmoothHinge {
    pub fn value(&self, x: f64) -> f64 {
        let s = self.softness;
        if x <= -s {
            0.0
        } else if x >= s {
            x
        } else {
            (x + s) * (x + s) / (4.0 * s)
        }
    }

    /// `sqrt(h(x))` and its derivative, so that the squared residual
    /// reproduces the hinge penalty exactly.
    pub fn sqrt_with_derivative(&self, x: f64) -> (f64, f64) {
        let s = self.softness;
        if x <= -s {
            (0.0, 0.0)
        } else if x >= s {
            let r = x.sqrt();
            (r, 0.5 / r)
        } else {
            let k = 0.5 / s.sqrt();
            ((x + s) * k, k)
        }
    }
}

fn check_frames(traj: &Trajectory, expected: usize) -> Result<()> {
    if traj.len() != expected {
        return Err(Error::dims(expected, traj.len()));
    }
    Ok(())
}

/// Tracking residuals for every frame and target, 6 per (frame, target).
pub fn tracking_residuals(model: &KinematicModel, traj: &Trajectory, targets: &[LinkTarget]) -> Result<DVector<f64>> {
    traj.validate(model)?;
    for target in targets {
        check_frames(traj, target.poses.len())?;
    }
    let mut out = Vec::with_capacity(traj.len() * targets.len() * 6);
    for t in 0..traj.len() {
        let state = KinematicState::new(model, &traj.base_poses[t], &traj.joint_vectors[t])?;
        for target in targets {
            let (r, _) = tracking_block(&state, model, target.link, &target.poses[t], &target.weights, false);
            out.extend(r.iter());
        }
    }
    Ok(DVector::from_vec(out))
}

/// Per frame and joint, the amount by which `q` leaves its limits.
pub fn joint_limit_residuals(model: &KinematicModel, traj: &Trajectory) -> Result<DVector<f64>> {
    traj.validate(model)?;
    let lower = model.lower_limits();
    let upper = model.upper_limits();
    Ok(DVector::from_iterator(
        traj.len() * model.dof(),
        traj.joint_vectors.iter().flat_map(|q| {
            q.iter()
                .enumerate()
                .map(|(i, &v)| limit_violation(v, lower[i], upper[i]))
                .collect::<Vec<_>>()
        }),
    ))
}

/// Per frame, `q_t − q_init`.
pub fn rest_pose_residuals(traj: &Trajectory, q_init: &JointVector) -> Result<DVector<f64>> {
    let n = q_init.len();
    let mut out = Vec::with_capacity(traj.len() * n);
    for q in &traj.joint_vectors {
        if q.len() != n {
            return Err(Error::dims(n, q.len()));
        }
        out.extend((q - q_init).iter());
    }
    Ok(DVector::from_vec(out))
}

/// First differences between adjacent frames: `[log(R_{t+1} R_tᵀ);
/// p_{t+1} − p_t; q_{t+1} − q_t]` per pair.
pub fn smoothness_residuals(traj: &Trajectory) -> DVector<f64> {
    let n = traj.dof();
    let mut out = Vec::with_capacity(traj.len().saturating_sub(1) * (6 + n));
    for t in 0..traj.len().saturating_sub(1) {
        let (a, b) = (&traj.base_poses[t], &traj.base_poses[t + 1]);
        out.extend(so3_log(&(b.rotation * a.rotation.inverse())).iter());
        out.extend((b.translation - a.translation).iter());
        out.extend((&traj.joint_vectors[t + 1] - &traj.joint_vectors[t]).iter());
    }
    DVector::from_vec(out)
}

/// Per-frame balance distance `d_t` of the projected CoM from the support
/// rectangle centered on the projected support pose.
pub fn balance_distance(
    model: &KinematicModel,
    traj: &Trajectory,
    support_poses: &[Pose],
    rect: [f64; 2],
) -> Result<Vec<f64>> {
    traj.validate(model)?;
    check_frames(traj, support_poses.len())?;
    (0..traj.len())
        .map(|t| {
            let state = KinematicState::new(model, &traj.base_poses[t], &traj.joint_vectors[t])?;
            let p = project_xy(&state.center_of_mass(model));
            let c = project_xy(&support_poses[t].translation);
            Ok(balance_distance_xy(&p, &c, rect).0)
        })
        .collect()
}
