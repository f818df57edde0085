use std::collections::BTreeMap;

use nalgebra::{Matrix3, Matrix3xX, Matrix6xX, UnitQuaternion, Vector2, Vector3};

use super::model::{JointKind, JointVector, KinematicModel};
use super::pose::{skew, Pose};
use crate::error::Result;

/// World-frame kinematic quantities of one configuration.
///
/// Jacobian columns are ordered `[base ω (3), base v (3), q (n)]`, where the
/// base perturbation is `R ← exp(ω) R`, `p ← p + v` (world frame). Rows of a
/// pose Jacobian are `[angular (3); linear (3)]`.
#[derive(Debug, Clone)]
pub struct KinematicState {
    base: Pose,
    link_poses: Vec<Pose>,
    joint_axes: Vec<Vector3<f64>>,
    joint_origins: Vec<Vector3<f64>>,
}

impl KinematicState {
    pub fn new(model: &KinematicModel, base: &Pose, q: &JointVector) -> Result<Self> {
        model.check_dims(q)?;
        let n = model.dof();
        let mut link_poses = vec![Pose::identity(); model.links.len()];
        let mut joint_axes = vec![Vector3::zeros(); n];
        let mut joint_origins = vec![Vector3::zeros(); n];
        link_poses[model.base_link] = *base;
        for &ji in model.traversal() {
            let joint = &model.joints[ji];
            let frame = link_poses[joint.parent_link].compose(&joint.origin);
            link_poses[joint.child_link] = match (joint.kind, joint.actuated_index) {
                (JointKind::Revolute, Some(a)) => {
                    joint_axes[a] = frame.rotation * joint.axis.into_inner();
                    joint_origins[a] = frame.translation;
                    let rot = UnitQuaternion::from_axis_angle(&joint.axis, q[a]);
                    Pose::new(frame.rotation * rot, frame.translation)
                }
                _ => frame,
            };
        }
        Ok(Self {
            base: *base,
            link_poses,
            joint_axes,
            joint_origins,
        })
    }

    pub fn base(&self) -> &Pose {
        &self.base
    }

    pub fn link_pose(&self, link: usize) -> &Pose {
        &self.link_poses[link]
    }

    pub fn link_poses(&self) -> &[Pose] {
        &self.link_poses
    }

    pub fn link_com(&self, model: &KinematicModel, link: usize) -> Vector3<f64> {
        self.link_poses[link].transform_point(&model.links[link].local_com)
    }

    pub fn center_of_mass(&self, model: &KinematicModel) -> Vector3<f64> {
        let weighted = model
            .links
            .iter()
            .enumerate()
            .fold(Vector3::zeros(), |acc, (i, l)| acc + self.link_com(model, i) * l.mass);
        weighted / model.total_mass()
    }

    /// Linear Jacobian (3 × (6+n)) of a world point rigidly attached to `link`.
    pub fn point_jacobian(&self, model: &KinematicModel, link: usize, point: &Vector3<f64>) -> Matrix3xX<f64> {
        let n = model.dof();
        let mut jac = Matrix3xX::zeros(6 + n);
        jac.fixed_view_mut::<3, 3>(0, 0)
            .copy_from(&(-skew(&(point - self.base.translation))));
        jac.fixed_view_mut::<3, 3>(0, 3).copy_from(&Matrix3::identity());
        for &a in model.ancestors(link) {
            let col = self.joint_axes[a].cross(&(point - self.joint_origins[a]));
            jac.fixed_view_mut::<3, 1>(0, 6 + a).copy_from(&col);
        }
        jac
    }

    /// Pose Jacobian (6 × (6+n)) of the link frame origin.
    pub fn pose_jacobian(&self, model: &KinematicModel, link: usize) -> Matrix6xX<f64> {
        let n = model.dof();
        let p = self.link_poses[link].translation;
        let mut jac = Matrix6xX::zeros(6 + n);
        jac.fixed_view_mut::<3, 3>(0, 0).copy_from(&Matrix3::identity());
        jac.fixed_view_mut::<3, 3>(3, 0)
            .copy_from(&(-skew(&(p - self.base.translation))));
        jac.fixed_view_mut::<3, 3>(3, 3).copy_from(&Matrix3::identity());
        for &a in model.ancestors(link) {
            let axis = self.joint_axes[a];
            jac.fixed_view_mut::<3, 1>(0, 6 + a).copy_from(&axis);
            jac.fixed_view_mut::<3, 1>(3, 6 + a)
                .copy_from(&axis.cross(&(p - self.joint_origins[a])));
        }
        jac
    }

    /// CoM Jacobian (3 × (6+n)), using subtree mass moments per joint.
    pub fn com_jacobian(&self, model: &KinematicModel) -> Matrix3xX<f64> {
        let n = model.dof();
        let total = model.total_mass();
        let mut sub_mass: Vec<f64> = model.links.iter().map(|l| l.mass).collect();
        let mut sub_moment: Vec<Vector3<f64>> = (0..model.links.len())
            .map(|i| self.link_com(model, i) * model.links[i].mass)
            .collect();
        for &ji in model.traversal().iter().rev() {
            let j = &model.joints[ji];
            sub_mass[j.parent_link] += sub_mass[j.child_link];
            let child = sub_moment[j.child_link];
            sub_moment[j.parent_link] += child;
        }
        let com = sub_moment[model.base_link] / total;

        let mut jac = Matrix3xX::zeros(6 + n);
        jac.fixed_view_mut::<3, 3>(0, 0)
            .copy_from(&(-skew(&(com - self.base.translation))));
        jac.fixed_view_mut::<3, 3>(0, 3).copy_from(&Matrix3::identity());
        for a in 0..n {
            let child = model.actuated_joint(a).child_link;
            let arm = sub_moment[child] - self.joint_origins[a] * sub_mass[child];
            let col = self.joint_axes[a].cross(&arm) / total;
            jac.fixed_view_mut::<3, 1>(0, 6 + a).copy_from(&col);
        }
        jac
    }
}

/// World pose of every link, keyed by link name. The base link receives
/// `base` unchanged.
pub fn forward_kinematics(model: &KinematicModel, base: &Pose, q: &JointVector) -> Result<BTreeMap<String, Pose>> {
    let state = KinematicState::new(model, base, q)?;
    Ok(model
        .links
        .iter()
        .zip(state.link_poses)
        .map(|(l, p)| (l.name.clone(), p))
        .collect())
}

pub fn center_of_mass(model: &KinematicModel, base: &Pose, q: &JointVector) -> Result<Vector3<f64>> {
    Ok(KinematicState::new(model, base, q)?.center_of_mass(model))
}

/// Ground-plane projection.
pub fn project_xy(v: &Vector3<f64>) -> Vector2<f64> {
    Vector2::new(v.x, v.y)
}

pub fn pose_jacobian(model: &KinematicModel, base: &Pose, q: &JointVector, link: &str) -> Result<Matrix6xX<f64>> {
    let idx = model.link_index(link)?;
    Ok(KinematicState::new(model, base, q)?.pose_jacobian(model, idx))
}

pub fn com_jacobian(model: &KinematicModel, base: &Pose, q: &JointVector) -> Result<Matrix3xX<f64>> {
    Ok(KinematicState::new(model, base, q)?.com_jacobian(model))
}
