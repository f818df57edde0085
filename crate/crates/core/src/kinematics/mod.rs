//! Floating-base kinematics: model loading, forward kinematics, center of
//! mass and analytic Jacobians.

mod chain;
mod model;
mod pose;

pub use chain::{center_of_mass, com_jacobian, forward_kinematics, pose_jacobian, project_xy, KinematicState};
pub use model::{
    load_model, Joint, JointDescription, JointKind, JointVector, KinematicModel, Link, LinkDescription,
    ModelDescription, OriginDescription,
};
pub use pose::{skew, so3_exp, so3_left_jacobian_inv, so3_log, so3_right_jacobian_inv, Pose};
