//! Brute-force kinematics straight from the model JSON, with rotation
//! matrices and no shared code with the library, plus finite-difference
//! helpers for checking analytic derivatives.

#![allow(dead_code)]

use std::collections::HashMap;

use balancekit::kinematics::{
    center_of_mass, forward_kinematics, load_model, so3_exp, JointVector, KinematicModel, Pose,
};
use nalgebra::{DMatrix, Matrix3, Vector3};
use rand::Rng;
use serde_json::Value;

pub fn asset(name: &str) -> String {
    std::fs::read_to_string(balancekit::asset_path(name)).unwrap()
}

pub fn model(name: &str) -> KinematicModel {
    load_model(&asset(name)).unwrap()
}

pub fn humanoid() -> KinematicModel {
    model("humanoid23.json")
}

fn rot_x(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
}

fn rot_y(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

fn rot_z(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// Rodrigues' formula.
pub fn axis_angle(axis: &Vector3<f64>, angle: f64) -> Matrix3<f64> {
    let k = axis.normalize();
    let kx = Matrix3::new(0.0, -k.z, k.y, k.z, 0.0, -k.x, -k.y, k.x, 0.0);
    Matrix3::identity() + kx * angle.sin() + kx * kx * (1.0 - angle.cos())
}

/// Rotation vector of `r` (angle in `[0, π)`).
pub fn log_matrix(r: &Matrix3<f64>) -> Vector3<f64> {
    let cos = ((r.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
    let angle = cos.acos();
    let v = Vector3::new(r[(2, 1)] - r[(1, 2)], r[(0, 2)] - r[(2, 0)], r[(1, 0)] - r[(0, 1)]);
    if angle < 1e-12 {
        v / 2.0
    } else {
        v * angle / (2.0 * angle.sin())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Frame {
    pub r: Matrix3<f64>,
    pub p: Vector3<f64>,
}

impl Frame {
    pub fn of(pose: &Pose) -> Self {
        Frame {
            r: *pose.rotation.to_rotation_matrix().matrix(),
            p: pose.translation,
        }
    }

    fn then(&self, r: Matrix3<f64>, p: Vector3<f64>) -> Frame {
        Frame {
            r: self.r * r,
            p: self.r * p + self.p,
        }
    }
}

fn vec3(v: &Value) -> Option<Vector3<f64>> {
    let a = v.as_array()?;
    Some(Vector3::new(a[0].as_f64()?, a[1].as_f64()?, a[2].as_f64()?))
}

/// World frame and world CoM of every link, given joint angles by name.
pub struct Oracle {
    desc: Value,
}

impl Oracle {
    pub fn new(json: &str) -> Self {
        Oracle {
            desc: serde_json::from_str(json).unwrap(),
        }
    }

    pub fn asset(name: &str) -> Self {
        Oracle::new(&asset(name))
    }

    pub fn links(&self, base: &Frame, q: &HashMap<String, f64>) -> HashMap<String, Frame> {
        let mut out = HashMap::new();
        let root = self.desc["base_link"].as_str().unwrap().to_string();
        out.insert(root.clone(), *base);
        let joints = self.desc["joints"].as_array().unwrap();
        let mut frontier = vec![root];
        while let Some(parent) = frontier.pop() {
            for j in joints.iter().filter(|j| j["parent"] == parent.as_str()) {
                let origin = &j["origin"];
                let xyz = vec3(&origin["xyz"]).unwrap_or_else(Vector3::zeros);
                let rpy = vec3(&origin["rpy"]).unwrap_or_else(Vector3::zeros);
                let fixed = rot_z(rpy.z) * rot_y(rpy.y) * rot_x(rpy.x);
                let motion = if j["type"] == "revolute" {
                    let axis = vec3(&j["axis"]).unwrap();
                    axis_angle(&axis, q[j["name"].as_str().unwrap()])
                } else {
                    Matrix3::identity()
                };
                let child = j["child"].as_str().unwrap().to_string();
                let pf = out[&parent];
                out.insert(child.clone(), pf.then(fixed * motion, xyz));
                frontier.push(child);
            }
        }
        out
    }

    pub fn center_of_mass(&self, base: &Frame, q: &HashMap<String, f64>) -> Vector3<f64> {
        let frames = self.links(base, q);
        let mut total = 0.0;
        let mut acc = Vector3::zeros();
        for l in self.desc["links"].as_array().unwrap() {
            let m = l["mass"].as_f64().unwrap();
            let c = vec3(&l["com"]).unwrap_or_else(Vector3::zeros);
            let f = frames[l["name"].as_str().unwrap()];
            acc += (f.r * c + f.p) * m;
            total += m;
        }
        acc / total
    }

    /// Joint angles keyed by name, from a vector in the model's order.
    pub fn named(model: &KinematicModel, q: &JointVector) -> HashMap<String, f64> {
        model
            .actuated_joint_names()
            .into_iter()
            .zip(q.iter().copied())
            .collect()
    }
}

/// Uniform joint configuration inside the limits (clipped to ±π).
pub fn random_q<R: Rng>(model: &KinematicModel, rng: &mut R) -> JointVector {
    let (lo, hi) = (model.lower_limits(), model.upper_limits());
    JointVector::from_iterator(
        model.dof(),
        (0..model.dof()).map(|i| rng.gen_range(lo[i].max(-3.0)..=hi[i].min(3.0))),
    )
}

pub fn random_pose<R: Rng>(rng: &mut R) -> Pose {
    let axis = Vector3::new(
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
    );
    let angle: f64 = rng.gen_range(-3.0..3.0);
    let r = nalgebra::Rotation3::from_matrix_unchecked(axis_angle(&axis, angle));
    Pose::new(
        nalgebra::UnitQuaternion::from_rotation_matrix(&r),
        Vector3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(0.0..1.5),
        ),
    )
}

/// Relative error `‖a − b‖ / max(‖b‖, floor)`.
pub fn rel_err(a: &nalgebra::DMatrix<f64>, b: &nalgebra::DMatrix<f64>, floor: f64) -> f64 {
    (a - b).norm() / b.norm().max(floor)
}

/// `max_t d_t` recomputed from the oracle CoM and the rectangle hinge.
pub fn oracle_max_balance(
    oracle: &Oracle,
    model: &KinematicModel,
    traj: &balancekit::optimizer::Trajectory,
    support: &[Pose],
    rect: [f64; 2],
) -> f64 {
    let mut worst: f64 = 0.0;
    for t in 0..traj.len() {
        let com = oracle.center_of_mass(
            &Frame::of(&traj.base_poses[t]),
            &Oracle::named(model, &traj.joint_vectors[t]),
        );
        let c = support[t].translation;
        let ex = ((com.x - c.x).abs() - rect[0]).max(0.0);
        let ey = ((com.y - c.y).abs() - rect[1]).max(0.0);
        worst = worst.max(ex.hypot(ey));
    }
    worst
}

/// Central differences of one scaled residual term along every per-frame
/// tangent coordinate.
pub fn fd_term_jacobian(
    problem: &balancekit::optimizer::TrajectoryProblem<'_>,
    traj: &balancekit::optimizer::Trajectory,
    term: balancekit::optimizer::CostTerm,
    h: f64,
) -> nalgebra::DMatrix<f64> {
    let m = problem.block_size();
    let rows = problem.dense_term(traj, term).unwrap().0.len();
    let mut out = nalgebra::DMatrix::zeros(rows, traj.len() * m);
    for t in 0..traj.len() {
        for i in 0..m {
            let eval = |s: f64| {
                let mut step = vec![nalgebra::DVector::zeros(m); traj.len()];
                step[t][i] = s;
                problem.dense_term(&traj.retract(&step), term).unwrap().0
            };
            out.set_column(t * m + i, &((eval(h) - eval(-h)) / (2.0 * h)));
        }
    }
    out
}

/// Small random rotation-and-translation offset, rotation angle below `angle`.
pub fn nudge<R: Rng>(pose: &Pose, angle: f64, dist: f64, rng: &mut R) -> Pose {
    let axis = Vector3::new(
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
    );
    let w = axis.normalize() * rng.gen_range(0.0..angle);
    let dp = Vector3::new(
        rng.gen_range(-dist..dist),
        rng.gen_range(-dist..dist),
        rng.gen_range(-dist..dist),
    );
    Pose::new(
        balancekit::kinematics::so3_exp(&w) * pose.rotation,
        pose.translation + dp,
    )
}

/// A trajectory wandering around a random posture with joints pushed past
/// their limits now and then, plus link targets and support poses near it
/// so every cost term is active somewhere.
pub struct RandomFixture {
    pub traj: balancekit::optimizer::Trajectory,
    pub targets: Vec<(usize, Vec<Pose>)>,
    pub support: Vec<Pose>,
    pub rest: JointVector,
}

pub fn random_fixture<R: Rng>(model: &KinematicModel, frames: usize, links: &[usize], rng: &mut R) -> RandomFixture {
    let rest = random_q(model, rng);
    let (lo, hi) = (model.lower_limits(), model.upper_limits());
    let mut base = random_pose(rng);
    let mut traj = balancekit::optimizer::Trajectory {
        base_poses: Vec::new(),
        joint_vectors: Vec::new(),
        frame_dt: 0.02,
    };
    let mut targets: Vec<(usize, Vec<Pose>)> = links.iter().map(|&l| (l, Vec::new())).collect();
    let mut support = Vec::new();
    for _ in 0..frames {
        base = nudge(&base, 0.4, 0.05, rng);
        let q = JointVector::from_iterator(
            model.dof(),
            (0..model.dof()).map(|i| {
                let span = (hi[i] - lo[i]).min(2.0);
                rng.gen_range(lo[i].max(-3.0) - 0.15 * span..hi[i].min(3.0) + 0.15 * span)
            }),
        );
        let state = balancekit::kinematics::KinematicState::new(model, &base, &q).unwrap();
        for (link, poses) in targets.iter_mut() {
            poses.push(nudge(state.link_pose(*link), 1.2, 0.2, rng));
        }
        let com = state.center_of_mass(model);
        support.push(Pose::from_translation(
            com.x + rng.gen_range(-0.2..0.2),
            com.y + rng.gen_range(-0.15..0.15),
            0.0,
        ));
        traj.base_poses.push(base);
        traj.joint_vectors.push(q);
    }
    RandomFixture {
        traj,
        targets,
        support,
        rest,
    }
}

/// Base and joint coordinates shifted along tangent column `k`.
fn shifted(base: &Pose, q: &JointVector, k: usize, s: f64) -> (Pose, JointVector) {
    let mut b = *base;
    let mut qq = q.clone();
    if k < 3 {
        let mut w = Vector3::zeros();
        w[k] = s;
        b.rotation = so3_exp(&w) * b.rotation;
    } else if k < 6 {
        b.translation[k - 3] += s;
    } else {
        qq[k - 6] += s;
    }
    (b, qq)
}

/// Central-difference pose Jacobian, rows `[angular; linear]`.
pub fn fd_pose_jacobian(model: &KinematicModel, base: &Pose, q: &JointVector, link: &str, h: f64) -> DMatrix<f64> {
    let n = model.dof();
    let mut out = DMatrix::zeros(6, 6 + n);
    let fk = |s: f64, k: usize| {
        let (b, qq) = shifted(base, q, k, s);
        forward_kinematics(model, &b, &qq).unwrap()[link]
    };
    for k in 0..6 + n {
        let (p, m) = (fk(h, k), fk(-h, k));
        let rp = *p.rotation.to_rotation_matrix().matrix();
        let rm = *m.rotation.to_rotation_matrix().matrix();
        let dw = log_matrix(&(rp * rm.transpose())) / (2.0 * h);
        let dp = (p.translation - m.translation) / (2.0 * h);
        for i in 0..3 {
            out[(i, k)] = dw[i];
            out[(3 + i, k)] = dp[i];
        }
    }
    out
}

pub fn fd_com_jacobian(model: &KinematicModel, base: &Pose, q: &JointVector, h: f64) -> DMatrix<f64> {
    let n = model.dof();
    let mut out = DMatrix::zeros(3, 6 + n);
    let com = |s: f64, k: usize| {
        let (b, qq) = shifted(base, q, k, s);
        center_of_mass(model, &b, &qq).unwrap()
    };
    for k in 0..6 + n {
        let d = (com(h, k) - com(-h, k)) / (2.0 * h);
        out.fixed_view_mut::<3, 1>(0, k).copy_from(&d);
    }
    out
}
