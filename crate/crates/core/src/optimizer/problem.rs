use nalgebra::{DMatrix, DVector, Matrix3, RowDVector, Vector2};

use super::banded::BlockTridiagonal;
use super::residuals::{balance_distance_xy, limit_violation, tracking_block, SmoothHinge};
use super::{CostWeights, TrackingWeight, Trajectory};
use crate::error::{Error, Result};
use crate::kinematics::{
    project_xy, so3_left_jacobian_inv, so3_log, so3_right_jacobian_inv, JointVector, KinematicModel, KinematicState,
    Pose,
};
use crate::reference::{GenerationTask, ReferenceTrajectories};

/// A link whose world pose should follow `poses` (one per frame).
#[derive(Debug, Clone, PartialEq)]
pub struct LinkTarget {
    pub link: usize,
    pub poses: Vec<Pose>,
    pub weights: TrackingWeight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CostTerm {
    Tracking,
    Limits,
    Rest,
    Smoothness,
    Balance,
}

impl CostTerm {
    pub const ALL: [CostTerm; 5] = [
        CostTerm::Tracking,
        CostTerm::Limits,
        CostTerm::Rest,
        CostTerm::Smoothness,
        CostTerm::Balance,
    ];
}

/// Least-squares trajectory problem over `frames` frames.
///
/// Every cost is a sum of squared residuals scaled by `sqrt(λ)`, so
/// `cost = Σ r²` equals the weighted stage objective. The balance penalty
/// `λ_bal · h(d_t − ε)` uses the residual `sqrt(λ_bal · h)` with `h` a
/// smoothed hinge.
#[derive(Debug, Clone)]
pub struct TrajectoryProblem<'a> {
    pub model: &'a KinematicModel,
    pub frames: usize,
    pub targets: Vec<LinkTarget>,
    pub rest: Option<JointVector>,
    /// Support-foot reference per frame; enables the balance term.
    pub support: Option<Vec<Pose>>,
    pub weights: CostWeights,
    pub hinge: SmoothHinge,
    pub fix_base: bool,
}

/// Gauss–Newton model of the cost at a trajectory.
pub(crate) struct Linearization {
    pub cost: f64,
    pub hessian: BlockTridiagonal,
    pub gradient: Vec<DVector<f64>>,
}

impl<'a> TrajectoryProblem<'a> {
    pub fn new(model: &'a KinematicModel, frames: usize, weights: CostWeights) -> Self {
        Self {
            model,
            frames,
            targets: Vec::new(),
            rest: None,
            support: None,
            weights,
            hinge: SmoothHinge { softness: 1e-4 },
            fix_base: false,
        }
    }

    pub fn with_target(mut self, link: usize, poses: Vec<Pose>, weights: TrackingWeight) -> Self {
        self.targets.push(LinkTarget { link, poses, weights });
        self
    }

    pub fn with_rest(mut self, q: JointVector) -> Self {
        self.rest = Some(q);
        self
    }

    pub fn with_support(mut self, poses: Vec<Pose>) -> Self {
        self.support = Some(poses);
        self
    }

    pub fn with_fixed_base(mut self, fix: bool) -> Self {
        self.fix_base = fix;
        self
    }

    pub fn with_softness(mut self, softness: f64) -> Self {
        self.hinge = SmoothHinge { softness };
        self
    }

    /// The three key-link targets (support foot, swing foot, pelvis), the
    /// initial posture as rest pose and the support reference for balance.
    pub fn from_references(
        model: &'a KinematicModel,
        task: &GenerationTask,
        refs: &ReferenceTrajectories,
        weights: CostWeights,
    ) -> Result<Self> {
        let support = task.support_link(model)?;
        let swing = task.swing_link(model)?;
        let w = weights.tracking.clone();
        Ok(Self::new(model, refs.len(), weights)
            .with_target(support, refs.support.clone(), w.support)
            .with_target(swing, refs.swing.clone(), w.swing)
            .with_target(model.base_link, refs.pelvis.clone(), w.pelvis)
            .with_rest(task.initial_joints.clone())
            .with_support(refs.support.clone()))
    }

    pub fn block_size(&self) -> usize {
        6 + self.model.dof()
    }

    pub fn validate(&self, traj: &Trajectory) -> Result<()> {
        traj.validate(self.model)?;
        if traj.len() != self.frames {
            return Err(Error::dims(self.frames, traj.len()));
        }
        for t in &self.targets {
            if t.poses.len() != self.frames {
                return Err(Error::dims(self.frames, t.poses.len()));
            }
            if t.link >= self.model.links.len() {
                return Err(Error::InvalidArgument(format!("target link index {}", t.link)));
            }
        }
        if let Some(s) = &self.support {
            if s.len() != self.frames {
                return Err(Error::dims(self.frames, s.len()));
            }
        }
        if let Some(q) = &self.rest {
            self.model.check_dims(q)?;
        }
        Ok(())
    }

    fn support_center(&self, t: usize) -> Option<Vector2<f64>> {
        self.support.as_ref().map(|s| project_xy(&s[t].translation))
    }

    /// Per-frame `d_t` of `traj` (empty when no support is set).
    pub fn balance_distances(&self, traj: &Trajectory) -> Result<Vec<f64>> {
        match &self.support {
            Some(s) => super::residuals::balance_distance(self.model, traj, s, self.weights.support_rect),
            None => Ok(Vec::new()),
        }
    }

    /// Weighted objective value; the balance term is included on request.
    pub fn cost(&self, traj: &Trajectory, include_balance: bool) -> Result<f64> {
        self.validate(traj)?;
        self.evaluate(traj, include_balance, None)
    }

    pub(crate) fn linearize(&self, traj: &Trajectory, include_balance: bool) -> Result<Linearization> {
        let m = self.block_size();
        let mut hessian = BlockTridiagonal::zeros(traj.len(), m);
        let mut gradient = vec![DVector::zeros(m); traj.len()];
        let cost = self.evaluate(traj, include_balance, Some((&mut hessian, &mut gradient)))?;
        if self.fix_base {
            for t in 0..traj.len() {
                for k in 0..6 {
                    hessian.diag[t].row_mut(k).fill(0.0);
                    hessian.diag[t].column_mut(k).fill(0.0);
                    hessian.diag[t][(k, k)] = 1.0;
                    gradient[t][k] = 0.0;
                    if t + 1 < traj.len() {
                        hessian.upper[t].row_mut(k).fill(0.0);
                        hessian.upper[t].column_mut(k).fill(0.0);
                    }
                }
            }
        }
        Ok(Linearization {
            cost,
            hessian,
            gradient,
        })
    }

    fn evaluate(
        &self,
        traj: &Trajectory,
        include_balance: bool,
        mut normal: Option<(&mut BlockTridiagonal, &mut Vec<DVector<f64>>)>,
    ) -> Result<f64> {
        let model = self.model;
        let w = &self.weights;
        let n = model.dof();
        let lower = model.lower_limits();
        let upper = model.upper_limits();
        let s_track = w.lambda_track.sqrt();
        let s_bal = w.lambda_bal.sqrt();
        let want_jac = normal.is_some();
        let mut cost = 0.0;

        for t in 0..traj.len() {
            let q = &traj.joint_vectors[t];
            let state = KinematicState::new(model, &traj.base_poses[t], q)?;

            if w.lambda_track > 0.0 {
                for target in &self.targets {
                    let (mut r, jac) =
                        tracking_block(&state, model, target.link, &target.poses[t], &target.weights, want_jac);
                    r *= s_track;
                    cost += r.norm_squared();
                    if let (Some((h, g)), Some(mut jac)) = (normal.as_mut(), jac) {
                        jac *= s_track;
                        h.diag[t].gemm_tr(1.0, &jac, &jac, 1.0);
                        g[t].gemv_tr(1.0, &jac, &r, 1.0);
                    }
                }
            }

            for i in 0..n {
                let mut diag = 0.0;
                let mut grad = 0.0;
                let v = limit_violation(q[i], lower[i], upper[i]);
                if v != 0.0 {
                    cost += w.lambda_lim * v * v;
                    diag += w.lambda_lim;
                    grad += w.lambda_lim * v;
                }
                if let Some(rest) = &self.rest {
                    let e = q[i] - rest[i];
                    cost += w.lambda_rest * e * e;
                    diag += w.lambda_rest;
                    grad += w.lambda_rest * e;
                }
                if let Some((h, g)) = normal.as_mut() {
                    h.diag[t][(6 + i, 6 + i)] += diag;
                    g[t][6 + i] += grad;
                }
            }

            if include_balance && w.lambda_bal > 0.0 {
                if let Some(c) = self.support_center(t) {
                    let com = state.center_of_mass(model);
                    let (d, grad_p) = balance_distance_xy(&project_xy(&com), &c, w.support_rect);
                    let (r0, dr0) = self.hinge.sqrt_with_derivative(d - w.epsilon);
                    let r = s_bal * r0;
                    cost += r * r;
                    if let Some((h, g)) = normal.as_mut() {
                        if dr0 != 0.0 && d > 0.0 {
                            let jc = state.com_jacobian(model);
                            let row: RowDVector<f64> = (jc.row(0) * grad_p.x + jc.row(1) * grad_p.y) * (s_bal * dr0);
                            h.diag[t].ger(1.0, &row.transpose(), &row.transpose(), 1.0);
                            g[t].axpy(r, &row.transpose(), 1.0);
                        }
                    }
                }
            }
        }

        if w.lambda_smooth > 0.0 {
            let ls = w.lambda_smooth;
            for t in 0..traj.len().saturating_sub(1) {
                let (a, b) = (&traj.base_poses[t], &traj.base_poses[t + 1]);
                let phi = so3_log(&(b.rotation * a.rotation.inverse()));
                let dp = b.translation - a.translation;
                let dq = &traj.joint_vectors[t + 1] - &traj.joint_vectors[t];
                cost += ls * (phi.norm_squared() + dp.norm_squared() + dq.norm_squared());
                if let Some((h, g)) = normal.as_mut() {
                    let ja: Matrix3<f64> = -so3_right_jacobian_inv(&phi);
                    let jb: Matrix3<f64> = so3_left_jacobian_inv(&phi);
                    let mut blk = h.diag[t].fixed_view_mut::<3, 3>(0, 0);
                    blk += ja.transpose() * ja * ls;
                    let mut blk = h.diag[t + 1].fixed_view_mut::<3, 3>(0, 0);
                    blk += jb.transpose() * jb * ls;
                    let mut blk = h.upper[t].fixed_view_mut::<3, 3>(0, 0);
                    blk += ja.transpose() * jb * ls;
                    let mut gr = g[t].fixed_rows_mut::<3>(0);
                    gr += ja.transpose() * phi * ls;
                    let mut gr = g[t + 1].fixed_rows_mut::<3>(0);
                    gr += jb.transpose() * phi * ls;
                    for k in 0..3 + n {
                        let e = if k < 3 { dp[k] } else { dq[k - 3] };
                        let i = 3 + k;
                        h.diag[t][(i, i)] += ls;
                        h.diag[t + 1][(i, i)] += ls;
                        h.upper[t][(i, i)] -= ls;
                        g[t][i] -= ls * e;
                        g[t + 1][i] += ls * e;
                    }
                }
            }
        }

        if !cost.is_finite() {
            return Err(Error::Divergence(format!("non-finite cost {cost}")));
        }
        Ok(cost)
    }

    /// Scaled residual vector of one term and its dense Jacobian with
    /// respect to the stacked per-frame tangent coordinates. Intended for
    /// verification; the solver works on the block-tridiagonal normal
    /// equations directly.
    pub fn dense_term(&self, traj: &Trajectory, term: CostTerm) -> Result<(DVector<f64>, DMatrix<f64>)> {
        self.validate(traj)?;
        let model = self.model;
        let w = &self.weights;
        let m = self.block_size();
        let n = model.dof();
        let cols = traj.len() * m;
        let mut values: Vec<f64> = Vec::new();
        let mut rows: Vec<(usize, RowDVector<f64>, Option<(usize, RowDVector<f64>)>)> = Vec::new();
        let mut push = |v: f64, t: usize, row: RowDVector<f64>, other: Option<(usize, RowDVector<f64>)>| {
            values.push(v);
            rows.push((t, row, other));
        };
        let unit = |i: usize, s: f64| {
            let mut r = RowDVector::zeros(m);
            r[i] = s;
            r
        };

        match term {
            CostTerm::Tracking => {
                let s = w.lambda_track.sqrt();
                for t in 0..traj.len() {
                    let state = KinematicState::new(model, &traj.base_poses[t], &traj.joint_vectors[t])?;
                    for target in &self.targets {
                        let (r, jac) =
                            tracking_block(&state, model, target.link, &target.poses[t], &target.weights, true);
                        let jac = jac.expect("requested jacobian");
                        for k in 0..6 {
                            push(s * r[k], t, jac.row(k).into_owned() * s, None);
                        }
                    }
                }
            }
            CostTerm::Limits => {
                let s = w.lambda_lim.sqrt();
                let (lo, hi) = (model.lower_limits(), model.upper_limits());
                for t in 0..traj.len() {
                    for i in 0..n {
                        let v = limit_violation(traj.joint_vectors[t][i], lo[i], hi[i]);
                        push(s * v, t, unit(6 + i, if v != 0.0 { s } else { 0.0 }), None);
                    }
                }
            }
            CostTerm::Rest => {
                let s = w.lambda_rest.sqrt();
                if let Some(rest) = &self.rest {
                    for t in 0..traj.len() {
                        for i in 0..n {
                            push(s * (traj.joint_vectors[t][i] - rest[i]), t, unit(6 + i, s), None);
                        }
                    }
                }
            }
            CostTerm::Smoothness => {
                let s = w.lambda_smooth.sqrt();
                for t in 0..traj.len().saturating_sub(1) {
                    let (a, b) = (&traj.base_poses[t], &traj.base_poses[t + 1]);
                    let phi = so3_log(&(b.rotation * a.rotation.inverse()));
                    let ja = -so3_right_jacobian_inv(&phi);
                    let jb = so3_left_jacobian_inv(&phi);
                    for k in 0..3 {
                        let mut ra = RowDVector::zeros(m);
                        let mut rb = RowDVector::zeros(m);
                        for c in 0..3 {
                            ra[c] = s * ja[(k, c)];
                            rb[c] = s * jb[(k, c)];
                        }
                        push(s * phi[k], t, ra, Some((t + 1, rb)));
                    }
                    for k in 0..3 + n {
                        let i = 3 + k;
                        let e = if k < 3 {
                            b.translation[k] - a.translation[k]
                        } else {
                            traj.joint_vectors[t + 1][k - 3] - traj.joint_vectors[t][k - 3]
                        };
                        push(s * e, t, unit(i, -s), Some((t + 1, unit(i, s))));
                    }
                }
            }
            CostTerm::Balance => {
                let s = w.lambda_bal.sqrt();
                for t in 0..traj.len() {
                    let Some(c) = self.support_center(t) else { break };
                    let state = KinematicState::new(model, &traj.base_poses[t], &traj.joint_vectors[t])?;
                    let com = state.center_of_mass(model);
                    let (d, grad_p) = balance_distance_xy(&project_xy(&com), &c, w.support_rect);
                    let (r0, dr0) = self.hinge.sqrt_with_derivative(d - w.epsilon);
                    let jc = state.com_jacobian(model);
                    let row = if d > 0.0 {
                        (jc.row(0) * grad_p.x + jc.row(1) * grad_p.y) * (s * dr0)
                    } else {
                        RowDVector::zeros(m)
                    };
                    push(s * r0, t, row, None);
                }
            }
        }

        let mut jac = DMatrix::zeros(values.len(), cols);
        for (k, (t, row, other)) in rows.into_iter().enumerate() {
            jac.view_mut((k, t * m), (1, m)).copy_from(&row);
            if let Some((t2, row2)) = other {
                jac.view_mut((k, t2 * m), (1, m)).copy_from(&row2);
            }
        }
        if self.fix_base {
            for t in 0..traj.len() {
                jac.columns_mut(t * m, 6).fill(0.0);
            }
        }
        Ok((DVector::from_vec(values), jac))
    }
}
