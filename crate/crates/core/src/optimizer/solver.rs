use nalgebra::DVector;

use super::problem::TrajectoryProblem;
use super::residuals::SmoothHinge;
use super::{SolveReport, SolverConfig, Trajectory};
use crate::error::{Error, Result};

/// Damping floor added to each diagonal entry before Marquardt scaling, so
/// variables with zero curvature still receive a bounded step.
const DIAGONAL_FLOOR: f64 = 1e-9;

/// Levenberg–Marquardt over a [`TrajectoryProblem`].
#[derive(Debug, Clone)]
pub struct LevenbergMarquardt<'c> {
    config: &'c SolverConfig,
}

impl<'c> LevenbergMarquardt<'c> {
    pub fn new(config: &'c SolverConfig) -> Self {
        Self { config }
    }

    pub fn minimize(
        &self,
        problem: &TrajectoryProblem<'_>,
        init: &Trajectory,
        include_balance: bool,
    ) -> Result<(Trajectory, SolveReport)> {
        let cfg = self.config;
        cfg.validate()?;
        problem.validate(init)?;

        let mut x = init.clone();
        let mut lin = problem.linearize(&x, include_balance)?;
        let mut cost = lin.cost;
        let initial_cost = cost;
        let mut history = vec![cost];
        let mut damping = cfg.initial_damping;
        let mut iterations = 0;
        let mut converged = cost <= cfg.absolute_cost_tolerance;

        while !converged && iterations < cfg.max_iterations {
            let grad_norm = lin.gradient.iter().map(|g| g.amax()).fold(0.0, f64::max);
            if !grad_norm.is_finite() {
                return Err(Error::Divergence("non-finite gradient".into()));
            }
            if grad_norm <= cfg.gradient_tolerance {
                converged = true;
                break;
            }
            iterations += 1;

            let mut damped = lin.hessian.clone();
            for block in &mut damped.diag {
                for i in 0..block.nrows() {
                    block[(i, i)] += damping * (block[(i, i)] + DIAGONAL_FLOOR);
                }
            }
            let rhs: Vec<DVector<f64>> = lin.gradient.iter().map(|g| -g).collect();
            let trial_cost = damped
                .solve(&rhs)
                .map(|step| {
                    let trial = x.retract(&step);
                    match problem.cost(&trial, include_balance) {
                        Ok(c) => Ok(Some((trial, c))),
                        Err(Error::Divergence(_)) => Ok(None),
                        Err(e) => Err(e),
                    }
                })
                .transpose()?
                .flatten();

            match trial_cost {
                Some((trial, new_cost)) if new_cost < cost => {
                    let relative = (cost - new_cost) / cost;
                    x = trial;
                    cost = new_cost;
                    history.push(cost);
                    damping = (damping / cfg.damping_decrease).max(1e-15);
                    if relative < cfg.relative_cost_tolerance || cost <= cfg.absolute_cost_tolerance {
                        converged = true;
                        break;
                    }
                    lin = problem.linearize(&x, include_balance)?;
                }
                _ => {
                    damping *= cfg.damping_increase;
                    if damping > cfg.max_damping {
                        // no descent direction left at machine precision
                        converged = true;
                        break;
                    }
                }
            }
        }

        let distances = problem.balance_distances(&x)?;
        let max_violation = distances.iter().copied().fold(0.0, f64::max);
        let report = SolveReport {
            iterations,
            initial_cost,
            final_cost: cost,
            converged,
            max_balance_violation: max_violation,
            accepted: max_violation <= problem.weights.epsilon,
            cost_history: history,
        };
        Ok((x, report))
    }
}

fn configured<'a>(problem: &TrajectoryProblem<'a>, config: &SolverConfig) -> TrajectoryProblem<'a> {
    let mut p = problem.clone();
    p.fix_base |= config.fix_base;
    p.hinge = SmoothHinge {
        softness: config.balance_softness,
    };
    p
}

/// Minimizes the kinematic objective (tracking, limits, rest, smoothness).
pub fn solve_stage1(
    init: &Trajectory,
    problem: &TrajectoryProblem<'_>,
    config: &SolverConfig,
) -> Result<(Trajectory, SolveReport)> {
    problem.weights.validate()?;
    LevenbergMarquardt::new(config).minimize(&configured(problem, config), init, false)
}

/// Minimizes the kinematic objective plus the balance penalty, starting
/// from `stage1` (normally the stage-1 solution).
pub fn solve_stage2(
    stage1: &Trajectory,
    problem: &TrajectoryProblem<'_>,
    config: &SolverConfig,
) -> Result<(Trajectory, SolveReport)> {
    problem.weights.validate()?;
    if problem.support.is_none() {
        return Err(Error::InvalidArgument("stage 2 requires a support reference".into()));
    }
    LevenbergMarquardt::new(config).minimize(&configured(problem, config), stage1, true)
}
