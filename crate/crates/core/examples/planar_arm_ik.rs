//! The trajectory solver as a plain IK solver on a two-link planar arm.

use balancekit::kinematics::{forward_kinematics, load_model, JointVector, Pose};
use balancekit::optimizer::{solve_stage1, CostWeights, SolverConfig, Trajectory, TrajectoryProblem};
use nalgebra::{UnitQuaternion, Vector3};

fn main() -> balancekit::Result<()> {
    let model =
        load_model(&std::fs::read_to_string(balancekit::asset_path("planar_arm.json")).expect("bundled model"))?;
    let weights = CostWeights {
        lambda_lim: 0.0,
        lambda_rest: 0.0,
        lambda_smooth: 0.0,
        lambda_bal: 0.0,
        ..CostWeights::default()
    };
    let cfg = SolverConfig {
        fix_base: true,
        ..SolverConfig::default()
    };
    let tip = model.link_index("tip")?;
    for target in [
        Vector3::new(1.2, 0.5, 0.0),
        Vector3::new(-0.4, 0.9, 0.0),
        Vector3::new(2.5, 0.0, 0.0),
    ] {
        let problem = TrajectoryProblem::new(&model, 2, weights.clone()).with_target(
            tip,
            vec![Pose::new(UnitQuaternion::identity(), target); 2],
            [0.0, 0.0, 0.0, 1.0, 1.0, 1.0],
        );
        let init = Trajectory::constant(Pose::identity(), JointVector::from_vec(vec![0.3, 0.5]), 2, 0.02);
        let (traj, report) = solve_stage1(&init, &problem, &cfg)?;
        let q = &traj.joint_vectors[1];
        let reached = forward_kinematics(&model, &Pose::identity(), q)?["tip"].translation;
        println!(
            "target ({:+.2}, {:+.2}): q = ({:+.4}, {:+.4}) in {} iterations, miss {:.2e} m",
            target.x,
            target.y,
            q[0],
            q[1],
            report.iterations,
            (reached - target).norm()
        );
    }
    Ok(())
}
