//! Tracking reward with the balance prior gated on motion source.

use balancekit::kinematics::{load_model, JointVector, Pose};
use balancekit::rewards::{hybrid_reward, FrameState, MotionSource, RewardConfig};
use nalgebra::Vector3;

fn main() -> balancekit::Result<()> {
    let model =
        load_model(&std::fs::read_to_string(balancekit::asset_path("humanoid23.json")).expect("bundled model"))?;
    let cfg = RewardConfig::default();
    let n = model.dof();
    let frame = |q: JointVector, contacts: Vec<bool>| {
        let base = Pose::from_rpy_xyz([0.0; 3], [0.0, 0.0, 0.74]);
        FrameState::from_kinematics(
            &model,
            base,
            q,
            JointVector::zeros(n),
            contacts,
            vec![Vector3::zeros(); 2],
        )
    };
    let reference = frame(JointVector::zeros(n), vec![true, true])?;
    let mut q = JointVector::zeros(n);
    q[model.actuated_index("left_hip_pitch_joint").expect("hip joint")] = -0.3;
    let state = frame(q, vec![true, false])?;

    for source in [MotionSource::Mocap, MotionSource::Synthetic] {
        let r = hybrid_reward(&state, &reference, source, &model, Some("right_foot"), &cfg)?;
        println!("{}: total {:.4}", source.as_str(), r.total);
        for (name, value) in &r.terms {
            println!("  {name:>16} {value:.4}");
        }
    }
    Ok(())
}
