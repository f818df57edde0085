//! Tracking metrics of a perturbed motion against its reference.

use balancekit::kinematics::{load_model, JointVector, Pose};
use balancekit::rewards::{
    metric_gmpjpe, metric_mpjpe, metric_success, KeypointTrack, RewardConfig, SUCCESS_THRESHOLD,
};

fn main() -> balancekit::Result<()> {
    let model =
        load_model(&std::fs::read_to_string(balancekit::asset_path("humanoid23.json")).expect("bundled model"))?;
    let keys = RewardConfig::default().keypoint_links(&model)?;
    let frames = 50;
    let bases: Vec<Pose> = (0..frames)
        .map(|t| Pose::from_translation(0.01 * t as f64, 0.0, 0.74))
        .collect();
    let joints = vec![JointVector::zeros(model.dof()); frames];
    let reference = KeypointTrack::from_motion(&model, &bases, &joints, &keys)?;

    let drifted: Vec<Pose> = bases
        .iter()
        .map(|b| Pose::from_translation(b.translation.x + 0.02, 0.0, 0.74))
        .collect();
    let bent: Vec<JointVector> = (0..frames)
        .map(|t| JointVector::from_element(model.dof(), 0.002 * t as f64))
        .collect();
    for (name, b, q) in [("drifted base", &drifted, &joints), ("bent joints", &bases, &bent)] {
        let track = KeypointTrack::from_motion(&model, b, q, &keys)?;
        println!(
            "{name:>12}: g-MPJPE {:7.3} mm, MPJPE {:7.3} mm, success {}",
            metric_gmpjpe(&track, &reference)?,
            metric_mpjpe(&track, &reference)?,
            metric_success(&track, &reference, SUCCESS_THRESHOLD)?
        );
    }
    Ok(())
}
