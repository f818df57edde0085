//! Forward kinematics, center of mass and Jacobians of the bundled humanoid.

use balancekit::kinematics::{
    center_of_mass, com_jacobian, forward_kinematics, load_model, pose_jacobian, JointVector, Pose,
};

fn main() -> balancekit::Result<()> {
    let text = std::fs::read_to_string(balancekit::asset_path("humanoid23.json")).expect("bundled model");
    let model = load_model(&text)?;
    println!(
        "{}: {} links, {} actuated joints, {:.1} kg",
        model.name,
        model.links.len(),
        model.dof(),
        model.total_mass()
    );

    let base = Pose::from_rpy_xyz([0.0, 0.0, 0.3], [0.0, 0.0, 0.75]);
    let mut q = JointVector::zeros(model.dof());
    let knee = model.actuated_index("left_knee_joint").expect("knee joint");
    q[knee] = 0.6;

    let poses = forward_kinematics(&model, &base, &q)?;
    for foot in model.foot_names() {
        let p = poses[foot].translation;
        println!("{foot:>10}: ({:+.4}, {:+.4}, {:+.4})", p.x, p.y, p.z);
    }
    let com = center_of_mass(&model, &base, &q)?;
    println!("       CoM: ({:+.4}, {:+.4}, {:+.4})", com.x, com.y, com.z);

    let j = pose_jacobian(&model, &base, &q, "left_foot")?;
    let jc = com_jacobian(&model, &base, &q)?;
    println!(
        "foot Jacobian {}x{}, knee column linear part {:.4?}",
        j.nrows(),
        j.ncols(),
        j.fixed_view::<3, 1>(3, 6 + knee).as_slice()
    );
    println!("CoM Jacobian {}x{}", jc.nrows(), jc.ncols());
    Ok(())
}
