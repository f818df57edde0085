//! Sample a single-support task and build its interpolated key-link references.

use balancekit::kinematics::load_model;
use balancekit::reference::{build_reference, sample_generation_task, SamplingConfig};

fn main() -> balancekit::Result<()> {
    let model =
        load_model(&std::fs::read_to_string(balancekit::asset_path("humanoid23.json")).expect("bundled model"))?;
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let task = sample_generation_task(seed, &SamplingConfig::default(), &model)?;
    println!(
        "seed {seed}: stand on {}, {} frames at {} s, pelvis to {:.3} m",
        task.support_foot, task.horizon, task.frame_dt, task.target_pelvis_height
    );
    let refs = build_reference(&task, &model)?;
    for t in (0..refs.len()).step_by(refs.len() / 5).chain([refs.len() - 1]) {
        let (s, p) = (refs.swing[t].translation, refs.pelvis[t].translation);
        println!(
            "t={t:3} swing ({:+.3}, {:+.3}, {:+.3}) pelvis z {:.3}",
            s.x, s.y, s.z, p.z
        );
    }
    Ok(())
}
