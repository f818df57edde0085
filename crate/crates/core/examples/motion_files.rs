//! Write generated motions to disk, read one back and index the directory.

use balancekit::kinematics::load_model;
use balancekit::motion_io::{build_index, read_motion, write_motion, MotionFile};
use balancekit::optimizer::{generate_motion, CostWeights, GenerationOutcome, SolverConfig};
use balancekit::reference::{sample_generation_task, SamplingConfig};
use balancekit::rewards::MotionSource;

fn main() -> balancekit::Result<()> {
    let model =
        load_model(&std::fs::read_to_string(balancekit::asset_path("humanoid23.json")).expect("bundled model"))?;
    let dir = std::env::temp_dir().join("balancekit-motion-files");
    std::fs::create_dir_all(&dir).expect("temp dir");
    for seed in 0..2 {
        let task = sample_generation_task(seed, &SamplingConfig::default(), &model)?;
        if let GenerationOutcome::Accepted { trajectory, .. } =
            generate_motion(&task, &model, &CostWeights::default(), &SolverConfig::default())?
        {
            let id = format!("example_{seed}");
            let motion = MotionFile::from_trajectory(
                &id,
                &model,
                &trajectory,
                MotionSource::Synthetic,
                Some(&task.support_foot),
            );
            write_motion(&motion, &dir.join(format!("{id}.bkm")))?;
        }
    }
    let back = read_motion(&dir.join("example_0.bkm"))?;
    println!(
        "example_0: {} frames, {} joints, {:.2} s",
        back.frames.len(),
        back.header.joints.len(),
        back.duration()
    );
    let index = build_index(&dir)?;
    for e in &index.entries {
        println!(
            "{} {} {} frames {}",
            e.id,
            e.source.as_str(),
            e.frames,
            e.path.display()
        );
    }
    Ok(())
}
