//! Two-stage optimization of one task: kinematic tracking, then balance.

use balancekit::kinematics::load_model;
use balancekit::optimizer::{generate_motion, CostWeights, GenerationOutcome, SolverConfig};
use balancekit::reference::{sample_generation_task, SamplingConfig};

fn main() -> balancekit::Result<()> {
    let model =
        load_model(&std::fs::read_to_string(balancekit::asset_path("humanoid23.json")).expect("bundled model"))?;
    let weights = CostWeights::default();
    for seed in 0..3 {
        let task = sample_generation_task(seed, &SamplingConfig::default(), &model)?;
        match generate_motion(&task, &model, &weights, &SolverConfig::default())? {
            GenerationOutcome::Accepted {
                stage1,
                stage2,
                balance_distances,
                ..
            } => {
                let worst = balance_distances.iter().copied().fold(0.0, f64::max);
                println!(
                    "seed {seed}: accepted, stage 1 {} it cost {:.3e}, stage 2 {} it cost {:.3e}, max d {worst:.4} m (eps {})",
                    stage1.iterations, stage1.final_cost, stage2.iterations, stage2.final_cost, weights.epsilon
                );
            }
            GenerationOutcome::Rejected(r) => {
                println!(
                    "seed {seed}: rejected at {:?}, violation {:.4} m",
                    r.stage, r.balance_violation
                );
            }
        }
    }
    Ok(())
}
