//! Adaptive sampling and reward shaping against a synthetic learner.

use balancekit::curriculum::{simulate_curriculum, CurriculumConfig, LibrarySpec, MotionSpec, SimulationConfig};

fn main() -> balancekit::Result<()> {
    let mut library = LibrarySpec::symmetric(20, 1.0);
    library.motions[3] = MotionSpec {
        difficulty: 2.5,
        always_fails: false,
    };
    library.motions[7].always_fails = true;
    let config = CurriculumConfig {
        library,
        simulation: SimulationConfig {
            rounds: 40,
            ..SimulationConfig::default()
        },
        ..CurriculumConfig::default()
    };
    let trace = simulate_curriculum(&config)?;
    for r in [0, 1, 10, 40] {
        let p = trace.probabilities(r);
        println!("round {r:2}: easy {:.4} hard {:.4} failing {:.4}", p[0], p[3], p[7]);
    }
    let sigma = trace.sigma_series(3, "left_leg");
    println!(
        "hard motion left_leg sigma {:.4} -> {:.4}",
        sigma[0],
        sigma[sigma.len() - 1]
    );
    Ok(())
}
