//! One round of error-driven sampling updates over a small motion library.

use balancekit::curriculum::{EvalResult, SamplerConfig, SamplerState};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> balancekit::Result<()> {
    let mut sampler = SamplerState::new(6, SamplerConfig::default())?;
    // motion 4 failed; the others succeeded with these tracking errors
    let eval = EvalResult {
        failed: [4].into(),
        mean_error: vec![20.0, 35.0, 60.0, 90.0, 0.0, 140.0],
        max_error: vec![40.0, 70.0, 110.0, 180.0, 0.0, 260.0],
    };
    println!("multipliers {:.3?}", sampler.multipliers(&eval)?);
    sampler.update(&eval)?;
    println!("p after one update {:.4?}", sampler.probabilities);

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut counts = [0; 6];
    for _ in 0..10_000 {
        counts[sampler.sample(&mut rng)] += 1;
    }
    println!("10k draws {counts:?}");
    Ok(())
}
