use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{DesignVector, DimKind, OptimizerConfig, Run};
use crate::design::RocketDesign;

/// Chance that a given dimension moves in one proposal.
const MOVE_PROBABILITY: f64 = 0.25;

/// Starts from the example design. Temperature falls linearly to zero over
/// the budget; at zero only improvements are accepted.
/// Returns the incumbent's reward after each evaluation.
pub(super) fn run(run: &mut Run<'_>, config: &OptimizerConfig) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let start = RocketDesign::example();
    let mut current = run.space.repair(&run.space.encode(&start));
    let first = run.space.decode(&current);
    let eval = run.evaluate_batch(std::slice::from_ref(&first)).remove(0);
    let mut current_total = eval.reward.total;
    run.record(&first, eval, None);
    let mut incumbent = vec![current_total];

    for k in 1..config.budget {
        let temperature = config.temperature * (1.0 - k as f64 / config.budget as f64);
        let proposal = neighbour(run, &current, config.step_scale, &mut rng);
        let design = run.space.decode(&proposal);
        let eval = run.evaluate_batch(std::slice::from_ref(&design)).remove(0);
        let total = eval.reward.total;
        // Draw every step so the random stream does not depend on outcomes.
        let u: f64 = rng.random();
        if accepts(total, current_total, temperature, u) {
            current = proposal;
            current_total = total;
        }
        incumbent.push(current_total);
        run.record(&design, eval, None);
    }
    incumbent
}

/// Metropolis rule on rewards (higher is better).
pub(super) fn accepts(candidate: f64, current: f64, temperature: f64, u: f64) -> bool {
    candidate >= current || (temperature > 0.0 && u < ((candidate - current) / temperature).exp())
}

fn neighbour(run: &Run<'_>, x: &DesignVector, step: f64, rng: &mut ChaCha8Rng) -> DesignVector {
    let dims = run.space.dims();
    let forced = rng.random_range(0..dims.len());
    let mut y = x.0.clone();
    for (i, d) in dims.iter().enumerate() {
        if i != forced && !rng.random_bool(MOVE_PROBABILITY) {
            continue;
        }
        match d.kind {
            DimKind::Continuous { .. } => {
                let z: f64 = rng.sample(StandardNormal);
                y[i] += z * step * d.width();
            }
            DimKind::Categorical { n } => y[i] = rng.random_range(0..n) as f64,
        }
    }
    run.space.repair(&DesignVector(y))
}
