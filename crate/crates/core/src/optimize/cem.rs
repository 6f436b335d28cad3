use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{AttemptLog, DesignVector, DimKind, OptimizerConfig, Run};
use crate::design::RocketDesign;

/// Lower bound on a continuous std, as a fraction of the dimension width.
const STD_FLOOR: f64 = 1e-3;
/// Every category keeps at least this share of 1/n.
const PROBABILITY_FLOOR: f64 = 0.02;
/// Initial mass on the template's category.
const TEMPLATE_WEIGHT: f64 = 0.5;

/// Per-dimension sampling distribution.
#[derive(Debug, Clone)]
enum Marginal {
    Normal { mean: f64, std: f64 },
    Categorical { p: Vec<f64> },
}

/// Cross-entropy method over a factored Gaussian/categorical distribution
/// centred on the example design. The best design seen so far is carried
/// into each elite set. Returns the mean reward of each generation.
pub(super) fn run(run: &mut Run<'_>, config: &OptimizerConfig) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let template = run.space.repair(&run.space.encode(&RocketDesign::example()));
    let dims = run.space.dims().to_vec();
    let mut dist: Vec<Marginal> = dims
        .iter()
        .zip(&template.0)
        .map(|(d, &x)| match d.kind {
            DimKind::Continuous { .. } => Marginal::Normal {
                mean: x,
                std: config.initial_scale * d.width(),
            },
            DimKind::Categorical { n } => {
                let rest = if n > 1 {
                    (1.0 - TEMPLATE_WEIGHT) / (n - 1) as f64
                } else {
                    0.0
                };
                let mut p = vec![rest; n];
                p[x as usize] = if n > 1 { TEMPLATE_WEIGHT } else { 1.0 };
                Marginal::Categorical { p }
            }
        })
        .collect();

    let mut best: Option<(DesignVector, f64)> = None;
    let mut means = Vec::new();
    let mut left = config.budget;
    let mut generation = 0u32;
    while left > 0 {
        let n = left.min(config.population);
        let mut raw = Vec::with_capacity(n + 1);
        if generation == 0 {
            raw.push(template.clone());
        }
        while raw.len() < n {
            let (a, b) = sample_pair(&dist, &mut rng);
            raw.push(a);
            raw.push(b);
        }
        raw.truncate(n);
        let xs: Vec<DesignVector> = raw.iter().map(|x| run.space.repair(x)).collect();
        let designs: Vec<RocketDesign> = xs.iter().map(|x| run.space.decode(x)).collect();
        let evals = run.evaluate_batch(&designs);
        let totals: Vec<f64> = evals.iter().map(|e| e.reward.total).collect();
        means.push(totals.iter().sum::<f64>() / n as f64);

        // Stable sort: ties keep sampling order.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| totals[b].total_cmp(&totals[a]));

        match config.log {
            AttemptLog::All => {
                for (d, e) in designs.iter().zip(evals) {
                    run.record(d, e, Some(generation));
                }
            }
            AttemptLog::GenerationBest => {
                let i = order[0];
                let e = evals.into_iter().nth(i).expect("index in range");
                run.record(&designs[i], e, Some(generation));
            }
        }

        let top = order[0];
        if best.as_ref().is_none_or(|(_, t)| totals[top] > *t) {
            best = Some((xs[top].clone(), totals[top]));
        }
        let n_elite = ((n as f64 * config.elite_fraction).ceil() as usize).clamp(1, n);
        let mut elites: Vec<DesignVector> = order[..n_elite].iter().map(|&i| xs[i].clone()).collect();
        if let Some((b, _)) = &best {
            if !elites.contains(b) {
                elites.push(b.clone());
            }
        }
        update(&mut dist, &dims, &elites, config.smoothing);

        left -= n;
        generation += 1;
    }
    means
}

/// An antithetic pair: Gaussian draws mirrored about the mean, categorical
/// draws from `u` and `1 - u`. Halves the noise in the generation mean.
fn sample_pair(dist: &[Marginal], rng: &mut ChaCha8Rng) -> (DesignVector, DesignVector) {
    let (a, b) = dist
        .iter()
        .map(|m| match m {
            Marginal::Normal { mean, std } => {
                let z: f64 = rng.sample(StandardNormal);
                (mean + std * z, mean - std * z)
            }
            Marginal::Categorical { p } => {
                let u: f64 = rng.random();
                (pick(p, u), pick(p, 1.0 - u))
            }
        })
        .unzip();
    (DesignVector(a), DesignVector(b))
}

fn pick(p: &[f64], u: f64) -> f64 {
    let mut acc = 0.0;
    for (k, pk) in p.iter().enumerate() {
        acc += pk;
        if u < acc {
            return k as f64;
        }
    }
    (p.len() - 1) as f64
}

fn update(dist: &mut [Marginal], dims: &[super::Dim], elites: &[DesignVector], smoothing: f64) {
    let m = elites.len() as f64;
    for (i, (marg, dim)) in dist.iter_mut().zip(dims).enumerate() {
        match marg {
            Marginal::Normal { mean, std } => {
                let mu = elites.iter().map(|x| x.0[i]).sum::<f64>() / m;
                let var = elites.iter().map(|x| (x.0[i] - mu).powi(2)).sum::<f64>() / m;
                *mean = smoothing * mu + (1.0 - smoothing) * *mean;
                *std = (smoothing * var.sqrt() + (1.0 - smoothing) * *std).max(STD_FLOOR * dim.width());
            }
            Marginal::Categorical { p } => {
                let n = p.len();
                let mut freq = vec![0.0; n];
                for x in elites {
                    freq[x.0[i] as usize] += 1.0 / m;
                }
                let floor = PROBABILITY_FLOOR / n as f64;
                for (pk, fk) in p.iter_mut().zip(freq) {
                    *pk = (smoothing * fk + (1.0 - smoothing) * *pk).max(floor);
                }
                let s: f64 = p.iter().sum();
                p.iter_mut().for_each(|pk| *pk /= s);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::Catalog;
    use crate::harness::TaskSpec;
    use crate::optimize::{optimize, AttemptLog, OptimizerConfig};

    #[test]
    fn partial_last_generation() {
        let cfg = OptimizerConfig {
            budget: 70,
            population: 32,
            seed: 1,
            ..Default::default()
        };
        let s = optimize(&TaskSpec::default(), &cfg, Catalog::builtin());
        assert_eq!(s.attempts.len(), 3);
        let gens: Vec<_> = s.attempts.iter().map(|a| a.generation).collect();
        assert_eq!(gens, vec![Some(0), Some(1), Some(2)]);
        assert_eq!(s.metadata["evaluations"], 70);
        let means: Vec<f64> = serde_json::from_value(s.metadata["generation_mean_reward"].clone()).unwrap();
        assert_eq!(means.len(), 3);
    }

    #[test]
    fn all_log_matches_means() {
        let cfg = OptimizerConfig {
            budget: 20,
            population: 8,
            seed: 4,
            log: AttemptLog::All,
            ..Default::default()
        };
        let s = optimize(&TaskSpec::default(), &cfg, Catalog::builtin());
        assert_eq!(s.attempts.len(), 20);
        let means: Vec<f64> = serde_json::from_value(s.metadata["generation_mean_reward"].clone()).unwrap();
        for (g, m) in means.iter().enumerate() {
            let t: Vec<f64> = s
                .attempts
                .iter()
                .filter(|a| a.generation == Some(g as u32))
                .map(|a| a.total())
                .collect();
            assert!((t.iter().sum::<f64>() / t.len() as f64 - m).abs() < 1e-12);
        }
    }

    #[test]
    fn pairs_mirror_about_the_mean() {
        let dist = vec![
            Marginal::Normal { mean: 2.0, std: 0.5 },
            Marginal::Categorical {
                p: vec![0.25, 0.5, 0.25],
            },
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let (a, b) = sample_pair(&dist, &mut rng);
            assert!((a.0[0] + b.0[0] - 4.0).abs() < 1e-12);
            // Outer categories swap; the middle one maps to itself.
            assert_eq!(a.0[1] + b.0[1], 2.0);
        }
    }
}
