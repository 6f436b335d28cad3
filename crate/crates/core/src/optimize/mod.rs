//! Derivative-free search baselines. Each run produces a [`Session`] in the
//! same transcript format agent runs use.

mod annealing;
mod cem;
mod space;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use space::{DesignSpace, DesignVector, Dim, DimKind, LENGTH_MARGIN, RADIUS_MARGIN, TAIL_RADIUS_GAP};

use crate::catalog::Catalog;
use crate::design::RocketDesign;
use crate::harness::{Session, SourceFormat, TaskSpec};
use crate::pipeline::{evaluate, Evaluation, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    RandomSearch,
    SimulatedAnnealing,
    CrossEntropy,
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" | "random_search" | "random-search" => Ok(Algorithm::RandomSearch),
            "sa" | "annealing" | "simulated_annealing" | "simulated-annealing" => Ok(Algorithm::SimulatedAnnealing),
            "cem" | "cross_entropy" | "cross-entropy" => Ok(Algorithm::CrossEntropy),
            _ => Err(format!("unknown algorithm `{s}` (random, sa, cem)")),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::RandomSearch => "random_search",
            Algorithm::SimulatedAnnealing => "simulated_annealing",
            Algorithm::CrossEntropy => "cross_entropy",
        })
    }
}

/// Which evaluations of a population method become session attempts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttemptLog {
    /// Every evaluation.
    All,
    /// The best individual of each generation.
    #[default]
    GenerationBest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    pub algorithm: Algorithm,
    /// Number of design evaluations.
    pub budget: usize,
    pub seed: u64,
    /// Cross-entropy population per generation.
    pub population: usize,
    /// Fraction of each generation kept as elites.
    pub elite_fraction: f64,
    /// Weight of the elite statistics in each distribution update.
    pub smoothing: f64,
    /// Initial standard deviation as a fraction of each dimension's width.
    pub initial_scale: f64,
    /// Annealing start temperature, in reward units. 0 is greedy.
    pub temperature: f64,
    /// Annealing step as a fraction of each dimension's width.
    pub step_scale: f64,
    pub log: AttemptLog,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            algorithm: Algorithm::CrossEntropy,
            budget: 3000,
            seed: 0,
            population: 32,
            elite_fraction: 0.2,
            smoothing: 0.7,
            initial_scale: 0.25,
            temperature: 0.05,
            step_scale: 0.1,
            log: AttemptLog::GenerationBest,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.budget < 1 {
            return Err("budget must be at least 1".into());
        }
        if self.population < 2 {
            return Err("population must be at least 2".into());
        }
        if !(self.elite_fraction > 0.0 && self.elite_fraction <= 1.0) {
            return Err("elite fraction must be in (0, 1]".into());
        }
        if !(self.smoothing > 0.0 && self.smoothing <= 1.0) {
            return Err("smoothing must be in (0, 1]".into());
        }
        if !(self.temperature >= 0.0) || !(self.step_scale > 0.0) || !(self.initial_scale > 0.0) {
            return Err("temperature must be non-negative and scales positive".into());
        }
        Ok(())
    }
}

/// Shared plumbing: the space, the scenario, and the session being written.
pub(crate) struct Run<'a> {
    pub space: DesignSpace,
    pub catalog: &'a Catalog,
    pub scenario: Scenario,
    pub session: Session,
    pub evaluations: usize,
}

impl Run<'_> {
    pub fn evaluate_batch(&mut self, designs: &[RocketDesign]) -> Vec<Evaluation> {
        self.evaluations += designs.len();
        let (catalog, scenario) = (self.catalog, &self.scenario);
        designs.par_iter().map(|d| evaluate(d, catalog, scenario)).collect()
    }

    pub fn record(&mut self, design: &RocketDesign, eval: Evaluation, generation: Option<u32>) {
        self.session
            .push(design.to_json(), SourceFormat::Json, eval, generation);
    }
}

pub fn optimize(task: &TaskSpec, config: &OptimizerConfig, catalog: &Catalog) -> Session {
    let mut task = task.clone();
    task.iteration_budget = config.budget.max(1) as u32;
    let agent_id = format!("{}-{}", config.algorithm, config.seed);
    let mut run = Run {
        space: DesignSpace::new(catalog),
        catalog,
        scenario: task.scenario(),
        session: Session::new(task, agent_id, Some(config.seed)),
        evaluations: 0,
    };
    let mut meta = serde_json::Map::new();
    match config.algorithm {
        Algorithm::RandomSearch => random_search(&mut run, config),
        Algorithm::SimulatedAnnealing => {
            let incumbent = annealing::run(&mut run, config);
            meta.insert("incumbent_reward".into(), serde_json::json!(incumbent));
        }
        Algorithm::CrossEntropy => {
            let means = cem::run(&mut run, config);
            meta.insert("generation_mean_reward".into(), serde_json::json!(means));
        }
    }
    let logged = match config.algorithm {
        Algorithm::CrossEntropy => config.log,
        _ => AttemptLog::All,
    };
    meta.insert("algorithm".into(), serde_json::json!(config.algorithm));
    meta.insert(
        "config".into(),
        serde_json::to_value(config).expect("config serializes"),
    );
    meta.insert("evaluations".into(), serde_json::json!(run.evaluations));
    meta.insert("attempt_log".into(), serde_json::json!(logged));
    run.session.metadata = meta.into_iter().collect();
    run.session.finish();
    run.session
}

/// Uniform samples over the design box, evaluated in parallel batches.
fn random_search(run: &mut Run<'_>, config: &OptimizerConfig) {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(config.seed);
    let mut left = config.budget;
    while left > 0 {
        let n = left.min(64);
        let designs: Vec<RocketDesign> = (0..n).map(|_| run.space.sample(&mut rng)).collect();
        let evals = run.evaluate_batch(&designs);
        for (d, e) in designs.iter().zip(evals) {
            run.record(d, e, None);
        }
        left -= n;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budget_one() {
        for algorithm in [
            Algorithm::RandomSearch,
            Algorithm::SimulatedAnnealing,
            Algorithm::CrossEntropy,
        ] {
            let cfg = OptimizerConfig {
                algorithm,
                budget: 1,
                log: AttemptLog::All,
                ..Default::default()
            };
            let s = optimize(&TaskSpec::default(), &cfg, Catalog::builtin());
            assert_eq!(s.attempts.len(), 1, "{algorithm}");
        }
    }

    #[test]
    fn seeded_runs_repeat() {
        let cfg = OptimizerConfig {
            algorithm: Algorithm::RandomSearch,
            budget: 20,
            seed: 9,
            ..Default::default()
        };
        let a = optimize(&TaskSpec::default(), &cfg, Catalog::builtin());
        let b = optimize(&TaskSpec::default(), &cfg, Catalog::builtin());
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn algorithm_names() {
        assert_eq!("cem".parse::<Algorithm>().unwrap(), Algorithm::CrossEntropy);
        assert_eq!("sa".parse::<Algorithm>().unwrap(), Algorithm::SimulatedAnnealing);
        assert!("bayes".parse::<Algorithm>().is_err());
    }
}
