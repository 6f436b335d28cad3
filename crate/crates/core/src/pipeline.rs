//! Design in, reward out: DRC → flight → structures and cost → score.

use std::sync::atomic::AtomicBool;

use serde::{Deserialize, Serialize};

use crate::catalog::Catalog;
use crate::design::{check_document, parse_agent_output, run_drc, DrcReport, RocketDesign};
use crate::scoring::{score, Challenge, RewardBreakdown};
use crate::sim::{simulate_with_cancel, Environment, FlightOutcome, SimFailure, SimSettings};
use crate::structures::{compute_cost, evaluate_structure, CostBreakdown, StressReport};

/// Everything learned about one design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub design: Option<RocketDesign>,
    pub drc: DrcReport,
    pub outcome: Option<FlightOutcome>,
    pub stress: Option<StressReport>,
    pub cost: Option<CostBreakdown>,
    pub reward: RewardBreakdown,
}

/// What the flight is scored against and how it is flown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub challenge: Challenge,
    pub environment: Environment,
    #[serde(default)]
    pub sim: SimSettings,
}

impl Scenario {
    pub fn new(challenge: Challenge, environment: Environment) -> Scenario {
        Scenario {
            challenge,
            environment,
            sim: SimSettings::default(),
        }
    }
}

pub fn evaluate(design: &RocketDesign, catalog: &Catalog, scenario: &Scenario) -> Evaluation {
    evaluate_with_cancel(design, catalog, scenario, None)
}

pub fn evaluate_with_cancel(
    design: &RocketDesign,
    catalog: &Catalog,
    scenario: &Scenario,
    cancel: Option<&AtomicBool>,
) -> Evaluation {
    let drc = run_drc(design, catalog);
    if !drc.passed {
        return not_flown(Some(design.clone()), drc, scenario);
    }
    let (mut outcome, _) = simulate_with_cancel(design, catalog, &scenario.environment, &scenario.sim, cancel);
    // DRC has resolved every catalog name, so these cannot fail.
    let cost = compute_cost(design, catalog).ok();
    let stress = evaluate_structure(design, catalog, &outcome.max_q).ok();
    if let Some(c) = &cost {
        outcome.total_cost = c.total_cost;
    }
    if let Some(s) = &stress {
        outcome.structural_failure = s.failed;
    }
    let reward = score(&outcome, &scenario.challenge);
    Evaluation {
        design: Some(design.clone()),
        drc,
        outcome: Some(outcome),
        stress,
        cost,
        reward,
    }
}

/// Strict JSON document.
pub fn evaluate_json(text: &str, catalog: &Catalog, scenario: &Scenario) -> Evaluation {
    match check_document(text, catalog) {
        (Some(design), _) => evaluate(&design, catalog, scenario),
        (None, drc) => not_flown(None, drc, scenario),
    }
}

/// Free-form agent reply holding a config block, JSON or Python literal.
pub fn evaluate_agent_output(text: &str, catalog: &Catalog, scenario: &Scenario) -> Evaluation {
    match parse_agent_output(text) {
        Ok(design) => evaluate(&design, catalog, scenario),
        Err(e) => not_flown(None, DrcReport::from_parse_error(&e), scenario),
    }
}

fn not_flown(design: Option<RocketDesign>, drc: DrcReport, scenario: &Scenario) -> Evaluation {
    let reward = score(&FlightOutcome::not_flown(SimFailure::DrcFailed), &scenario.challenge);
    Evaluation {
        design,
        drc,
        outcome: None,
        stress: None,
        cost: None,
        reward,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scoring::AltitudeChallengeSpec;

    fn scenario() -> Scenario {
        Scenario::new(
            Challenge::Altitude(AltitudeChallengeSpec::default()),
            Environment::with_wind("5@E".parse().unwrap()),
        )
    }

    #[test]
    fn example_scores() {
        let e = evaluate(&RocketDesign::example(), Catalog::builtin(), &scenario());
        assert!(e.drc.passed);
        let o = e.outcome.unwrap();
        assert!(!o.structural_failure);
        assert_eq!(o.total_cost, e.cost.unwrap().total_cost);
        assert!(e.reward.total > 0.0 && e.reward.total < 1.0);
        assert!((e.reward.recombine() - e.reward.total).abs() < 1e-12);
    }

    #[test]
    fn equal_tail_radii_score_zero() {
        let mut d = RocketDesign::example();
        d.aerodynamics.tail.bottom_radius = d.aerodynamics.tail.top_radius;
        let e = evaluate(&d, Catalog::builtin(), &scenario());
        assert!(!e.drc.passed);
        assert!(e.outcome.is_none());
        assert_eq!(e.reward.total, 0.0);
        assert!(e.reward.failure.is_some());
    }

    #[test]
    fn garbage_text_scores_zero() {
        let e = evaluate_agent_output("I cannot help with that.", Catalog::builtin(), &scenario());
        assert!(e.design.is_none());
        assert_eq!(e.reward.total, 0.0);
        assert!(!e.drc.violations.is_empty());
    }

    #[test]
    fn python_block_matches_json() {
        let py = format!("Here you go:\n```python\n{}\n```", crate::design::EXAMPLE_DESIGN_PY);
        let a = evaluate_agent_output(&py, Catalog::builtin(), &scenario());
        let b = evaluate_json(crate::design::EXAMPLE_DESIGN_JSON, Catalog::builtin(), &scenario());
        assert_eq!(a.reward, b.reward);
    }
}
