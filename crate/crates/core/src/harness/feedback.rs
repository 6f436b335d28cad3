use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::task::FeedbackOptions;
use crate::pipeline::Evaluation;
use crate::scoring::{ChallengeKind, RewardBreakdown};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttemptStatus {
    Flown,
    /// No design could be read from the reply.
    ParseError,
    DrcFailed,
    SimFailed,
}

/// What the agent is told about one attempt. The altitude task reports
/// apogee; the landing task reports the landing point instead.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedbackReport {
    pub status: AttemptStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub apogee: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub landing_x: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub landing_y: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub structural_failure: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_cost: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reward: Option<RewardBreakdown>,
    pub score: f64,
    /// DRC and parse messages, verbatim.
    pub violations: Vec<String>,
}

impl FeedbackReport {
    pub fn from_evaluation(eval: &Evaluation, options: FeedbackOptions) -> FeedbackReport {
        let status = if eval.design.is_none() {
            AttemptStatus::ParseError
        } else if !eval.drc.passed {
            AttemptStatus::DrcFailed
        } else if eval.outcome.as_ref().is_some_and(|o| o.failure.is_some()) {
            AttemptStatus::SimFailed
        } else {
            AttemptStatus::Flown
        };
        let mut report = FeedbackReport {
            status,
            apogee: None,
            landing_x: None,
            landing_y: None,
            structural_failure: None,
            total_cost: None,
            reward: options.breakdown.then(|| eval.reward.clone()),
            score: eval.reward.percentage(),
            violations: eval.drc.violations.iter().map(|v| v.message.clone()).collect(),
        };
        if let (true, Some(o)) = (options.metrics, &eval.outcome) {
            match eval.reward.challenge {
                ChallengeKind::Altitude => report.apogee = Some(o.apogee),
                ChallengeKind::Landing => {
                    report.landing_x = Some(o.landing_x);
                    report.landing_y = Some(o.landing_y);
                }
            }
            report.structural_failure = Some(o.structural_failure);
            report.total_cost = Some(o.total_cost);
        }
        report
    }

    /// Plain-text rendering used inside prompts.
    pub fn render(&self) -> String {
        let mut s = String::new();
        match self.status {
            AttemptStatus::ParseError => s.push_str("Your design could not be read.\n"),
            AttemptStatus::DrcFailed => s.push_str("Your design failed the design rule checks.\n"),
            AttemptStatus::SimFailed => s.push_str("The simulation of your design did not complete.\n"),
            AttemptStatus::Flown => {}
        }
        for v in &self.violations {
            let _ = writeln!(s, "- {v}");
        }
        if let Some(a) = self.apogee {
            let _ = writeln!(s, "Maximum apogee: {a:.2} m");
        }
        if let (Some(x), Some(y)) = (self.landing_x, self.landing_y) {
            let _ = writeln!(s, "Landing position: x = {x:.2} m, y = {y:.2} m");
        }
        if let Some(f) = self.structural_failure {
            let _ = writeln!(s, "Structural integrity: {}", if f { "FAILED" } else { "ok" });
        }
        if let Some(c) = self.total_cost {
            let _ = writeln!(s, "Total cost: ${c:.2}");
        }
        if let Some(r) = &self.reward {
            s.push_str("Reward components:\n");
            for (name, value) in &r.components {
                let _ = writeln!(s, "  {name}: {value:.4} (weight {})", r.weights[name]);
            }
        }
        let _ = writeln!(s, "Score: {:.2}", self.score);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::Catalog;
    use crate::design::RocketDesign;
    use crate::harness::TaskSpec;
    use crate::pipeline::evaluate;

    #[test]
    fn altitude_hides_landing_point() {
        let t = TaskSpec::default();
        let e = evaluate(&RocketDesign::example(), Catalog::builtin(), &t.scenario());
        let f = FeedbackReport::from_evaluation(&e, FeedbackOptions::default());
        assert!(f.apogee.is_some() && f.landing_x.is_none());
        assert!(f.render().contains("Maximum apogee"));
    }

    #[test]
    fn landing_hides_apogee() {
        let t = TaskSpec::landing(4000.0, 4000.0, "5@E".parse().unwrap());
        let e = evaluate(&RocketDesign::example(), Catalog::builtin(), &t.scenario());
        let f = FeedbackReport::from_evaluation(&e, FeedbackOptions::default());
        assert!(f.apogee.is_none() && f.landing_x.is_some());
        assert!(!f.render().contains("apogee"));
    }

    #[test]
    fn drc_messages_are_verbatim() {
        let mut d = RocketDesign::example();
        d.aerodynamics.tail.top_radius = d.aerodynamics.tail.bottom_radius;
        let e = evaluate(&d, Catalog::builtin(), &TaskSpec::default().scenario());
        let f = FeedbackReport::from_evaluation(&e, FeedbackOptions::default());
        assert_eq!(f.status, AttemptStatus::DrcFailed);
        assert_eq!(f.violations[0], e.drc.violations[0].message);
        assert!(f.render().contains(&e.drc.violations[0].message));
    }

    #[test]
    fn options_strip_sections() {
        let e = evaluate(
            &RocketDesign::example(),
            Catalog::builtin(),
            &TaskSpec::default().scenario(),
        );
        let f = FeedbackReport::from_evaluation(
            &e,
            FeedbackOptions {
                metrics: false,
                breakdown: false,
            },
        );
        assert!(f.apogee.is_none() && f.reward.is_none());
    }
}
