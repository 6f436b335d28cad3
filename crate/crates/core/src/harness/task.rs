use serde::{Deserialize, Serialize};

use crate::pipeline::Scenario;
use crate::scoring::{AltitudeChallengeSpec, Challenge, LandingChallengeSpec};
use crate::sim::{Environment, SimSettings, Wind};

pub const DEFAULT_ITERATIONS: u32 = 10;
pub const EXTENDED_ITERATIONS: u32 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingMode {
    /// Each turn sees every earlier answer and its feedback.
    Iterative,
    /// Independent single-shot turns, no feedback.
    BestOfN,
}

/// Which parts of the evaluation the agent gets back after each turn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeedbackOptions {
    pub metrics: bool,
    pub breakdown: bool,
}

impl Default for FeedbackOptions {
    fn default() -> Self {
        FeedbackOptions {
            metrics: true,
            breakdown: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub challenge: Challenge,
    pub environment: Environment,
    pub iteration_budget: u32,
    pub sampling_mode: SamplingMode,
    #[serde(default)]
    pub feedback: FeedbackOptions,
    #[serde(default)]
    pub sim: SimSettings,
}

impl TaskSpec {
    pub fn altitude(target_apogee: f64, wind: Wind) -> TaskSpec {
        TaskSpec::new(Challenge::Altitude(AltitudeChallengeSpec {
            target_apogee,
            ..Default::default()
        }))
        .with_wind(wind)
    }

    pub fn landing(target_x: f64, target_y: f64, wind: Wind) -> TaskSpec {
        TaskSpec::new(Challenge::Landing(LandingChallengeSpec {
            target_x,
            target_y,
            ..Default::default()
        }))
        .with_wind(wind)
    }

    pub fn new(challenge: Challenge) -> TaskSpec {
        TaskSpec {
            challenge,
            environment: Environment::calm(),
            iteration_budget: DEFAULT_ITERATIONS,
            sampling_mode: SamplingMode::Iterative,
            feedback: FeedbackOptions::default(),
            sim: SimSettings::default(),
        }
    }

    pub fn with_wind(mut self, wind: Wind) -> TaskSpec {
        self.environment.wind = wind;
        self
    }

    pub fn with_budget(mut self, n: u32) -> TaskSpec {
        self.iteration_budget = n;
        self
    }

    pub fn with_mode(mut self, mode: SamplingMode) -> TaskSpec {
        self.sampling_mode = mode;
        self
    }

    pub fn scenario(&self) -> Scenario {
        Scenario {
            challenge: self.challenge,
            environment: self.environment.clone(),
            sim: self.sim.clone(),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.iteration_budget < 1 {
            return Err("iteration budget must be at least 1".into());
        }
        if !(self.environment.wind.speed >= 0.0) {
            return Err("wind speed must be non-negative".into());
        }
        match self.challenge {
            Challenge::Altitude(s) if !(s.target_apogee > 0.0) => Err("target apogee must be positive".into()),
            Challenge::Landing(s) if s.target_x == 0.0 && s.target_y == 0.0 => {
                Err("landing target must not be the launch site".into())
            }
            _ => Ok(()),
        }
    }
}

impl Default for TaskSpec {
    /// The altitude challenge as shown to agents: 3048 m, 5 m/s from the east.
    fn default() -> Self {
        TaskSpec::altitude(3048.0, "5@E".parse().expect("valid wind"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        let t = TaskSpec::landing(4000.0, 4000.0, "5@E".parse().unwrap()).with_mode(SamplingMode::BestOfN);
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(serde_json::from_str::<TaskSpec>(&s).unwrap(), t);
    }

    #[test]
    fn zero_budget_is_invalid() {
        assert!(TaskSpec::default().with_budget(0).validate().is_err());
        assert!(TaskSpec::default().validate().is_ok());
    }
}
