use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::agent::{AgentRequest, HistoryEntry};
use super::feedback::FeedbackReport;
use super::task::{SamplingMode, TaskSpec};
use crate::catalog::Catalog;
use crate::design::{DrcReport, RocketDesign};
use crate::pipeline::{evaluate_agent_output, evaluate_json, Evaluation};
use crate::scoring::RewardBreakdown;
use crate::sim::FlightOutcome;
use crate::structures::{CostBreakdown, StressReport};

pub const SESSION_FORMAT: &str = "rocketbench-session/1";

/// How `design_source` is read back on replay.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceFormat {
    /// Free text from an agent; the first config block is extracted.
    #[default]
    AgentText,
    /// A strict JSON design document.
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attempt {
    /// 0-based.
    pub index: usize,
    pub design_source: String,
    #[serde(default)]
    pub source_format: SourceFormat,
    pub design: Option<RocketDesign>,
    pub drc: DrcReport,
    pub outcome: Option<FlightOutcome>,
    pub stress: Option<StressReport>,
    pub cost: Option<CostBreakdown>,
    pub reward: RewardBreakdown,
    pub feedback: FeedbackReport,
    /// Optimizer generation that produced this attempt.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generation: Option<u32>,
}

impl Attempt {
    pub fn total(&self) -> f64 {
        self.reward.total
    }
}

/// Append-only log of what happened, in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum SessionEvent {
    Started {
        agent_id: String,
        mode: SamplingMode,
        budget: u32,
    },
    Prompt {
        attempt: usize,
        history: usize,
    },
    Response {
        attempt: usize,
        chars: usize,
    },
    Scored {
        attempt: usize,
        total: f64,
    },
    AgentError {
        attempt: usize,
        message: String,
    },
    Finished {
        attempts: usize,
        best_attempt_index: Option<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub format: String,
    pub agent_id: String,
    pub seed: Option<u64>,
    pub task: TaskSpec,
    pub attempts: Vec<Attempt>,
    pub best_attempt_index: Option<usize>,
    /// Why the session stopped before its budget, if it did.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncated: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, serde_json::Value>,
    pub events: Vec<SessionEvent>,
}

#[derive(Debug, thiserror::Error)]
pub enum SessionIoError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path}: not a session file: {source}")]
    Format { path: String, source: serde_json::Error },
}

impl Session {
    pub fn new(task: TaskSpec, agent_id: impl Into<String>, seed: Option<u64>) -> Session {
        let agent_id = agent_id.into();
        let events = vec![SessionEvent::Started {
            agent_id: agent_id.clone(),
            mode: task.sampling_mode,
            budget: task.iteration_budget,
        }];
        Session {
            format: SESSION_FORMAT.into(),
            agent_id,
            seed,
            task,
            attempts: Vec::new(),
            best_attempt_index: None,
            truncated: None,
            metadata: BTreeMap::new(),
            events,
        }
    }

    pub fn is_complete(&self) -> bool {
        self.truncated.is_some() || self.attempts.len() >= self.task.iteration_budget as usize
    }

    pub fn finished(&self) -> bool {
        matches!(self.events.last(), Some(SessionEvent::Finished { .. }))
    }

    /// What the agent sees for the next attempt. Iterative sessions carry
    /// every earlier answer and its feedback; best-of-n sessions carry none.
    pub fn request(&mut self, brief: &str) -> AgentRequest {
        let attempt = self.attempts.len();
        let history: Vec<HistoryEntry> = match self.task.sampling_mode {
            SamplingMode::Iterative => self
                .attempts
                .iter()
                .map(|a| HistoryEntry {
                    attempt: a.index,
                    raw_text: a.design_source.clone(),
                    feedback: a.feedback.render(),
                    report: a.feedback.clone(),
                })
                .collect(),
            SamplingMode::BestOfN => Vec::new(),
        };
        self.events.push(SessionEvent::Prompt {
            attempt,
            history: history.len(),
        });
        AgentRequest {
            attempt,
            brief: brief.to_string(),
            history,
        }
    }

    /// Scores an agent reply and appends it as the next attempt.
    pub fn submit(&mut self, raw_text: &str, catalog: &Catalog) -> &Attempt {
        let index = self.attempts.len();
        self.events.push(SessionEvent::Response {
            attempt: index,
            chars: raw_text.chars().count(),
        });
        let eval = evaluate_agent_output(raw_text, catalog, &self.task.scenario());
        self.push(raw_text.to_string(), SourceFormat::AgentText, eval, None)
    }

    /// Appends an already evaluated design, e.g. from an optimizer.
    pub fn push(
        &mut self,
        design_source: String,
        source_format: SourceFormat,
        eval: Evaluation,
        generation: Option<u32>,
    ) -> &Attempt {
        let index = self.attempts.len();
        let feedback = FeedbackReport::from_evaluation(&eval, self.task.feedback);
        let attempt = Attempt {
            index,
            design_source,
            source_format,
            design: eval.design,
            drc: eval.drc,
            outcome: eval.outcome,
            stress: eval.stress,
            cost: eval.cost,
            reward: eval.reward,
            feedback,
            generation,
        };
        let total = attempt.total();
        // Strictly greater keeps the earliest of equal totals.
        if self.best().is_none_or(|b| total > b.total()) {
            self.best_attempt_index = Some(index);
        }
        self.events.push(SessionEvent::Scored { attempt: index, total });
        self.attempts.push(attempt);
        &self.attempts[index]
    }

    pub fn record_agent_error(&mut self, message: impl Into<String>) {
        let message = message.into();
        self.events.push(SessionEvent::AgentError {
            attempt: self.attempts.len(),
            message: message.clone(),
        });
        self.truncated = Some(message);
    }

    pub fn finish(&mut self) {
        if !self.finished() {
            self.events.push(SessionEvent::Finished {
                attempts: self.attempts.len(),
                best_attempt_index: self.best_attempt_index,
            });
        }
    }

    pub fn best(&self) -> Option<&Attempt> {
        self.best_attempt_index.map(|i| &self.attempts[i])
    }

    pub fn best_total(&self) -> f64 {
        self.best().map_or(0.0, Attempt::total)
    }

    /// Running maximum of the attempt totals.
    pub fn best_so_far(&self) -> Vec<f64> {
        let mut best = f64::NEG_INFINITY;
        self.attempts
            .iter()
            .map(|a| {
                best = best.max(a.total());
                best
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sessions serialize")
    }

    /// Writes the whole session, replacing the file atomically.
    pub fn save(&self, path: &Path) -> Result<(), SessionIoError> {
        let io_err = |source| SessionIoError::Io {
            path: path.display().to_string(),
            source,
        };
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(io_err)?;
        }
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, self.to_json() + "\n").map_err(io_err)?;
        fs::rename(&tmp, path).map_err(io_err)
    }

    pub fn load(path: &Path) -> Result<Session, SessionIoError> {
        let text = fs::read_to_string(path).map_err(|source| SessionIoError::Io {
            path: path.display().to_string(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| SessionIoError::Format {
            path: path.display().to_string(),
            source,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayMismatch {
    pub attempt: usize,
    pub stored: f64,
    pub replayed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub attempts: usize,
    pub identical: bool,
    pub mismatches: Vec<ReplayMismatch>,
}

/// Re-scores every stored design source without the agent and compares the
/// full reward breakdowns bit for bit.
pub fn replay(session: &Session, catalog: &Catalog) -> ReplayReport {
    let scenario = session.task.scenario();
    let mismatches: Vec<ReplayMismatch> = session
        .attempts
        .iter()
        .filter_map(|a| {
            let eval = match a.source_format {
                SourceFormat::AgentText => evaluate_agent_output(&a.design_source, catalog, &scenario),
                SourceFormat::Json => evaluate_json(&a.design_source, catalog, &scenario),
            };
            let same = eval.reward == a.reward && eval.reward.total.to_bits() == a.reward.total.to_bits();
            (!same).then_some(ReplayMismatch {
                attempt: a.index,
                stored: a.reward.total,
                replayed: eval.reward.total,
            })
        })
        .collect();
    ReplayReport {
        attempts: session.attempts.len(),
        identical: mismatches.is_empty(),
        mismatches,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::EXAMPLE_DESIGN_JSON;

    #[test]
    fn ties_keep_earliest() {
        let mut s = Session::new(TaskSpec::default().with_budget(3), "t", None);
        for _ in 0..3 {
            s.submit(EXAMPLE_DESIGN_JSON, Catalog::builtin());
        }
        assert_eq!(s.best_attempt_index, Some(0));
        assert!(s.is_complete());
    }

    #[test]
    fn best_of_n_requests_have_no_history() {
        let mut s = Session::new(TaskSpec::default().with_mode(SamplingMode::BestOfN), "t", None);
        s.submit(EXAMPLE_DESIGN_JSON, Catalog::builtin());
        assert!(s.request("brief").history.is_empty());
    }

    #[test]
    fn save_load_identity() {
        let mut s = Session::new(TaskSpec::default().with_budget(2), "t", Some(3));
        s.submit(EXAMPLE_DESIGN_JSON, Catalog::builtin());
        s.submit("nonsense", Catalog::builtin());
        s.finish();
        let dir = std::env::temp_dir().join(format!("rb-session-{}", std::process::id()));
        let path = dir.join("s.json");
        s.save(&path).unwrap();
        assert_eq!(Session::load(&path).unwrap(), s);
        fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn replay_detects_tampering() {
        let mut s = Session::new(TaskSpec::default(), "t", None);
        s.submit(EXAMPLE_DESIGN_JSON, Catalog::builtin());
        assert!(replay(&s, Catalog::builtin()).identical);
        s.attempts[0].reward.total += 1e-15;
        assert!(!replay(&s, Catalog::builtin()).identical);
    }
}
