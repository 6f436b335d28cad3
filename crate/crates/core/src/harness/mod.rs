//! Evaluation sessions over any agent: task briefs, feedback, transcripts,
//! replay and scoreboards.

pub mod agent;
mod brief;
mod feedback;
mod run;
mod scoreboard;
mod session;
mod task;

pub use agent::{agent_from_spec, Agent, AgentError, AgentRequest, AgentResponse, HistoryEntry};
pub use brief::render_task_brief;
pub use feedback::{AttemptStatus, FeedbackReport};
pub use run::{run_session, RunOptions};
pub use scoreboard::{load_sessions, scoreboard, Scoreboard, ScoreboardRow};
pub use session::{
    replay, Attempt, ReplayMismatch, ReplayReport, Session, SessionEvent, SessionIoError, SourceFormat, SESSION_FORMAT,
};
pub use task::{FeedbackOptions, SamplingMode, TaskSpec, DEFAULT_ITERATIONS, EXTENDED_ITERATIONS};
