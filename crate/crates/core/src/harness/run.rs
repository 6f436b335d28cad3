use std::path::PathBuf;

use super::agent::Agent;
use super::brief::render_task_brief;
use super::session::{Session, SessionIoError};
use super::task::TaskSpec;
use crate::catalog::Catalog;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Recorded in the session; agents are seeded by whoever builds them.
    pub seed: Option<u64>,
    /// Saved after every attempt and once more at the end.
    pub persist: Option<PathBuf>,
}

/// Drives one session to its budget, or until the agent fails. Agent
/// failures truncate the session rather than erroring.
pub fn run_session(
    task: &TaskSpec,
    agent: &mut dyn Agent,
    catalog: &Catalog,
    options: &RunOptions,
) -> Result<Session, SessionIoError> {
    let brief = render_task_brief(task, catalog);
    let mut session = Session::new(task.clone(), agent.id(), options.seed);
    while !session.is_complete() {
        let request = session.request(&brief);
        match agent.respond(&request) {
            Ok(response) => {
                session.submit(&response.raw_text, catalog);
            }
            Err(e) => session.record_agent_error(e.to_string()),
        }
        if let Some(path) = &options.persist {
            session.save(path)?;
        }
    }
    session.finish();
    if let Some(path) = &options.persist {
        session.save(path)?;
    }
    Ok(session)
}
