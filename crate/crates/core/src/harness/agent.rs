//! Agents and the wire protocol they speak.
//!
//! A turn is one request `{"attempt", "brief", "history"}` answered by one
//! response `{"raw_text"}`. Subprocess agents get the request as a single
//! JSON line on stdin and answer with a single JSON line on stdout; HTTP
//! agents get it as the body of a POST and answer in the response body.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::feedback::FeedbackReport;
use crate::catalog::Catalog;
use crate::design::{RocketDesign, EXAMPLE_DESIGN_PY};
use crate::optimize::DesignSpace;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub attempt: usize,
    /// The agent's reply, verbatim.
    pub raw_text: String,
    /// `report` rendered as prompt text.
    pub feedback: String,
    pub report: FeedbackReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentRequest {
    pub attempt: usize,
    pub brief: String,
    pub history: Vec<HistoryEntry>,
}

impl AgentRequest {
    /// Brief followed by every earlier answer and its feedback, as a single
    /// chat message.
    pub fn render_prompt(&self) -> String {
        let mut s = self.brief.clone();
        if self.history.is_empty() {
            return s;
        }
        s.push_str("\n\n# Previous attempts\n");
        for h in &self.history {
            let _ = write!(
                s,
                "\n## Attempt {}\n\n### Your answer\n{}\n\n### Results\n{}",
                h.attempt + 1,
                h.raw_text.trim_end(),
                h.feedback
            );
        }
        s.push_str("\nUse these results to improve your design. Reply with a complete new config.\n");
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentResponse {
    pub raw_text: String,
}

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("agent i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("agent protocol: {0}")]
    Protocol(String),
    #[error("agent did not answer within {0:?}")]
    Timeout(Duration),
    #[error("agent exited")]
    Disconnected,
    #[error("agent http: {0}")]
    Http(String),
    #[error("scripted agent has no more replies")]
    Exhausted,
}

pub trait Agent {
    fn id(&self) -> String;
    fn respond(&mut self, request: &AgentRequest) -> Result<AgentResponse, AgentError>;
}

/// Replays fixed replies in order.
pub struct ScriptedAgent {
    id: String,
    replies: Vec<String>,
    next: usize,
    cycle: bool,
}

impl ScriptedAgent {
    pub fn new(id: impl Into<String>, replies: Vec<String>) -> ScriptedAgent {
        ScriptedAgent {
            id: id.into(),
            replies,
            next: 0,
            cycle: false,
        }
    }

    /// Gives the same reply forever.
    pub fn repeating(id: impl Into<String>, reply: impl Into<String>) -> ScriptedAgent {
        ScriptedAgent {
            cycle: true,
            ..ScriptedAgent::new(id, vec![reply.into()])
        }
    }

    /// Always answers with the worked example from the brief.
    pub fn example() -> ScriptedAgent {
        ScriptedAgent::repeating("example", format!("```python\n{EXAMPLE_DESIGN_PY}```\n"))
    }
}

impl Agent for ScriptedAgent {
    fn id(&self) -> String {
        self.id.clone()
    }

    fn respond(&mut self, _: &AgentRequest) -> Result<AgentResponse, AgentError> {
        if self.replies.is_empty() {
            return Err(AgentError::Exhausted);
        }
        let i = if self.cycle {
            self.next % self.replies.len()
        } else {
            self.next
        };
        let reply = self.replies.get(i).ok_or(AgentError::Exhausted)?;
        self.next += 1;
        Ok(AgentResponse {
            raw_text: reply.clone(),
        })
    }
}

/// Samples designs uniformly from the optimizer's search box.
pub struct RandomDesignAgent {
    seed: u64,
    rng: ChaCha8Rng,
    space: DesignSpace,
}

impl RandomDesignAgent {
    pub fn new(seed: u64, catalog: &Catalog) -> RandomDesignAgent {
        RandomDesignAgent {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
            space: DesignSpace::new(catalog),
        }
    }

    pub fn sample(&mut self) -> RocketDesign {
        self.space.sample(&mut self.rng)
    }
}

impl Agent for RandomDesignAgent {
    fn id(&self) -> String {
        format!("random-{}", self.seed)
    }

    fn respond(&mut self, _: &AgentRequest) -> Result<AgentResponse, AgentError> {
        let design = self.sample();
        Ok(AgentResponse {
            raw_text: format!("```json\n{}\n```\n", design.to_json_pretty()),
        })
    }
}

/// Talks NDJSON to a child process over its stdin and stdout.
pub struct SubprocessAgent {
    command: String,
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<std::io::Result<String>>,
    timeout: Duration,
}

impl SubprocessAgent {
    /// Runs `command` through the shell.
    pub fn spawn(command: &str, timeout: Duration) -> Result<SubprocessAgent, AgentError> {
        let mut child = shell(command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        std::thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(SubprocessAgent {
            command: command.to_string(),
            child,
            stdin,
            lines: rx,
            timeout,
        })
    }
}

#[cfg(unix)]
fn shell(command: &str) -> Command {
    let mut c = Command::new("sh");
    c.arg("-c").arg(command);
    c
}

#[cfg(not(unix))]
fn shell(command: &str) -> Command {
    let mut c = Command::new("cmd");
    c.arg("/C").arg(command);
    c
}

impl Agent for SubprocessAgent {
    fn id(&self) -> String {
        format!("cmd:{}", self.command)
    }

    fn respond(&mut self, request: &AgentRequest) -> Result<AgentResponse, AgentError> {
        let mut line = serde_json::to_string(request).map_err(|e| AgentError::Protocol(e.to_string()))?;
        line.push('\n');
        self.stdin
            .write_all(line.as_bytes())
            .and_then(|_| self.stdin.flush())
            .map_err(|_| AgentError::Disconnected)?;
        loop {
            let line = match self.lines.recv_timeout(self.timeout) {
                Ok(line) => line?,
                Err(RecvTimeoutError::Timeout) => return Err(AgentError::Timeout(self.timeout)),
                Err(RecvTimeoutError::Disconnected) => return Err(AgentError::Disconnected),
            };
            if line.trim().is_empty() {
                continue;
            }
            return serde_json::from_str(&line).map_err(|e| AgentError::Protocol(format!("{e}: {line}")));
        }
    }
}

impl Drop for SubprocessAgent {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// POSTs each request as JSON to a fixed URL.
pub struct HttpAgent {
    url: String,
    agent: ureq::Agent,
}

impl HttpAgent {
    pub fn new(url: impl Into<String>, timeout: Duration) -> HttpAgent {
        HttpAgent {
            url: url.into(),
            agent: ureq::AgentBuilder::new().timeout(timeout).build(),
        }
    }
}

impl Agent for HttpAgent {
    fn id(&self) -> String {
        self.url.clone()
    }

    fn respond(&mut self, request: &AgentRequest) -> Result<AgentResponse, AgentError> {
        let body = serde_json::to_value(request).map_err(|e| AgentError::Protocol(e.to_string()))?;
        let resp = self
            .agent
            .post(&self.url)
            .send_json(body)
            .map_err(|e| AgentError::Http(e.to_string()))?;
        resp.into_json().map_err(|e| AgentError::Protocol(e.to_string()))
    }
}

/// Builds an agent from a command-line style spec:
///
/// - `example`: the brief's worked example, every turn
/// - `random` or `random:SEED`: uniform random designs
/// - `file:PATH`: one fixed reply read from a file
/// - `cmd:COMMAND`: NDJSON subprocess
/// - `http://...`, `https://...`: remote agent
pub fn agent_from_spec(
    spec: &str,
    seed: u64,
    timeout: Duration,
    catalog: &Catalog,
) -> Result<Box<dyn Agent>, AgentError> {
    if spec == "example" {
        return Ok(Box::new(ScriptedAgent::example()));
    }
    if spec == "random" {
        return Ok(Box::new(RandomDesignAgent::new(seed, catalog)));
    }
    if let Some(s) = spec.strip_prefix("random:") {
        let seed = s
            .parse()
            .map_err(|_| AgentError::Protocol(format!("bad seed in `{spec}`")))?;
        return Ok(Box::new(RandomDesignAgent::new(seed, catalog)));
    }
    if let Some(path) = spec.strip_prefix("file:") {
        let text = std::fs::read_to_string(path)?;
        return Ok(Box::new(ScriptedAgent::repeating(spec, text)));
    }
    if let Some(cmd) = spec.strip_prefix("cmd:") {
        return Ok(Box::new(SubprocessAgent::spawn(cmd, timeout)?));
    }
    if spec.starts_with("http://") || spec.starts_with("https://") {
        return Ok(Box::new(HttpAgent::new(spec, timeout)));
    }
    Err(AgentError::Protocol(format!(
        "unknown agent `{spec}` (expected example, random[:SEED], file:PATH, cmd:COMMAND or an http(s) URL)"
    )))
}
