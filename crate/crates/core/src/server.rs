//! HTTP front end.
//!
//! - `POST /evaluate` — a design document, or `{"design": ..., "task": ...}`.
//!   `design` may be a JSON design object or agent text. Answers with the
//!   full evaluation: DRC report, outcome, stress, cost and reward.
//! - `POST /session/turn` — harness-driven session. Without `session_id` a
//!   session is opened (`task` and `agent_id` optional) and the first agent
//!   request is returned. With `session_id` and `raw_text` the reply is
//!   scored and the next request (or the finished session) is returned.
//! - `GET /task-brief` — the task brief as text. Query parameters
//!   `challenge` (`altitude` | `landing`), `target`, `tx`, `ty`, `wind`.
//! - `GET /health`.
//!
//! Errors come back as `{"error": "..."}` with a 4xx status.

use std::collections::HashMap;
use std::io::Read;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::thread;

use serde::Deserialize;
use serde_json::{json, Value};

use crate::catalog::Catalog;
use crate::harness::{render_task_brief, Session, TaskSpec};
use crate::pipeline::{evaluate_agent_output, evaluate_json};
use crate::sim::Wind;

/// Largest accepted request body.
const MAX_BODY: u64 = 4 << 20;

#[derive(Debug)]
pub struct Reply {
    pub status: u16,
    pub content_type: &'static str,
    pub body: String,
}

impl Reply {
    fn json(status: u16, v: &Value) -> Reply {
        Reply {
            status,
            content_type: "application/json",
            body: v.to_string(),
        }
    }

    fn error(status: u16, msg: impl Into<String>) -> Reply {
        Reply::json(status, &json!({ "error": msg.into() }))
    }

    fn text(body: String) -> Reply {
        Reply {
            status: 200,
            content_type: "text/markdown; charset=utf-8",
            body,
        }
    }
}

/// Request routing and session state, independent of the socket layer.
pub struct App {
    catalog: Catalog,
    sessions: Mutex<HashMap<String, Session>>,
    next_id: AtomicU64,
    /// Finished sessions are written here as `<id>.json`.
    session_dir: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EvaluateRequest {
    design: Value,
    #[serde(default)]
    task: Option<TaskSpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TurnRequest {
    #[serde(default)]
    session_id: Option<String>,
    #[serde(default)]
    task: Option<TaskSpec>,
    #[serde(default)]
    agent_id: Option<String>,
    #[serde(default)]
    raw_text: Option<String>,
}

impl App {
    pub fn new(catalog: Catalog, session_dir: Option<PathBuf>) -> App {
        App {
            catalog,
            sessions: Mutex::new(HashMap::new()),
            next_id: AtomicU64::new(1),
            session_dir,
        }
    }

    /// `path` may carry a query string.
    pub fn handle(&self, method: &str, path: &str, body: &str) -> Reply {
        let (route, query) = path.split_once('?').unwrap_or((path, ""));
        match (method, route) {
            ("POST", "/evaluate") => self.evaluate(body),
            ("POST", "/session/turn") => self.turn(body),
            ("GET", "/task-brief") => self.brief(query),
            ("GET", "/health") => Reply::json(200, &json!({ "status": "ok" })),
            (_, "/evaluate" | "/session/turn" | "/task-brief" | "/health") => Reply::error(405, "method not allowed"),
            _ => Reply::error(404, format!("no route for {route}")),
        }
    }

    fn evaluate(&self, body: &str) -> Reply {
        let value: Value = match serde_json::from_str(body) {
            Ok(v) => v,
            Err(e) => return Reply::error(400, format!("body is not JSON: {e}")),
        };
        let wrapped = value.get("design").is_some();
        let (design, task) = if wrapped {
            match serde_json::from_value::<EvaluateRequest>(value) {
                Ok(r) => (r.design, r.task.unwrap_or_default()),
                Err(e) => return Reply::error(400, format!("bad request: {e}")),
            }
        } else {
            (value, TaskSpec::default())
        };
        if let Err(e) = task.validate() {
            return Reply::error(400, e);
        }
        let scenario = task.scenario();
        let eval = match &design {
            Value::String(text) => evaluate_agent_output(text, &self.catalog, &scenario),
            other => evaluate_json(&other.to_string(), &self.catalog, &scenario),
        };
        Reply::json(200, &serde_json::to_value(&eval).expect("evaluation serializes"))
    }

    fn turn(&self, body: &str) -> Reply {
        let req: TurnRequest = match serde_json::from_str(body) {
            Ok(r) => r,
            Err(e) => return Reply::error(400, format!("bad request: {e}")),
        };
        let mut sessions = self.sessions.lock().unwrap_or_else(|p| p.into_inner());
        let Some(id) = req.session_id else {
            let task = req.task.unwrap_or_default();
            if let Err(e) = task.validate() {
                return Reply::error(400, e);
            }
            let id = format!("s{}", self.next_id.fetch_add(1, Ordering::Relaxed));
            let mut session = Session::new(task, req.agent_id.unwrap_or_else(|| "http".into()), None);
            let request = session.request(&render_task_brief(&session.task, &self.catalog));
            sessions.insert(id.clone(), session);
            return Reply::json(200, &json!({ "session_id": id, "done": false, "request": request }));
        };
        if req.task.is_some() || req.agent_id.is_some() {
            return Reply::error(400, "task and agent_id are only accepted when opening a session");
        }
        let Some(session) = sessions.get_mut(&id) else {
            return Reply::error(404, format!("unknown session {id}"));
        };
        let Some(raw) = req.raw_text else {
            return Reply::error(400, "raw_text is required");
        };
        let attempt = session.submit(&raw, &self.catalog).clone();
        if !session.is_complete() {
            let request = session.request(&render_task_brief(&session.task, &self.catalog));
            return Reply::json(
                200,
                &json!({ "session_id": id, "done": false, "attempt": attempt, "request": request }),
            );
        }
        let mut session = sessions.remove(&id).expect("present");
        drop(sessions);
        session.finish();
        if let Some(dir) = &self.session_dir {
            if let Err(e) = session.save(&dir.join(format!("{id}.json"))) {
                return Reply::error(500, e.to_string());
            }
        }
        Reply::json(
            200,
            &json!({ "session_id": id, "done": true, "attempt": attempt, "session": session }),
        )
    }

    fn brief(&self, query: &str) -> Reply {
        match task_from_query(query) {
            Ok(task) => Reply::text(render_task_brief(&task, &self.catalog)),
            Err(e) => Reply::error(400, e),
        }
    }
}

fn task_from_query(query: &str) -> Result<TaskSpec, String> {
    let mut challenge = "altitude".to_string();
    let (mut target, mut tx, mut ty, mut wind) = (None, None, None, None);
    let num = |k: &str, v: &str| v.parse::<f64>().map_err(|_| format!("{k} must be a number"));
    for (k, v) in form_urlencoded::parse(query.as_bytes()) {
        match &*k {
            "challenge" => challenge = v.into_owned(),
            "target" => target = Some(num(&k, &v)?),
            "tx" => tx = Some(num(&k, &v)?),
            "ty" => ty = Some(num(&k, &v)?),
            "wind" => wind = Some(v.parse::<Wind>().map_err(|e| e.to_string())?),
            other => return Err(format!("unknown parameter {other}")),
        }
    }
    let base = TaskSpec::default();
    let wind = wind.unwrap_or(base.environment.wind);
    let task = match challenge.as_str() {
        "altitude" => TaskSpec::altitude(target.unwrap_or(3048.0), wind),
        "landing" => TaskSpec::landing(tx.unwrap_or(4000.0), ty.unwrap_or(4000.0), wind),
        other => return Err(format!("unknown challenge {other}")),
    };
    task.validate()?;
    Ok(task)
}

/// A bound listener. `run` serves until the process exits.
pub struct Server {
    http: Arc<tiny_http::Server>,
    app: Arc<App>,
}

impl Server {
    pub fn bind(addr: &str, app: App) -> std::io::Result<Server> {
        let http = tiny_http::Server::http(addr).map_err(std::io::Error::other)?;
        Ok(Server {
            http: Arc::new(http),
            app: Arc::new(app),
        })
    }

    pub fn local_addr(&self) -> Option<SocketAddr> {
        self.http.server_addr().to_ip()
    }

    /// Blocks; requests are handled on `workers` threads.
    pub fn run(self, workers: usize) {
        let handles: Vec<_> = (0..workers.max(1))
            .map(|_| {
                let (http, app) = (Arc::clone(&self.http), Arc::clone(&self.app));
                thread::spawn(move || serve_loop(&http, &app))
            })
            .collect();
        for h in handles {
            let _ = h.join();
        }
    }

    /// Serves in the background; for tests and embedding.
    pub fn spawn(self, workers: usize) -> thread::JoinHandle<()> {
        thread::spawn(move || self.run(workers))
    }
}

fn serve_loop(http: &tiny_http::Server, app: &App) {
    for mut req in http.incoming_requests() {
        let mut body = String::new();
        let read = req.as_reader().take(MAX_BODY).read_to_string(&mut body);
        let reply = match read {
            Ok(_) => app.handle(req.method().as_str(), req.url(), &body),
            Err(e) => Reply::error(400, format!("unreadable body: {e}")),
        };
        let header = tiny_http::Header::from_bytes("Content-Type", reply.content_type).expect("static header");
        let resp = tiny_http::Response::from_string(reply.body)
            .with_status_code(reply.status)
            .with_header(header);
        let _ = req.respond(resp);
    }
}
