//! `rocketbench` command line. Results go to stdout as JSON, diagnostics to
//! stderr. Exit codes: 0 success (a design that fails DRC or scores zero is
//! still a result), 1 domain failure, 2 usage error, 3 I/O error.

use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use rocketbench::catalog::Catalog;
use rocketbench::design::{check_document, parse_agent_output, run_drc, DrcReport, RocketDesign};
use rocketbench::harness::{
    agent_from_spec, load_sessions, render_task_brief, replay, run_session, scoreboard, FeedbackOptions, RunOptions,
    SamplingMode, Session, TaskSpec,
};
use rocketbench::optimize::{optimize, Algorithm, AttemptLog, OptimizerConfig};
use rocketbench::pipeline::{evaluate_agent_output, evaluate_json};
use rocketbench::scoring::{AltitudeChallengeSpec, Challenge, LandingChallengeSpec, LandingWeights};
use rocketbench::server::{App, Server};
use rocketbench::sim::{simulate, FlightOutcome, SimFailure, Wind};

#[derive(Parser)]
#[command(name = "rocketbench", version, about = "Rocket design benchmark")]
struct Cli {
    /// Indented JSON; briefs print as plain text.
    #[arg(long, global = true)]
    pretty: bool,
    /// Directory holding motors.csv and materials.csv.
    #[arg(long, global = true, env = "ROCKETBENCH_CATALOG_DIR")]
    catalog: Option<PathBuf>,
    /// JSON file with `task` and/or `optimizer` sections. Flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the design rule checks and print the report.
    Validate {
        /// Design file (JSON or agent text); `-` for stdin.
        design: PathBuf,
    },
    /// Fly a design and print the flight outcome.
    Simulate {
        design: PathBuf,
        #[command(flatten)]
        task: TaskArgs,
        /// Include the per-step time series.
        #[arg(long)]
        trace: bool,
    },
    /// Full pipeline: checks, flight, structures, cost, reward.
    Score {
        design: PathBuf,
        #[command(flatten)]
        task: TaskArgs,
        /// Print the whole evaluation rather than the reward only.
        #[arg(long)]
        full: bool,
    },
    /// Agent sessions.
    Bench {
        #[command(subcommand)]
        command: BenchCommand,
    },
    /// Run a baseline optimizer and emit its session.
    Optimize(OptimizeArgs),
    /// Serve the HTTP interface.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, default_value_t = 4)]
        workers: usize,
        /// Save finished sessions here.
        #[arg(long)]
        session_dir: Option<PathBuf>,
    },
    /// Print the motor and material tables.
    Catalog {
        #[arg(value_enum, default_value_t = CatalogPart::All)]
        part: CatalogPart,
    },
}

#[derive(Subcommand)]
enum BenchCommand {
    /// Drive an agent through a session.
    Run {
        #[command(flatten)]
        task: TaskArgs,
        /// example, random[:SEED], file:PATH, cmd:COMMAND or an http(s) URL.
        #[arg(long)]
        agent: String,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Samples for best-of-n; same as --iters.
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Seconds to wait for each agent reply.
        #[arg(long, default_value_t = 600)]
        timeout: u64,
        #[arg(long, value_enum)]
        feedback: Option<FeedbackArg>,
        /// Session file, rewritten after every attempt.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Aggregate every session file in a directory.
    Scoreboard { dir: PathBuf },
    /// Re-score a stored session without its agent.
    Replay { session: PathBuf },
    /// Print the task brief an agent would receive.
    Brief {
        #[command(flatten)]
        task: TaskArgs,
    },
}

#[derive(Args, Default)]
struct TaskArgs {
    #[arg(long, alias = "challenge", value_enum)]
    task: Option<TaskKind>,
    /// Target apogee, m.
    #[arg(long)]
    target: Option<f64>,
    /// Landing target east of the pad, m.
    #[arg(long)]
    tx: Option<f64>,
    /// Landing target north of the pad, m.
    #[arg(long)]
    ty: Option<f64>,
    /// Speed and the direction it blows from, e.g. `5@E` or `7@270`.
    #[arg(long)]
    wind: Option<String>,
    /// Attempts per session.
    #[arg(long, alias = "iterations")]
    iters: Option<u32>,
    /// Landing score weights.
    #[arg(long, value_enum)]
    landing_weights: Option<WeightsArg>,
}

#[derive(Args)]
struct OptimizeArgs {
    #[command(flatten)]
    task: TaskArgs,
    /// random, sa or cem.
    #[arg(long)]
    algo: Option<String>,
    /// Design evaluations.
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    population: Option<usize>,
    #[arg(long)]
    elite_fraction: Option<f64>,
    #[arg(long)]
    temperature: Option<f64>,
    #[arg(long, value_enum)]
    log: Option<LogArg>,
    /// Write the session here and print a summary instead.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TaskKind {
    Altitude,
    Landing,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Iterative,
    BestOfN,
}

#[derive(Clone, Copy, ValueEnum)]
enum FeedbackArg {
    Both,
    Metrics,
    Breakdown,
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightsArg {
    Standard,
    UnitSum,
}

#[derive(Clone, Copy, ValueEnum)]
enum LogArg {
    All,
    GenerationBest,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum CatalogPart {
    All,
    Motors,
    Materials,
    Warnings,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    task: Option<TaskSpec>,
    optimizer: Option<OptimizerConfig>,
}

enum Failure {
    Domain(String),
    Usage(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Domain(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Domain(m) | Failure::Usage(m) | Failure::Io(m) => m,
        }
    }
}

type Result<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let catalog = match &cli.catalog {
        Some(dir) => Catalog::from_dir(dir).map_err(|e| Failure::Io(e.to_string()))?,
        None => Catalog::builtin().clone(),
    };
    let config = match &cli.config {
        Some(path) => {
            let text = read_file(path)?;
            serde_json::from_str::<ConfigFile>(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
        }
        None => ConfigFile::default(),
    };
    let out = Output { pretty: cli.pretty };

    match cli.command {
        Command::Validate { design } => {
            let text = read_input(&design)?;
            let report = if looks_like_json(&text) {
                check_document(&text, &catalog).1
            } else {
                match parse_agent_output(&text) {
                    Ok(d) => run_drc(&d, &catalog),
                    Err(e) => DrcReport::from_parse_error(&e),
                }
            };
            out.json(&report)
        }
        Command::Simulate { design, task, trace } => {
            let task = build_task(config.task, &task)?;
            let text = read_input(&design)?;
            let checked = load_design(&text, &catalog);
            let mut settings = task.sim.clone();
            settings.trace = trace;
            let (outcome, rows) = match checked {
                Some(d) => simulate(&d, &catalog, &task.environment, &settings),
                None => (FlightOutcome::not_flown(SimFailure::DrcFailed), Vec::new()),
            };
            if trace {
                out.json(&serde_json::json!({ "outcome": outcome, "trace": rows }))
            } else {
                out.json(&outcome)
            }
        }
        Command::Score { design, task, full } => {
            let task = build_task(config.task, &task)?;
            let text = read_input(&design)?;
            let scenario = task.scenario();
            let eval = if looks_like_json(&text) {
                evaluate_json(&text, &catalog, &scenario)
            } else {
                evaluate_agent_output(&text, &catalog, &scenario)
            };
            if full {
                out.json(&eval)
            } else {
                out.json(&eval.reward)
            }
        }
        Command::Bench { command } => bench(command, config.task, &catalog, &out),
        Command::Optimize(args) => optimize_cmd(args, config, &catalog, &out),
        Command::Serve {
            port,
            host,
            workers,
            session_dir,
        } => {
            let server = Server::bind(&format!("{host}:{port}"), App::new(catalog, session_dir))
                .map_err(|e| Failure::Io(format!("cannot listen on {host}:{port}: {e}")))?;
            if let Some(addr) = server.local_addr() {
                eprintln!("listening on http://{addr}");
            }
            server.run(workers);
            Ok(())
        }
        Command::Catalog { part } => {
            let v = match part {
                CatalogPart::All => serde_json::json!({
                    "motors": catalog.motors(),
                    "materials": catalog.materials(),
                    "warnings": catalog.warnings(),
                }),
                CatalogPart::Motors => serde_json::json!(catalog.motors()),
                CatalogPart::Materials => serde_json::json!(catalog.materials()),
                CatalogPart::Warnings => serde_json::json!(catalog.warnings()),
            };
            out.json(&v)
        }
    }
}

fn bench(command: BenchCommand, base: Option<TaskSpec>, catalog: &Catalog, out: &Output) -> Result<()> {
    match command {
        BenchCommand::Run {
            task,
            agent,
            mode,
            n,
            seed,
            timeout,
            feedback,
            out: path,
        } => {
            let mut spec = build_task(base, &task)?;
            if let Some(m) = mode {
                spec.sampling_mode = match m {
                    ModeArg::Iterative => SamplingMode::Iterative,
                    ModeArg::BestOfN => SamplingMode::BestOfN,
                };
            }
            if let Some(n) = n {
                spec.iteration_budget = n;
            }
            if let Some(f) = feedback {
                spec.feedback = match f {
                    FeedbackArg::Both => FeedbackOptions::default(),
                    FeedbackArg::Metrics => FeedbackOptions {
                        metrics: true,
                        breakdown: false,
                    },
                    FeedbackArg::Breakdown => FeedbackOptions {
                        metrics: false,
                        breakdown: true,
                    },
                };
            }
            spec.validate().map_err(Failure::Usage)?;
            let mut agent = agent_from_spec(&agent, seed, Duration::from_secs(timeout), catalog)
                .map_err(|e| Failure::Usage(format!("agent: {e}")))?;
            let options = RunOptions {
                seed: Some(seed),
                persist: path,
            };
            let session =
                run_session(&spec, agent.as_mut(), catalog, &options).map_err(|e| Failure::Io(e.to_string()))?;
            if let Some(reason) = &session.truncated {
                eprintln!("warning: session stopped early: {reason}");
            }
            out.json(&session)
        }
        BenchCommand::Scoreboard { dir } => {
            let sessions = load_sessions(&dir).map_err(|e| Failure::Io(e.to_string()))?;
            out.json(&scoreboard(&sessions))
        }
        BenchCommand::Replay { session } => {
            let s = Session::load(&session).map_err(|e| Failure::Io(e.to_string()))?;
            let report = replay(&s, catalog);
            out.json(&report)?;
            if report.identical {
                Ok(())
            } else {
                Err(Failure::Domain(format!(
                    "{} attempt(s) did not reproduce",
                    report.mismatches.len()
                )))
            }
        }
        BenchCommand::Brief { task } => {
            let spec = build_task(base, &task)?;
            let brief = render_task_brief(&spec, catalog);
            if out.pretty {
                write_stdout(&brief)
            } else {
                out.json(&serde_json::json!({ "brief": brief }))
            }
        }
    }
}

fn optimize_cmd(args: OptimizeArgs, config: ConfigFile, catalog: &Catalog, out: &Output) -> Result<()> {
    let task = build_task(config.task, &args.task)?;
    let mut cfg = config.optimizer.unwrap_or_default();
    if let Some(a) = &args.algo {
        cfg.algorithm = a.parse::<Algorithm>().map_err(Failure::Usage)?;
    }
    if let Some(b) = args.budget {
        cfg.budget = b;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(p) = args.population {
        cfg.population = p;
    }
    if let Some(e) = args.elite_fraction {
        cfg.elite_fraction = e;
    }
    if let Some(t) = args.temperature {
        cfg.temperature = t;
    }
    if let Some(l) = args.log {
        cfg.log = match l {
            LogArg::All => AttemptLog::All,
            LogArg::GenerationBest => AttemptLog::GenerationBest,
        };
    }
    cfg.validate().map_err(Failure::Usage)?;
    let session = optimize(&task, &cfg, catalog);
    match &args.out {
        Some(path) => {
            session.save(path).map_err(|e| Failure::Io(e.to_string()))?;
            let best = session.best();
            out.json(&serde_json::json!({
                "out": path,
                "agent_id": session.agent_id,
                "attempts": session.attempts.len(),
                "evaluations": session.metadata.get("evaluations"),
                "best_attempt_index": session.best_attempt_index,
                "best_total": session.best_total(),
                "best_design": best.and_then(|a| a.design.as_ref()),
                "best_reward": best.map(|a| &a.reward),
            }))
        }
        None => out.json(&session),
    }
}

/// Starts from the config file's task (or the default altitude task) and
/// applies whichever flags were given.
fn build_task(base: Option<TaskSpec>, a: &TaskArgs) -> Result<TaskSpec> {
    let mut task = base.unwrap_or_default();
    match (a.task, &task.challenge) {
        (Some(TaskKind::Altitude), Challenge::Landing(_)) => {
            task.challenge = Challenge::Altitude(AltitudeChallengeSpec::default())
        }
        (Some(TaskKind::Landing), Challenge::Altitude(_)) => {
            task.challenge = Challenge::Landing(LandingChallengeSpec::default())
        }
        _ => {}
    }
    match &mut task.challenge {
        Challenge::Altitude(spec) => {
            if a.tx.is_some() || a.ty.is_some() || a.landing_weights.is_some() {
                return Err(Failure::Usage(
                    "--tx, --ty and --landing-weights need --task landing".into(),
                ));
            }
            if let Some(t) = a.target {
                spec.target_apogee = t;
            }
        }
        Challenge::Landing(spec) => {
            if a.target.is_some() {
                return Err(Failure::Usage("--target needs --task altitude".into()));
            }
            if let Some(x) = a.tx {
                spec.target_x = x;
            }
            if let Some(y) = a.ty {
                spec.target_y = y;
            }
            match a.landing_weights {
                Some(WeightsArg::Standard) => spec.weights = LandingWeights::STANDARD,
                Some(WeightsArg::UnitSum) => spec.weights = LandingWeights::UNIT_SUM,
                None => {}
            }
        }
    }
    if let Some(w) = &a.wind {
        task.environment.wind = w.parse::<Wind>().map_err(|e| Failure::Usage(e.to_string()))?;
    }
    if let Some(n) = a.iters {
        task.iteration_budget = n;
    }
    task.validate().map_err(Failure::Usage)?;
    Ok(task)
}

/// The design if it parses and passes every check.
fn load_design(text: &str, catalog: &Catalog) -> Option<RocketDesign> {
    if looks_like_json(text) {
        match check_document(text, catalog) {
            (Some(d), drc) if drc.passed => Some(d),
            _ => None,
        }
    } else {
        parse_agent_output(text).ok().filter(|d| run_drc(d, catalog).passed)
    }
}

fn looks_like_json(text: &str) -> bool {
    text.trim_start().starts_with('{')
}

fn read_input(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Io(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        read_file(path)
    }
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

struct Output {
    pretty: bool,
}

impl Output {
    fn json<T: Serialize + ?Sized>(&self, v: &T) -> Result<()> {
        let s = if self.pretty {
            serde_json::to_string_pretty(v)
        } else {
            serde_json::to_string(v)
        }
        .map_err(|e| Failure::Io(e.to_string()))?;
        write_stdout(&(s + "\n"))
    }
}

/// A closed pipe (`| head`) ends output quietly.
fn write_stdout(s: &str) -> Result<()> {
    use std::io::Write;
    let mut out = io::stdout().lock();
    match out.write_all(s.as_bytes()).and_then(|_| out.flush()) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        Err(e) => Err(Failure::Io(format!("stdout: {e}"))),
    }
}
