use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::session::{Session, SessionIoError};
use crate::scoring::ChallengeKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreboardRow {
    pub agent_id: String,
    pub challenge: ChallengeKind,
    pub runs: usize,
    /// Mean over runs of each run's best total.
    pub mean_best: f64,
    /// Best total over all runs.
    pub best: f64,
    /// Mean total of the k-th attempt over runs that reached it.
    pub mean_by_iteration: Vec<f64>,
    /// Mean running-best after k attempts over runs that reached it.
    pub mean_best_so_far: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Scoreboard {
    pub rows: Vec<ScoreboardRow>,
}

/// One row per (agent, challenge), sorted by agent id then challenge.
pub fn scoreboard(sessions: &[Session]) -> Scoreboard {
    let mut groups: BTreeMap<(String, String), Vec<&Session>> = BTreeMap::new();
    for s in sessions {
        let kind = s.task.challenge.kind();
        groups
            .entry((s.agent_id.clone(), kind.to_string()))
            .or_default()
            .push(s);
    }
    let rows = groups
        .into_values()
        .map(|group| {
            let bests: Vec<f64> = group.iter().map(|s| s.best_total()).collect();
            let longest = group.iter().map(|s| s.attempts.len()).max().unwrap_or(0);
            let mut mean_by_iteration = Vec::with_capacity(longest);
            let mut mean_best_so_far = Vec::with_capacity(longest);
            let running: Vec<Vec<f64>> = group.iter().map(|s| s.best_so_far()).collect();
            for k in 0..longest {
                let at: Vec<f64> = group
                    .iter()
                    .filter_map(|s| s.attempts.get(k).map(|a| a.total()))
                    .collect();
                let so_far: Vec<f64> = running.iter().filter_map(|r| r.get(k).copied()).collect();
                mean_by_iteration.push(mean(&at));
                mean_best_so_far.push(mean(&so_far));
            }
            ScoreboardRow {
                agent_id: group[0].agent_id.clone(),
                challenge: group[0].task.challenge.kind(),
                runs: group.len(),
                mean_best: mean(&bests),
                best: bests.iter().copied().fold(0.0, f64::max),
                mean_by_iteration,
                mean_best_so_far,
            }
        })
        .collect();
    Scoreboard { rows }
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// Every `*.json` session directly inside `dir`, in file-name order.
pub fn load_sessions(dir: &Path) -> Result<Vec<Session>, SessionIoError> {
    let io_err = |source| SessionIoError::Io {
        path: dir.display().to_string(),
        source,
    };
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(io_err)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths.iter().map(|p| Session::load(p)).collect()
}
