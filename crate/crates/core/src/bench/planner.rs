use serde::{Deserialize, Serialize};

use super::TrialResult;
use crate::agent::{run_trial, AgentConfig, Outcome};
use crate::backend::DeterministicBackend;
use crate::baselines::{apf_realtime, astar, bfs_oracle, dijkstra, ApfParams, SearchResult};
use crate::world::{OccupancyMap, TrialSpec};

pub const PLANNER_NAMES: [&str; 6] = ["satplanner", "satplanner-det", "astar", "dijkstra", "apf", "bfs"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlannerKind {
    /// The agent loop driven by the deterministic backend.
    Satplanner(AgentConfig),
    Astar,
    Dijkstra,
    Apf(ApfParams),
    Bfs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannerSpec {
    pub name: String,
    pub kind: PlannerKind,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown planner {0:?} (known: satplanner, satplanner-det, astar, dijkstra, apf, bfs)")]
pub struct UnknownPlanner(pub String);

impl PlannerSpec {
    pub fn new(name: impl Into<String>, kind: PlannerKind) -> Self {
        Self {
            name: name.into(),
            kind,
        }
    }

    pub fn satplanner(cfg: AgentConfig) -> Self {
        Self::new("satplanner", PlannerKind::Satplanner(cfg))
    }

    pub fn astar() -> Self {
        Self::new("astar", PlannerKind::Astar)
    }

    pub fn dijkstra() -> Self {
        Self::new("dijkstra", PlannerKind::Dijkstra)
    }

    pub fn apf() -> Self {
        Self::new("apf", PlannerKind::Apf(ApfParams::default()))
    }

    pub fn bfs() -> Self {
        Self::new("bfs", PlannerKind::Bfs)
    }

    /// Looks a planner up by its command-line name, keeping that name.
    pub fn by_name(name: &str) -> Result<Self, UnknownPlanner> {
        let kind = match name {
            "satplanner" | "satplanner-det" => PlannerKind::Satplanner(AgentConfig::default()),
            "astar" => PlannerKind::Astar,
            "dijkstra" => PlannerKind::Dijkstra,
            "apf" => PlannerKind::Apf(ApfParams::default()),
            "bfs" => PlannerKind::Bfs,
            other => return Err(UnknownPlanner(other.to_string())),
        };
        Ok(Self::new(name, kind))
    }
}

fn from_search(trial_id: usize, spec: &TrialSpec, name: &str, r: SearchResult) -> TrialResult {
    let mut out = TrialResult::new(trial_id, spec, name, r.success, r.path_length(), r.expanded_count);
    if !r.success {
        out.failure = Some("exhausted".into());
    }
    out
}

/// Search space is the observed-cell count for the sensing planners and the
/// expanded-node count for the graph searches.
pub fn run_planner(p: &PlannerSpec, map: &OccupancyMap, spec: &TrialSpec, trial_id: usize) -> TrialResult {
    let name = p.name.as_str();
    match &p.kind {
        PlannerKind::Satplanner(cfg) => {
            let mut backend = DeterministicBackend::new(*cfg);
            let trace = run_trial(map, spec, &mut backend, cfg);
            let mut out = TrialResult::new(
                trial_id,
                spec,
                name,
                trace.outcome.is_success(),
                trace.path_length(),
                trace.search_space(),
            );
            if let Outcome::Failure(reason) = trace.outcome {
                out.failure = Some(reason.as_str().to_string());
            }
            out
        }
        PlannerKind::Astar => from_search(trial_id, spec, name, astar(map, spec.start, spec.goal)),
        PlannerKind::Dijkstra => from_search(trial_id, spec, name, dijkstra(map, spec.start, spec.goal)),
        PlannerKind::Bfs => from_search(trial_id, spec, name, bfs_oracle(map, spec.start, spec.goal)),
        PlannerKind::Apf(params) => {
            let r = apf_realtime(map, spec.start, spec.goal, params);
            let mut out = TrialResult::new(
                trial_id,
                spec,
                name,
                r.outcome.is_success(),
                r.path_length(),
                r.search_space(),
            );
            if let Outcome::Failure(reason) = r.outcome {
                out.failure = Some(reason.as_str().to_string());
            }
            out
        }
    }
}
