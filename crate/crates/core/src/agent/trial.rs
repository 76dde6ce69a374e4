use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{
    assemble_observation, expand_window, ExpandOutcome, retrieve_memory, self_check, summarize_context, Action, AgentConfig,
    AowState, BeliefMap, CheckResult, FailureReason, FrontierLog, MemoryStore, MemoryView,
    Outcome, RejectReason, StepDecision, SYSTEM_PROMPT,
};
use crate::backend::{BackendError, DecisionBackend, DecisionRequest};
use crate::hex::HexCoord;
use crate::world::{probe_cell, sense, CellStatus, Observation, OccupancyMap, TrialSpec};

/// A proposal the loop refused to execute.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    pub turn: u32,
    pub proposal: Option<StepDecision>,
    pub reason: RejectReason,
    pub detail: String,
}

/// Full record of one trial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanTrace {
    pub spec: TrialSpec,
    pub executed_path: Vec<HexCoord>,
    /// Every in-domain cell sensed or occupied; its size is the search space.
    pub observed_cells: BTreeSet<HexCoord>,
    pub step_decisions: Vec<StepDecision>,
    pub rejections: Vec<Rejection>,
    pub frontiers: Vec<FrontierLog>,
    pub summaries: u32,
    pub outcome: Outcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl PlanTrace {
    fn new(spec: TrialSpec) -> Self {
        Self {
            executed_path: vec![spec.start],
            spec,
            observed_cells: BTreeSet::new(),
            step_decisions: Vec::new(),
            rejections: Vec::new(),
            frontiers: Vec::new(),
            summaries: 0,
            outcome: Outcome::Failure(FailureReason::StepLimit),
            error: None,
        }
    }

    pub fn path_length(&self) -> u32 {
        self.executed_path.len().saturating_sub(1) as u32
    }

    pub fn search_space(&self) -> u32 {
        self.observed_cells.len() as u32
    }

    pub fn frontier_probes(&self) -> u32 {
        self.frontiers.iter().map(|f| f.probes).sum()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("trace serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PathViolation {
    Empty,
    WrongStart { found: HexCoord },
    NotAdjacent { index: usize },
    OutOfDomain { index: usize, cell: HexCoord },
    Blocked { index: usize, cell: HexCoord },
    WrongEnd { found: HexCoord },
}

/// Check a path against the true map: it starts at `spec.start`, every hop is
/// adjacent, no cell is blocked or outside the domain and, when
/// `require_goal`, it ends at `spec.goal`.
pub fn validate_path(
    map: &OccupancyMap,
    spec: &TrialSpec,
    path: &[HexCoord],
    require_goal: bool,
) -> Vec<PathViolation> {
    let Some(first) = path.first() else {
        return vec![PathViolation::Empty];
    };
    let mut out = Vec::new();
    if *first != spec.start {
        out.push(PathViolation::WrongStart { found: *first });
    }
    for (i, c) in path.iter().enumerate() {
        if i > 0 && !path[i - 1].is_adjacent(*c) {
            out.push(PathViolation::NotAdjacent { index: i });
        }
        if !map.in_domain(*c) {
            out.push(PathViolation::OutOfDomain { index: i, cell: *c });
        } else if map.is_blocked(*c) {
            out.push(PathViolation::Blocked { index: i, cell: *c });
        }
    }
    let last = *path.last().unwrap();
    if require_goal && last != spec.goal {
        out.push(PathViolation::WrongEnd { found: last });
    }
    out
}

fn note(observed: &mut BTreeSet<HexCoord>, obs: &Observation) {
    observed.extend(obs.in_domain().map(|(c, _)| *c));
}

/// Run one episode: sense, update belief and memory, assemble the
/// observation, ask the backend, vet the proposal and execute it, until the
/// goal is reached or the agent gives up.
pub fn run_trial(
    map: &OccupancyMap,
    spec: &TrialSpec,
    backend: &mut dyn DecisionBackend,
    cfg: &AgentConfig,
) -> PlanTrace {
    let budget = cfg.frontier_budget_for(map);
    let step_limit = cfg.step_limit_for(map);
    // frontier turns do not move the agent; bound them separately
    let turn_limit = step_limit as u64 + map.domain_size() as u64 * (budget as u64 + 2);
    let goal = spec.goal;
    let mut trace = PlanTrace::new(spec.clone());
    let mut observed = BTreeSet::new();
    let mut belief = BeliefMap::new();
    let mut memory = MemoryStore::new();
    let mut aow = AowState::default();
    let mut stack: Vec<HexCoord> = Vec::new();
    let mut pos = spec.start;
    let mut moves = 0u32;
    let mut turn = 0u32;
    let mut arrived = true;

    let outcome = loop {
        if pos == goal {
            break Outcome::Success;
        }
        if moves >= step_limit || turn as u64 >= turn_limit {
            break Outcome::Failure(FailureReason::StepLimit);
        }
        let obs = sense(map, pos, 1);
        let learned = if arrived {
            belief.update(&obs, pos)
        } else {
            belief.absorb(&obs).map(|_| ())
        };
        if let Err(e) = learned {
            trace.error = Some(e.to_string());
            break Outcome::Failure(FailureReason::Contradiction);
        }
        arrived = false;
        observed.insert(pos);
        note(&mut observed, &obs);

        let view = if cfg.memory_enabled {
            memory.record(&obs, belief.visit_count(pos), turn);
            if memory.tick(cfg.k_summary) {
                memory.set_summary(summarize_context(
                    &trace.executed_path,
                    goal,
                    &belief,
                    &trace.frontiers,
                ));
                trace.summaries += 1;
            }
            MemoryView {
                records: retrieve_memory(&memory, pos, cfg.r_mem),
                summary: memory.summary.clone(),
            }
        } else {
            MemoryView::default()
        };
        let previous = stack.last().copied();
        let bundle = assemble_observation(
            SYSTEM_PROMPT,
            view,
            obs,
            goal,
            previous,
            turn,
            aow.is_frontier(),
            aow.route.clone(),
        );

        let mut rejected: Vec<Rejection> = Vec::new();
        let decision = loop {
            let request = DecisionRequest {
                bundle: &bundle,
                aow: &aow,
                step_index: turn,
                rejections: &rejected,
            };
            match backend.decide(&request) {
                Ok(resp) => {
                    let d = resp.decision;
                    if !cfg.self_check_enabled {
                        break Ok(d);
                    }
                    match self_check(&d, &belief, pos, previous) {
                        CheckResult::Accept => break Ok(d),
                        CheckResult::Reject(reason) => rejected.push(Rejection {
                            turn,
                            detail: format!("{} rejected: {reason:?}", d.action),
                            proposal: Some(d),
                            reason,
                        }),
                    }
                }
                Err(BackendError::Parse(e)) => rejected.push(Rejection {
                    turn,
                    proposal: None,
                    reason: RejectReason::Unparsable,
                    detail: e.to_string(),
                }),
                Err(e) => break Err(e),
            }
            if rejected.len() > cfg.n_retry as usize {
                let fallback = if previous.is_some() {
                    StepDecision::new(Action::Backtrack, "retries exhausted; backtracking")
                } else {
                    StepDecision::new(Action::DeclareFailure, "retries exhausted at the start")
                };
                break Ok(fallback);
            }
        };
        trace.rejections.append(&mut rejected);
        let decision = match decision {
            Ok(d) => d,
            Err(e) => {
                trace.error = Some(e.to_string());
                break Outcome::Failure(FailureReason::Backend);
            }
        };
        trace.step_decisions.push(decision.clone());
        turn += 1;

        match decision.action {
            Action::Move(dir) => {
                let target = pos.step(dir);
                if !map.is_free(target) {
                    trace.executed_path.push(target);
                    break Outcome::Failure(FailureReason::Collision);
                }
                stack.push(pos);
                pos = target;
                if aow.route.first() == Some(&target) {
                    aow.route.remove(0);
                } else {
                    aow.route.clear();
                }
            }
            Action::Backtrack => {
                let Some(prev) = stack.pop() else {
                    break Outcome::Failure(FailureReason::Exhausted);
                };
                pos = prev;
                aow.route.clear();
            }
            Action::ExpandWindow => {
                if !cfg.aow_enabled {
                    continue;
                }
                let mut probe = |c: HexCoord| {
                    let s = probe_cell(map, c);
                    if s != CellStatus::OutOfBounds {
                        observed.insert(c);
                    }
                    s
                };
                match expand_window(&mut aow, &mut belief, pos, goal, budget, &mut probe) {
                    Ok(ExpandOutcome::Exited(log)) => {
                        trace.frontiers.push(log);
                        if cfg.memory_enabled {
                            memory.set_summary(summarize_context(
                                &trace.executed_path,
                                goal,
                                &belief,
                                &trace.frontiers,
                            ));
                            trace.summaries += 1;
                        }
                    }
                    Ok(ExpandOutcome::Advanced | ExpandOutcome::Widened) => {}
                    Err(e) => {
                        trace.error = Some(e.to_string());
                        break Outcome::Failure(FailureReason::Contradiction);
                    }
                }
                continue;
            }
            Action::DeclareFailure => break Outcome::Failure(FailureReason::Exhausted),
        }
        // a move or backtrack happened
        trace.executed_path.push(pos);
        moves += 1;
        arrived = true;
        aow.no_passage = false;
        if aow.is_frontier() {
            aow.mode = super::AowMode::Fast;
        }
    };
    trace.outcome = outcome;
    trace.observed_cells = observed;
    trace
}
