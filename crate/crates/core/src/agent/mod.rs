//! The online planning agent: belief maintenance, memory, the adaptive
//! observation window, observation assembly, the self-check gate and the
//! trial loop.

mod aow;
mod belief;
mod check;
mod memory;
mod observe;
mod trial;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::hex::Direction;
use crate::world::OccupancyMap;

pub use aow::{
    aow_step, choose_side, expand_window, AowMode, AowState, ExpandOutcome, FrontierLog,
    FrontierState, NoPassage, Side, SideStatus, SideTrace, WindowRequest,
};
pub use belief::{BeliefMap, BeliefStatus, ContradictionError};
pub use check::{check_landing, self_check, CheckResult, RejectReason};
pub use memory::{retrieve_memory, summarize_context, MemoryRecord, MemoryStore, StateSummary};
pub use observe::{assemble_observation, MemoryView, ObservationBundle, SYSTEM_PROMPT};
pub use trial::{run_trial, validate_path, PathViolation, PlanTrace, Rejection};

/// What the agent does next.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Move(Direction),
    ExpandWindow,
    Backtrack,
    DeclareFailure,
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Move(d) => write!(f, "MOVE {d}"),
            Action::ExpandWindow => f.write_str("EXPAND_WINDOW"),
            Action::Backtrack => f.write_str("BACKTRACK"),
            Action::DeclareFailure => f.write_str("FAIL"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StepDecision {
    pub action: Action,
    pub rationale: String,
}

impl StepDecision {
    pub fn new(action: Action, rationale: impl Into<String>) -> Self {
        Self {
            action,
            rationale: rationale.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureReason {
    /// Every reachable cell was explored (or the backend gave up).
    Exhausted,
    StepLimit,
    /// An executed move entered a blocked or out-of-domain cell.
    Collision,
    Backend,
    LocalMinimum,
    /// The sensor contradicted the belief; indicates a simulator bug.
    Contradiction,
}

impl FailureReason {
    pub fn as_str(self) -> &'static str {
        match self {
            FailureReason::Exhausted => "exhausted",
            FailureReason::StepLimit => "step_limit",
            FailureReason::Collision => "collision",
            FailureReason::Backend => "backend",
            FailureReason::LocalMinimum => "local_minimum",
            FailureReason::Contradiction => "contradiction",
        }
    }
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Success,
    Failure(FailureReason),
}

impl Outcome {
    pub fn is_success(self) -> bool {
        self == Outcome::Success
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Success => f.write_str("success"),
            Outcome::Failure(r) => write!(f, "failure({r})"),
        }
    }
}

/// Agent parameters. `frontier_budget` and `step_limit` default to values
/// derived from the domain size when left unset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentConfig {
    pub r_mem: u32,
    pub k_summary: u32,
    pub frontier_budget: Option<u32>,
    pub v_max: u32,
    pub n_retry: u32,
    pub step_limit: Option<u32>,
    pub memory_enabled: bool,
    pub aow_enabled: bool,
    pub self_check_enabled: bool,
}

impl Default for AgentConfig {
    fn default() -> Self {
        Self {
            r_mem: 3,
            k_summary: 10,
            frontier_budget: None,
            v_max: 2,
            n_retry: 2,
            step_limit: None,
            memory_enabled: true,
            aow_enabled: true,
            self_check_enabled: true,
        }
    }
}

impl AgentConfig {
    pub fn no_memory(self) -> Self {
        Self {
            memory_enabled: false,
            ..self
        }
    }

    pub fn no_aow(self) -> Self {
        Self {
            aow_enabled: false,
            ..self
        }
    }

    pub fn no_self_check(self) -> Self {
        Self {
            self_check_enabled: false,
            ..self
        }
    }

    pub fn frontier_budget_for(&self, map: &OccupancyMap) -> u32 {
        self.frontier_budget
            .unwrap_or(4 * (map.rows + map.cols))
            .max(1)
    }

    pub fn step_limit_for(&self, map: &OccupancyMap) -> u32 {
        self.step_limit
            .unwrap_or_else(|| 8 * map.rows * map.cols)
            .max(1)
    }
}
