use serde::{Deserialize, Serialize};

use super::{MemoryRecord, StateSummary};
use crate::hex::HexCoord;
use crate::world::Observation;

/// Standing instructions placed in the system segment of every prompt.
pub const SYSTEM_PROMPT: &str = "\
You are the navigation planner of a rolling robot on a hexagonal grid. \
Each turn you may move to one of the six adjacent cells (E, NE, NW, W, SW, SE), \
widen the observation window to trace an obstacle boundary, backtrack to the \
previous cell on your path, or give up. Never move into a BLOCKED or OOB cell. \
Prefer moves that reduce the distance to the goal; when a continuous obstacle \
blocks the way, trace its boundary with EXPAND_WINDOW and commit to the side \
with the shorter detour; backtrack out of dead ends.";

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoryView {
    pub records: Vec<MemoryRecord>,
    pub summary: Option<StateSummary>,
}

/// The three observation segments: system, memory and sensor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObservationBundle {
    pub system: String,
    pub position: HexCoord,
    pub goal: HexCoord,
    /// Where a backtrack would lead, if anywhere.
    pub previous: Option<HexCoord>,
    pub step_index: u32,
    /// True while an obstacle boundary is being traced.
    pub frontier: bool,
    pub route: Vec<HexCoord>,
    pub memory: MemoryView,
    pub sensor: Observation,
}

impl ObservationBundle {
    /// The rendered prompt text, built from the same fields as the structured form.
    pub fn render(&self) -> String {
        crate::backend::render_prompt(self)
    }
}

#[allow(clippy::too_many_arguments)]
pub fn assemble_observation(
    system: &str,
    memory: MemoryView,
    sensor: Observation,
    goal: HexCoord,
    previous: Option<HexCoord>,
    step_index: u32,
    frontier: bool,
    route: Vec<HexCoord>,
) -> ObservationBundle {
    ObservationBundle {
        system: system.to_string(),
        position: sensor.center,
        goal,
        previous,
        step_index,
        frontier,
        route,
        memory,
        sensor,
    }
}
