//! Adaptive observation window.
//!
//! In fast mode the agent senses radius 1 and moves greedily. When every
//! goal-improving neighbor is blocked it switches to frontier mode and traces
//! the obstacle boundary in both tangential senses, one boundary cell per
//! call. Probes are pinpoint: a cell is read only when the wall-following
//! rotation or the passage test needs its status. The positive side keeps
//! the obstacle on its left (counterclockwise around the obstacle), the
//! negative side on its right.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Action, AgentConfig, BeliefMap, BeliefStatus, ContradictionError, ObservationBundle};
use super::StepDecision;
use crate::hex::{bearing_direction, hex_distance, Direction, HexCoord};
use crate::world::CellStatus;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Positive,
    Negative,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Positive => Side::Negative,
            Side::Negative => Side::Positive,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Positive => "positive",
            Side::Negative => "negative",
        })
    }
}

/// Why a side stopped tracing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SideStatus {
    Open,
    Endpoint,
    /// The boundary runs into the edge of the domain.
    OutOfBounds,
    /// The trace came back to where it started without finding a passage.
    Closed,
    /// No free cell around the trace head.
    Stuck,
    /// Cannot beat the cost of the other side's endpoint.
    Cut,
    Budget,
}

impl fmt::Display for SideStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SideStatus::Open => "open",
            SideStatus::Endpoint => "endpoint",
            SideStatus::OutOfBounds => "out of bounds",
            SideStatus::Closed => "closed",
            SideStatus::Stuck => "stuck",
            SideStatus::Cut => "cut",
            SideStatus::Budget => "budget exhausted",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SideTrace {
    pub cells: Vec<HexCoord>,
    pub head: HexCoord,
    /// Direction from `head` toward the obstacle cell being followed.
    pub reference: Direction,
    pub endpoint: Option<HexCoord>,
    pub status: SideStatus,
}

impl SideTrace {
    fn new(origin: HexCoord, reference: Direction) -> Self {
        Self {
            cells: Vec::new(),
            head: origin,
            reference,
            endpoint: None,
            status: SideStatus::Open,
        }
    }

    pub fn steps(&self) -> u32 {
        self.cells.len() as u32
    }

    fn cost(&self, goal: HexCoord) -> Option<u32> {
        self.endpoint.map(|e| self.steps() + hex_distance(e, goal))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrontierState {
    pub origin: HexCoord,
    pub anchor: HexCoord,
    pub pos_trace: SideTrace,
    pub neg_trace: SideTrace,
    pub next: Side,
    pub budget_remaining: u32,
    pub probes: u32,
}

impl FrontierState {
    pub fn side(&self, s: Side) -> &SideTrace {
        match s {
            Side::Positive => &self.pos_trace,
            Side::Negative => &self.neg_trace,
        }
    }

    fn side_mut(&mut self, s: Side) -> &mut SideTrace {
        match s {
            Side::Positive => &mut self.pos_trace,
            Side::Negative => &mut self.neg_trace,
        }
    }

    pub fn pos_endpoint(&self) -> Option<HexCoord> {
        self.pos_trace.endpoint
    }

    pub fn neg_endpoint(&self) -> Option<HexCoord> {
        self.neg_trace.endpoint
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AowMode {
    Fast,
    Frontier(FrontierState),
}

/// Window state owned by the trial loop; backends only read it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AowState {
    pub mode: AowMode,
    /// Committed detour toward a frontier endpoint, excluding the current cell.
    pub route: Vec<HexCoord>,
    /// Cells where frontier mode has already been entered.
    pub engaged: BTreeSet<HexCoord>,
    /// The last frontier found no passage.
    pub no_passage: bool,
}

impl Default for AowState {
    fn default() -> Self {
        Self {
            mode: AowMode::Fast,
            route: Vec::new(),
            engaged: BTreeSet::new(),
            no_passage: false,
        }
    }
}

impl AowState {
    pub fn is_frontier(&self) -> bool {
        matches!(self.mode, AowMode::Frontier(_))
    }

    pub fn frontier(&self) -> Option<&FrontierState> {
        match &self.mode {
            AowMode::Frontier(f) => Some(f),
            AowMode::Fast => None,
        }
    }

    pub fn window(&self) -> WindowRequest {
        match self.mode {
            AowMode::Fast => WindowRequest::Radius(1),
            AowMode::Frontier(_) => WindowRequest::FrontierProbe,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowRequest {
    Radius(u32),
    FrontierProbe,
}

/// A finished frontier engagement, kept for summaries and rendering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrontierLog {
    pub origin: HexCoord,
    pub anchor: HexCoord,
    pub pos_trace: SideTrace,
    pub neg_trace: SideTrace,
    pub chosen: Option<Side>,
    pub probes: u32,
}

impl FrontierLog {
    pub fn side(&self, s: Side) -> &SideTrace {
        match s {
            Side::Positive => &self.pos_trace,
            Side::Negative => &self.neg_trace,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("the obstacle boundary offers no passage on either side")]
pub struct NoPassage;

/// Pick the side whose endpoint minimizes trace steps plus remaining distance.
/// Ties go to the positive side.
pub fn choose_side(
    pos: Option<(u32, HexCoord)>,
    neg: Option<(u32, HexCoord)>,
    goal: HexCoord,
) -> Result<(Side, HexCoord), NoPassage> {
    let cost = |(steps, e): (u32, HexCoord)| steps + hex_distance(e, goal);
    match (pos, neg) {
        (Some(p), Some(n)) if cost(n) < cost(p) => Ok((Side::Negative, n.1)),
        (Some(p), _) => Ok((Side::Positive, p.1)),
        (None, Some(n)) => Ok((Side::Negative, n.1)),
        (None, None) => Err(NoPassage),
    }
}

/// The deterministic window policy: the next decision for the current bundle.
pub fn aow_step(
    state: &AowState,
    bundle: &ObservationBundle,
    cfg: &AgentConfig,
) -> (WindowRequest, StepDecision) {
    let window = state.window();
    if let AowMode::Frontier(f) = &state.mode {
        let side = if f.side(f.next).status == SideStatus::Open {
            f.next
        } else {
            f.next.other()
        };
        let why = format!(
            "tracing the obstacle at {} on the {side} side ({} probes so far)",
            f.anchor, f.probes
        );
        return (window, StepDecision::new(Action::ExpandWindow, why));
    }
    let pos = bundle.position;
    let goal = bundle.goal;
    let d0 = hex_distance(pos, goal);
    let visits = |c: HexCoord| {
        bundle
            .memory
            .records
            .iter()
            .find(|r| r.coord == c)
            .map_or(0, |r| r.visit_count)
    };
    let order = bearing_direction(pos, goal).rotated_order();
    let status = |c: HexCoord| bundle.sensor.status(c).unwrap_or(CellStatus::OutOfBounds);
    let decide = |action, why: String| (window, StepDecision::new(action, why));

    if let Some(&next) = state.route.first() {
        if let Some(d) = pos.direction_to(next) {
            if status(next) == CellStatus::Free && visits(next) < cfg.v_max {
                return decide(
                    Action::Move(d),
                    format!("following the detour toward {}", state.route.last().unwrap()),
                );
            }
        }
    }

    let free: Vec<(usize, Direction, HexCoord)> = order
        .iter()
        .enumerate()
        .map(|(i, d)| (i, *d, pos.step(*d)))
        .filter(|(_, _, n)| status(*n) == CellStatus::Free)
        .collect();

    if state.no_passage && bundle.previous.is_some() && free.iter().all(|(_, _, n)| visits(*n) >= 1) {
        return decide(
            Action::Backtrack,
            "the obstacle seals this region; returning along the path".into(),
        );
    }

    if cfg.aow_enabled && !state.engaged.contains(&pos) && d0 > 0 {
        let improving: Vec<CellStatus> = order
            .iter()
            .map(|d| pos.step(*d))
            .filter(|n| hex_distance(*n, goal) < d0)
            .map(status)
            .collect();
        if !improving.contains(&CellStatus::Free) && improving.contains(&CellStatus::Blocked) {
            let anchor = order
                .iter()
                .map(|d| pos.step(*d))
                .find(|n| hex_distance(*n, goal) < d0 && status(*n) == CellStatus::Blocked)
                .expect("a blocked improving neighbor exists");
            return decide(
                Action::ExpandWindow,
                format!("{anchor} blocks the way to the goal; widening the window"),
            );
        }
    }

    let best = free
        .iter()
        .filter(|(_, _, n)| visits(*n) < cfg.v_max)
        .min_by_key(|(i, _, n)| (hex_distance(*n, goal), visits(*n), *i));
    if let Some((_, d, n)) = best {
        return decide(
            Action::Move(*d),
            format!("{n} is {} from the goal", hex_distance(*n, goal)),
        );
    }
    if let Some(prev) = bundle.previous {
        return decide(
            Action::Backtrack,
            format!("every free neighbor is exhausted; back to {prev}"),
        );
    }
    decide(
        Action::DeclareFailure,
        "nothing reachable is left unexplored".into(),
    )
}

/// Effect of one `ExpandWindow` on the loop-owned state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExpandOutcome {
    /// No adjacent obstacle to trace; the window was widened to radius 2 instead.
    Widened,
    Advanced,
    Exited(FrontierLog),
}

/// Execute an `ExpandWindow` decision: enter frontier mode or advance the trace.
///
/// `probe(c)` reads one cell. On exit the state goes
/// back to fast mode with `route` set toward the chosen endpoint.
pub fn expand_window(
    state: &mut AowState,
    belief: &mut BeliefMap,
    pos: HexCoord,
    goal: HexCoord,
    budget: u32,
    probe: &mut dyn FnMut(HexCoord) -> CellStatus,
) -> Result<ExpandOutcome, ContradictionError> {
    if !state.is_frontier() {
        let d0 = hex_distance(pos, goal);
        let anchor = bearing_direction(pos, goal)
            .rotated_order()
            .into_iter()
            .map(|d| pos.step(d))
            .filter(|n| belief.status(*n) == BeliefStatus::Blocked)
            .min_by_key(|n| hex_distance(*n, goal));
        let Some(anchor) = anchor.filter(|_| d0 > 0) else {
            for c in pos.disc(2) {
                if belief.status(c) == BeliefStatus::Unknown {
                    belief.learn(c, probe(c))?;
                }
            }
            return Ok(ExpandOutcome::Widened);
        };
        let k = pos.direction_to(anchor).expect("anchor is adjacent");
        state.engaged.insert(pos);
        state.route.clear();
        state.no_passage = false;
        state.mode = AowMode::Frontier(FrontierState {
            origin: pos,
            anchor,
            pos_trace: SideTrace::new(pos, k),
            neg_trace: SideTrace::new(pos, k),
            next: Side::Positive,
            budget_remaining: budget,
            probes: 0,
        });
    }
    let AowMode::Frontier(f) = &mut state.mode else {
        unreachable!()
    };
    advance(f, belief, goal, probe)?;
    if f.pos_trace.status != SideStatus::Open && f.neg_trace.status != SideStatus::Open {
        return Ok(ExpandOutcome::Exited(finish(state, belief, goal)));
    }
    Ok(ExpandOutcome::Advanced)
}

fn finish(state: &mut AowState, belief: &BeliefMap, goal: HexCoord) -> FrontierLog {
    let AowMode::Frontier(f) = std::mem::replace(&mut state.mode, AowMode::Fast) else {
        unreachable!()
    };
    let ends = |t: &SideTrace| t.endpoint.map(|e| (t.steps(), e));
    let choice = choose_side(ends(&f.pos_trace), ends(&f.neg_trace), goal);
    let chosen = match choice {
        Ok((side, endpoint)) => {
            state.route = belief
                .free_route(f.origin, endpoint)
                .expect("traced cells form a free chain from the origin");
            Some(side)
        }
        Err(NoPassage) => {
            state.no_passage = true;
            None
        }
    };
    FrontierLog {
        origin: f.origin,
        anchor: f.anchor,
        pos_trace: f.pos_trace,
        neg_trace: f.neg_trace,
        chosen,
        probes: f.probes,
    }
}

/// Advance the trace by one boundary cell, or close sides until one can move.
fn advance(
    f: &mut FrontierState,
    belief: &mut BeliefMap,
    goal: HexCoord,
    probe: &mut dyn FnMut(HexCoord) -> CellStatus,
) -> Result<(), ContradictionError> {
    let anchor_dist = hex_distance(f.anchor, goal);
    let initial = (f.origin, f.initial_reference());
    loop {
        let side = if f.side(f.next).status == SideStatus::Open {
            f.next
        } else if f.side(f.next.other()).status == SideStatus::Open {
            f.next.other()
        } else {
            return Ok(());
        };
        if f.budget_remaining == 0 {
            for s in [Side::Positive, Side::Negative] {
                if f.side(s).status == SideStatus::Open {
                    f.side_mut(s).status = SideStatus::Budget;
                }
            }
            return Ok(());
        }
        let rival = f.side(side.other()).cost(goal);
        let t = f.side_mut(side);
        if let Some(c) = rival {
            if t.steps() + hex_distance(t.head, goal) > c {
                t.status = SideStatus::Cut;
                continue;
            }
        }
        let mut probes = 0;
        let step = wall_follow_step(belief, t, side, probe, &mut probes)?;
        let Some((cell, reference)) = step else {
            f.probes += probes;
            continue;
        };
        t.head = cell;
        t.reference = reference;
        t.cells.push(cell);
        let mut passage = hex_distance(cell, goal) < anchor_dist;
        for n in cell.neighbors() {
            if !passage && hex_distance(n, goal) < anchor_dist {
                passage = read(n, belief, probe, &mut probes)? == BeliefStatus::Free;
            }
        }
        f.budget_remaining -= 1;
        f.probes += probes;
        let t = f.side_mut(side);
        if passage {
            t.endpoint = Some(cell);
            t.status = SideStatus::Endpoint;
        } else if (cell, reference) == initial {
            t.status = SideStatus::Closed;
        } else if let Some(c) = rival {
            if t.steps() + hex_distance(cell, goal) > c {
                t.status = SideStatus::Cut;
            }
        }
        f.next = side.other();
        if f.budget_remaining == 0 {
            for s in [Side::Positive, Side::Negative] {
                if f.side(s).status == SideStatus::Open {
                    f.side_mut(s).status = SideStatus::Budget;
                }
            }
        }
        return Ok(());
    }
}

impl FrontierState {
    fn initial_reference(&self) -> Direction {
        self.origin
            .direction_to(self.anchor)
            .expect("anchor is adjacent to the origin")
    }
}

/// Status of `c`, probing it first if it is still unknown.
fn read(
    c: HexCoord,
    belief: &mut BeliefMap,
    probe: &mut dyn FnMut(HexCoord) -> CellStatus,
    probes: &mut u32,
) -> Result<BeliefStatus, ContradictionError> {
    if belief.status(c) == BeliefStatus::Unknown {
        *probes += 1;
        belief.learn(c, probe(c))?;
    }
    Ok(belief.status(c))
}

/// Rotate away from the followed wall to the first open direction.
/// Returns the next head and its wall reference, or closes the side.
fn wall_follow_step(
    belief: &mut BeliefMap,
    t: &mut SideTrace,
    side: Side,
    probe: &mut dyn FnMut(HexCoord) -> CellStatus,
    probes: &mut u32,
) -> Result<Option<(HexCoord, Direction)>, ContradictionError> {
    let sense = match side {
        Side::Positive => -1,
        Side::Negative => 1,
    };
    for i in 1..6 {
        let d = t.reference.rotate(sense * i);
        let cell = t.head.step(d);
        match read(cell, belief, probe, probes)? {
            BeliefStatus::Free => return Ok(Some((cell, d.rotate(-2 * sense)))),
            BeliefStatus::OutOfBounds => {
                t.status = SideStatus::OutOfBounds;
                return Ok(None);
            }
            BeliefStatus::Blocked | BeliefStatus::Unknown => {}
        }
    }
    t.status = SideStatus::Stuck;
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::{axial_from_offset, make_wall_scenario, probe_cell, sense, OccupancyMap, ScenarioParams};

    fn engage(
        map: &OccupancyMap,
        pos: HexCoord,
        goal: HexCoord,
        budget: u32,
    ) -> (AowState, BeliefMap, Option<FrontierLog>, u32) {
        let mut belief = BeliefMap::new();
        belief.update(&sense(map, pos, 1), pos).unwrap();
        let mut state = AowState::default();
        let mut calls = 0;
        let mut probe = |c: HexCoord| probe_cell(map, c);
        loop {
            calls += 1;
            match expand_window(&mut state, &mut belief, pos, goal, budget, &mut probe).unwrap() {
                ExpandOutcome::Exited(log) => return (state, belief, Some(log), calls),
                ExpandOutcome::Widened => return (state, belief, None, calls),
                ExpandOutcome::Advanced => assert!(calls < 10_000),
            }
        }
    }

    #[test]
    fn choose_side_arithmetic() {
        let goal = HexCoord::new(0, 0);
        let p = HexCoord::new(4, 0);
        let n = HexCoord::new(-2, 0);
        assert_eq!(choose_side(Some((3, p)), Some((8, n)), goal), Ok((Side::Positive, p)));
        let n2 = HexCoord::new(-4, 0);
        assert_eq!(choose_side(Some((3, p)), Some((3, n2)), goal), Ok((Side::Positive, p)));
        assert_eq!(choose_side(Some((5, p)), Some((3, n2)), goal), Ok((Side::Negative, n2)));
        assert_eq!(choose_side(None, Some((9, n)), goal), Ok((Side::Negative, n)));
        assert_eq!(choose_side(None, None, goal), Err(NoPassage));
    }

    #[test]
    fn wall_following_turns_match_hex_geometry() {
        // moving along j leaves the previously checked wall cell at j + 2
        for j in Direction::ALL {
            let from = HexCoord::new(0, 0);
            let wall = from.step(j.rotate(1));
            assert_eq!(from.step(j).step(j.rotate(2)), wall);
            let wall = from.step(j.rotate(-1));
            assert_eq!(from.step(j).step(j.rotate(-2)), wall);
        }
    }

    #[test]
    fn straight_wall_is_traced_on_both_sides() {
        let (h, w) = (5u32, 1u32);
        let (map, spec) = make_wall_scenario(&ScenarioParams::straight(w, h, 3)).unwrap();
        // walk up to the wall along the axis
        let mut pos = spec.start;
        while !map.is_blocked(pos.step(Direction::E)) {
            pos = pos.step(Direction::E);
        }
        let budget = 4 * (map.rows + map.cols);
        let (state, belief, log, _) = engage(&map, pos, spec.goal, budget);
        let log = log.expect("frontier exits");
        assert!(log.probes <= 6 * (h + w), "{} probes", log.probes);
        assert!(log.pos_trace.endpoint.is_some() && log.neg_trace.endpoint.is_some());
        for t in [&log.pos_trace, &log.neg_trace] {
            for c in &t.cells {
                assert!(map.is_free(*c));
                assert!(c.neighbors().iter().any(|n| map.is_blocked(*n)));
            }
        }
        assert_eq!(log.chosen, Some(Side::Positive));
        assert_eq!(state.mode, AowMode::Fast);
        let end = *state.route.last().unwrap();
        assert_eq!(Some(end), log.pos_trace.endpoint);
        assert!(state.route.iter().all(|c| belief.is_free(*c)));
        assert!(state.engaged.contains(&pos));
    }

    #[test]
    fn sealed_region_reports_no_passage() {
        // a closed ring of obstacles around the goal; the agent stands outside it
        let goal = axial_from_offset(8, 6);
        let ring: Vec<HexCoord> = goal
            .disc(2)
            .into_iter()
            .filter(|c| hex_distance(*c, goal) == 2)
            .collect();
        let map = OccupancyMap::with_blocked(13, 17, "ring", ring).unwrap();
        let pos = goal.step_n(Direction::W, 3);
        let (state, _, log, _) = engage(&map, pos, goal, 500);
        let log = log.unwrap();
        assert_eq!(log.chosen, None);
        assert!(state.no_passage);
        assert!(state.route.is_empty());
        assert_eq!(log.pos_trace.status, SideStatus::Closed);
    }

    #[test]
    fn budget_bounds_the_trace() {
        let (map, spec) = make_wall_scenario(&ScenarioParams::straight(1, 21, 2)).unwrap();
        let mut pos = spec.start;
        while !map.is_blocked(pos.step(Direction::E)) {
            pos = pos.step(Direction::E);
        }
        let (_, _, log, calls) = engage(&map, pos, spec.goal, 6);
        let log = log.unwrap();
        assert_eq!(log.pos_trace.steps() + log.neg_trace.steps(), 6);
        assert_eq!(log.pos_trace.status, SideStatus::Budget);
        assert_eq!(calls, 6);
    }

    #[test]
    fn no_adjacent_obstacle_widens_the_window() {
        let map = OccupancyMap::empty(9, 9, "e");
        let pos = axial_from_offset(4, 4);
        let (state, belief, log, calls) = engage(&map, pos, axial_from_offset(8, 4), 10);
        assert!(log.is_none());
        assert_eq!(calls, 1);
        assert_eq!(state.mode, AowMode::Fast);
        assert_eq!(belief.known_cells().count(), 19);
    }
}
