use std::fmt::Write;

use crate::agent::{Action, ObservationBundle, StateSummary, StepDecision};
use crate::hex::{Direction, HexCoord};
use crate::world::CellStatus;

pub const SYSTEM_MARKER: &str = "[SYSTEM]";
pub const MEMORY_MARKER: &str = "[MEMORY]";
pub const OBSERVATION_MARKER: &str = "[OBSERVATION]";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ActionParseError {
    #[error("no `ACTION:` line found")]
    NoActionLine,
    #[error("bad direction {0:?}; expected one of E, NE, NW, W, SW, SE")]
    BadDirection(String),
    #[error("unknown action {0:?}")]
    UnknownAction(String),
}

fn coords(cells: &[HexCoord]) -> String {
    if cells.is_empty() {
        return "none".into();
    }
    cells
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn write_summary(out: &mut String, s: &StateSummary) {
    let _ = writeln!(out, "summary position: {}", s.current_position);
    let _ = writeln!(out, "summary destination: {}", s.destination);
    let _ = writeln!(out, "summary obstacles: {}", coords(&s.global_obstacle_list));
    let _ = writeln!(out, "summary path: {}", coords(&s.path_history));
    for v in &s.verified_patterns {
        let _ = writeln!(out, "summary verified: {v}");
    }
    for h in &s.hypotheses {
        let _ = writeln!(out, "summary hypothesis: {h}");
    }
    for (c, text) in &s.key_decision_points {
        let _ = writeln!(out, "summary decision at {c}: {text}");
    }
}

/// The system and user chat messages for one turn.
pub fn render_messages(bundle: &ObservationBundle) -> (String, String) {
    let mut system = String::new();
    let _ = writeln!(system, "{SYSTEM_MARKER}");
    let _ = writeln!(system, "{}", bundle.system);
    let _ = writeln!(system, "Position: {}", bundle.position);
    let _ = writeln!(system, "Goal: {}", bundle.goal);
    let prev = bundle.previous.map_or("none".into(), |p| p.to_string());
    let _ = writeln!(system, "Backtrack target: {prev}");
    let mode = if bundle.frontier { "frontier" } else { "fast" };
    let _ = writeln!(system, "Window: {mode}");
    let _ = writeln!(system, "Route: {}", coords(&bundle.route));
    let _ = writeln!(
        system,
        "Think step by step, then finish with exactly one line in one of these forms: \
         `ACTION: MOVE <E|NE|NW|W|SW|SE>`, `ACTION: EXPAND_WINDOW`, `ACTION: BACKTRACK`, `ACTION: FAIL`."
    );

    let mut user = String::new();
    let _ = writeln!(user, "{MEMORY_MARKER}");
    if let Some(s) = &bundle.memory.summary {
        write_summary(&mut user, s);
    }
    for r in &bundle.memory.records {
        let around = Direction::ALL
            .iter()
            .zip(r.neighbors)
            .map(|(d, s)| format!("{d}={}", s.label()))
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(
            user,
            "visited {} count={} step={} around {}",
            r.coord, r.visit_count, r.last_step, around
        );
    }
    let _ = writeln!(user, "{OBSERVATION_MARKER}");
    for (c, s) in &bundle.sensor.cells {
        let _ = writeln!(user, "{c}: {}", s.label());
    }
    (system, user)
}

/// Full prompt text: the system, memory and observation segments in order.
pub fn render_prompt(bundle: &ObservationBundle) -> String {
    let (system, user) = render_messages(bundle);
    system + &user
}

/// Recover the sensor cells from a rendered prompt.
pub fn parse_sensor_segment(text: &str) -> Option<Vec<(HexCoord, CellStatus)>> {
    let start = text.find(OBSERVATION_MARKER)? + OBSERVATION_MARKER.len();
    text[start..]
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let (c, s) = l.split_once(": ")?;
            Some((c.parse().ok()?, CellStatus::from_label(s.trim())?))
        })
        .collect()
}

pub fn render_action(action: Action) -> String {
    format!("ACTION: {action}")
}

/// Reasoning text followed by the action line; parses back to `d` exactly.
pub fn render_response(d: &StepDecision) -> String {
    if d.rationale.is_empty() {
        render_action(d.action)
    } else {
        format!("{}\n{}", d.rationale, render_action(d.action))
    }
}

fn action_body(line: &str) -> Option<&str> {
    let t = line.trim();
    let head = t.get(..7)?;
    head.eq_ignore_ascii_case("ACTION:").then(|| t[7..].trim())
}

fn parse_body(body: &str) -> Result<Action, ActionParseError> {
    let mut words = body.split_whitespace();
    let verb = words.next().unwrap_or("");
    let rest: Vec<&str> = words.collect();
    let action = match verb.to_ascii_uppercase().as_str() {
        "MOVE" => {
            let dir = rest.first().copied().unwrap_or("");
            match Direction::from_name(dir) {
                Some(d) if rest.len() == 1 => Action::Move(d),
                _ => return Err(ActionParseError::BadDirection(rest.join(" "))),
            }
        }
        "EXPAND_WINDOW" => Action::ExpandWindow,
        "BACKTRACK" => Action::Backtrack,
        "FAIL" => Action::DeclareFailure,
        _ => return Err(ActionParseError::UnknownAction(body.to_string())),
    };
    if !rest.is_empty() && !matches!(action, Action::Move(_)) {
        return Err(ActionParseError::UnknownAction(body.to_string()));
    }
    Ok(action)
}

/// Parse the last `ACTION:` line; the text before it becomes the rationale.
pub fn parse_action_text(text: &str) -> Result<StepDecision, ActionParseError> {
    let mut offset = 0;
    let mut last = None;
    for line in text.split_inclusive('\n') {
        if let Some(body) = action_body(line) {
            last = Some((offset, body));
        }
        offset += line.len();
    }
    let (start, body) = last.ok_or(ActionParseError::NoActionLine)?;
    let action = parse_body(body)?;
    let before = &text[..start];
    let rationale = before
        .strip_suffix('\n')
        .map(|s| s.strip_suffix('\r').unwrap_or(s))
        .unwrap_or(before);
    Ok(StepDecision::new(action, rationale))
}

pub fn parse_action(text: &str) -> Result<Action, ActionParseError> {
    parse_action_text(text).map(|d| d.action)
}
