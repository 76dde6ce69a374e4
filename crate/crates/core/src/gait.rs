//! Lowering of a cell path into the two-step rolling gait of a spherical
//! tensegrity (8 equilateral and 12 isosceles support faces).
//!
//! The face model is a reconstruction, not a hardware wiring. Equilateral
//! faces are labelled by the eight 3-bit codes `v`; the isosceles face
//! between `v` and `v ^ (1 << b)` is the cube edge along axis `b`. A move
//! rolls over axis `b`:
//!
//! ```text
//!   E(v) --contract 3v+b--> I(edge) --contract 24+edge--> E(v ^ 1<<b)
//! ```
//!
//! Axis table, keyed by (direction, pattern):
//!
//! ```text
//!   direction   pattern A   pattern B
//!   E, W        0           0
//!   NE, SW      1           1
//!   NW, SE      2           2
//! ```
//!
//! Opposite directions share an axis, so a move followed by its reverse
//! returns to the same face. The pattern alternates every move and is
//! recorded on each sub-step; it selects the mirrored cable set on the
//! robot and leaves the face labels unchanged.

use serde::{Deserialize, Serialize};

use crate::hex::{Direction, HexCoord};

pub const EQUILATERAL_FACES: u8 = 8;
pub const ISOSCELES_FACES: u8 = 12;
const FIRST_EDGE_BASE: u16 = 0;
const SECOND_EDGE_BASE: u16 = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TriangleKind {
    Equilateral,
    Isosceles,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SupportTriangle {
    pub kind: TriangleKind,
    pub index: u8,
}

impl SupportTriangle {
    pub fn equilateral(index: u8) -> Self {
        Self {
            kind: TriangleKind::Equilateral,
            index,
        }
    }

    pub fn isosceles(index: u8) -> Self {
        Self {
            kind: TriangleKind::Isosceles,
            index,
        }
    }

    pub fn in_range(&self) -> bool {
        match self.kind {
            TriangleKind::Equilateral => self.index < EQUILATERAL_FACES,
            TriangleKind::Isosceles => self.index < ISOSCELES_FACES,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pattern {
    A,
    B,
}

impl Pattern {
    fn flip(self) -> Self {
        match self {
            Pattern::A => Pattern::B,
            Pattern::B => Pattern::A,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaitSubStep {
    pub contract_edge: u16,
    pub from: SupportTriangle,
    pub to: SupportTriangle,
    pub pattern: Pattern,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaitPlan {
    pub source_path: Vec<HexCoord>,
    /// Physical moves; one per path step, two for a strict-mode detour.
    pub moves: Vec<Direction>,
    pub substeps: Vec<GaitSubStep>,
}

impl GaitPlan {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("gait plan serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GaitConfig {
    /// Only E, NW and SW are rolled directly; the other three become a
    /// two-move detour `d+1, d-1` through a neighboring cell.
    pub strict_three_direction: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GaitError {
    #[error("path is empty")]
    EmptyPath,
    #[error("path breaks between positions {index} and {}", index + 1)]
    InvalidPath { index: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GaitViolation {
    CountMismatch { moves: usize, substeps: usize },
    KindAlternation { index: usize },
    Discontinuity { index: usize },
    IndexOutOfRange { index: usize },
    EdgeMismatch { index: usize },
    PatternAlternation { index: usize },
    WrongStart,
    PathMismatch,
}

fn axis(d: Direction) -> u8 {
    (d.index() % 3) as u8
}

fn native(d: Direction) -> bool {
    d.index() % 2 == 0
}

/// Isosceles face index of the cube edge leaving `v` along `axis`.
fn edge_index(v: u8, axis: u8) -> u8 {
    let low = v & !(1 << axis);
    let rest = match axis {
        0 => low >> 1,
        1 => (low & 1) | ((low >> 2) << 1),
        _ => low & 3,
    };
    axis * 4 + rest
}

fn edge_ends(e: u8) -> (u8, u8) {
    let (axis, rest) = (e / 4, e % 4);
    let low = match axis {
        0 => rest << 1,
        1 => (rest & 1) | ((rest >> 1) << 2),
        _ => rest,
    };
    (low, low | (1 << axis))
}

fn roll(v: u8, d: Direction, pattern: Pattern) -> [GaitSubStep; 2] {
    let b = axis(d);
    let e = edge_index(v, b);
    let next = v ^ (1 << b);
    [
        GaitSubStep {
            contract_edge: FIRST_EDGE_BASE + 3 * v as u16 + b as u16,
            from: SupportTriangle::equilateral(v),
            to: SupportTriangle::isosceles(e),
            pattern,
        },
        GaitSubStep {
            contract_edge: SECOND_EDGE_BASE + e as u16,
            from: SupportTriangle::isosceles(e),
            to: SupportTriangle::equilateral(next),
            pattern,
        },
    ]
}

pub fn compile_path_to_gait(path: &[HexCoord]) -> Result<GaitPlan, GaitError> {
    compile_path_to_gait_with(path, GaitConfig::default())
}

pub fn compile_path_to_gait_with(
    path: &[HexCoord],
    cfg: GaitConfig,
) -> Result<GaitPlan, GaitError> {
    if path.is_empty() {
        return Err(GaitError::EmptyPath);
    }
    let mut moves = Vec::new();
    for (index, w) in path.windows(2).enumerate() {
        let d = w[0]
            .direction_to(w[1])
            .ok_or(GaitError::InvalidPath { index })?;
        if cfg.strict_three_direction && !native(d) {
            moves.push(d.rotate(1));
            moves.push(d.rotate(-1));
        } else {
            moves.push(d);
        }
    }
    let mut v = 0u8;
    let mut pattern = Pattern::A;
    let mut substeps = Vec::with_capacity(moves.len() * 2);
    for d in &moves {
        let pair = roll(v, *d, pattern);
        v = pair[1].to.index;
        substeps.extend(pair);
        pattern = pattern.flip();
    }
    Ok(GaitPlan {
        source_path: path.to_vec(),
        moves,
        substeps,
    })
}

/// Kinematic lint; returns every violation found (empty when the plan is sound).
pub fn validate_gait(plan: &GaitPlan) -> Vec<GaitViolation> {
    let mut out = Vec::new();
    let subs = &plan.substeps;
    if subs.len() != 2 * plan.moves.len() || subs.len() % 2 != 0 {
        out.push(GaitViolation::CountMismatch {
            moves: plan.moves.len(),
            substeps: subs.len(),
        });
    }
    if let Some(first) = subs.first() {
        if first.from != SupportTriangle::equilateral(0) {
            out.push(GaitViolation::WrongStart);
        }
    }
    for (i, s) in subs.iter().enumerate() {
        let expected_from = if i % 2 == 0 {
            TriangleKind::Equilateral
        } else {
            TriangleKind::Isosceles
        };
        if s.from.kind != expected_from || s.to.kind == s.from.kind {
            out.push(GaitViolation::KindAlternation { index: i });
        }
        if !s.from.in_range() || !s.to.in_range() {
            out.push(GaitViolation::IndexOutOfRange { index: i });
            continue;
        }
        if i > 0 && subs[i - 1].to != s.from {
            out.push(GaitViolation::Discontinuity { index: i });
        }
        if !edge_consistent(s) {
            out.push(GaitViolation::EdgeMismatch { index: i });
        }
        if i % 2 == 1 && subs[i - 1].pattern != s.pattern
            || i % 2 == 0 && i > 0 && subs[i - 1].pattern == s.pattern
        {
            out.push(GaitViolation::PatternAlternation { index: i });
        }
    }
    // each move's first contraction must roll over the move's axis
    for (m, d) in plan.moves.iter().enumerate() {
        if let Some(s) = subs.get(2 * m) {
            if s.from.kind == TriangleKind::Equilateral
                && s.contract_edge != FIRST_EDGE_BASE + 3 * s.from.index as u16 + axis(*d) as u16
            {
                out.push(GaitViolation::EdgeMismatch { index: 2 * m });
            }
        }
    }
    if !moves_trace_path(&plan.source_path, &plan.moves) {
        out.push(GaitViolation::PathMismatch);
    }
    out.dedup();
    out
}

fn edge_consistent(s: &GaitSubStep) -> bool {
    match (s.from.kind, s.to.kind) {
        (TriangleKind::Equilateral, TriangleKind::Isosceles) => {
            let v = s.from.index;
            let id = s.contract_edge.wrapping_sub(FIRST_EDGE_BASE);
            id / 3 == v as u16 && id < 24 && edge_index(v, (id % 3) as u8) == s.to.index
        }
        (TriangleKind::Isosceles, TriangleKind::Equilateral) => {
            let (a, b) = edge_ends(s.from.index);
            s.contract_edge == SECOND_EDGE_BASE + s.from.index as u16
                && (s.to.index == a || s.to.index == b)
        }
        _ => false,
    }
}

/// The moves walk from the first path cell through every later path cell
/// in order, taking at most one intermediate cell per path step.
fn moves_trace_path(path: &[HexCoord], moves: &[Direction]) -> bool {
    let Some(&start) = path.first() else {
        return moves.is_empty();
    };
    let mut pos = start;
    let mut mi = 0;
    for &target in &path[1..] {
        let mut taken = 0;
        while pos != target {
            let Some(d) = moves.get(mi) else {
                return false;
            };
            pos = pos.step(*d);
            mi += 1;
            taken += 1;
            if taken > 2 {
                return false;
            }
        }
        if taken == 0 {
            return false;
        }
    }
    mi == moves.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: i32) -> Vec<HexCoord> {
        (0..=n).map(|q| HexCoord::new(q, 0)).collect()
    }

    #[test]
    fn edge_labels_are_a_bijection() {
        let mut seen = std::collections::HashSet::new();
        for v in 0..8u8 {
            for b in 0..3u8 {
                let e = edge_index(v, b);
                assert!(e < 12);
                let (lo, hi) = edge_ends(e);
                assert!(v == lo || v == hi);
                assert_eq!(lo ^ hi, 1 << b);
                seen.insert(e);
            }
        }
        assert_eq!(seen.len(), 12);
    }

    #[test]
    fn three_moves_six_substeps() {
        let plan = compile_path_to_gait(&line(3)).unwrap();
        assert_eq!(plan.substeps.len(), 6);
        let kinds: Vec<_> = plan.substeps.iter().map(|s| s.from.kind).collect();
        use TriangleKind::*;
        assert_eq!(kinds, [Equilateral, Isosceles, Equilateral, Isosceles, Equilateral, Isosceles]);
        assert_eq!(plan.substeps[5].to.kind, Equilateral);
        assert!(validate_gait(&plan).is_empty());
    }

    #[test]
    fn single_cell_is_empty_plan() {
        let plan = compile_path_to_gait(&[HexCoord::new(2, 2)]).unwrap();
        assert!(plan.substeps.is_empty());
        assert!(validate_gait(&plan).is_empty());
        assert_eq!(compile_path_to_gait(&[]), Err(GaitError::EmptyPath));
    }

    #[test]
    fn broken_chain_rejected() {
        let path = [HexCoord::new(0, 0), HexCoord::new(1, 0), HexCoord::new(3, 0)];
        assert_eq!(compile_path_to_gait(&path), Err(GaitError::InvalidPath { index: 1 }));
    }

    #[test]
    fn there_and_back_returns_to_start_face() {
        let path = [HexCoord::new(0, 0), HexCoord::new(1, -1), HexCoord::new(0, 0)];
        let plan = compile_path_to_gait(&path).unwrap();
        assert_eq!(plan.substeps.last().unwrap().to, SupportTriangle::equilateral(0));
    }

    #[test]
    fn spliced_duplicate_is_caught() {
        let mut plan = compile_path_to_gait(&line(3)).unwrap();
        let dup = plan.substeps[2];
        plan.substeps.insert(3, dup);
        assert!(!validate_gait(&plan).is_empty());
    }

    #[test]
    fn e_to_e_is_alternation_violation() {
        let mut plan = compile_path_to_gait(&line(2)).unwrap();
        plan.substeps[1].from = plan.substeps[0].from;
        plan.substeps[1].to = SupportTriangle::equilateral(1);
        let v = validate_gait(&plan);
        assert!(v.contains(&GaitViolation::KindAlternation { index: 1 }), "{v:?}");
    }

    #[test]
    fn strict_mode_detours_non_native() {
        let path = [HexCoord::new(0, 0), HexCoord::new(1, -1)];
        let plan = compile_path_to_gait_with(
            &path,
            GaitConfig {
                strict_three_direction: true,
            },
        )
        .unwrap();
        assert_eq!(plan.moves, vec![Direction::NW, Direction::E]);
        assert_eq!(plan.substeps.len(), 4);
        assert!(validate_gait(&plan).is_empty());
        for d in Direction::ALL {
            let p = [HexCoord::new(0, 0), HexCoord::new(0, 0).step(d)];
            let plan = compile_path_to_gait_with(&p, GaitConfig { strict_three_direction: true }).unwrap();
            assert!(plan.moves.iter().all(|m| native(*m)));
            assert!(validate_gait(&plan).is_empty());
        }
    }

    #[test]
    fn json_round_trip() {
        let plan = compile_path_to_gait(&line(2)).unwrap();
        let back: GaitPlan = serde_json::from_str(&plan.to_json()).unwrap();
        assert_eq!(back, plan);
        assert!(plan.to_json().contains("\"equilateral\""));
    }
}
