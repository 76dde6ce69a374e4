//! Adversarial continuous-obstacle scenarios and open-field layouts used by
//! the search-space scaling experiments.
//!
//! All layouts put the start–goal axis along a grid row (the E heading). A
//! straight wall is a `w x h` block of offset columns/rows across that axis,
//! midway between start and goal. A pocket is a one-cell-thick U whose
//! interior spans `w` rows and `h` columns; it opens toward the start and the
//! goal sits behind its closed side.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{axial_from_offset, is_solvable, offset_from_axial, OccupancyMap, TrialSpec};
use crate::hex::{Direction, HexCoord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WallShape {
    Straight,
    Pocket,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioParams {
    /// Wall thickness along the axis (straight) or interior width across it (pocket).
    pub wall_width: u32,
    /// Wall extent across the axis (straight) or arm length (pocket).
    pub wall_length: u32,
    pub shape: WallShape,
    /// Free cells between the start (and goal) and the wall.
    pub clearance: u32,
}

impl ScenarioParams {
    pub fn straight(w: u32, h: u32, clearance: u32) -> Self {
        Self {
            wall_width: w,
            wall_length: h,
            shape: WallShape::Straight,
            clearance,
        }
    }

    pub fn pocket(w: u32, h: u32, clearance: u32) -> Self {
        Self {
            wall_width: w,
            wall_length: h,
            shape: WallShape::Pocket,
            clearance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScenarioError {
    #[error("invalid scenario parameters: {0}")]
    InvalidParams(String),
}

struct Layout {
    rows: i32,
    cols: i32,
    blocked: Vec<(i32, i32)>,
    start: (i32, i32),
    goal: (i32, i32),
}

fn layout(p: &ScenarioParams) -> Result<Layout, ScenarioError> {
    if p.wall_width == 0 || p.wall_length == 0 {
        return Err(ScenarioError::InvalidParams(
            "wall width and length must be positive".into(),
        ));
    }
    if p.wall_width > 4096 || p.wall_length > 4096 || p.clearance > 4096 {
        return Err(ScenarioError::InvalidParams("footprint too large".into()));
    }
    let w = p.wall_width as i32;
    let h = p.wall_length as i32;
    let c = p.clearance as i32;
    let mut blocked = Vec::new();
    let layout = match p.shape {
        WallShape::Straight => {
            let margin = c + 2;
            let r0 = margin;
            let axis = r0 + (h - 1) / 2;
            let start_col = 1;
            let wall_col = start_col + c + 1;
            let goal_col = wall_col + w + c;
            for row in r0..r0 + h {
                for col in wall_col..wall_col + w {
                    blocked.push((col, row));
                }
            }
            Layout {
                rows: h + 2 * margin,
                cols: goal_col + 2,
                blocked,
                start: (start_col, axis),
                goal: (goal_col, axis),
            }
        }
        WallShape::Pocket => {
            let margin = c.max(1) + 1;
            let r0 = margin + 1;
            let axis = r0 + (w - 1) / 2;
            let start_col = 1;
            let back_col = start_col + c + 1 + h;
            let goal_col = back_col + 1 + c;
            for row in r0 - 1..=r0 + w {
                blocked.push((back_col, row));
            }
            for col in back_col - h..back_col {
                blocked.push((col, r0 - 1));
                blocked.push((col, r0 + w));
            }
            Layout {
                rows: w + 2 + 2 * margin,
                cols: goal_col + 2,
                blocked,
                start: (start_col, axis),
                goal: (goal_col, axis),
            }
        }
    };
    Ok(layout)
}

/// Build the scenario in the smallest domain that holds it.
pub fn make_wall_scenario(p: &ScenarioParams) -> Result<(OccupancyMap, TrialSpec), ScenarioError> {
    let l = layout(p)?;
    make_wall_scenario_in(p, l.rows as u32, l.cols as u32)
}

/// Build the scenario centred in a `rows x cols` domain.
pub fn make_wall_scenario_in(
    p: &ScenarioParams,
    rows: u32,
    cols: u32,
) -> Result<(OccupancyMap, TrialSpec), ScenarioError> {
    let l = layout(p)?;
    if (rows as i64) < l.rows as i64 || (cols as i64) < l.cols as i64 {
        return Err(ScenarioError::InvalidParams(format!(
            "footprint needs {}x{} cells, domain is {rows}x{cols}",
            l.rows, l.cols
        )));
    }
    // keep row parity so the odd-r shape is preserved
    let dr = ((rows as i32 - l.rows) / 2) & !1;
    let dc = (cols as i32 - l.cols) / 2;
    let place = |(col, row): (i32, i32)| axial_from_offset(col + dc, row + dr);
    let name = match p.shape {
        WallShape::Straight => "straight",
        WallShape::Pocket => "pocket",
    };
    let id = format!(
        "{name}-w{}-h{}-c{}",
        p.wall_width, p.wall_length, p.clearance
    );
    let map = OccupancyMap::with_blocked(rows, cols, id.clone(), l.blocked.iter().map(|x| place(*x)))
        .map_err(|e| ScenarioError::InvalidParams(e.to_string()))?;
    let spec = TrialSpec {
        map_id: id,
        start: place(l.start),
        goal: place(l.goal),
        pair_index: 0,
    };
    debug_assert!(is_solvable(&map, spec.start, spec.goal));
    Ok((map, spec))
}

/// An open field whose start and goal are exactly `length` steps apart.
///
/// The goal offset mixes `split` steps along `heading` with the rest along the
/// next direction counterclockwise. With `density > 0` scattered obstacles are
/// drawn from `seed`, keeping start and goal free and connected.
pub fn make_open_scenario(
    length: u32,
    heading: Direction,
    split: u32,
    density: f64,
    seed: u64,
) -> (OccupancyMap, TrialSpec) {
    assert!(length > 0 && split <= length);
    let margin = 3;
    let vec = HexCoord::ORIGIN
        .step_n(heading, split as i32)
        .step_n(heading.rotate(1), (length - split) as i32);
    let start_row = if vec.r >= 0 { margin } else { margin - vec.r };
    let rows = vec.r.abs() + 2 * margin + 1;
    let mut start_col = margin;
    let goal_col = |sc: i32| offset_from_axial(axial_from_offset(sc, start_row) + vec).0;
    let gc = goal_col(start_col);
    if gc < margin {
        start_col += margin - gc;
    }
    let gc = goal_col(start_col);
    let cols = start_col.max(gc) + margin + 1;
    let start = axial_from_offset(start_col, start_row);
    let goal = start + vec;
    let id = format!("open-l{length}-{heading}-{split}-d{density}-s{seed}");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut map = OccupancyMap::empty(rows as u32, cols as u32, id.clone());
        if density > 0.0 {
            let cells: Vec<HexCoord> = map.cells().collect();
            for c in cells {
                if c != start && c != goal && rng.gen::<f64>() < density {
                    map.blocked.insert(c);
                }
            }
        }
        if is_solvable(&map, start, goal) {
            let spec = TrialSpec {
                map_id: id,
                start,
                goal,
                pair_index: 0,
            };
            return (map, spec);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hex::hex_distance;
    use std::collections::{HashSet, VecDeque};

    fn component(map: &OccupancyMap, seed: HexCoord) -> HashSet<HexCoord> {
        let mut seen = HashSet::from([seed]);
        let mut queue = VecDeque::from([seed]);
        while let Some(c) = queue.pop_front() {
            for n in c.neighbors() {
                if map.is_blocked(n) && seen.insert(n) {
                    queue.push_back(n);
                }
            }
        }
        seen
    }

    #[test]
    fn straight_line_wall() {
        let (map, spec) = make_wall_scenario(&ScenarioParams::straight(1, 5, 3)).unwrap();
        assert_eq!(map.blocked().len(), 5);
        let first = *map.blocked().iter().next().unwrap();
        assert_eq!(component(&map, first).len(), 5);
        assert!(is_solvable(&map, spec.start, spec.goal));
        let (sc, sr) = offset_from_axial(spec.start);
        let (gc, gr) = offset_from_axial(spec.goal);
        assert_eq!(sr, gr);
        let (wc, _) = offset_from_axial(first);
        assert_eq!(wc - sc, gc - wc);
    }

    #[test]
    fn pocket_blocks_the_direct_line() {
        for k in [3u32, 4, 6, 9] {
            let (map, spec) = make_wall_scenario(&ScenarioParams::pocket(k, k, 2)).unwrap();
            assert!(is_solvable(&map, spec.start, spec.goal));
            let first = *map.blocked().iter().next().unwrap();
            assert_eq!(component(&map, first).len(), map.blocked().len());
            assert_eq!(map.blocked().len() as u32, (k + 2) + 2 * k);
            // the straight row from start to goal crosses the closed side
            let n = hex_distance(spec.start, spec.goal) as i32;
            let crossed = (0..=n).any(|i| map.is_blocked(spec.start.step_n(Direction::E, i)));
            assert!(crossed);
        }
    }

    #[test]
    fn scenarios_are_always_solvable() {
        for w in 1..4 {
            for h in 1..7 {
                for c in 0..3 {
                    for p in [ScenarioParams::straight(w, h, c), ScenarioParams::pocket(w, h, c)] {
                        let (map, spec) = make_wall_scenario(&p).unwrap();
                        assert!(is_solvable(&map, spec.start, spec.goal), "{p:?}");
                        assert!(map.is_free(spec.start) && map.is_free(spec.goal));
                    }
                }
            }
        }
    }

    #[test]
    fn invalid_params() {
        assert!(make_wall_scenario(&ScenarioParams::straight(0, 5, 1)).is_err());
        let p = ScenarioParams::pocket(8, 8, 2);
        assert!(make_wall_scenario_in(&p, 5, 5).is_err());
        let (big, spec) = make_wall_scenario_in(&p, 40, 40).unwrap();
        assert!(is_solvable(&big, spec.start, spec.goal));
    }

    #[test]
    fn open_scenario_distance() {
        for (len, split) in [(10, 0), (10, 4), (25, 25), (7, 3)] {
            for heading in Direction::ALL {
                let (map, spec) = make_open_scenario(len, heading, split, 0.0, 1);
                assert_eq!(hex_distance(spec.start, spec.goal), len);
                assert!(map.is_free(spec.start) && map.is_free(spec.goal), "{heading} {len}");
            }
        }
        let (map, spec) = make_open_scenario(20, Direction::NE, 5, 0.1, 9);
        assert!(!map.blocked().is_empty());
        assert!(is_solvable(&map, spec.start, spec.goal));
    }
}
