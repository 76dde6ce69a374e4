use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::aow::{FrontierLog, Side};
use super::BeliefMap;
use crate::hex::{hex_distance, HexCoord};
use crate::world::{CellStatus, Observation};

/// What the agent saw the last time it stood on `coord`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoryRecord {
    pub coord: HexCoord,
    /// Neighbor statuses in canonical direction order.
    pub neighbors: [CellStatus; 6],
    pub visit_count: u32,
    pub last_step: u32,
}

/// The periodic context summary; all seven sections are always present.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateSummary {
    pub current_position: HexCoord,
    pub destination: HexCoord,
    pub global_obstacle_list: Vec<HexCoord>,
    pub path_history: Vec<HexCoord>,
    pub verified_patterns: Vec<String>,
    pub hypotheses: Vec<String>,
    pub key_decision_points: Vec<(HexCoord, String)>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoryStore {
    pub records: BTreeMap<HexCoord, MemoryRecord>,
    pub summary: Option<StateSummary>,
    pub turns_since_summary: u32,
}

impl MemoryStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Store the local record for the occupied cell `obs.center`.
    pub fn record(&mut self, obs: &Observation, visit_count: u32, step: u32) {
        let c = obs.center;
        let neighbors = c.neighbors().map(|n| {
            obs.status(n)
                .expect("observation covers the immediate neighbors")
        });
        self.records.insert(
            c,
            MemoryRecord {
                coord: c,
                neighbors,
                visit_count,
                last_step: step,
            },
        );
    }

    /// Count one dialogue turn; true when a summary is due (the counter then resets).
    pub fn tick(&mut self, k_summary: u32) -> bool {
        self.turns_since_summary += 1;
        if self.turns_since_summary >= k_summary {
            self.turns_since_summary = 0;
            true
        } else {
            false
        }
    }

    pub fn set_summary(&mut self, summary: StateSummary) {
        self.summary = Some(summary);
        self.turns_since_summary = 0;
    }
}

/// Records within `r_mem` of `pos`, nearest first, then canonical order.
pub fn retrieve_memory(store: &MemoryStore, pos: HexCoord, r_mem: u32) -> Vec<MemoryRecord> {
    let mut out: Vec<&MemoryRecord> = store
        .records
        .values()
        .filter(|r| hex_distance(r.coord, pos) <= r_mem)
        .collect();
    out.sort_by_key(|r| (hex_distance(r.coord, pos), r.coord));
    out.into_iter().cloned().collect()
}

pub fn summarize_context(
    path: &[HexCoord],
    goal: HexCoord,
    belief: &BeliefMap,
    frontiers: &[FrontierLog],
) -> StateSummary {
    let mut verified = Vec::new();
    let mut hypotheses = Vec::new();
    let mut key_points = Vec::new();
    for f in frontiers {
        key_points.push((f.anchor, format!("frontier entered from {}", f.origin)));
        for side in [Side::Positive, Side::Negative] {
            let t = f.side(side);
            match (t.cells.first(), t.cells.last()) {
                (Some(first), Some(last)) => verified.push(format!(
                    "obstacle at {} has a {} boundary of {} cells from {} to {}",
                    f.anchor,
                    side,
                    t.cells.len(),
                    first,
                    last
                )),
                _ => verified.push(format!(
                    "obstacle at {} leaves no room on the {} side of {}",
                    f.anchor, side, f.origin
                )),
            }
            match t.endpoint {
                Some(e) if f.chosen != Some(side) => {
                    hypotheses.push(format!("passage via {e} on the {side} side is untested"))
                }
                Some(_) => {}
                None => {
                    let last = t.cells.last().copied().unwrap_or(f.origin);
                    hypotheses.push(format!(
                        "{side} boundary of obstacle at {} continues past {last} ({})",
                        f.anchor, t.status
                    ));
                }
            }
        }
        let exit = match (f.chosen, f.chosen.and_then(|s| f.side(s).endpoint)) {
            (Some(s), Some(e)) => format!("frontier exit: {s} side toward {e}"),
            _ => "frontier exit: no passage".to_string(),
        };
        key_points.push((f.origin, exit));
    }
    StateSummary {
        current_position: path.last().copied().unwrap_or(goal),
        destination: goal,
        global_obstacle_list: belief.blocked_cells().collect(),
        path_history: path.to_vec(),
        verified_patterns: verified,
        hypotheses,
        key_decision_points: key_points,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hex::Direction;
    use crate::world::{axial_from_offset, sense, OccupancyMap};

    fn store_at(cells: &[HexCoord]) -> MemoryStore {
        let map = OccupancyMap::empty(30, 30, "e");
        let mut store = MemoryStore::new();
        for (i, c) in cells.iter().enumerate() {
            store.record(&sense(&map, *c, 1), 1, i as u32);
        }
        store
    }

    #[test]
    fn empty_store_retrieves_nothing() {
        assert!(retrieve_memory(&MemoryStore::new(), HexCoord::new(3, 3), 3).is_empty());
    }

    #[test]
    fn retrieval_threshold_and_order() {
        let pos = axial_from_offset(10, 10);
        let cells = [
            pos.step_n(Direction::W, 5),
            pos.step_n(Direction::E, 3),
            pos.step(Direction::NE),
        ];
        let store = store_at(&cells);
        let got: Vec<_> = retrieve_memory(&store, pos, 3).iter().map(|r| r.coord).collect();
        assert_eq!(got, vec![cells[2], cells[1]]);
        // equal distances fall back to canonical order, independent of insertion order
        let ring = pos.neighbors();
        let mut rev = ring;
        rev.reverse();
        let a: Vec<_> = retrieve_memory(&store_at(&ring), pos, 1).iter().map(|r| r.coord).collect();
        let b: Vec<_> = retrieve_memory(&store_at(&rev), pos, 1).iter().map(|r| r.coord).collect();
        assert_eq!(a, b);
        let mut sorted = ring.to_vec();
        sorted.sort();
        assert_eq!(a, sorted);
    }

    #[test]
    fn tick_resets_after_k_turns() {
        let mut store = MemoryStore::new();
        let due: Vec<bool> = (0..7).map(|_| store.tick(3)).collect();
        assert_eq!(due, [false, false, true, false, false, true, false]);
    }

    #[test]
    fn summary_projects_belief() {
        let c = axial_from_offset(4, 4);
        let blocked = [c.step(Direction::E), c.step(Direction::SW)];
        let map = OccupancyMap::with_blocked(9, 9, "m", blocked).unwrap();
        let mut belief = BeliefMap::new();
        belief.update(&sense(&map, c, 1), c).unwrap();
        let goal = axial_from_offset(8, 4);
        let s = summarize_context(&[c], goal, &belief, &[]);
        let mut expected = blocked.to_vec();
        expected.sort();
        assert_eq!(s.global_obstacle_list, expected);
        assert_eq!(s.current_position, c);
        assert_eq!(s.destination, goal);
        assert!(s.key_decision_points.is_empty());
    }
}
