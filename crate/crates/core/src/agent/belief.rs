use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::hex::HexCoord;
use crate::world::{CellStatus, Observation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BeliefStatus {
    Unknown,
    Free,
    Blocked,
    OutOfBounds,
}

impl From<CellStatus> for BeliefStatus {
    fn from(s: CellStatus) -> Self {
        match s {
            CellStatus::Free => BeliefStatus::Free,
            CellStatus::Blocked => BeliefStatus::Blocked,
            CellStatus::OutOfBounds => BeliefStatus::OutOfBounds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cell {cell} was believed {known:?} but sensed {sensed:?}")]
pub struct ContradictionError {
    pub cell: HexCoord,
    pub known: CellStatus,
    pub sensed: CellStatus,
}

/// What the agent knows about the world: sensed statuses plus visit counts.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BeliefMap {
    cells: BTreeMap<HexCoord, CellStatus>,
    visits: BTreeMap<HexCoord, u32>,
}

impl BeliefMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn status(&self, c: HexCoord) -> BeliefStatus {
        self.cells
            .get(&c)
            .map_or(BeliefStatus::Unknown, |s| (*s).into())
    }

    pub fn is_free(&self, c: HexCoord) -> bool {
        self.status(c) == BeliefStatus::Free
    }

    pub fn visit_count(&self, c: HexCoord) -> u32 {
        self.visits.get(&c).copied().unwrap_or(0)
    }

    /// Merge a single-cell reading; true when the cell was unknown.
    pub fn learn(&mut self, c: HexCoord, sensed: CellStatus) -> Result<bool, ContradictionError> {
        match self.cells.get(&c) {
            Some(known) if *known == sensed => Ok(false),
            Some(known) => Err(ContradictionError {
                cell: c,
                known: *known,
                sensed,
            }),
            None => {
                self.cells.insert(c, sensed);
                Ok(true)
            }
        }
    }

    /// Merge a reading without counting a visit; returns how many cells were new.
    pub fn absorb(&mut self, obs: &Observation) -> Result<usize, ContradictionError> {
        let mut fresh = 0;
        for (c, s) in &obs.cells {
            fresh += self.learn(*c, *s)? as usize;
        }
        Ok(fresh)
    }

    /// Merge the reading taken at `current` and count a visit there.
    pub fn update(&mut self, obs: &Observation, current: HexCoord) -> Result<(), ContradictionError> {
        debug_assert_eq!(obs.center, current);
        self.absorb(obs)?;
        self.learn(current, CellStatus::Free)?;
        *self.visits.entry(current).or_insert(0) += 1;
        Ok(())
    }

    /// Known obstacles in canonical order (out-of-domain cells excluded).
    pub fn blocked_cells(&self) -> impl Iterator<Item = HexCoord> + '_ {
        self.cells
            .iter()
            .filter(|(_, s)| **s == CellStatus::Blocked)
            .map(|(c, _)| *c)
    }

    /// Every in-domain cell whose status is known, in canonical order.
    pub fn known_cells(&self) -> impl Iterator<Item = HexCoord> + '_ {
        self.cells
            .iter()
            .filter(|(_, s)| **s != CellStatus::OutOfBounds)
            .map(|(c, _)| *c)
    }

    /// Shortest route from `from` to `to` through believed-free cells,
    /// excluding `from` itself.
    pub fn free_route(&self, from: HexCoord, to: HexCoord) -> Option<Vec<HexCoord>> {
        if from == to {
            return Some(Vec::new());
        }
        let mut parent = HashMap::from([(from, from)]);
        let mut queue = VecDeque::from([from]);
        while let Some(c) = queue.pop_front() {
            for n in c.neighbors() {
                if !self.is_free(n) || parent.contains_key(&n) {
                    continue;
                }
                parent.insert(n, c);
                if n == to {
                    let mut route = vec![n];
                    let mut cur = c;
                    while cur != from {
                        route.push(cur);
                        cur = parent[&cur];
                    }
                    route.reverse();
                    return Some(route);
                }
                queue.push_back(n);
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hex::Direction;
    use crate::world::{axial_from_offset, sense, OccupancyMap};

    fn setup() -> (OccupancyMap, HexCoord, HexCoord) {
        let c = axial_from_offset(4, 4);
        let b = c.step(Direction::E);
        (OccupancyMap::with_blocked(9, 9, "m", [b]).unwrap(), c, b)
    }

    #[test]
    fn unknown_becomes_blocked() {
        let (map, c, b) = setup();
        let mut belief = BeliefMap::new();
        assert_eq!(belief.status(b), BeliefStatus::Unknown);
        belief.update(&sense(&map, c, 1), c).unwrap();
        assert_eq!(belief.status(b), BeliefStatus::Blocked);
        assert_eq!(belief.status(c), BeliefStatus::Free);
        assert_eq!(belief.visit_count(c), 1);
        assert_eq!(belief.blocked_cells().collect::<Vec<_>>(), vec![b]);
    }

    #[test]
    fn resensing_is_idempotent() {
        let (map, c, _) = setup();
        let mut belief = BeliefMap::new();
        let obs = sense(&map, c, 1);
        assert_eq!(belief.absorb(&obs).unwrap(), 6);
        let before = belief.clone();
        assert_eq!(belief.absorb(&obs).unwrap(), 0);
        assert_eq!(belief, before);
    }

    #[test]
    fn contradiction_is_reported() {
        let (map, c, b) = setup();
        let mut belief = BeliefMap::new();
        belief.update(&sense(&map, c, 1), c).unwrap();
        let mut other = map.clone();
        other.unblock(b);
        let n = c.step(Direction::NE);
        other.block(n).unwrap();
        let err = belief.absorb(&sense(&other, c, 1)).unwrap_err();
        assert_eq!(err.cell, n);
        assert_eq!(err.known, CellStatus::Free);
        assert_eq!(err.sensed, CellStatus::Blocked);
    }

    #[test]
    fn route_through_known_free_cells() {
        let (map, c, b) = setup();
        let mut belief = BeliefMap::new();
        belief.update(&sense(&map, c, 2), c).unwrap();
        let goal = b.step(Direction::E);
        let route = belief.free_route(c, goal).unwrap();
        assert_eq!(route.len(), 3);
        assert_eq!(*route.last().unwrap(), goal);
        assert!(!route.contains(&b));
        assert!(belief.free_route(c, goal.step(Direction::E).step(Direction::E)).is_none());
    }
}
