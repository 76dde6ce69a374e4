//! Ground-truth environments: bounded hex maps, generators, scenarios, the
//! idealized range sensor and the on-disk formats.

mod generate;
mod io;
mod reach;
mod scenario;
mod sensor;
mod suite;

use std::collections::BTreeSet;

use crate::hex::HexCoord;

pub use generate::{derive_seed, generate_map, generate_map_with, MapStyle};
pub use io::{load_map, load_map_file, save_map, save_map_file, MapFile, PairEntry, ParseError};
pub use reach::{is_solvable, reachable_from};
pub use scenario::{
    make_open_scenario, make_wall_scenario, make_wall_scenario_in, ScenarioError, ScenarioParams,
    WallShape,
};
pub use sensor::{probe_cell, sense, CellStatus, Observation};
pub use suite::{
    sample_start_goal, sample_start_goal_counted, MapEntry, PairRecord, SampleError, Suite,
    SuiteError, SuiteManifest, SuiteParams, TrialSpec,
};

/// Rectangular odd-r domain with a set of blocked cells, addressed axially.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccupancyMap {
    pub rows: u32,
    pub cols: u32,
    pub map_id: String,
    blocked: BTreeSet<HexCoord>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cell {0} lies outside the {1}x{2} domain")]
pub struct OutOfDomain(pub HexCoord, pub u32, pub u32);

impl OccupancyMap {
    pub fn empty(rows: u32, cols: u32, map_id: impl Into<String>) -> Self {
        assert!(rows > 0 && cols > 0, "domain must be non-empty");
        Self {
            rows,
            cols,
            map_id: map_id.into(),
            blocked: BTreeSet::new(),
        }
    }

    pub fn with_blocked(
        rows: u32,
        cols: u32,
        map_id: impl Into<String>,
        blocked: impl IntoIterator<Item = HexCoord>,
    ) -> Result<Self, OutOfDomain> {
        let mut map = Self::empty(rows, cols, map_id);
        for c in blocked {
            map.block(c)?;
        }
        Ok(map)
    }

    pub fn block(&mut self, c: HexCoord) -> Result<(), OutOfDomain> {
        if !self.in_domain(c) {
            return Err(OutOfDomain(c, self.rows, self.cols));
        }
        self.blocked.insert(c);
        Ok(())
    }

    pub fn unblock(&mut self, c: HexCoord) {
        self.blocked.remove(&c);
    }

    pub fn blocked(&self) -> &BTreeSet<HexCoord> {
        &self.blocked
    }

    pub fn domain_size(&self) -> usize {
        self.rows as usize * self.cols as usize
    }

    pub fn in_domain(&self, c: HexCoord) -> bool {
        if c.r < 0 || c.r >= self.rows as i32 {
            return false;
        }
        let (col, _) = offset_from_axial(c);
        col >= 0 && col < self.cols as i32
    }

    pub fn is_blocked(&self, c: HexCoord) -> bool {
        self.blocked.contains(&c)
    }

    pub fn is_free(&self, c: HexCoord) -> bool {
        self.in_domain(c) && !self.blocked.contains(&c)
    }

    /// Every domain cell in row-major order (which is also canonical order).
    pub fn cells(&self) -> impl Iterator<Item = HexCoord> + '_ {
        (0..self.rows as i32)
            .flat_map(move |row| (0..self.cols as i32).map(move |col| axial_from_offset(col, row)))
    }

    pub fn free_cells(&self) -> impl Iterator<Item = HexCoord> + '_ {
        self.cells().filter(move |c| !self.blocked.contains(c))
    }

    pub fn free_neighbors(&self, c: HexCoord) -> impl Iterator<Item = HexCoord> + '_ {
        c.neighbors().into_iter().filter(move |n| self.is_free(*n))
    }
}

/// Odd-r offset `(col, row)` to axial.
pub fn axial_from_offset(col: i32, row: i32) -> HexCoord {
    HexCoord::new(col - (row - (row & 1)) / 2, row)
}

/// Axial to odd-r offset `(col, row)`.
pub fn offset_from_axial(c: HexCoord) -> (i32, i32) {
    (c.q + (c.r - (c.r & 1)) / 2, c.r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offset_round_trip() {
        for row in -3..7 {
            for col in -3..7 {
                let c = axial_from_offset(col, row);
                assert_eq!(offset_from_axial(c), (col, row));
            }
        }
    }

    #[test]
    fn domain_membership_and_size() {
        let map = OccupancyMap::empty(4, 5, "m");
        assert_eq!(map.cells().count(), 20);
        assert_eq!(map.domain_size(), 20);
        assert!(map.cells().all(|c| map.in_domain(c)));
        assert!(!map.in_domain(HexCoord::new(-1, 0)));
        // row 2 starts one column to the left in axial q
        assert!(map.in_domain(HexCoord::new(-1, 2)));
        assert!(!map.in_domain(HexCoord::new(0, 4)));
    }

    #[test]
    fn blocking_outside_domain_fails() {
        let mut map = OccupancyMap::empty(3, 3, "m");
        assert!(map.block(HexCoord::new(5, 5)).is_err());
        map.block(HexCoord::new(1, 1)).unwrap();
        assert!(map.is_blocked(HexCoord::new(1, 1)));
        assert!(!map.is_free(HexCoord::new(1, 1)));
    }

    #[test]
    fn cells_are_in_canonical_order() {
        let map = OccupancyMap::empty(5, 6, "m");
        let cells: Vec<_> = map.cells().collect();
        let mut sorted = cells.clone();
        sorted.sort();
        assert_eq!(cells, sorted);
    }
}
