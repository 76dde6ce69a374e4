use serde::{Deserialize, Serialize};

use super::OccupancyMap;
use crate::hex::HexCoord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Free,
    Blocked,
    OutOfBounds,
}

impl CellStatus {
    pub fn label(self) -> &'static str {
        match self {
            CellStatus::Free => "FREE",
            CellStatus::Blocked => "BLOCKED",
            CellStatus::OutOfBounds => "OOB",
        }
    }

    pub fn from_label(s: &str) -> Option<CellStatus> {
        match s {
            "FREE" => Some(CellStatus::Free),
            "BLOCKED" => Some(CellStatus::Blocked),
            "OOB" => Some(CellStatus::OutOfBounds),
            _ => None,
        }
    }

    pub fn is_passable(self) -> bool {
        self == CellStatus::Free
    }
}

/// One noise-free range reading: every cell of the disc around `center`
/// except the center itself, in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observation {
    pub center: HexCoord,
    pub radius: u32,
    pub cells: Vec<(HexCoord, CellStatus)>,
}

impl Observation {
    pub fn status(&self, c: HexCoord) -> Option<CellStatus> {
        self.cells.iter().find(|(x, _)| *x == c).map(|(_, s)| *s)
    }

    pub fn in_domain(&self) -> impl Iterator<Item = &(HexCoord, CellStatus)> {
        self.cells.iter().filter(|(_, s)| *s != CellStatus::OutOfBounds)
    }
}

/// Status of one cell, as a pinpoint reading.
pub fn probe_cell(map: &OccupancyMap, c: HexCoord) -> CellStatus {
    if !map.in_domain(c) {
        CellStatus::OutOfBounds
    } else if map.is_blocked(c) {
        CellStatus::Blocked
    } else {
        CellStatus::Free
    }
}

pub fn sense(map: &OccupancyMap, center: HexCoord, radius: u32) -> Observation {
    debug_assert!(map.in_domain(center), "sensor centre {center} outside domain");
    let cells = center
        .disc(radius)
        .into_iter()
        .filter(|c| *c != center)
        .map(|c| (c, probe_cell(map, c)))
        .collect();
    Observation {
        center,
        radius,
        cells,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hex::hex_distance;
    use crate::world::axial_from_offset;

    #[test]
    fn ring_counts() {
        let map = OccupancyMap::empty(20, 20, "e");
        let c = axial_from_offset(10, 10);
        assert_eq!(sense(&map, c, 1).cells.len(), 6);
        // 3 r (r + 1) for r = 2, cross-checked by enumerating the disc
        let brute = (-2..=2)
            .flat_map(|dq| (-2..=2).map(move |dr| HexCoord::new(c.q + dq, c.r + dr)))
            .filter(|x| *x != c && hex_distance(*x, c) <= 2)
            .count();
        assert_eq!(brute, 18);
        assert_eq!(sense(&map, c, 2).cells.len(), 18);
    }

    #[test]
    fn reports_blocked_and_out_of_bounds() {
        let c = axial_from_offset(0, 0);
        let blocked = c.step(crate::hex::Direction::E);
        let map = OccupancyMap::with_blocked(5, 5, "m", [blocked]).unwrap();
        let obs = sense(&map, c, 1);
        assert_eq!(obs.status(blocked), Some(CellStatus::Blocked));
        assert_eq!(obs.cells.len(), 6);
        let oob = obs.cells.iter().filter(|(_, s)| *s == CellStatus::OutOfBounds).count();
        assert!(oob >= 3);
        for (x, s) in &obs.cells {
            assert_eq!(*s == CellStatus::OutOfBounds, !map.in_domain(*x));
        }
        assert_eq!(obs, sense(&map, c, 1));
    }
}
