use std::collections::{HashSet, VecDeque};

use super::OccupancyMap;
use crate::hex::HexCoord;

/// Free cells connected to `start` (including `start` when it is free).
pub fn reachable_from(map: &OccupancyMap, start: HexCoord) -> HashSet<HexCoord> {
    let mut seen = HashSet::new();
    if !map.is_free(start) {
        return seen;
    }
    seen.insert(start);
    let mut queue = VecDeque::from([start]);
    while let Some(c) = queue.pop_front() {
        for n in map.free_neighbors(c) {
            if seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    seen
}

/// Ground-truth reachability by breadth-first search over free cells.
pub fn is_solvable(map: &OccupancyMap, start: HexCoord, goal: HexCoord) -> bool {
    if !map.is_free(start) || !map.is_free(goal) {
        return false;
    }
    if start == goal {
        return true;
    }
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(c) = queue.pop_front() {
        for n in map.free_neighbors(c) {
            if n == goal {
                return true;
            }
            if seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::{axial_from_offset, generate_map};

    #[test]
    fn empty_map_is_solvable() {
        let map = OccupancyMap::empty(10, 10, "e");
        assert!(is_solvable(&map, axial_from_offset(0, 0), axial_from_offset(9, 9)));
    }

    #[test]
    fn enclosed_goal_is_not() {
        let goal = axial_from_offset(5, 5);
        let map = OccupancyMap::with_blocked(10, 10, "ring", goal.neighbors()).unwrap();
        assert!(!is_solvable(&map, axial_from_offset(0, 0), goal));
        assert!(is_solvable(&map, goal, goal));
    }

    #[test]
    fn agrees_with_reachable_set() {
        for seed in 0..20 {
            let map = generate_map(12, 12, 0.35, seed);
            let start = map.free_cells().next().unwrap();
            let reach = reachable_from(&map, start);
            for goal in map.free_cells() {
                assert_eq!(is_solvable(&map, start, goal), reach.contains(&goal));
            }
        }
    }
}
