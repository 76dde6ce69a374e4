use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::hex::{euclidean, HexCoord};
use crate::world::OccupancyMap;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResult {
    /// Start to goal inclusive; empty on failure.
    pub path: Vec<HexCoord>,
    /// Distinct cells popped with a finalized cost (the goal included).
    pub expanded_count: u32,
    pub success: bool,
    pub optimal_cost: Option<u32>,
}

impl SearchResult {
    fn failure(expanded_count: u32) -> Self {
        Self {
            path: Vec::new(),
            expanded_count,
            success: false,
            optimal_cost: None,
        }
    }

    pub fn path_length(&self) -> u32 {
        self.path.len().saturating_sub(1) as u32
    }
}

struct Node {
    f: f64,
    h: f64,
    cell: HexCoord,
    g: u32,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl Ord for Node {
    // reversed so that BinaryHeap pops the smallest (f, h, cell)
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then_with(|| other.h.total_cmp(&self.h))
            .then_with(|| other.cell.cmp(&self.cell))
    }
}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn reconstruct(parent: &HashMap<HexCoord, HexCoord>, start: HexCoord, goal: HexCoord) -> Vec<HexCoord> {
    let mut path = vec![goal];
    let mut cur = goal;
    while cur != start {
        cur = parent[&cur];
        path.push(cur);
    }
    path.reverse();
    path
}

fn best_first(
    map: &OccupancyMap,
    start: HexCoord,
    goal: HexCoord,
    heuristic: impl Fn(HexCoord) -> f64,
) -> SearchResult {
    if !map.is_free(start) || !map.is_free(goal) {
        return SearchResult::failure(0);
    }
    let mut open = BinaryHeap::new();
    let mut best_g: HashMap<HexCoord, u32> = HashMap::from([(start, 0)]);
    let mut parent = HashMap::new();
    let mut closed = HashSet::new();
    let h0 = heuristic(start);
    open.push(Node {
        f: h0,
        h: h0,
        cell: start,
        g: 0,
    });
    while let Some(Node { cell, g, .. }) = open.pop() {
        if !closed.insert(cell) {
            continue;
        }
        if cell == goal {
            return SearchResult {
                path: reconstruct(&parent, start, goal),
                expanded_count: closed.len() as u32,
                success: true,
                optimal_cost: Some(g),
            };
        }
        for n in map.free_neighbors(cell) {
            let ng = g + 1;
            if closed.contains(&n) || best_g.get(&n).is_some_and(|&old| old <= ng) {
                continue;
            }
            best_g.insert(n, ng);
            parent.insert(n, cell);
            let h = heuristic(n);
            open.push(Node {
                f: ng as f64 + h,
                h,
                cell: n,
                g: ng,
            });
        }
    }
    SearchResult::failure(closed.len() as u32)
}

/// A* on the known map with the Euclidean heuristic between cell centers.
///
/// Queue order is f, then smaller h, then canonical coordinate order.
pub fn astar(map: &OccupancyMap, start: HexCoord, goal: HexCoord) -> SearchResult {
    best_first(map, start, goal, |c| euclidean(c, goal))
}

pub fn dijkstra(map: &OccupancyMap, start: HexCoord, goal: HexCoord) -> SearchResult {
    best_first(map, start, goal, |_| 0.0)
}

/// Plain breadth-first search; the reference optimum.
pub fn bfs_oracle(map: &OccupancyMap, start: HexCoord, goal: HexCoord) -> SearchResult {
    if !map.is_free(start) || !map.is_free(goal) {
        return SearchResult::failure(0);
    }
    let mut parent = HashMap::new();
    let mut dist = HashMap::from([(start, 0u32)]);
    let mut queue = VecDeque::from([start]);
    let mut expanded = 0;
    while let Some(c) = queue.pop_front() {
        expanded += 1;
        if c == goal {
            return SearchResult {
                path: reconstruct(&parent, start, goal),
                expanded_count: expanded,
                success: true,
                optimal_cost: Some(dist[&c]),
            };
        }
        let d = dist[&c];
        for n in map.free_neighbors(c) {
            if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(n) {
                e.insert(d + 1);
                parent.insert(n, c);
                queue.push_back(n);
            }
        }
    }
    SearchResult::failure(expanded)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hex::hex_distance;
    use crate::world::{generate_map, is_solvable};

    fn valid(map: &OccupancyMap, r: &SearchResult, start: HexCoord, goal: HexCoord) {
        assert_eq!(r.path.first(), Some(&start));
        assert_eq!(r.path.last(), Some(&goal));
        assert!(r.path.windows(2).all(|w| w[0].is_adjacent(w[1])));
        assert!(r.path.iter().all(|c| map.is_free(*c)));
        assert_eq!(Some(r.path_length()), r.optimal_cost);
    }

    #[test]
    fn empty_map_straight_line() {
        let map = OccupancyMap::empty(10, 10, "e");
        let (s, g) = (HexCoord::new(0, 0), HexCoord::new(4, 0));
        let a = astar(&map, s, g);
        let d = dijkstra(&map, s, g);
        assert_eq!(a.optimal_cost, Some(4));
        assert_eq!(d.optimal_cost, Some(4));
        assert!(d.expanded_count >= a.expanded_count);
        // the heuristic is exact along a straight row: only the row is expanded
        assert_eq!(a.expanded_count, 5);
        valid(&map, &a, s, g);
    }

    #[test]
    fn start_equals_goal() {
        let map = OccupancyMap::empty(4, 4, "e");
        let c = HexCoord::new(1, 1);
        for r in [astar(&map, c, c), dijkstra(&map, c, c), bfs_oracle(&map, c, c)] {
            assert_eq!(r.optimal_cost, Some(0));
            assert_eq!(r.path, vec![c]);
        }
    }

    #[test]
    fn sealed_goal_fails() {
        let goal = crate::world::axial_from_offset(5, 5);
        let map = OccupancyMap::with_blocked(10, 10, "ring", goal.neighbors()).unwrap();
        let s = crate::world::axial_from_offset(0, 0);
        for r in [astar(&map, s, goal), dijkstra(&map, s, goal), bfs_oracle(&map, s, goal)] {
            assert!(!r.success);
            assert!(r.path.is_empty());
            assert_eq!(r.optimal_cost, None);
        }
    }

    #[test]
    fn optimality_triad_and_dominance() {
        for seed in 0..60 {
            let map = generate_map(16, 16, 0.25, seed);
            let free: Vec<HexCoord> = map.free_cells().collect();
            let (s, g) = (free[0], free[free.len() - 1]);
            let a = astar(&map, s, g);
            let d = dijkstra(&map, s, g);
            let b = bfs_oracle(&map, s, g);
            assert_eq!(a.success, is_solvable(&map, s, g));
            assert_eq!(a.optimal_cost, b.optimal_cost);
            assert_eq!(d.optimal_cost, b.optimal_cost);
            assert!(a.expanded_count <= d.expanded_count);
            if a.success {
                valid(&map, &a, s, g);
                valid(&map, &d, s, g);
                valid(&map, &b, s, g);
                assert!(a.path_length() >= hex_distance(s, g));
            }
        }
    }
}
