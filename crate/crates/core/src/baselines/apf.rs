use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::agent::{FailureReason, Outcome};
use crate::hex::{bearing_direction, hex_distance, HexCoord};
use crate::world::{sense, CellStatus, OccupancyMap};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApfParams {
    /// Repulsion range in grid steps.
    pub rho: u32,
    pub k_rep: f64,
    /// Steps without a new potential minimum before giving up.
    pub t_stall: u32,
    pub sensor_radius: u32,
    pub max_steps: u32,
}

impl Default for ApfParams {
    fn default() -> Self {
        Self {
            rho: 3,
            k_rep: 2.0,
            t_stall: 20,
            sensor_radius: 2,
            max_steps: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApfResult {
    pub path: Vec<HexCoord>,
    pub observed_cells: BTreeSet<HexCoord>,
    pub outcome: Outcome,
}

impl ApfResult {
    pub fn path_length(&self) -> u32 {
        self.path.len().saturating_sub(1) as u32
    }

    pub fn search_space(&self) -> u32 {
        self.observed_cells.len() as u32
    }
}

fn potential(c: HexCoord, goal: HexCoord, obstacles: &HashSet<HexCoord>, p: &ApfParams) -> f64 {
    let attraction = hex_distance(c, goal) as f64;
    let repulsion: f64 = c
        .disc(p.rho)
        .into_iter()
        .filter(|b| obstacles.contains(b))
        .map(|b| p.k_rep / hex_distance(b, c) as f64)
        .sum();
    attraction + repulsion
}

/// Real-time potential-field planner with a limited sensor.
///
/// Each step senses, then moves to the free neighbor of least potential
/// `U(c) = d(c, goal) + sum over known obstacles within rho of k_rep / d(b, c)`.
/// Gives up with `local_minimum` after `t_stall` steps without improving the
/// best potential seen so far.
pub fn apf_realtime(map: &OccupancyMap, start: HexCoord, goal: HexCoord, p: &ApfParams) -> ApfResult {
    let mut pos = start;
    let mut path = vec![start];
    let mut observed = BTreeSet::from([start]);
    let mut obstacles: HashSet<HexCoord> = HashSet::new();
    let mut best = f64::INFINITY;
    let mut stall = 0;
    let outcome = loop {
        if pos == goal {
            break Outcome::Success;
        }
        if path.len() as u32 > p.max_steps {
            break Outcome::Failure(FailureReason::StepLimit);
        }
        let obs = sense(map, pos, p.sensor_radius);
        for (c, s) in &obs.cells {
            match s {
                CellStatus::OutOfBounds => {}
                CellStatus::Blocked => {
                    obstacles.insert(*c);
                    observed.insert(*c);
                }
                CellStatus::Free => {
                    observed.insert(*c);
                }
            }
        }
        let order = bearing_direction(pos, goal).rotated_order();
        let next = order
            .iter()
            .map(|d| pos.step(*d))
            .filter(|n| obs.status(*n) == Some(CellStatus::Free))
            .map(|n| (potential(n, goal, &obstacles, p), n))
            .reduce(|a, b| if b.0 < a.0 { b } else { a });
        let Some((u, n)) = next else {
            break Outcome::Failure(FailureReason::LocalMinimum);
        };
        if u < best - 1e-9 {
            best = u;
            stall = 0;
        } else {
            stall += 1;
            if stall >= p.t_stall {
                break Outcome::Failure(FailureReason::LocalMinimum);
            }
        }
        pos = n;
        path.push(n);
    };
    ApfResult {
        path,
        observed_cells: observed,
        outcome,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::{make_wall_scenario, ScenarioParams};

    #[test]
    fn empty_map_is_pure_attraction() {
        let map = OccupancyMap::empty(12, 12, "e");
        let (s, g) = (HexCoord::new(2, 2), HexCoord::new(8, 5));
        let r = apf_realtime(&map, s, g, &ApfParams::default());
        assert_eq!(r.outcome, Outcome::Success);
        assert_eq!(r.path_length(), hex_distance(s, g));
    }

    #[test]
    fn pocket_traps_the_field() {
        for k in [4, 6, 8] {
            let (map, spec) = make_wall_scenario(&ScenarioParams::pocket(k, k, 2)).unwrap();
            let r = apf_realtime(&map, spec.start, spec.goal, &ApfParams::default());
            assert_eq!(r.outcome, Outcome::Failure(FailureReason::LocalMinimum), "k={k}");
            assert!(r.path.iter().all(|c| map.is_free(*c)));
        }
    }
}
