use serde::{Deserialize, Serialize};

use super::{Action, BeliefMap, BeliefStatus, StepDecision};
use crate::hex::HexCoord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    /// The landing cell is not one of the current cell's neighbors.
    NonAdjacent,
    /// The landing cell is a known obstacle or outside the domain.
    Collision,
    /// Backtrack requested with no previous cell on the path.
    NothingToBacktrack,
    /// The backend could not produce a parsable action.
    Unparsable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckResult {
    Accept,
    Reject(RejectReason),
}

/// Topology and obstacle check for a move from `from` onto `to`.
pub fn check_landing(from: HexCoord, to: HexCoord, belief: &BeliefMap) -> CheckResult {
    if !from.is_adjacent(to) {
        return CheckResult::Reject(RejectReason::NonAdjacent);
    }
    match belief.status(to) {
        BeliefStatus::Blocked | BeliefStatus::OutOfBounds => {
            CheckResult::Reject(RejectReason::Collision)
        }
        BeliefStatus::Free | BeliefStatus::Unknown => CheckResult::Accept,
    }
}

/// Vet a decision before execution. `previous` is the cell a backtrack would land on.
pub fn self_check(
    d: &StepDecision,
    belief: &BeliefMap,
    pos: HexCoord,
    previous: Option<HexCoord>,
) -> CheckResult {
    match d.action {
        Action::Move(dir) => check_landing(pos, pos.step(dir), belief),
        Action::Backtrack => match previous {
            Some(prev) => check_landing(pos, prev, belief),
            None => CheckResult::Reject(RejectReason::NothingToBacktrack),
        },
        Action::ExpandWindow | Action::DeclareFailure => CheckResult::Accept,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hex::Direction;
    use crate::world::{axial_from_offset, sense, OccupancyMap};

    #[test]
    fn rejects_non_adjacent_landing() {
        let belief = BeliefMap::new();
        assert_eq!(
            check_landing(HexCoord::new(0, 0), HexCoord::new(2, 0), &belief),
            CheckResult::Reject(RejectReason::NonAdjacent)
        );
    }

    #[test]
    fn collision_and_accept() {
        let c = axial_from_offset(3, 3);
        let b = c.step(Direction::NE);
        let map = OccupancyMap::with_blocked(7, 7, "m", [b]).unwrap();
        let mut belief = BeliefMap::new();
        belief.update(&sense(&map, c, 1), c).unwrap();
        let mv = |d| StepDecision::new(Action::Move(d), "");
        assert_eq!(
            self_check(&mv(Direction::NE), &belief, c, None),
            CheckResult::Reject(RejectReason::Collision)
        );
        assert_eq!(self_check(&mv(Direction::E), &belief, c, None), CheckResult::Accept);
        // unknown cells are allowed; the sensor resolves them before execution
        let far = c.step(Direction::E);
        assert_eq!(
            self_check(&mv(Direction::E), &belief, far, None),
            CheckResult::Accept
        );
        let corner = axial_from_offset(0, 0);
        let mut edge = BeliefMap::new();
        edge.update(&sense(&map, corner, 1), corner).unwrap();
        assert_eq!(
            self_check(&mv(Direction::W), &edge, corner, None),
            CheckResult::Reject(RejectReason::Collision)
        );
        assert_eq!(
            self_check(&StepDecision::new(Action::Backtrack, ""), &belief, c, None),
            CheckResult::Reject(RejectReason::NothingToBacktrack)
        );
    }
}
