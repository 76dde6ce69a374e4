use serde::{Deserialize, Serialize};

use super::{run_planner, PlannerSpec};
use crate::hex::{Direction, HexCoord};
use crate::world::{
    axial_from_offset, make_open_scenario, make_wall_scenario, offset_from_axial, OccupancyMap,
    ScenarioParams, TrialSpec,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingFamily {
    /// Obstacle-free field, start and goal `L` apart.
    OpenL,
    /// Straight `k x k` wall across the start-goal axis, `k` clear of both ends.
    WallHw,
    /// U-shaped pocket with a `k x k` interior facing the start, `k` clear of both ends.
    PocketK,
}

impl ScalingFamily {
    pub fn name(self) -> &'static str {
        match self {
            ScalingFamily::OpenL => "open_L",
            ScalingFamily::WallHw => "wall_hw",
            ScalingFamily::PocketK => "pocket_k",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "open" | "open_L" | "open_l" => Some(ScalingFamily::OpenL),
            "wall" | "wall_hw" => Some(ScalingFamily::WallHw),
            "pocket" | "pocket_k" => Some(ScalingFamily::PocketK),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalePoint {
    pub scale: u32,
    pub mean_search_space: f64,
    pub successes: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub family: ScalingFamily,
    pub planner: String,
    pub points: Vec<ScalePoint>,
    /// Least squares on `ln S = intercept + slope * ln scale`.
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    /// `exp(intercept)`: the fitted constant in `S ~ c * scale^slope`.
    pub prefactor: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScalingError {
    #[error("need at least 4 scales, got {0}")]
    TooFewScales(usize),
    #[error("repetitions must be positive")]
    NoRepetitions,
    #[error("scale must be positive")]
    ZeroScale,
}

/// The `rep`-th instance of a family at one scale.
///
/// Open fields rotate the heading and the split between the two nearest
/// directions. Walls and pockets are scaled copies of one layout (clearance
/// equals the scale), shifted down one row on odd repetitions so both
/// row parities of the offset layout are sampled.
pub fn scaling_scenario(family: ScalingFamily, scale: u32, rep: u32) -> (OccupancyMap, TrialSpec) {
    let params = match family {
        ScalingFamily::OpenL => {
            let heading = Direction::ALL[rep as usize % 6];
            let split = scale * (rep % 3) / 2;
            return make_open_scenario(scale, heading, split, 0.0, rep as u64);
        }
        ScalingFamily::WallHw => ScenarioParams::straight(scale, scale, scale),
        ScalingFamily::PocketK => ScenarioParams::pocket(scale, scale, scale),
    };
    let (map, spec) = make_wall_scenario(&params).expect("positive scale");
    if rep % 2 == 0 {
        return (map, spec);
    }
    let down = |c: HexCoord| {
        let (col, row) = offset_from_axial(c);
        axial_from_offset(col, row + 1)
    };
    let shifted = OccupancyMap::with_blocked(
        map.rows + 1,
        map.cols,
        map.map_id.clone(),
        map.blocked().iter().map(|c| down(*c)),
    )
    .expect("shifted layout fits");
    let spec = TrialSpec {
        start: down(spec.start),
        goal: down(spec.goal),
        ..spec
    };
    (shifted, spec)
}

/// Returns `(slope, intercept, r2)` of a log-log least-squares line.
pub fn fit_loglog(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let r2 = if syy > 0.0 {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    } else {
        1.0
    };
    (slope, intercept, r2)
}

pub fn scaling_experiment(
    family: ScalingFamily,
    scales: &[u32],
    repetitions: u32,
    planners: &[PlannerSpec],
) -> Result<Vec<ScalingFit>, ScalingError> {
    if scales.len() < 4 {
        return Err(ScalingError::TooFewScales(scales.len()));
    }
    if repetitions == 0 {
        return Err(ScalingError::NoRepetitions);
    }
    if scales.contains(&0) {
        return Err(ScalingError::ZeroScale);
    }
    let instances: Vec<Vec<(OccupancyMap, TrialSpec)>> = scales
        .iter()
        .map(|&k| (0..repetitions).map(|rep| scaling_scenario(family, k, rep)).collect())
        .collect();
    let fits = planners
        .iter()
        .map(|p| {
            let points: Vec<ScalePoint> = scales
                .iter()
                .zip(&instances)
                .map(|(&scale, inst)| {
                    let ok: Vec<u32> = inst
                        .iter()
                        .map(|(map, spec)| run_planner(p, map, spec, 0))
                        .filter(|r| r.success)
                        .map(|r| r.search_space)
                        .collect();
                    ScalePoint {
                        scale,
                        mean_search_space: ok.iter().map(|s| *s as f64).sum::<f64>()
                            / ok.len().max(1) as f64,
                        successes: ok.len() as u32,
                    }
                })
                .collect();
            let xy: Vec<(f64, f64)> = points
                .iter()
                .filter(|pt| pt.successes > 0)
                .map(|pt| (pt.scale as f64, pt.mean_search_space))
                .collect();
            let (slope, intercept, r2) = fit_loglog(&xy);
            ScalingFit {
                family,
                planner: p.name.clone(),
                points,
                slope,
                intercept,
                r2,
                prefactor: intercept.exp(),
            }
        })
        .collect();
    Ok(fits)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let pts: Vec<(f64, f64)> = [2.0, 4.0, 8.0, 16.0].iter().map(|x: &f64| (*x, 3.0 * x.powi(2))).collect();
        let (slope, intercept, r2) = fit_loglog(&pts);
        assert!((slope - 2.0).abs() < 1e-12);
        assert!((intercept.exp() - 3.0).abs() < 1e-9);
        assert!((r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn needs_four_scales() {
        assert_eq!(
            scaling_experiment(ScalingFamily::OpenL, &[1, 2, 3], 1, &[]),
            Err(ScalingError::TooFewScales(3))
        );
    }

    #[test]
    fn parity_shift_keeps_the_pair_solvable() {
        for family in [ScalingFamily::PocketK, ScalingFamily::WallHw] {
            for rep in 0..2 {
                let (map, spec) = scaling_scenario(family, 5, rep);
                assert!(crate::world::is_solvable(&map, spec.start, spec.goal));
                assert_eq!(map.blocked().len(), scaling_scenario(family, 5, 0).0.blocked().len());
            }
        }
    }

    #[test]
    fn open_instances_have_exact_length() {
        for rep in 0..6 {
            let (_, spec) = scaling_scenario(ScalingFamily::OpenL, 10, rep);
            assert_eq!(crate::hex::hex_distance(spec.start, spec.goal), 10);
        }
    }
}
