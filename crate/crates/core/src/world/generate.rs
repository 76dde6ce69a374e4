use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{axial_from_offset, OccupancyMap};
use crate::hex::{Direction, HexCoord};

/// Obstacle layout family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapStyle {
    /// Every cell blocked independently with probability `density`.
    #[default]
    Scatter,
    /// Clustered blobs grown by random walks until `density` is reached.
    Blobs,
    /// Straight wall segments and small U-shaped pockets until `density` is reached.
    Walls,
}

/// Independent Bernoulli obstacles.
///
/// The generator is ChaCha8 (`rand_chacha`) seeded through `seed_from_u64`;
/// cells are drawn in row-major order, one `f64` each, so a given
/// `(rows, cols, density, seed)` always yields the same map.
pub fn generate_map(rows: u32, cols: u32, density: f64, seed: u64) -> OccupancyMap {
    generate_map_with(MapStyle::Scatter, rows, cols, density, seed)
}

pub fn generate_map_with(
    style: MapStyle,
    rows: u32,
    cols: u32,
    density: f64,
    seed: u64,
) -> OccupancyMap {
    assert!(rows as u64 * cols as u64 >= 4, "domain needs at least 4 cells");
    assert!((0.0..1.0).contains(&density), "density must lie in [0, 1)");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let id = format!("{:?}-{rows}x{cols}-d{density}-s{seed}", style).to_lowercase();
    let mut map = OccupancyMap::empty(rows, cols, id);
    match style {
        MapStyle::Scatter => {
            for row in 0..rows as i32 {
                for col in 0..cols as i32 {
                    if rng.gen::<f64>() < density {
                        map.blocked.insert(axial_from_offset(col, row));
                    }
                }
            }
        }
        MapStyle::Blobs => grow_blobs(&mut map, density, &mut rng),
        MapStyle::Walls => place_walls(&mut map, density, &mut rng),
    }
    map
}

fn target_count(map: &OccupancyMap, density: f64) -> usize {
    (map.domain_size() as f64 * density).round() as usize
}

fn random_cell(map: &OccupancyMap, rng: &mut ChaCha8Rng) -> HexCoord {
    let row = rng.gen_range(0..map.rows as i32);
    let col = rng.gen_range(0..map.cols as i32);
    axial_from_offset(col, row)
}

fn grow_blobs(map: &mut OccupancyMap, density: f64, rng: &mut ChaCha8Rng) {
    let target = target_count(map, density);
    while map.blocked.len() < target {
        let mut c = random_cell(map, rng);
        let size = rng.gen_range(3..=12);
        for _ in 0..size {
            if map.blocked.len() >= target {
                break;
            }
            map.blocked.insert(c);
            let next = c.step(Direction::from_index(rng.gen_range(0..6)));
            if map.in_domain(next) {
                c = next;
            }
        }
    }
}

fn place_walls(map: &mut OccupancyMap, density: f64, rng: &mut ChaCha8Rng) {
    let target = target_count(map, density);
    let mut guard = 0;
    while map.blocked.len() < target && guard < 10_000 {
        guard += 1;
        let origin = random_cell(map, rng);
        let dir = Direction::from_index(rng.gen_range(0..6));
        let len = rng.gen_range(4..=9);
        let cells: Vec<HexCoord> = if rng.gen_bool(0.3) {
            // U pocket: a back segment with two arms turning the same way
            let arm = rng.gen_range(2..=4);
            let turn = dir.rotate(if rng.gen_bool(0.5) { 2 } else { -2 });
            let mut v = Vec::new();
            let mut c = origin;
            for _ in 0..arm {
                v.push(c);
                c = c.step(turn.opposite());
            }
            let back_start = origin;
            let mut c = back_start;
            for _ in 0..len {
                v.push(c);
                c = c.step(dir);
            }
            let mut c = back_start.step_n(dir, len as i32 - 1);
            for _ in 0..arm {
                v.push(c);
                c = c.step(turn.opposite());
            }
            v
        } else {
            (0..len).map(|i| origin.step_n(dir, i)).collect()
        };
        for c in cells {
            if map.in_domain(c) {
                map.blocked.insert(c);
            }
        }
    }
}

/// SplitMix64 mix of a base seed with a stream tag and an index.
pub fn derive_seed(base: u64, stream: u64, index: u64) -> u64 {
    let mut z = base
        .wrapping_add(stream.wrapping_mul(0xD1B5_4A32_D192_ED03))
        .wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_density_is_empty() {
        assert!(generate_map(10, 10, 0.0, 3).blocked().is_empty());
    }

    #[test]
    fn deterministic_in_seed() {
        let a = generate_map(30, 30, 0.2, 7);
        let b = generate_map(30, 30, 0.2, 7);
        assert_eq!(a, b);
        assert_ne!(a.blocked(), generate_map(30, 30, 0.2, 8).blocked());
    }

    #[test]
    fn blocked_count_within_binomial_interval() {
        // Exact Binomial(900, 0.2) quantiles at 0.0005 and 0.9995.
        let n = generate_map(30, 30, 0.2, 7).blocked().len();
        assert!((142..=220).contains(&n), "{n}");
    }

    #[test]
    fn styled_generators_reach_density() {
        for style in [MapStyle::Blobs, MapStyle::Walls] {
            let map = generate_map_with(style, 30, 30, 0.2, 11);
            let n = map.blocked().len();
            assert!(n >= 180, "{style:?}: {n}");
            assert!(map.blocked().iter().all(|c| map.in_domain(*c)));
            assert_eq!(map, generate_map_with(style, 30, 30, 0.2, 11));
        }
    }

    #[test]
    fn derived_seeds_differ() {
        let a = derive_seed(42, 1, 0);
        let b = derive_seed(42, 1, 1);
        let c = derive_seed(42, 2, 0);
        assert!(a != b && a != c && b != c);
        assert_eq!(a, derive_seed(42, 1, 0));
    }
}
