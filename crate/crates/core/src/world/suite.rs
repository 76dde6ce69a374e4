use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    derive_seed, generate_map_with, is_solvable, load_map_file, reachable_from, save_map_file,
    MapFile, MapStyle, OccupancyMap, PairEntry, ParseError,
};
use crate::hex::{hex_distance, HexCoord};

const RANDOM_ATTEMPTS: u32 = 1000;
const SEED_STREAM_MAP: u64 = 1;
const SEED_STREAM_PAIR: u64 = 2;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TrialSpec {
    pub map_id: String,
    pub start: HexCoord,
    pub goal: HexCoord,
    pub pair_index: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SampleError {
    #[error("no free, connected start-goal pair at distance >= {min_separation} in map {map_id}")]
    NoValidPair { map_id: String, min_separation: u32 },
}

pub fn sample_start_goal(
    map: &OccupancyMap,
    seed: u64,
    min_separation: u32,
) -> Result<TrialSpec, SampleError> {
    sample_start_goal_counted(map, seed, min_separation).map(|(s, _)| s)
}

/// Like [`sample_start_goal`], also returning how many random draws were
/// rejected before a qualifying pair was found.
pub fn sample_start_goal_counted(
    map: &OccupancyMap,
    seed: u64,
    min_separation: u32,
) -> Result<(TrialSpec, u32), SampleError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let free: Vec<HexCoord> = map.free_cells().collect();
    let no_pair = || SampleError::NoValidPair {
        map_id: map.map_id.clone(),
        min_separation,
    };
    if free.len() < 2 {
        return Err(no_pair());
    }
    let spec = |start, goal| TrialSpec {
        map_id: map.map_id.clone(),
        start,
        goal,
        pair_index: 0,
    };
    for attempt in 0..RANDOM_ATTEMPTS {
        let s = free[rng.gen_range(0..free.len())];
        let g = free[rng.gen_range(0..free.len())];
        if s != g && hex_distance(s, g) >= min_separation.max(1) && is_solvable(map, s, g) {
            return Ok((spec(s, g), attempt));
        }
    }
    // Exhaustive fallback: uniform choice among every qualifying ordered pair.
    let mut component = std::collections::HashMap::new();
    let mut next_id = 0usize;
    for c in &free {
        if !component.contains_key(c) {
            for x in reachable_from(map, *c) {
                component.insert(x, next_id);
            }
            next_id += 1;
        }
    }
    let qualifies = |a: &HexCoord, b: &HexCoord| {
        a != b && component[a] == component[b] && hex_distance(*a, *b) >= min_separation.max(1)
    };
    let count = free
        .iter()
        .flat_map(|a| free.iter().map(move |b| (a, b)))
        .filter(|(a, b)| qualifies(a, b))
        .count();
    if count == 0 {
        return Err(no_pair());
    }
    let pick = rng.gen_range(0..count);
    let (s, g) = free
        .iter()
        .flat_map(|a| free.iter().map(move |b| (a, b)))
        .filter(|(a, b)| qualifies(a, b))
        .nth(pick)
        .expect("pick < count");
    Ok((spec(*s, *g), RANDOM_ATTEMPTS))
}

/// Generator parameters for a benchmark suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteParams {
    pub rows: u32,
    pub cols: u32,
    pub density: f64,
    pub maps: u32,
    pub pairs: u32,
    pub seed: u64,
    pub min_separation: u32,
    #[serde(default)]
    pub style: MapStyle,
}

impl Default for SuiteParams {
    fn default() -> Self {
        Self {
            rows: 30,
            cols: 30,
            density: 0.2,
            maps: 100,
            pairs: 10,
            seed: 42,
            min_separation: 10,
            style: MapStyle::Scatter,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairRecord {
    pub pair_index: u32,
    pub seed: u64,
    pub start: HexCoord,
    pub goal: HexCoord,
    pub resamples: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapEntry {
    pub map_id: String,
    pub file: String,
    pub seed: u64,
    pub pairs: Vec<PairRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteManifest {
    pub format: String,
    pub params: SuiteParams,
    pub maps: Vec<MapEntry>,
}

pub const SUITE_FORMAT: &str = "hexsuite/v1";

#[derive(Debug, thiserror::Error)]
pub enum SuiteError {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("manifest: {0}")]
    Manifest(#[from] serde_json::Error),
    #[error("map {path}: {source}")]
    Map { path: PathBuf, source: ParseError },
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error("suite inconsistency: {0}")]
    Mismatch(String),
}

/// A generated or loaded benchmark suite: the manifest plus every map.
#[derive(Debug, Clone)]
pub struct Suite {
    pub manifest: SuiteManifest,
    pub maps: Vec<OccupancyMap>,
}

impl Suite {
    pub fn generate(params: SuiteParams) -> Result<Self, SuiteError> {
        let mut maps = Vec::with_capacity(params.maps as usize);
        let mut entries = Vec::with_capacity(params.maps as usize);
        for i in 0..params.maps {
            let seed = derive_seed(params.seed, SEED_STREAM_MAP, i as u64);
            let mut map =
                generate_map_with(params.style, params.rows, params.cols, params.density, seed);
            map.map_id = format!("map_{i:03}");
            let mut pairs = Vec::with_capacity(params.pairs as usize);
            for j in 0..params.pairs {
                let pair_seed = derive_seed(seed, SEED_STREAM_PAIR, j as u64);
                let (spec, resamples) =
                    sample_start_goal_counted(&map, pair_seed, params.min_separation)?;
                pairs.push(PairRecord {
                    pair_index: j,
                    seed: pair_seed,
                    start: spec.start,
                    goal: spec.goal,
                    resamples,
                });
            }
            entries.push(MapEntry {
                file: format!("maps/{}.json", map.map_id),
                map_id: map.map_id.clone(),
                seed,
                pairs,
            });
            maps.push(map);
        }
        Ok(Suite {
            manifest: SuiteManifest {
                format: SUITE_FORMAT.to_string(),
                params,
                maps: entries,
            },
            maps,
        })
    }

    /// Trials in manifest order; the position in this list is the trial id.
    pub fn trials(&self) -> Vec<(usize, TrialSpec)> {
        self.manifest
            .maps
            .iter()
            .enumerate()
            .flat_map(|(i, m)| {
                m.pairs.iter().map(move |p| {
                    (
                        i,
                        TrialSpec {
                            map_id: m.map_id.clone(),
                            start: p.start,
                            goal: p.goal,
                            pair_index: p.pair_index,
                        },
                    )
                })
            })
            .collect()
    }

    pub fn write(&self, dir: impl AsRef<Path>) -> Result<(), SuiteError> {
        let dir = dir.as_ref();
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| SuiteError::Io { path, source }
        };
        fs::create_dir_all(dir.join("maps")).map_err(io(dir))?;
        for (map, entry) in self.maps.iter().zip(&self.manifest.maps) {
            let pairs = entry
                .pairs
                .iter()
                .map(|p| PairEntry {
                    start: p.start,
                    goal: p.goal,
                })
                .collect();
            let path = dir.join(&entry.file);
            save_map_file(&path, &MapFile::from_map(map, pairs)).map_err(io(&path))?;
        }
        let path = dir.join("manifest.json");
        let mut text = serde_json::to_string_pretty(&self.manifest)?;
        text.push('\n');
        fs::write(&path, text).map_err(io(&path))?;
        Ok(())
    }

    pub fn load(dir: impl AsRef<Path>) -> Result<Self, SuiteError> {
        let dir = dir.as_ref();
        let path = dir.join("manifest.json");
        let text = fs::read_to_string(&path).map_err(|source| SuiteError::Io {
            path: path.clone(),
            source,
        })?;
        let manifest: SuiteManifest = serde_json::from_str(&text)?;
        if manifest.format != SUITE_FORMAT {
            return Err(SuiteError::Mismatch(format!(
                "unsupported manifest format {:?}",
                manifest.format
            )));
        }
        let mut maps = Vec::with_capacity(manifest.maps.len());
        for entry in &manifest.maps {
            let path = dir.join(&entry.file);
            let (map, _) = load_map_file(&path).map_err(|source| SuiteError::Map {
                path: path.clone(),
                source,
            })?;
            if map.map_id != entry.map_id {
                return Err(SuiteError::Mismatch(format!(
                    "{} holds map {:?}, manifest says {:?}",
                    path.display(),
                    map.map_id,
                    entry.map_id
                )));
            }
            for p in &entry.pairs {
                if !is_solvable(&map, p.start, p.goal) {
                    return Err(SuiteError::Mismatch(format!(
                        "pair {} of {} is not solvable",
                        p.pair_index, entry.map_id
                    )));
                }
            }
            maps.push(map);
        }
        Ok(Suite { manifest, maps })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_map_pair() {
        let map = OccupancyMap::empty(10, 10, "e");
        let spec = sample_start_goal(&map, 3, 5).unwrap();
        assert!(map.is_free(spec.start) && map.is_free(spec.goal));
        assert!(hex_distance(spec.start, spec.goal) >= 5);
        assert!(is_solvable(&map, spec.start, spec.goal));
        assert_eq!(spec, sample_start_goal(&map, 3, 5).unwrap());
    }

    #[test]
    fn single_free_cell_has_no_pair() {
        let mut map = OccupancyMap::empty(3, 3, "full");
        let cells: Vec<_> = map.cells().collect();
        for c in &cells[1..] {
            map.block(*c).unwrap();
        }
        assert!(matches!(
            sample_start_goal(&map, 0, 1),
            Err(SampleError::NoValidPair { .. })
        ));
    }

    #[test]
    fn exhaustive_fallback_finds_rare_pair() {
        // a long corridor along row 0; everything else blocked
        let mut map = OccupancyMap::empty(6, 12, "corridor");
        let cells: Vec<_> = map.cells().collect();
        for c in cells {
            if c.r != 0 {
                map.block(c).unwrap();
            }
        }
        let spec = sample_start_goal(&map, 1, 11).unwrap();
        assert_eq!(hex_distance(spec.start, spec.goal), 11);
        assert!(sample_start_goal(&map, 1, 12).is_err());
    }

    #[test]
    fn small_suite_round_trip() {
        let params = SuiteParams {
            maps: 3,
            pairs: 4,
            ..SuiteParams::default()
        };
        let suite = Suite::generate(params).unwrap();
        assert_eq!(suite.trials().len(), 12);
        for (i, spec) in suite.trials() {
            assert!(is_solvable(&suite.maps[i], spec.start, spec.goal));
            assert!(hex_distance(spec.start, spec.goal) >= 10);
        }
        let dir = tempfile::tempdir().unwrap();
        suite.write(dir.path()).unwrap();
        let loaded = Suite::load(dir.path()).unwrap();
        assert_eq!(loaded.manifest, suite.manifest);
        assert_eq!(loaded.maps, suite.maps);
    }
}
