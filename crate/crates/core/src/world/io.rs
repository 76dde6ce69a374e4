use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::OccupancyMap;
use crate::hex::HexCoord;

pub const MAP_FORMAT: &str = "hexmap/v1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairEntry {
    pub start: HexCoord,
    pub goal: HexCoord,
}

/// On-disk map document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapFile {
    pub format: String,
    pub rows: u32,
    pub cols: u32,
    pub map_id: String,
    pub blocked: Vec<HexCoord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pairs: Vec<PairEntry>,
}

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl ParseError {
    fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        ParseError::Field {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl MapFile {
    pub fn from_map(map: &OccupancyMap, pairs: Vec<PairEntry>) -> Self {
        MapFile {
            format: MAP_FORMAT.to_string(),
            rows: map.rows,
            cols: map.cols,
            map_id: map.map_id.clone(),
            blocked: map.blocked().iter().copied().collect(),
            pairs,
        }
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        serde_json::from_str(text).map_err(|e| ParseError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("map file serializes");
        s.push('\n');
        s
    }

    /// Validate and build the map.
    pub fn into_map(self) -> Result<(OccupancyMap, Vec<PairEntry>), ParseError> {
        if self.format != MAP_FORMAT {
            return Err(ParseError::field(
                "format",
                format!("expected {MAP_FORMAT:?}, found {:?}", self.format),
            ));
        }
        if self.rows == 0 {
            return Err(ParseError::field("rows", "must be positive"));
        }
        if self.cols == 0 {
            return Err(ParseError::field("cols", "must be positive"));
        }
        let mut map = OccupancyMap::empty(self.rows, self.cols, self.map_id);
        for (i, c) in self.blocked.into_iter().enumerate() {
            map.block(c)
                .map_err(|e| ParseError::field(format!("blocked[{i}]"), e.to_string()))?;
        }
        for (i, p) in self.pairs.iter().enumerate() {
            for (name, c) in [("start", p.start), ("goal", p.goal)] {
                if !map.is_free(c) {
                    return Err(ParseError::field(
                        format!("pairs[{i}].{name}"),
                        format!("cell {c} is not a free domain cell"),
                    ));
                }
            }
        }
        Ok((map, self.pairs))
    }
}

pub fn save_map(path: impl AsRef<Path>, map: &OccupancyMap) -> std::io::Result<()> {
    save_map_file(path, &MapFile::from_map(map, Vec::new()))
}

pub fn save_map_file(path: impl AsRef<Path>, file: &MapFile) -> std::io::Result<()> {
    fs::write(path, file.to_json())
}

pub fn load_map(path: impl AsRef<Path>) -> Result<OccupancyMap, ParseError> {
    load_map_file(path).map(|(m, _)| m)
}

pub fn load_map_file(
    path: impl AsRef<Path>,
) -> Result<(OccupancyMap, Vec<PairEntry>), ParseError> {
    let text = fs::read_to_string(path)?;
    MapFile::parse(&text)?.into_map()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::generate_map;

    #[test]
    fn round_trip_generated_map() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        let map = generate_map(30, 30, 0.2, 5);
        save_map(&path, &map).unwrap();
        assert_eq!(load_map(&path).unwrap(), map);
    }

    #[test]
    fn minimal_handwritten_file() {
        let text = r#"{"format":"hexmap/v1","rows":3,"cols":4,"map_id":"tiny",
            "blocked":[[1,0],[0,2]]}"#;
        let (map, pairs) = MapFile::parse(text).unwrap().into_map().unwrap();
        assert_eq!(map.map_id, "tiny");
        assert_eq!(map.blocked().len(), 2);
        assert!(map.is_blocked(HexCoord::new(1, 0)));
        assert!(map.is_blocked(HexCoord::new(0, 2)));
        assert!(pairs.is_empty());
    }

    #[test]
    fn blocked_outside_domain_is_rejected() {
        let text = r#"{"format":"hexmap/v1","rows":3,"cols":3,"map_id":"x","blocked":[[0,0],[9,9]]}"#;
        let err = MapFile::parse(text).unwrap().into_map().unwrap_err();
        match err {
            ParseError::Field { field, .. } => assert_eq!(field, "blocked[1]"),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = MapFile::parse("{\n \"format\": \"hexmap/v1\",\n \"rows\": x }").unwrap_err();
        match err {
            ParseError::Syntax { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn pairs_are_validated() {
        let text = r#"{"format":"hexmap/v1","rows":3,"cols":3,"map_id":"x","blocked":[[1,1]],
            "pairs":[{"start":[0,0],"goal":[1,1]}]}"#;
        let err = MapFile::parse(text).unwrap().into_map().unwrap_err();
        assert!(err.to_string().contains("pairs[0].goal"), "{err}");
    }
}
