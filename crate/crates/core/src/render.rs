//! SVG and ASCII pictures of a map with an optional trial overlay.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::agent::PlanTrace;
use crate::hex::{to_cartesian, HexCoord};
use crate::world::{axial_from_offset, OccupancyMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RenderFormat {
    Svg,
    Ascii,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShowFlags {
    pub path: bool,
    pub observed_cells: bool,
    /// Draw what the agent knew: unobserved cells are left unknown.
    pub belief: bool,
    pub frontier_traces: bool,
}

impl Default for ShowFlags {
    fn default() -> Self {
        Self {
            path: true,
            observed_cells: true,
            belief: false,
            frontier_traces: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderSpec {
    pub output: RenderFormat,
    pub show: ShowFlags,
    pub cell_px: u32,
}

impl Default for RenderSpec {
    fn default() -> Self {
        Self {
            output: RenderFormat::Svg,
            show: ShowFlags::default(),
            cell_px: 16,
        }
    }
}

/// Everything drawn on top of the bare map.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Overlay {
    pub start: Option<HexCoord>,
    pub goal: Option<HexCoord>,
    pub path: Vec<HexCoord>,
    pub observed: BTreeSet<HexCoord>,
    pub frontier: Vec<Vec<HexCoord>>,
}

impl Overlay {
    pub fn from_trace(trace: &PlanTrace) -> Self {
        Self {
            start: Some(trace.spec.start),
            goal: Some(trace.spec.goal),
            path: trace.executed_path.clone(),
            observed: trace.observed_cells.clone(),
            frontier: trace
                .frontiers
                .iter()
                .flat_map(|f| [f.pos_trace.cells.clone(), f.neg_trace.cells.clone()])
                .filter(|c| !c.is_empty())
                .collect(),
        }
    }

    pub fn endpoints(start: HexCoord, goal: HexCoord, path: Vec<HexCoord>) -> Self {
        Self {
            start: Some(start),
            goal: Some(goal),
            path,
            ..Self::default()
        }
    }
}

pub fn render(map: &OccupancyMap, overlay: &Overlay, spec: &RenderSpec) -> String {
    match spec.output {
        RenderFormat::Svg => render_svg(map, overlay, spec),
        RenderFormat::Ascii => render_ascii(map, overlay, &spec.show),
    }
}

pub fn render_svg(map: &OccupancyMap, overlay: &Overlay, spec: &RenderSpec) -> String {
    let show = spec.show;
    let px = spec.cell_px.max(1) as f64;
    // circumradius of a pointy-top hexagon whose centers sit `px` apart
    let radius = px / 3f64.sqrt();
    let pad = px;
    let centers: Vec<(HexCoord, (f64, f64))> = map
        .cells()
        .map(|c| {
            let (x, y) = to_cartesian(c, px);
            (c, (x, -y))
        })
        .collect();
    let min_x = centers.iter().map(|(_, p)| p.0).fold(f64::INFINITY, f64::min);
    let min_y = centers.iter().map(|(_, p)| p.1).fold(f64::INFINITY, f64::min);
    let max_x = centers.iter().map(|(_, p)| p.0).fold(f64::NEG_INFINITY, f64::max);
    let max_y = centers.iter().map(|(_, p)| p.1).fold(f64::NEG_INFINITY, f64::max);
    let ox = pad - min_x;
    let oy = pad - min_y;
    let width = max_x - min_x + 2.0 * pad;
    let height = max_y - min_y + 2.0 * pad;
    let at = |c: HexCoord| {
        let (x, y) = to_cartesian(c, px);
        (x + ox, -y + oy)
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.2} {height:.2}">"#
    );
    let _ = writeln!(s, "  <title>{}</title>", escape(&map.map_id));
    s.push_str("  <g stroke=\"#999\" stroke-width=\"0.5\">\n");
    for (c, _) in &centers {
        let (x, y) = at(*c);
        let fill = cell_fill(map, overlay, &show, *c);
        let points: Vec<String> = (0..6)
            .map(|k| {
                let a = std::f64::consts::PI / 180.0 * (60.0 * k as f64 + 30.0);
                format!("{:.2},{:.2}", x + radius * a.cos(), y + radius * a.sin())
            })
            .collect();
        let _ = writeln!(
            s,
            r#"    <polygon points="{}" fill="{fill}"/>"#,
            points.join(" ")
        );
    }
    s.push_str("  </g>\n");
    if show.frontier_traces {
        for trace in &overlay.frontier {
            let _ = writeln!(
                s,
                r##"  <polyline points="{}" fill="none" stroke="#e69500" stroke-width="{:.2}" stroke-dasharray="3,2"/>"##,
                polyline(trace, &at),
                px / 8.0
            );
        }
    }
    if show.path && overlay.path.len() > 1 {
        let _ = writeln!(
            s,
            r##"  <polyline points="{}" fill="none" stroke="#d62728" stroke-width="{:.2}"/>"##,
            polyline(&overlay.path, &at),
            px / 5.0
        );
    }
    for (c, color) in [(overlay.start, "#2ca02c"), (overlay.goal, "#1f77b4")] {
        if let Some(c) = c {
            let (x, y) = at(c);
            let _ = writeln!(
                s,
                r#"  <circle cx="{x:.2}" cy="{y:.2}" r="{:.2}" fill="{color}"/>"#,
                px / 3.0
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

fn polyline(cells: &[HexCoord], at: &impl Fn(HexCoord) -> (f64, f64)) -> String {
    cells
        .iter()
        .map(|c| {
            let (x, y) = at(*c);
            format!("{x:.2},{y:.2}")
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn cell_fill(map: &OccupancyMap, overlay: &Overlay, show: &ShowFlags, c: HexCoord) -> &'static str {
    let seen = overlay.observed.contains(&c);
    if show.belief && !seen {
        return "#e8e8e8";
    }
    if map.is_blocked(c) {
        "#1a1a1a"
    } else if show.observed_cells && seen {
        "#cfe3f7"
    } else {
        "#ffffff"
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// One line per row, odd rows shifted half a cell right.
///
/// `#` blocked, `.` free, `:` observed, `o` path, `S` start, `G` goal.
pub fn render_ascii(map: &OccupancyMap, overlay: &Overlay, show: &ShowFlags) -> String {
    let path: BTreeSet<HexCoord> = if show.path {
        overlay.path.iter().copied().collect()
    } else {
        BTreeSet::new()
    };
    let mut out = String::new();
    for row in 0..map.rows as i32 {
        if row & 1 == 1 {
            out.push(' ');
        }
        let line: Vec<String> = (0..map.cols as i32)
            .map(|col| {
                let c = axial_from_offset(col, row);
                let ch = if map.is_blocked(c) {
                    '#'
                } else if overlay.start == Some(c) {
                    'S'
                } else if overlay.goal == Some(c) {
                    'G'
                } else if path.contains(&c) {
                    'o'
                } else if show.observed_cells && overlay.observed.contains(&c) {
                    ':'
                } else {
                    '.'
                };
                ch.to_string()
            })
            .collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AsciiError {
    #[error("empty picture")]
    Empty,
    #[error("row {row} has {found} cells, expected {expected}")]
    Ragged { row: usize, found: usize, expected: usize },
    #[error("unknown cell glyph {glyph:?} in row {row}")]
    Glyph { row: usize, glyph: char },
}

/// Recovers the occupancy (and the start/goal markers, if present) from an
/// ASCII picture.
pub fn parse_ascii(
    text: &str,
    map_id: &str,
) -> Result<(OccupancyMap, Option<HexCoord>, Option<HexCoord>), AsciiError> {
    let rows: Vec<Vec<char>> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split_whitespace().flat_map(|t| t.chars()).collect())
        .collect();
    let cols = rows.first().ok_or(AsciiError::Empty)?.len();
    let mut map = OccupancyMap::empty(rows.len() as u32, cols as u32, map_id);
    let (mut start, mut goal) = (None, None);
    for (r, line) in rows.iter().enumerate() {
        if line.len() != cols {
            return Err(AsciiError::Ragged {
                row: r,
                found: line.len(),
                expected: cols,
            });
        }
        for (col, ch) in line.iter().enumerate() {
            let c = axial_from_offset(col as i32, r as i32);
            match ch {
                '#' => map.block(c).expect("cell inside parsed domain"),
                '.' | ':' | 'o' => {}
                'S' => start = Some(c),
                'G' => goal = Some(c),
                other => return Err(AsciiError::Glyph { row: r, glyph: *other }),
            }
        }
    }
    Ok((map, start, goal))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::generate_map;

    #[test]
    fn ascii_golden() {
        let map = OccupancyMap::with_blocked(3, 4, "g", [axial_from_offset(1, 1)]).unwrap();
        let ov = Overlay::endpoints(
            axial_from_offset(0, 0),
            axial_from_offset(3, 2),
            vec![axial_from_offset(0, 0), axial_from_offset(1, 0)],
        );
        let text = render_ascii(&map, &ov, &ShowFlags::default());
        assert_eq!(text, "S o . .\n . # . .\n. . . G\n");
    }

    #[test]
    fn ascii_round_trips_statuses() {
        for seed in 0..10 {
            let map = generate_map(9, 13, 0.3, seed);
            let free: Vec<_> = map.free_cells().collect();
            let ov = Overlay {
                start: Some(free[0]),
                goal: Some(free[free.len() - 1]),
                path: free[..3].to_vec(),
                observed: free.iter().step_by(3).copied().collect(),
                frontier: Vec::new(),
            };
            let text = render_ascii(&map, &ov, &ShowFlags::default());
            let (back, s, g) = parse_ascii(&text, &map.map_id).unwrap();
            assert_eq!(back, map);
            assert_eq!((s, g), (ov.start, ov.goal));
        }
    }

    #[test]
    fn bad_glyph_rejected() {
        assert!(matches!(parse_ascii(". x\n", "m"), Err(AsciiError::Glyph { glyph: 'x', .. })));
        assert!(matches!(parse_ascii(". .\n .\n", "m"), Err(AsciiError::Ragged { .. })));
    }

    #[test]
    fn svg_has_one_root_and_every_cell() {
        let map = generate_map(6, 7, 0.2, 1);
        let ov = Overlay::endpoints(HexCoord::new(0, 0), HexCoord::new(1, 0), vec![]);
        let svg = render_svg(&map, &ov, &RenderSpec::default());
        assert!(svg.starts_with("<svg "));
        assert_eq!(svg.matches("<svg").count(), 1);
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polygon").count(), 42);
        assert_eq!(svg.matches("#1a1a1a").count(), map.blocked().len());
    }
}
