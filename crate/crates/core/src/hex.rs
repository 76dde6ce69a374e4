//! Axial hexagonal grid geometry.
//!
//! Cells are addressed by axial `(q, r)` pairs. The Cartesian embedding is
//! pointy-top with the y axis pointing up, so the canonical direction order
//! E, NE, NW, W, SW, SE walks counterclockwise in 60 degree increments.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Axial hex coordinate.
///
/// Ordering is row-major (`r` first, then `q`); this is the canonical
/// coordinate order used for every deterministic tie-break in the crate.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "[i32; 2]", into = "[i32; 2]")]
pub struct HexCoord {
    pub q: i32,
    pub r: i32,
}

impl HexCoord {
    pub const ORIGIN: HexCoord = HexCoord { q: 0, r: 0 };

    pub const fn new(q: i32, r: i32) -> Self {
        Self { q, r }
    }

    pub fn step(self, dir: Direction) -> HexCoord {
        let (dq, dr) = dir.offset();
        HexCoord::new(self.q + dq, self.r + dr)
    }

    pub fn step_n(self, dir: Direction, n: i32) -> HexCoord {
        let (dq, dr) = dir.offset();
        HexCoord::new(self.q + dq * n, self.r + dr * n)
    }

    /// The six neighbors in canonical direction order.
    pub fn neighbors(self) -> [HexCoord; 6] {
        Direction::ALL.map(|d| self.step(d))
    }

    pub fn distance(self, other: HexCoord) -> u32 {
        hex_distance(self, other)
    }

    /// Direction of `other` if it is adjacent to `self`.
    pub fn direction_to(self, other: HexCoord) -> Option<Direction> {
        Direction::ALL.into_iter().find(|d| self.step(*d) == other)
    }

    pub fn is_adjacent(self, other: HexCoord) -> bool {
        self.direction_to(other).is_some()
    }

    /// All cells with `distance(self, c) <= radius`, in canonical order.
    pub fn disc(self, radius: u32) -> Vec<HexCoord> {
        let r = radius as i32;
        let mut out = Vec::with_capacity((3 * radius * (radius + 1) + 1) as usize);
        for dr in -r..=r {
            let lo = (-r).max(-dr - r);
            let hi = r.min(-dr + r);
            for dq in lo..=hi {
                out.push(HexCoord::new(self.q + dq, self.r + dr));
            }
        }
        out
    }
}

impl Ord for HexCoord {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.r, self.q).cmp(&(other.r, other.q))
    }
}

impl PartialOrd for HexCoord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<[i32; 2]> for HexCoord {
    fn from(v: [i32; 2]) -> Self {
        HexCoord::new(v[0], v[1])
    }
}

impl From<HexCoord> for [i32; 2] {
    fn from(c: HexCoord) -> Self {
        [c.q, c.r]
    }
}

impl std::ops::Add for HexCoord {
    type Output = HexCoord;

    fn add(self, o: HexCoord) -> HexCoord {
        HexCoord::new(self.q + o.q, self.r + o.r)
    }
}

impl std::ops::Sub for HexCoord {
    type Output = HexCoord;

    fn sub(self, o: HexCoord) -> HexCoord {
        HexCoord::new(self.q - o.q, self.r - o.r)
    }
}

impl fmt::Display for HexCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.q, self.r)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid coordinate {0:?}, expected `q,r`")]
pub struct CoordParseError(pub String);

impl FromStr for HexCoord {
    type Err = CoordParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || CoordParseError(s.to_string());
        let (q, r) = s.split_once(',').ok_or_else(err)?;
        let q = q.trim().parse().map_err(|_| err())?;
        let r = r.trim().parse().map_err(|_| err())?;
        Ok(HexCoord::new(q, r))
    }
}

/// One of the six moves on the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    E,
    NE,
    NW,
    W,
    SW,
    SE,
}

impl Direction {
    /// Canonical order; index `i` points at `60 * i` degrees.
    pub const ALL: [Direction; 6] = [
        Direction::E,
        Direction::NE,
        Direction::NW,
        Direction::W,
        Direction::SW,
        Direction::SE,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Direction {
        Direction::ALL[i % 6]
    }

    pub fn offset(self) -> (i32, i32) {
        match self {
            Direction::E => (1, 0),
            Direction::NE => (1, -1),
            Direction::NW => (0, -1),
            Direction::W => (-1, 0),
            Direction::SW => (-1, 1),
            Direction::SE => (0, 1),
        }
    }

    pub fn opposite(self) -> Direction {
        self.rotate(3)
    }

    /// Rotate by `steps` sixths of a turn, counterclockwise for positive values.
    pub fn rotate(self, steps: i32) -> Direction {
        Direction::from_index((self.index() as i32 + steps).rem_euclid(6) as usize)
    }

    pub fn name(self) -> &'static str {
        match self {
            Direction::E => "E",
            Direction::NE => "NE",
            Direction::NW => "NW",
            Direction::W => "W",
            Direction::SW => "SW",
            Direction::SE => "SE",
        }
    }

    pub fn from_name(s: &str) -> Option<Direction> {
        Direction::ALL.into_iter().find(|d| d.name() == s)
    }

    /// Canonical order rotated so that it starts at `self`.
    pub fn rotated_order(self) -> [Direction; 6] {
        std::array::from_fn(|i| self.rotate(i as i32))
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn neighbors(c: HexCoord) -> [HexCoord; 6] {
    c.neighbors()
}

/// Grid steps between two cells on an obstacle-free grid (cube-coordinate formula).
pub fn hex_distance(a: HexCoord, b: HexCoord) -> u32 {
    let dq = a.q - b.q;
    let dr = a.r - b.r;
    let ds = -dq - dr;
    dq.unsigned_abs()
        .max(dr.unsigned_abs())
        .max(ds.unsigned_abs())
}

/// Pointy-top embedding with adjacent centers exactly `cell_spacing` apart.
pub fn to_cartesian(c: HexCoord, cell_spacing: f64) -> (f64, f64) {
    debug_assert!(cell_spacing > 0.0);
    let x = cell_spacing * (c.q as f64 + c.r as f64 / 2.0);
    let y = -cell_spacing * (SQRT_3 / 2.0) * c.r as f64;
    (x, y)
}

pub fn euclidean(a: HexCoord, b: HexCoord) -> f64 {
    let (ax, ay) = to_cartesian(a, 1.0);
    let (bx, by) = to_cartesian(b, 1.0);
    (ax - bx).hypot(ay - by)
}

/// The direction whose heading is angularly closest to the bearing from `from` to `to`.
///
/// Exact half-way bearings resolve to the lower canonical index.
pub fn bearing_direction(from: HexCoord, to: HexCoord) -> Direction {
    let (fx, fy) = to_cartesian(from, 1.0);
    let (tx, ty) = to_cartesian(to, 1.0);
    let (dx, dy) = (tx - fx, ty - fy);
    if dx == 0.0 && dy == 0.0 {
        return Direction::E;
    }
    let mut best = Direction::E;
    let mut best_dot = f64::NEG_INFINITY;
    for d in Direction::ALL {
        let (ux, uy) = to_cartesian(HexCoord::ORIGIN.step(d), 1.0);
        let dot = ux * dx + uy * dy;
        if dot > best_dot + 1e-12 {
            best_dot = dot;
            best = d;
        }
    }
    best
}
