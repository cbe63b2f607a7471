//! Offset/cube conversions and adjacency for the fixed board layout.
//!
//! Flat-top hexagons, circumradius 1. Column `c` has its centers at
//! `x = 1.5 (c - 1)`; odd columns are pushed half a tile down, so a center
//! sits at `y = sqrt(3) (r - 1 + [c odd] / 2)`. Screen y grows downward.

use super::{BoardError, Position, COLUMNS};
use std::ops::{Add, Neg, Sub};

const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Center of a tile in layout units (circumradius 1, y pointing down).
pub fn center(position: Position) -> (f64, f64) {
    let c = position.column() as f64;
    let r = position.row() as f64;
    let shift = if position.column() % 2 == 1 { 0.5 } else { 0.0 };
    (1.5 * (c - 1.0), SQRT_3 * (r - 1.0 + shift))
}

/// The six step directions on a flat-top layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Up,
    Down,
    UpRight,
    DownRight,
    UpLeft,
    DownLeft,
}

impl Direction {
    pub const ALL: [Direction; 6] = [
        Direction::Up,
        Direction::UpRight,
        Direction::DownRight,
        Direction::Down,
        Direction::DownLeft,
        Direction::UpLeft,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Direction::Up => "up",
            Direction::Down => "down",
            Direction::UpRight => "up-right",
            Direction::DownRight => "down-right",
            Direction::UpLeft => "up-left",
            Direction::DownLeft => "down-left",
        }
    }

    pub fn from_name(name: &str) -> Option<Direction> {
        Direction::ALL.iter().copied().find(|d| d.name() == name)
    }

    /// Unit step in cube space.
    pub fn cube(self) -> Cube {
        match self {
            Direction::Up => Cube::new(0, 1, -1),
            Direction::Down => Cube::new(0, -1, 1),
            Direction::UpRight => Cube::new(1, 0, -1),
            Direction::DownRight => Cube::new(1, -1, 0),
            Direction::UpLeft => Cube::new(-1, 1, 0),
            Direction::DownLeft => Cube::new(-1, 0, 1),
        }
    }

    /// The adjacent tile in this direction, if it is on the board.
    pub fn step(self, from: Position) -> Option<Position> {
        let c = from.column() as i64;
        let r = from.row() as i64;
        let even = c % 2 == 0;
        let (dc, dr) = match self {
            Direction::Up => (0, -1),
            Direction::Down => (0, 1),
            Direction::UpRight | Direction::UpLeft => (0, if even { -1 } else { 0 }),
            Direction::DownRight | Direction::DownLeft => (0, if even { 0 } else { 1 }),
        };
        let dc = match self {
            Direction::UpRight | Direction::DownRight => 1,
            Direction::UpLeft | Direction::DownLeft => -1,
            _ => dc,
        };
        Position::checked(c + dc, r + dr)
    }
}

/// In-bounds hex neighbors of a tile, ordered by (column, row).
pub fn neighbors(position: Position) -> Vec<Position> {
    let c = position.column() as i64;
    let r = position.row() as i64;
    let side_rows = if c % 2 == 0 { [r - 1, r] } else { [r, r + 1] };
    let mut out: Vec<Position> = [(c, r - 1), (c, r + 1)]
        .into_iter()
        .chain([c - 1, c + 1].into_iter().flat_map(|cc| side_rows.map(|rr| (cc, rr))))
        .filter_map(|(cc, rr)| Position::checked(cc, rr))
        .collect();
    out.sort();
    out
}

/// Cube coordinates (`x + y + z = 0`), `x` along columns and `z` the axial row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Cube {
    pub x: i64,
    pub y: i64,
    pub z: i64,
}

impl Cube {
    pub fn new(x: i64, y: i64, z: i64) -> Cube {
        debug_assert_eq!(x + y + z, 0);
        Cube { x, y, z }
    }

    pub fn from_position(position: Position) -> Cube {
        Cube::from_offset(position.column() as i64, position.row() as i64)
    }

    /// 1-based (column, row), which may lie off the board.
    pub fn from_offset(column: i64, row: i64) -> Cube {
        let q = column - 1;
        let z = (row - 1) - (q + (q & 1)) / 2;
        Cube::new(q, -q - z, z)
    }

    pub fn to_offset(self) -> (i64, i64) {
        let q = self.x;
        (q + 1, self.z + (q + (q & 1)) / 2 + 1)
    }

    pub fn to_position(self) -> Option<Position> {
        let (column, row) = self.to_offset();
        Position::checked(column, row)
    }

    /// Like [`Cube::to_position`] but reporting the offending coordinates.
    pub fn try_position(self) -> Result<Position, BoardError> {
        let (column, row) = self.to_offset();
        Position::new(column, row)
    }

    /// One sixth turn clockwise on screen about the origin.
    pub fn rotate_clockwise(self) -> Cube {
        Cube::new(-self.z, -self.x, -self.y)
    }

    pub fn scale(self, k: i64) -> Cube {
        Cube::new(self.x * k, self.y * k, self.z * k)
    }

    pub fn distance(self, other: Cube) -> i64 {
        let d = self - other;
        (d.x.abs() + d.y.abs() + d.z.abs()) / 2
    }

    /// Mirror across the vertical line through the origin.
    pub fn mirror_vertical(self) -> Cube {
        Cube::new(-self.x, -self.z, -self.y)
    }

    /// Mirror across the horizontal line through the origin.
    pub fn mirror_horizontal(self) -> Cube {
        Cube::new(self.x, self.z, self.y)
    }

    /// Mirror across the up-right/down-left line through the origin.
    pub fn mirror_rising(self) -> Cube {
        Cube::new(-self.z, -self.y, -self.x)
    }

    /// Mirror across the down-right/up-left line through the origin.
    pub fn mirror_falling(self) -> Cube {
        Cube::new(-self.y, -self.x, -self.z)
    }
}

impl Add for Cube {
    type Output = Cube;
    fn add(self, o: Cube) -> Cube {
        Cube::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Cube {
    type Output = Cube;
    fn sub(self, o: Cube) -> Cube {
        Cube::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Cube {
    type Output = Cube;
    fn neg(self) -> Cube {
        Cube::new(-self.x, -self.y, -self.z)
    }
}

/// Column mirrored across the board's vertical midline.
pub(crate) fn mirrored_column(column: u8) -> u8 {
    COLUMNS + 1 - column
}
