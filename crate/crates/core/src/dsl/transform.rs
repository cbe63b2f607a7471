//! Symmetry operations on tile sets.

use crate::hexboard::geometry::{mirrored_column, Cube};
use crate::hexboard::{Position, COLUMNS};
use std::collections::BTreeSet;

/// A mirror line with all positions resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisSpec {
    /// Between columns 9 and 10. Tile centers land half a tile off-lattice,
    /// so images snap to the same row: `(c, r) -> (19 - c, r)`.
    VerticalMidline,
    /// The horizontal line through the center of `(1, 5)`.
    HorizontalMidline,
    /// The vertical line through the centers of column `k`.
    Column(i64),
    Rising(Position),
    Falling(Position),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid axis: {0}")]
pub struct InvalidAxis(pub String);

impl AxisSpec {
    pub fn validate(self) -> Result<AxisSpec, InvalidAxis> {
        match self {
            AxisSpec::Column(k) if !(1..=COLUMNS as i64).contains(&k) => {
                Err(InvalidAxis(format!("column {k} is not on the board")))
            }
            _ => Ok(self),
        }
    }

    /// The mirror image of one tile, if it lands on the board.
    pub fn image(self, position: Position) -> Option<Position> {
        let about = |origin: Position, mirror: fn(Cube) -> Cube| {
            let o = Cube::from_position(origin);
            (o + mirror(Cube::from_position(position) - o)).to_position()
        };
        match self {
            AxisSpec::VerticalMidline => Some(Position::checked(
                mirrored_column(position.column()) as i64,
                position.row() as i64,
            )?),
            AxisSpec::HorizontalMidline => about(Position::checked(1, 5).expect("on board"), Cube::mirror_horizontal),
            AxisSpec::Column(k) => Position::checked(2 * k - position.column() as i64, position.row() as i64),
            AxisSpec::Rising(p) => about(p, Cube::mirror_rising),
            AxisSpec::Falling(p) => about(p, Cube::mirror_falling),
        }
    }
}

pub fn reflect_region(region: &BTreeSet<Position>, axis: AxisSpec) -> Result<BTreeSet<Position>, InvalidAxis> {
    let axis = axis.validate()?;
    Ok(region.iter().filter_map(|&p| axis.image(p)).collect())
}

/// `sixths` sixth-turns clockwise about `center`; any integer is accepted and
/// taken mod 6.
pub fn rotate_position(position: Position, center: Position, sixths: i64) -> Option<Position> {
    let c = Cube::from_position(center);
    let mut v = Cube::from_position(position) - c;
    for _ in 0..sixths.rem_euclid(6) {
        v = v.rotate_clockwise();
    }
    (c + v).to_position()
}

pub fn rotate_region(region: &BTreeSet<Position>, center: Position, sixths: i64) -> BTreeSet<Position> {
    region
        .iter()
        .filter_map(|&p| rotate_position(p, center, sixths))
        .collect()
}
