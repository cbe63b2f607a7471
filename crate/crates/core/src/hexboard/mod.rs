//! The Hexagons board: 18 columns of 10 flat-top hexagonal tiles, an
//! eight-color palette, and the single `paint` primitive.
//!
//! Positions are 1-indexed, columns counted from the left and rows from the
//! top. Odd columns sit half a tile lower than even columns.

pub(crate) mod geometry;
mod svg;

pub use geometry::{center, neighbors, Cube, Direction};
pub use svg::render_svg;

use serde::de::{self, SeqAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

pub const COLUMNS: u8 = 18;
pub const ROWS: u8 = 10;
pub const TILE_COUNT: usize = COLUMNS as usize * ROWS as usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoardError {
    #[error("position ({column},{row}) is outside the 18x10 board")]
    OutOfBounds { column: i64, row: i64 },
    #[error("two actions target tile {0}")]
    DuplicatePosition(Position),
    #[error("unknown color `{0}`")]
    UnknownColor(String),
    #[error("malformed board grid: {0}")]
    BadGrid(String),
}

/// One of the eight palette colors. White doubles as the blank state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Color {
    #[default]
    White,
    Black,
    Red,
    Orange,
    Yellow,
    Green,
    Blue,
    // The eighth hue is not named anywhere we could check; purple is a guess.
    Purple,
}

/// The palette in display order.
pub const PALETTE: [Color; 8] = [
    Color::White,
    Color::Black,
    Color::Red,
    Color::Orange,
    Color::Yellow,
    Color::Green,
    Color::Blue,
    Color::Purple,
];

impl Color {
    pub fn name(self) -> &'static str {
        match self {
            Color::White => "white",
            Color::Black => "black",
            Color::Red => "red",
            Color::Orange => "orange",
            Color::Yellow => "yellow",
            Color::Green => "green",
            Color::Blue => "blue",
            Color::Purple => "purple",
        }
    }

    /// Single-letter code used by the board grid format.
    pub fn code(self) -> char {
        match self {
            Color::White => 'W',
            Color::Black => 'K',
            Color::Red => 'R',
            Color::Orange => 'O',
            Color::Yellow => 'Y',
            Color::Green => 'G',
            Color::Blue => 'B',
            Color::Purple => 'P',
        }
    }

    pub fn from_code(code: char) -> Option<Color> {
        PALETTE.iter().copied().find(|c| c.code() == code.to_ascii_uppercase())
    }

    pub fn from_name(name: &str) -> Option<Color> {
        PALETTE.iter().copied().find(|c| c.name().eq_ignore_ascii_case(name))
    }

    /// Fill used by the SVG renderer.
    pub fn hex_rgb(self) -> &'static str {
        match self {
            Color::White => "#ffffff",
            Color::Black => "#000000",
            Color::Red => "#e53935",
            Color::Orange => "#fb8c00",
            Color::Yellow => "#fdd835",
            Color::Green => "#43a047",
            Color::Blue => "#1e88e5",
            Color::Purple => "#8e24aa",
        }
    }

    pub fn is_blank(self) -> bool {
        self == Color::White
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Color {
    type Err = BoardError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Color::from_name(s).ok_or_else(|| BoardError::UnknownColor(s.to_string()))
    }
}

impl Serialize for Color {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Color {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let name = String::deserialize(deserializer)?;
        name.parse().map_err(de::Error::custom)
    }
}

/// A tile address. Only in-bounds positions can be constructed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position {
    column: u8,
    row: u8,
}

impl Position {
    pub fn new(column: i64, row: i64) -> Result<Position, BoardError> {
        if (1..=COLUMNS as i64).contains(&column) && (1..=ROWS as i64).contains(&row) {
            Ok(Position {
                column: column as u8,
                row: row as u8,
            })
        } else {
            Err(BoardError::OutOfBounds { column, row })
        }
    }

    /// `None` when out of bounds.
    pub fn checked(column: i64, row: i64) -> Option<Position> {
        Position::new(column, row).ok()
    }

    pub fn column(self) -> u8 {
        self.column
    }

    pub fn row(self) -> u8 {
        self.row
    }

    fn index(self) -> usize {
        (self.row as usize - 1) * COLUMNS as usize + (self.column as usize - 1)
    }

    /// All 180 positions, row-major from the top-left tile.
    pub fn all() -> impl Iterator<Item = Position> {
        (1..=ROWS).flat_map(|row| (1..=COLUMNS).map(move |column| Position { column, row }))
    }

    pub fn is_edge(self) -> bool {
        self.column == 1 || self.column == COLUMNS || self.row == 1 || self.row == ROWS
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.column, self.row)
    }
}

/// `paint(position, color)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Action {
    pub position: Position,
    pub color: Color,
}

impl Action {
    pub fn new(position: Position, color: Color) -> Action {
        Action { position, color }
    }
}

// Serialized as the `[column, row, "color"]` triplet.
impl Serialize for Action {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        (self.position.column, self.position.row, self.color).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Action {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let (column, row, color): (i64, i64, Color) = Deserialize::deserialize(deserializer)?;
        let position = Position::new(column, row).map_err(de::Error::custom)?;
        Ok(Action { position, color })
    }
}

/// The actions of one drawing step: at most one color per tile.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ActionSet {
    actions: BTreeMap<Position, Color>,
}

impl ActionSet {
    pub fn new() -> ActionSet {
        ActionSet::default()
    }

    /// Builds a set, rejecting two actions on the same tile.
    pub fn from_actions<I: IntoIterator<Item = Action>>(actions: I) -> Result<ActionSet, BoardError> {
        let mut set = ActionSet::new();
        for action in actions {
            if set.actions.insert(action.position, action.color).is_some() {
                return Err(BoardError::DuplicatePosition(action.position));
            }
        }
        Ok(set)
    }

    /// Records `color` for `position`, replacing any earlier assignment.
    pub fn assign(&mut self, position: Position, color: Color) {
        self.actions.insert(position, color);
    }

    pub fn get(&self, position: Position) -> Option<Color> {
        self.actions.get(&position).copied()
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    /// Actions ordered by (column, row).
    pub fn iter(&self) -> impl Iterator<Item = Action> + '_ {
        self.actions
            .iter()
            .map(|(&position, &color)| Action { position, color })
    }

    pub fn positions(&self) -> impl Iterator<Item = Position> + '_ {
        self.actions.keys().copied()
    }

    pub fn contains(&self, action: &Action) -> bool {
        self.actions.get(&action.position) == Some(&action.color)
    }
}

impl FromIterator<Action> for ActionSet {
    /// Last writer wins on repeated positions.
    fn from_iter<I: IntoIterator<Item = Action>>(iter: I) -> Self {
        let mut set = ActionSet::new();
        for action in iter {
            set.assign(action.position, action.color);
        }
        set
    }
}

impl Serialize for ActionSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for ActionSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ActionsVisitor;

        impl<'de> Visitor<'de> for ActionsVisitor {
            type Value = ActionSet;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a list of [column, row, color] triplets")
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<ActionSet, A::Error> {
                let mut set = ActionSet::new();
                while let Some(action) = seq.next_element::<Action>()? {
                    if set.actions.insert(action.position, action.color).is_some() {
                        return Err(de::Error::custom(BoardError::DuplicatePosition(action.position)));
                    }
                }
                Ok(set)
            }
        }

        deserializer.deserialize_seq(ActionsVisitor)
    }
}

/// The color of every tile.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Board {
    tiles: [Color; TILE_COUNT],
}

impl Default for Board {
    fn default() -> Self {
        Board::new()
    }
}

impl Board {
    /// A blank (all-white) board.
    pub fn new() -> Board {
        Board {
            tiles: [Color::White; TILE_COUNT],
        }
    }

    pub fn get(&self, position: Position) -> Color {
        self.tiles[position.index()]
    }

    /// Returns a copy with one tile recolored.
    pub fn paint(&self, position: Position, color: Color) -> Board {
        let mut next = self.clone();
        next.set(position, color);
        next
    }

    pub fn set(&mut self, position: Position, color: Color) {
        self.tiles[position.index()] = color;
    }

    pub fn apply_actions(&self, actions: &ActionSet) -> Board {
        let mut next = self.clone();
        for action in actions.iter() {
            next.set(action.position, action.color);
        }
        next
    }

    /// The tiles whose color differs in `next`, with their new colors.
    pub fn diff(&self, next: &Board) -> ActionSet {
        Position::all()
            .filter(|&p| self.get(p) != next.get(p))
            .map(|p| Action::new(p, next.get(p)))
            .collect()
    }

    /// Non-white tiles.
    pub fn painted(&self) -> ActionSet {
        Position::all()
            .filter(|&p| !self.get(p).is_blank())
            .map(|p| Action::new(p, self.get(p)))
            .collect()
    }

    pub fn is_blank(&self) -> bool {
        self.tiles.iter().all(|c| c.is_blank())
    }

    pub fn tiles(&self) -> impl Iterator<Item = (Position, Color)> + '_ {
        Position::all().map(move |p| (p, self.get(p)))
    }

    /// Ten lines of eighteen color codes, top row first.
    pub fn to_grid_lines(&self) -> Vec<String> {
        (1..=ROWS)
            .map(|row| {
                (1..=COLUMNS)
                    .map(|column| self.get(Position { column, row }).code())
                    .collect()
            })
            .collect()
    }

    pub fn to_grid(&self) -> String {
        let mut out = self.to_grid_lines().join("\n");
        out.push('\n');
        out
    }

    pub fn from_grid_lines<S: AsRef<str>>(lines: &[S]) -> Result<Board, BoardError> {
        if lines.len() != ROWS as usize {
            return Err(BoardError::BadGrid(format!(
                "expected {ROWS} rows, found {}",
                lines.len()
            )));
        }
        let mut board = Board::new();
        for (r, line) in lines.iter().enumerate() {
            let line = line.as_ref().trim();
            let codes: Vec<char> = line.chars().collect();
            if codes.len() != COLUMNS as usize {
                return Err(BoardError::BadGrid(format!(
                    "row {} has {} tiles, expected {COLUMNS}",
                    r + 1,
                    codes.len()
                )));
            }
            for (c, code) in codes.into_iter().enumerate() {
                let color = Color::from_code(code).ok_or_else(|| {
                    BoardError::BadGrid(format!("unknown color code `{code}` at ({},{})", c + 1, r + 1))
                })?;
                board.tiles[r * COLUMNS as usize + c] = color;
            }
        }
        Ok(board)
    }

    /// Parses the grid text form; blank lines are ignored.
    pub fn from_grid(text: &str) -> Result<Board, BoardError> {
        let lines: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
        Board::from_grid_lines(&lines)
    }
}

impl fmt::Debug for Board {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Board {{")?;
        for line in self.to_grid_lines() {
            writeln!(f, "  {line}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for Board {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_grid_lines().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Board {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let lines = Vec::<String>::deserialize(deserializer)?;
        Board::from_grid_lines(&lines).map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pos(c: i64, r: i64) -> Position {
        Position::new(c, r).unwrap()
    }

    #[test]
    fn blank_board() {
        let board = Board::new();
        assert!(board.painted().is_empty());
        assert_eq!(board.tiles().count(), 180);
        assert_eq!(Board::new(), Board::new());
    }

    #[test]
    fn paint_single_tile() {
        let board = Board::new().paint(pos(2, 2), Color::Yellow);
        let painted: Vec<Action> = board.painted().iter().collect();
        assert_eq!(painted, vec![Action::new(pos(2, 2), Color::Yellow)]);
    }

    #[test]
    fn paint_is_idempotent_and_last_writer_wins() {
        let b = Board::new();
        let once = b.paint(pos(1, 1), Color::Red);
        assert_eq!(once.paint(pos(1, 1), Color::Red), once);
        assert_eq!(once.paint(pos(1, 1), Color::Blue), b.paint(pos(1, 1), Color::Blue));
    }

    #[test]
    fn paint_leaves_input_untouched() {
        let b = Board::new();
        let _ = b.paint(pos(3, 3), Color::Green);
        assert!(b.is_blank());
    }

    #[test]
    fn out_of_bounds_positions_are_rejected() {
        assert_eq!(
            Position::new(19, 1),
            Err(BoardError::OutOfBounds { column: 19, row: 1 })
        );
        assert!(Position::new(0, 5).is_err());
        assert!(Position::new(5, 11).is_err());
        assert!(Position::new(18, 10).is_ok());
    }

    #[test]
    fn apply_actions_basics() {
        let b = Board::new();
        assert_eq!(b.apply_actions(&ActionSet::new()), b);
        let set =
            ActionSet::from_actions([Action::new(pos(1, 1), Color::Red), Action::new(pos(1, 2), Color::Red)]).unwrap();
        assert_eq!(b.apply_actions(&set).painted().len(), 2);
    }

    #[test]
    fn duplicate_positions_are_rejected() {
        let err = ActionSet::from_actions([Action::new(pos(1, 1), Color::Red), Action::new(pos(1, 1), Color::Blue)])
            .unwrap_err();
        assert_eq!(err, BoardError::DuplicatePosition(pos(1, 1)));
    }

    #[test]
    fn diff_examples() {
        let b = Board::new();
        assert!(b.diff(&b).is_empty());
        let next = b.paint(pos(3, 4), Color::Blue);
        let d: Vec<Action> = b.diff(&next).iter().collect();
        assert_eq!(d, vec![Action::new(pos(3, 4), Color::Blue)]);
    }

    #[test]
    fn painting_white_erases() {
        let b = Board::new().paint(pos(1, 1), Color::White);
        assert!(b.painted().is_empty());
        let b = Board::new().paint(pos(1, 1), Color::Red).paint(pos(1, 1), Color::White);
        assert!(b.painted().is_empty());
    }

    #[test]
    fn palette_has_eight_distinct_colors() {
        assert_eq!(PALETTE.len(), 8);
        let codes: std::collections::BTreeSet<char> = PALETTE.iter().map(|c| c.code()).collect();
        assert_eq!(codes.len(), 8);
        for c in PALETTE {
            assert_eq!(Color::from_name(c.name()), Some(c));
            assert_eq!(Color::from_code(c.code()), Some(c));
        }
    }

    #[test]
    fn grid_round_trip() {
        let b = Board::new()
            .paint(pos(1, 1), Color::Red)
            .paint(pos(18, 10), Color::Purple)
            .paint(pos(9, 5), Color::Black);
        let text = b.to_grid();
        assert_eq!(text.lines().count(), 10);
        assert!(text.lines().all(|l| l.len() == 18));
        assert_eq!(Board::from_grid(&text).unwrap(), b);
        assert!(text.starts_with("RWWWWWWWWWWWWWWWWW\n"));
    }

    #[test]
    fn grid_rejects_bad_shapes() {
        assert!(matches!(Board::from_grid("WWW"), Err(BoardError::BadGrid(_))));
        let mut lines = Board::new().to_grid_lines();
        lines[3].replace_range(0..1, "X");
        assert!(Board::from_grid_lines(&lines).is_err());
    }

    #[test]
    fn action_triplet_serialization() {
        let set = ActionSet::from_actions([Action::new(pos(2, 3), Color::Orange)]).unwrap();
        assert_eq!(serde_json::to_string(&set).unwrap(), r#"[[2,3,"orange"]]"#);
        let back: ActionSet = serde_json::from_str(r#"[[2,3,"orange"]]"#).unwrap();
        assert_eq!(back, set);
        assert!(serde_json::from_str::<ActionSet>(r#"[[2,3,"orange"],[2,3,"red"]]"#).is_err());
        assert!(serde_json::from_str::<ActionSet>(r#"[[19,3,"red"]]"#).is_err());
        assert!(serde_json::from_str::<ActionSet>(r#"[[1,3,"redd"]]"#).is_err());
    }
}
