//! Rule-based baseline: finds `paint(position, color)` commands in English
//! instructions by matching anchor-token patterns.
//!
//! Registered patterns, tried in order (first class that matches wins):
//!
//! | type | anchors                       | assignment            |
//! |------|-------------------------------|-----------------------|
//! | 1    | NUM1 · NOUN · NUM2 · column   | row NUM1, column NUM2 |
//! | 2    | NUM1 · column · NUM2          | row NUM2, column NUM1 |
//! | 3    | column · NUM1 · NOUN · NUM2   | row NUM2, column NUM1 |
//!
//! Anchors may be separated by at most [`MAX_GAP`] other tokens. A number in
//! the last slot of types 2 and 3 may be a list ("4 and 6", "4, 5, 6").

mod lexicon;

pub use lexicon::{normalize, Token, TokenKind, TokenStream};

use crate::hexboard::{Action, ActionSet, Color, Position};
use serde::Serialize;

pub const MAX_GAP: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PatternType {
    Type1,
    Type2,
    Type3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    Row,
    Column,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    /// A number bound to a role; `list` allows a conjunction of numbers.
    Num {
        role: Role,
        list: bool,
    },
    Noun,
    ColumnWord,
}

/// An anchor sequence and how its numbers map to row and column.
#[derive(Debug, Clone, Copy)]
pub struct Pattern {
    pub kind: PatternType,
    slots: &'static [Slot],
}

const TYPE_1: &[Slot] = &[
    Slot::Num {
        role: Role::Row,
        list: false,
    },
    Slot::Noun,
    Slot::Num {
        role: Role::Column,
        list: false,
    },
    Slot::ColumnWord,
];
const TYPE_2: &[Slot] = &[
    Slot::Num {
        role: Role::Column,
        list: false,
    },
    Slot::ColumnWord,
    Slot::Num {
        role: Role::Row,
        list: true,
    },
];
const TYPE_3: &[Slot] = &[
    Slot::ColumnWord,
    Slot::Num {
        role: Role::Column,
        list: false,
    },
    Slot::Noun,
    Slot::Num {
        role: Role::Row,
        list: true,
    },
];

pub const PATTERNS: [Pattern; 3] = [
    Pattern {
        kind: PatternType::Type1,
        slots: TYPE_1,
    },
    Pattern {
        kind: PatternType::Type2,
        slots: TYPE_2,
    },
    Pattern {
        kind: PatternType::Type3,
        slots: TYPE_3,
    },
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PaintCommand {
    pub row: u32,
    pub column: u32,
    pub color: Color,
    pub source_pattern: PatternType,
}

impl PaintCommand {
    pub fn to_action(&self) -> Option<Action> {
        Position::checked(self.column as i64, self.row as i64).map(|p| Action::new(p, self.color))
    }
}

/// State carried across the steps of one procedure.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParserState {
    pub previous_color: Option<Color>,
}

/// A pattern match: token range plus the bound numbers.
#[derive(Debug)]
struct Match {
    start: usize,
    end: usize,
    rows: Vec<u32>,
    columns: Vec<u32>,
}

fn slot_accepts(slot: Slot, kind: TokenKind) -> bool {
    matches!(
        (slot, kind),
        (Slot::Num { .. }, TokenKind::Num(_)) | (Slot::Noun, TokenKind::Noun) | (Slot::ColumnWord, TokenKind::Column)
    )
}

/// Reads `NUM (conj NUM)*` starting at `at`; returns the numbers and the
/// index of the last one.
fn number_list(tokens: &[Token], at: usize) -> (Vec<u32>, usize) {
    let mut numbers = Vec::new();
    let mut last = at;
    if let TokenKind::Num(n) = tokens[at].kind {
        numbers.push(n);
    }
    let mut i = at + 1;
    loop {
        let mut j = i;
        while j < tokens.len() && tokens[j].kind == TokenKind::Conj {
            j += 1;
        }
        match tokens.get(j).map(|t| t.kind) {
            Some(TokenKind::Num(n)) if j > i => {
                numbers.push(n);
                last = j;
                i = j + 1;
            }
            _ => break,
        }
    }
    (numbers, last)
}

fn match_at(pattern: &Pattern, tokens: &[Token], start: usize) -> Option<Match> {
    if !slot_accepts(pattern.slots[0], tokens[start].kind) {
        return None;
    }
    let mut found = Match {
        start,
        end: start,
        rows: Vec::new(),
        columns: Vec::new(),
    };
    let mut at = start;
    for (k, &slot) in pattern.slots.iter().enumerate() {
        if k > 0 {
            let window = (found.end + 1)..tokens.len().min(found.end + 2 + MAX_GAP);
            at = window.into_iter().find(|&i| slot_accepts(slot, tokens[i].kind))?;
        }
        found.end = at;
        if let Slot::Num { role, list } = slot {
            let numbers = if list {
                let (numbers, last) = number_list(tokens, at);
                found.end = last;
                numbers
            } else {
                match tokens[at].kind {
                    TokenKind::Num(n) => vec![n],
                    _ => unreachable!("slot_accepts checked the kind"),
                }
            };
            match role {
                Role::Row => found.rows = numbers,
                Role::Column => found.columns = numbers,
            }
        }
    }
    Some(found)
}

fn find_all(pattern: &Pattern, tokens: &[Token]) -> Vec<Match> {
    let mut matches = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        match match_at(pattern, tokens, i) {
            Some(m) => {
                i = m.end + 1;
                matches.push(m);
            }
            None => i += 1,
        }
    }
    matches
}

fn color_in(tokens: &[Token]) -> impl DoubleEndedIterator<Item = Color> + '_ {
    tokens.iter().filter_map(|t| match t.kind {
        TokenKind::Color(c) => Some(c),
        _ => None,
    })
}

/// Applies the first pattern class that matches anywhere in `tokens`.
///
/// Each match takes the first color after it (before the next match), else
/// the nearest color before it, else the carried-over color. Colors found
/// in the instruction update the carried-over color even when nothing
/// matched.
pub fn match_patterns(tokens: &[Token], state: &mut ParserState) -> Vec<PaintCommand> {
    let mut commands = Vec::new();
    let hit = PATTERNS
        .iter()
        .map(|p| (p, find_all(p, tokens)))
        .find(|(_, matches)| !matches.is_empty());

    let Some((pattern, matches)) = hit else {
        if let Some(c) = color_in(tokens).last() {
            state.previous_color = Some(c);
        }
        return commands;
    };

    for (k, m) in matches.iter().enumerate() {
        let next_start = matches.get(k + 1).map_or(tokens.len(), |n| n.start);
        let prev_end = if k == 0 { 0 } else { matches[k - 1].end + 1 };
        let color = color_in(&tokens[m.end + 1..next_start])
            .next()
            .or_else(|| color_in(&tokens[prev_end..m.start]).last())
            .or(state.previous_color);
        let Some(color) = color else {
            continue;
        };
        state.previous_color = Some(color);
        for &column in &m.columns {
            for &row in &m.rows {
                commands.push(PaintCommand {
                    row,
                    column,
                    color,
                    source_pattern: pattern.kind,
                });
            }
        }
    }
    commands
}

/// Runs the baseline over one instruction, threading `state`.
pub fn predict(instruction: &str, state: &mut ParserState) -> ActionSet {
    let mut actions = ActionSet::new();
    for command in match_patterns(&normalize(instruction), state) {
        match command.to_action() {
            Some(a) => actions.assign(a.position, a.color),
            None => log::debug!(
                "dropping out-of-bounds command row {} column {} in {instruction:?}",
                command.row,
                command.column
            ),
        }
    }
    actions
}

/// One action set per instruction of a procedure; no match means no action.
pub fn run_naive<S: AsRef<str>>(instructions: &[S]) -> Vec<ActionSet> {
    let mut state = ParserState::default();
    instructions.iter().map(|i| predict(i.as_ref(), &mut state)).collect()
}
