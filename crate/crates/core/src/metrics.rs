//! Board-based and action-based precision, recall, F1 and exact match.
//!
//! Per-step scores are exact fractions over tile triplets (position and
//! color). Macro aggregates are means over steps.

use crate::dataset::DrawingProcedure;
use crate::hexboard::{ActionSet, Board};
use num_rational::Ratio;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

pub type Fraction = Ratio<u32>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("cannot aggregate an empty list of evaluations")]
    EmptyInput,
    #[error("step {step} has no executor evaluations")]
    NoExecutors { step: usize },
    #[error("hypothesis has {got} steps but gold has {expected}")]
    Alignment { expected: usize, got: usize },
    #[error("exact match needs two action sets or two boards")]
    KindMismatch,
}

/// Which comparison a headline number refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Board,
    #[default]
    Action,
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "board" => Ok(Mode::Board),
            "action" => Ok(Mode::Action),
            other => Err(format!("unknown mode `{other}` (expected board|action)")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Board => "board",
            Mode::Action => "action",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Score {
    pub precision: Fraction,
    pub recall: Fraction,
    pub f1: Fraction,
}

impl Score {
    /// Scores from set sizes. Two empty sets agree perfectly; one empty set
    /// against a non-empty one scores zero.
    pub fn from_counts(gold: usize, hyp: usize, overlap: usize) -> Score {
        debug_assert!(overlap <= gold.min(hyp));
        let (g, h, o) = (gold as u32, hyp as u32, overlap as u32);
        match (g, h) {
            (0, 0) => Score::perfect(),
            (0, _) | (_, 0) => Score::zero(),
            _ => Score {
                precision: Ratio::new(o, h),
                recall: Ratio::new(o, g),
                f1: Ratio::new(2 * o, g + h),
            },
        }
    }

    pub fn perfect() -> Score {
        let one = Ratio::from_integer(1);
        Score {
            precision: one,
            recall: one,
            f1: one,
        }
    }

    pub fn zero() -> Score {
        let zero = Ratio::from_integer(0);
        Score {
            precision: zero,
            recall: zero,
            f1: zero,
        }
    }
}

impl Serialize for Score {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Score", 3)?;
        s.serialize_field("precision", &to_f64(self.precision))?;
        s.serialize_field("recall", &to_f64(self.recall))?;
        s.serialize_field("f1", &to_f64(self.f1))?;
        s.end()
    }
}

pub fn to_f64(x: Fraction) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

/// Scores two action sets as sets of (position, color) pairs.
pub fn action_score(gold: &ActionSet, hyp: &ActionSet) -> Score {
    let overlap = hyp.iter().filter(|a| gold.contains(a)).count();
    Score::from_counts(gold.len(), hyp.len(), overlap)
}

/// Scores the painted (non-white) tiles of two boards.
pub fn board_score(gold: &Board, hyp: &Board) -> Score {
    action_score(&gold.painted(), &hyp.painted())
}

/// Either operand kind accepted by [`exact_match`].
#[derive(Debug, Clone, Copy)]
pub enum Execution<'a> {
    Actions(&'a ActionSet),
    Board(&'a Board),
}

pub fn exact_match(gold: Execution<'_>, hyp: Execution<'_>) -> Result<bool, MetricsError> {
    match (gold, hyp) {
        (Execution::Actions(g), Execution::Actions(h)) => Ok(g == h),
        (Execution::Board(g), Execution::Board(h)) => Ok(g == h),
        _ => Err(MetricsError::KindMismatch),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StepEvaluation {
    pub board: Score,
    pub action: Score,
    pub board_em: bool,
    pub action_em: bool,
}

impl StepEvaluation {
    /// Compares one step given the gold and hypothesis actions and the boards
    /// they produced.
    pub fn compare(
        gold_actions: &ActionSet,
        gold_board: &Board,
        hyp_actions: &ActionSet,
        hyp_board: &Board,
    ) -> StepEvaluation {
        StepEvaluation {
            board: board_score(gold_board, hyp_board),
            action: action_score(gold_actions, hyp_actions),
            board_em: gold_board == hyp_board,
            action_em: gold_actions == hyp_actions,
        }
    }

    pub fn score(&self, mode: Mode) -> Score {
        match mode {
            Mode::Board => self.board,
            Mode::Action => self.action,
        }
    }

    pub fn em(&self, mode: Mode) -> bool {
        match mode {
            Mode::Board => self.board_em,
            Mode::Action => self.action_em,
        }
    }
}

/// Means over steps for one comparison mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MacroScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub em: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProcedureReport {
    pub steps: Vec<StepEvaluation>,
    pub board: MacroScores,
    pub action: MacroScores,
}

impl ProcedureReport {
    pub fn macro_scores(&self, mode: Mode) -> MacroScores {
        match mode {
            Mode::Board => self.board,
            Mode::Action => self.action,
        }
    }

    pub fn macro_f1(&self, mode: Mode) -> f64 {
        self.macro_scores(mode).f1
    }

    pub fn macro_em(&self, mode: Mode) -> f64 {
        self.macro_scores(mode).em
    }

    /// Every step matches exactly.
    pub fn procedure_em(&self, mode: Mode) -> bool {
        self.steps.iter().all(|s| s.em(mode))
    }
}

fn mean_scores(steps: &[StepEvaluation], mode: Mode) -> MacroScores {
    let n = steps.len() as f64;
    let mut acc = MacroScores {
        precision: 0.0,
        recall: 0.0,
        f1: 0.0,
        em: 0.0,
    };
    for step in steps {
        let s = step.score(mode);
        acc.precision += to_f64(s.precision);
        acc.recall += to_f64(s.recall);
        acc.f1 += to_f64(s.f1);
        acc.em += if step.em(mode) { 1.0 } else { 0.0 };
    }
    MacroScores {
        precision: acc.precision / n,
        recall: acc.recall / n,
        f1: acc.f1 / n,
        em: acc.em / n,
    }
}

pub fn macro_aggregate(evaluations: &[StepEvaluation]) -> Result<ProcedureReport, MetricsError> {
    if evaluations.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    Ok(ProcedureReport {
        steps: evaluations.to_vec(),
        board: mean_scores(evaluations, Mode::Board),
        action: mean_scores(evaluations, Mode::Action),
    })
}

/// Macro-min and macro-max: per step keep only the lowest (resp. highest)
/// scoring executor under `mode`, then average. Ties go to the first executor.
pub fn macro_min_max(
    per_step_by_executor: &[Vec<StepEvaluation>],
    mode: Mode,
) -> Result<(ProcedureReport, ProcedureReport), MetricsError> {
    if per_step_by_executor.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let mut lows = Vec::with_capacity(per_step_by_executor.len());
    let mut highs = Vec::with_capacity(per_step_by_executor.len());
    for (i, executors) in per_step_by_executor.iter().enumerate() {
        let first = executors.first().ok_or(MetricsError::NoExecutors { step: i + 1 })?;
        let (mut low, mut high) = (first, first);
        for e in &executors[1..] {
            let f1 = e.score(mode).f1;
            if f1 < low.score(mode).f1 {
                low = e;
            }
            if f1 > high.score(mode).f1 {
                high = e;
            }
        }
        lows.push(*low);
        highs.push(*high);
    }
    Ok((macro_aggregate(&lows)?, macro_aggregate(&highs)?))
}

/// Hypothesis boards for each step. With `oracle_prev_state` each step starts
/// from the gold previous board; otherwise from the hypothesis's own board.
pub fn hypothesis_boards(gold: &DrawingProcedure, hyp_steps: &[ActionSet], oracle_prev_state: bool) -> Vec<Board> {
    let mut rolling = Board::new();
    let mut gold_prev = Board::new();
    let mut out = Vec::with_capacity(hyp_steps.len());
    for (step, hyp) in gold.steps.iter().zip(hyp_steps) {
        let start = if oracle_prev_state { &gold_prev } else { &rolling };
        let board = start.apply_actions(hyp);
        rolling = board.clone();
        gold_prev = step.board_after.clone();
        out.push(board);
    }
    out
}

pub fn evaluate_procedure(
    gold: &DrawingProcedure,
    hyp_steps: &[ActionSet],
    oracle_prev_state: bool,
) -> Result<ProcedureReport, MetricsError> {
    if hyp_steps.len() != gold.steps.len() {
        return Err(MetricsError::Alignment {
            expected: gold.steps.len(),
            got: hyp_steps.len(),
        });
    }
    let boards = hypothesis_boards(gold, hyp_steps, oracle_prev_state);
    let evaluations: Vec<StepEvaluation> = gold
        .steps
        .iter()
        .zip(hyp_steps)
        .zip(&boards)
        .map(|((step, hyp), board)| StepEvaluation::compare(&step.actions, &step.board_after, hyp, board))
        .collect();
    macro_aggregate(&evaluations)
}

/// Two decimals, ties to even, computed exactly.
pub fn round_half_even(x: Fraction) -> String {
    let scaled = x * Ratio::from_integer(100u32);
    let floor = scaled.floor().to_integer();
    let rem = scaled - Ratio::from_integer(floor);
    let half = Ratio::new(1, 2);
    let hundredths = if rem > half || (rem == half && floor % 2 == 1) {
        floor + 1
    } else {
        floor
    };
    format!("{}.{:02}", hundredths / 100, hundredths % 100)
}

/// Two decimals, ties to even, for aggregated values.
pub fn format_score(x: f64) -> String {
    let scaled = x * 100.0;
    let floor = scaled.floor();
    let rem = scaled - floor;
    let hundredths = if (rem - 0.5).abs() < 1e-9 {
        if floor as i64 % 2 == 0 {
            floor
        } else {
            floor + 1.0
        }
    } else {
        scaled.round()
    } as i64;
    format!("{}.{:02}", hundredths / 100, hundredths % 100)
}
