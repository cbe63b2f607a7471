//! Drawing procedures: the data model, its line-delimited JSON format,
//! validation, splits, statistics and executor agreement.

mod agreement;
mod format;
mod split;
mod stats;

pub use agreement::{verify_agreement, AgreementReport};
pub use format::{
    load, load_lenient, load_predictions, parse_predictions, parse_procedures, save, to_jsonl, PredictedStep,
    Prediction, RecordError,
};
pub use split::{make_split, Split, SplitError, SplitMode};
pub use stats::{stats, token_count, Summary};

use crate::hexboard::{ActionSet, Board};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{} invalid record(s); first: {}", .0.len(), .0[0])]
    Invalid(Vec<RecordError>),
}

/// Why a single procedure fails validation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("procedure has no steps")]
    NoSteps,
    #[error("step indices must run 1..n; found {found} at position {expected}")]
    StepIndex { expected: usize, found: usize },
    #[error("step {step}: board_after does not equal the previous board with the step's actions applied")]
    Alignment { step: usize },
    #[error("QA label refers to step {step}, but the procedure has {len} steps")]
    QaStep { step: usize, len: usize },
    #[error("execution `{executor}` has {got} steps, expected {expected}")]
    ExecutionLength {
        executor: String,
        expected: usize,
        got: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AuthorRole {
    #[default]
    Instructor,
    Executor,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DrawingStep {
    /// 1-based.
    pub index: usize,
    pub instruction: String,
    pub actions: ActionSet,
    pub board_after: Board,
    /// Free-form annotation labels.
    pub labels: Vec<String>,
}

/// Kinds of instructor error found during quality assurance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QaCategory {
    OverExecution,
    UnderExecution,
    Miscounting,
    ErrorPropagation,
    Other,
}

impl FromStr for QaCategory {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| format!("unknown QA category `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QaLabel {
    pub step: usize,
    pub category: QaCategory,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corrected_actions: Option<ActionSet>,
}

/// One executor's submitted actions for every step of a procedure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecutorRun {
    pub executor: String,
    pub steps: Vec<ActionSet>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DrawingProcedure {
    pub id: String,
    pub image_id: String,
    pub author_role: AuthorRole,
    pub steps: Vec<DrawingStep>,
    pub qa_labels: Vec<QaLabel>,
    pub executions: Vec<ExecutorRun>,
}

impl DrawingProcedure {
    /// Builds a procedure from instructions and their actions, deriving every
    /// `board_after` from a blank board.
    pub fn from_actions<I, S>(id: impl Into<String>, image_id: impl Into<String>, steps: I) -> DrawingProcedure
    where
        I: IntoIterator<Item = (S, ActionSet)>,
        S: Into<String>,
    {
        let mut board = Board::new();
        let steps = steps
            .into_iter()
            .enumerate()
            .map(|(i, (instruction, actions))| {
                board = board.apply_actions(&actions);
                DrawingStep {
                    index: i + 1,
                    instruction: instruction.into(),
                    actions,
                    board_after: board.clone(),
                    labels: Vec::new(),
                }
            })
            .collect();
        DrawingProcedure {
            id: id.into(),
            image_id: image_id.into(),
            author_role: AuthorRole::Instructor,
            steps,
            qa_labels: Vec::new(),
            executions: Vec::new(),
        }
    }

    /// The board before step `index` (1-based).
    pub fn board_before(&self, index: usize) -> Board {
        if index <= 1 {
            Board::new()
        } else {
            self.steps[index - 2].board_after.clone()
        }
    }

    pub fn final_board(&self) -> Board {
        self.steps.last().map(|s| s.board_after.clone()).unwrap_or_default()
    }

    pub fn gold_actions(&self) -> Vec<ActionSet> {
        self.steps.iter().map(|s| s.actions.clone()).collect()
    }

    pub fn instructions(&self) -> Vec<&str> {
        self.steps.iter().map(|s| s.instruction.as_str()).collect()
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        if self.steps.is_empty() {
            return Err(ValidationError::NoSteps);
        }
        let mut board = Board::new();
        for (i, step) in self.steps.iter().enumerate() {
            if step.index != i + 1 {
                return Err(ValidationError::StepIndex {
                    expected: i + 1,
                    found: step.index,
                });
            }
            board = board.apply_actions(&step.actions);
            if board != step.board_after {
                return Err(ValidationError::Alignment { step: step.index });
            }
        }
        for label in &self.qa_labels {
            if label.step == 0 || label.step > self.steps.len() {
                return Err(ValidationError::QaStep {
                    step: label.step,
                    len: self.steps.len(),
                });
            }
        }
        for run in &self.executions {
            if run.steps.len() != self.steps.len() {
                return Err(ValidationError::ExecutionLength {
                    executor: run.executor.clone(),
                    expected: self.steps.len(),
                    got: run.steps.len(),
                });
            }
        }
        Ok(())
    }

    /// The procedure with QA corrections substituted for the original actions
    /// and all boards recomputed.
    pub fn gold_corrected(&self) -> DrawingProcedure {
        let mut fixed = self.clone();
        for label in &self.qa_labels {
            if let (Some(corrected), Some(step)) = (
                &label.corrected_actions,
                fixed.steps.get_mut(label.step.wrapping_sub(1)),
            ) {
                step.actions = corrected.clone();
            }
        }
        let mut board = Board::new();
        for step in &mut fixed.steps {
            board = board.apply_actions(&step.actions);
            step.board_after = board.clone();
        }
        fixed
    }
}

impl fmt::Display for DrawingProcedure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (image {}, {} steps)", self.id, self.image_id, self.steps.len())
    }
}
