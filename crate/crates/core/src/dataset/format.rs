//! One JSON object per line. See `docs/dataset-format.md`.

use super::{AuthorRole, DatasetError, DrawingProcedure, DrawingStep, ExecutorRun, QaLabel, ValidationError};
use crate::hexboard::{ActionSet, Board};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::fs;
use std::path::Path;

#[derive(Debug, Serialize, Deserialize)]
struct ProcedureRecord {
    id: String,
    image_id: String,
    #[serde(default)]
    author_role: AuthorRole,
    steps: Vec<StepRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    qa_labels: Vec<QaLabel>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    executions: Vec<ExecutorRun>,
}

#[derive(Debug, Serialize, Deserialize)]
struct StepRecord {
    index: usize,
    instruction: String,
    actions: ActionSet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    board_after: Option<Board>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    labels: Vec<String>,
}

/// A problem with one line of a dataset or prediction file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordError {
    /// 1-based line number.
    pub line: usize,
    pub id: Option<String>,
    pub message: String,
}

impl fmt::Display for RecordError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.id {
            Some(id) => write!(f, "line {} ({}): {}", self.line, id, self.message),
            None => write!(f, "line {}: {}", self.line, self.message),
        }
    }
}

impl std::error::Error for RecordError {}

fn from_record(record: ProcedureRecord) -> Result<DrawingProcedure, ValidationError> {
    let mut board = Board::new();
    let mut steps = Vec::with_capacity(record.steps.len());
    for step in record.steps {
        board = board.apply_actions(&step.actions);
        // A stored board must agree with the one derived from the actions.
        if step.board_after.as_ref().is_some_and(|stored| *stored != board) {
            return Err(ValidationError::Alignment { step: step.index });
        }
        steps.push(DrawingStep {
            index: step.index,
            instruction: step.instruction,
            actions: step.actions,
            board_after: board.clone(),
            labels: step.labels,
        });
    }
    let procedure = DrawingProcedure {
        id: record.id,
        image_id: record.image_id,
        author_role: record.author_role,
        steps,
        qa_labels: record.qa_labels,
        executions: record.executions,
    };
    procedure.validate()?;
    Ok(procedure)
}

fn to_record(procedure: &DrawingProcedure, store_boards: bool) -> ProcedureRecord {
    ProcedureRecord {
        id: procedure.id.clone(),
        image_id: procedure.image_id.clone(),
        author_role: procedure.author_role,
        steps: procedure
            .steps
            .iter()
            .map(|s| StepRecord {
                index: s.index,
                instruction: s.instruction.clone(),
                actions: s.actions.clone(),
                board_after: store_boards.then(|| s.board_after.clone()),
                labels: s.labels.clone(),
            })
            .collect(),
        qa_labels: procedure.qa_labels.clone(),
        executions: procedure.executions.clone(),
    }
}

fn record_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn peek_id(line: &str) -> Option<String> {
    serde_json::from_str::<serde_json::Value>(line)
        .ok()?
        .get("id")?
        .as_str()
        .map(str::to_string)
}

/// Parses every record, keeping the valid ones and reporting the rest.
pub fn parse_procedures(text: &str) -> (Vec<DrawingProcedure>, Vec<RecordError>) {
    let mut procedures = Vec::new();
    let mut errors = Vec::new();
    for (line, raw) in record_lines(text) {
        let result = serde_json::from_str::<ProcedureRecord>(raw)
            .map_err(|e| e.to_string())
            .and_then(|rec| from_record(rec).map_err(|e| e.to_string()));
        match result {
            Ok(p) => procedures.push(p),
            Err(message) => errors.push(RecordError {
                line,
                id: peek_id(raw),
                message,
            }),
        }
    }
    (procedures, errors)
}

fn read(path: &Path) -> Result<String, DatasetError> {
    fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_lenient(path: &Path) -> Result<(Vec<DrawingProcedure>, Vec<RecordError>), DatasetError> {
    Ok(parse_procedures(&read(path)?))
}

/// Loads a dataset file, failing if any record is invalid.
pub fn load(path: &Path) -> Result<Vec<DrawingProcedure>, DatasetError> {
    let (procedures, errors) = load_lenient(path)?;
    if errors.is_empty() {
        Ok(procedures)
    } else {
        Err(DatasetError::Invalid(errors))
    }
}

pub fn to_jsonl(procedures: &[DrawingProcedure], store_boards: bool) -> String {
    let mut out = String::new();
    for p in procedures {
        out.push_str(&serde_json::to_string(&to_record(p, store_boards)).expect("records serialize"));
        out.push('\n');
    }
    out
}

pub fn save(procedures: &[DrawingProcedure], path: &Path, store_boards: bool) -> Result<(), DatasetError> {
    fs::write(path, to_jsonl(procedures, store_boards)).map_err(|source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Predicted actions for one procedure. Dataset records parse as predictions
/// too, so a gold file can be scored against itself.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub executor: Option<String>,
    pub steps: Vec<PredictedStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictedStep {
    pub index: usize,
    pub actions: ActionSet,
}

impl Prediction {
    pub fn new(id: impl Into<String>, steps: Vec<ActionSet>) -> Prediction {
        Prediction {
            id: id.into(),
            executor: None,
            steps: steps
                .into_iter()
                .enumerate()
                .map(|(i, actions)| PredictedStep { index: i + 1, actions })
                .collect(),
        }
    }

    pub fn action_sets(&self) -> Vec<ActionSet> {
        self.steps.iter().map(|s| s.actions.clone()).collect()
    }
}

pub fn parse_predictions(text: &str) -> (Vec<Prediction>, Vec<RecordError>) {
    let mut predictions = Vec::new();
    let mut errors = Vec::new();
    for (line, raw) in record_lines(text) {
        match serde_json::from_str::<Prediction>(raw) {
            Ok(p) => {
                let contiguous = p.steps.iter().enumerate().all(|(i, s)| s.index == i + 1);
                if contiguous {
                    predictions.push(p);
                } else {
                    errors.push(RecordError {
                        line,
                        id: Some(p.id),
                        message: "step indices must run 1..n".into(),
                    });
                }
            }
            Err(e) => errors.push(RecordError {
                line,
                id: peek_id(raw),
                message: e.to_string(),
            }),
        }
    }
    (predictions, errors)
}

pub fn load_predictions(path: &Path) -> Result<Vec<Prediction>, DatasetError> {
    let (predictions, errors) = parse_predictions(&read(path)?);
    if errors.is_empty() {
        Ok(predictions)
    } else {
        Err(DatasetError::Invalid(errors))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hexboard::{Action, Color, Position};

    fn sample() -> DrawingProcedure {
        let a = |c, r, col| Action::new(Position::new(c, r).unwrap(), col);
        DrawingProcedure::from_actions(
            "proc-1",
            "img-1",
            [
                (
                    "Paint the top tile red.",
                    ActionSet::from_actions([a(1, 1, Color::Red)]).unwrap(),
                ),
                (
                    "Then two blue tiles below it.",
                    ActionSet::from_actions([a(1, 2, Color::Blue), a(1, 3, Color::Blue)]).unwrap(),
                ),
            ],
        )
    }

    #[test]
    fn save_then_load_is_identity() {
        let dir = tempfile::tempdir().unwrap();
        for store_boards in [false, true] {
            let path = dir.path().join(format!("d{store_boards}.jsonl"));
            save(&[sample()], &path, store_boards).unwrap();
            assert_eq!(load(&path).unwrap(), vec![sample()]);
        }
    }

    #[test]
    fn byte_layout_is_stable() {
        let text = to_jsonl(&[sample()], false);
        assert_eq!(
            text,
            concat!(
                r#"{"id":"proc-1","image_id":"img-1","author_role":"instructor","steps":["#,
                r#"{"index":1,"instruction":"Paint the top tile red.","actions":[[1,1,"red"]]},"#,
                r#"{"index":2,"instruction":"Then two blue tiles below it.","actions":[[1,2,"blue"],[1,3,"blue"]]}]}"#,
                "\n"
            )
        );
    }

    #[test]
    fn empty_file_is_empty_dataset() {
        let (procs, errors) = parse_procedures("");
        assert!(procs.is_empty() && errors.is_empty());
        let (procs, errors) = parse_procedures("\n  \n");
        assert!(procs.is_empty() && errors.is_empty());
    }

    #[test]
    fn misaligned_board_is_reported_per_record() {
        let mut lines: Vec<String> = to_jsonl(&[sample()], true).lines().map(String::from).collect();
        let good = lines[0].clone();
        lines[0] = lines[0].replacen("RWWWWWWWWWWWWWWWWW", "WWWWWWWWWWWWWWWWWW", 1);
        lines.push(good);
        let (procs, errors) = parse_procedures(&lines.join("\n"));
        assert_eq!(procs.len(), 1);
        assert_eq!(errors.len(), 1);
        assert_eq!(errors[0].line, 1);
        assert_eq!(errors[0].id.as_deref(), Some("proc-1"));
        assert!(errors[0].message.contains("step 1"), "{}", errors[0].message);
    }

    #[test]
    fn malformed_records() {
        let cases = [
            r#"{"id":"x","image_id":"i","steps":[{"index":1,"instruction":"a","actions":[[0,1,"red"]]}]}"#,
            r#"{"id":"x","image_id":"i","steps":[{"index":1,"instruction":"a","actions":[[1,1,"pink"]]}]}"#,
            r#"{"id":"x","steps":[]}"#,
            r#"{"id":"x","image_id":"i","steps":[]}"#,
            r#"{"id":"x","image_id":"i","steps":[{"index":2,"instruction":"a","actions":[]}]}"#,
            "not json",
        ];
        for case in cases {
            let (procs, errors) = parse_procedures(case);
            assert!(procs.is_empty(), "{case}");
            assert_eq!(errors.len(), 1, "{case}");
        }
    }

    #[test]
    fn gold_file_parses_as_predictions() {
        let (preds, errors) = parse_predictions(&to_jsonl(&[sample()], true));
        assert!(errors.is_empty());
        assert_eq!(preds[0].action_sets(), sample().gold_actions());
    }
}
