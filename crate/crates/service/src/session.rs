//! Session state machines, independent of transport.

use hexagons_core::dataset::{AuthorRole, DrawingProcedure, DrawingStep};
use hexagons_core::hexboard::{ActionSet, Board, Color, Position};
use hexagons_core::metrics::{evaluate_procedure, ProcedureReport};
use serde::Serialize;
use std::time::{Duration, Instant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SessionStatus {
    Open,
    Finalized,
    Discarded,
    Expired,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TileMismatch {
    pub column: u8,
    pub row: u8,
    pub expected: Color,
    pub actual: Color,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SessionError {
    #[error("session is {0:?}")]
    NotOpen(SessionStatus),
    #[error("instruction has {lines} line(s) but {alignments} alignment(s) were given")]
    AlignmentCount { lines: usize, alignments: usize },
    #[error("instruction is empty")]
    EmptyInstruction,
    #[error("no steps submitted")]
    NoSteps,
    #[error("board differs from the target on {} tile(s)", .0.len())]
    Mismatch(Vec<TileMismatch>),
    #[error("step {index} is past the last step ({total})")]
    PastEnd { index: usize, total: usize },
    #[error("expected step {expected}, got step {got}")]
    OutOfOrder { expected: usize, got: usize },
    #[error("only {submitted} of {total} steps submitted")]
    Incomplete { submitted: usize, total: usize },
    #[error("all instructions have been revealed")]
    Finished,
}

/// Each non-blank line of a description is its own instruction.
pub fn split_instructions(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect()
}

pub fn board_mismatch(target: &Board, actual: &Board) -> Vec<TileMismatch> {
    Position::all()
        .filter(|&p| target.get(p) != actual.get(p))
        .map(|p| TileMismatch {
            column: p.column(),
            row: p.row(),
            expected: target.get(p),
            actual: actual.get(p),
        })
        .collect()
}

struct Clock {
    last_activity: Instant,
    timeout: Option<Duration>,
}

impl Clock {
    fn new(timeout: Option<Duration>) -> Clock {
        Clock {
            last_activity: Instant::now(),
            timeout,
        }
    }

    fn touch(&mut self, status: &mut SessionStatus) -> Result<(), SessionError> {
        if *status == SessionStatus::Open && self.timeout.is_some_and(|t| self.last_activity.elapsed() > t) {
            *status = SessionStatus::Expired;
        }
        if *status != SessionStatus::Open {
            return Err(SessionError::NotOpen(*status));
        }
        self.last_activity = Instant::now();
        Ok(())
    }
}

pub struct DescriptionSession {
    pub session_id: String,
    pub image_id: String,
    pub steps: Vec<DrawingStep>,
    pub status: SessionStatus,
    pub board: Board,
    clock: Clock,
}

impl DescriptionSession {
    pub fn new(session_id: String, image_id: String, timeout: Option<Duration>) -> DescriptionSession {
        DescriptionSession {
            session_id,
            image_id,
            steps: Vec::new(),
            status: SessionStatus::Open,
            board: Board::new(),
            clock: Clock::new(timeout),
        }
    }

    /// Appends one step per instruction line; boards are computed here, never
    /// taken from the client.
    pub fn submit(&mut self, instruction: &str, alignments: Vec<ActionSet>) -> Result<&[DrawingStep], SessionError> {
        self.clock.touch(&mut self.status)?;
        let lines = split_instructions(instruction);
        if lines.is_empty() {
            return Err(SessionError::EmptyInstruction);
        }
        if lines.len() != alignments.len() {
            return Err(SessionError::AlignmentCount {
                lines: lines.len(),
                alignments: alignments.len(),
            });
        }
        let first_new = self.steps.len();
        for (line, actions) in lines.into_iter().zip(alignments) {
            self.board = self.board.apply_actions(&actions);
            self.steps.push(DrawingStep {
                index: self.steps.len() + 1,
                instruction: line,
                actions,
                board_after: self.board.clone(),
                labels: Vec::new(),
            });
        }
        Ok(&self.steps[first_new..])
    }

    /// Closes the session if the board reproduces `target`.
    pub fn finalize(&mut self, target: &Board, procedure_id: String) -> Result<DrawingProcedure, SessionError> {
        self.clock.touch(&mut self.status)?;
        if self.steps.is_empty() {
            return Err(SessionError::NoSteps);
        }
        let diff = board_mismatch(target, &self.board);
        if !diff.is_empty() {
            return Err(SessionError::Mismatch(diff));
        }
        self.status = SessionStatus::Finalized;
        Ok(DrawingProcedure {
            id: procedure_id,
            image_id: self.image_id.clone(),
            author_role: AuthorRole::Instructor,
            steps: self.steps.clone(),
            qa_labels: Vec::new(),
            executions: Vec::new(),
        })
    }

    pub fn discard(&mut self) -> Result<(), SessionError> {
        self.clock.touch(&mut self.status)?;
        self.status = SessionStatus::Discarded;
        Ok(())
    }
}

/// What an executor may see of the next step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InstructionView {
    pub index: usize,
    pub total: usize,
    pub instruction: String,
    pub prev_instruction: Option<String>,
}

pub struct ExecutionSession {
    pub session_id: String,
    pub procedure_id: String,
    pub total: usize,
    pub submissions: Vec<ActionSet>,
    pub status: SessionStatus,
    clock: Clock,
}

impl ExecutionSession {
    pub fn new(session_id: String, procedure: &DrawingProcedure, timeout: Option<Duration>) -> ExecutionSession {
        ExecutionSession {
            session_id,
            procedure_id: procedure.id.clone(),
            total: procedure.steps.len(),
            submissions: Vec::new(),
            status: SessionStatus::Open,
            clock: Clock::new(timeout),
        }
    }

    /// 1-based index of the step awaiting a submission.
    pub fn cursor(&self) -> usize {
        self.submissions.len() + 1
    }

    pub fn next_instruction(&mut self, procedure: &DrawingProcedure) -> Result<InstructionView, SessionError> {
        self.clock.touch(&mut self.status)?;
        let index = self.cursor();
        if index > self.total {
            return Err(SessionError::Finished);
        }
        Ok(InstructionView {
            index,
            total: self.total,
            instruction: procedure.steps[index - 1].instruction.clone(),
            prev_instruction: (index > 1).then(|| procedure.steps[index - 2].instruction.clone()),
        })
    }

    pub fn submit(&mut self, index: usize, actions: ActionSet) -> Result<(), SessionError> {
        self.clock.touch(&mut self.status)?;
        if index > self.total {
            return Err(SessionError::PastEnd {
                index,
                total: self.total,
            });
        }
        if index != self.cursor() {
            return Err(SessionError::OutOfOrder {
                expected: self.cursor(),
                got: index,
            });
        }
        self.submissions.push(actions);
        Ok(())
    }

    pub fn finalize(&mut self, gold: &DrawingProcedure) -> Result<ProcedureReport, SessionError> {
        self.clock.touch(&mut self.status)?;
        if self.submissions.len() < self.total {
            return Err(SessionError::Incomplete {
                submitted: self.submissions.len(),
                total: self.total,
            });
        }
        let report =
            evaluate_procedure(gold, &self.submissions, false).expect("submissions are aligned with the procedure");
        self.status = SessionStatus::Finalized;
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use hexagons_core::hexboard::Action;
    use hexagons_core::metrics::Mode;

    fn acts(list: &[(i64, i64, Color)]) -> ActionSet {
        ActionSet::from_actions(
            list.iter()
                .map(|&(c, r, col)| Action::new(Position::new(c, r).unwrap(), col)),
        )
        .unwrap()
    }

    fn target() -> Board {
        Board::new().apply_actions(&acts(&[(2, 2, Color::Red), (3, 3, Color::Blue)]))
    }

    #[test]
    fn one_step_finalizes() {
        let mut s = DescriptionSession::new("d1".into(), "img".into(), None);
        s.submit("paint it all", vec![target().painted()]).unwrap();
        let proc = s.finalize(&target(), "p1".into()).unwrap();
        assert_eq!(proc.steps.len(), 1);
        assert!(proc.validate().is_ok());
        assert_eq!(s.status, SessionStatus::Finalized);
        assert_eq!(
            s.submit("more", vec![ActionSet::new()]),
            Err(SessionError::NotOpen(SessionStatus::Finalized))
        );
    }

    #[test]
    fn mismatch_lists_the_wrong_tile() {
        let mut s = DescriptionSession::new("d1".into(), "img".into(), None);
        s.submit("paint", vec![acts(&[(2, 2, Color::Red), (3, 3, Color::Green)])])
            .unwrap();
        match s.finalize(&target(), "p1".into()) {
            Err(SessionError::Mismatch(tiles)) => assert_eq!(
                tiles,
                vec![TileMismatch {
                    column: 3,
                    row: 3,
                    expected: Color::Blue,
                    actual: Color::Green
                }]
            ),
            other => panic!("{other:?}"),
        }
        assert_eq!(s.status, SessionStatus::Open);
    }

    #[test]
    fn linebreaks_split_steps() {
        let mut s = DescriptionSession::new("d1".into(), "img".into(), None);
        let added = s
            .submit(
                "paint (2,2) red\r\n\npaint (3,3) blue\n",
                vec![acts(&[(2, 2, Color::Red)]), acts(&[(3, 3, Color::Blue)])],
            )
            .unwrap();
        assert_eq!(added.len(), 2);
        assert_eq!(added[1].index, 2);
        assert_eq!(added[1].instruction, "paint (3,3) blue");
        assert!(matches!(
            s.submit("a\nb", vec![ActionSet::new()]),
            Err(SessionError::AlignmentCount {
                lines: 2,
                alignments: 1
            })
        ));
        assert!(s.finalize(&target(), "p".into()).is_ok());
    }

    #[test]
    fn expired_sessions_reject_changes() {
        let mut s = DescriptionSession::new("d1".into(), "img".into(), Some(Duration::ZERO));
        std::thread::sleep(Duration::from_millis(2));
        assert_eq!(s.discard(), Err(SessionError::NotOpen(SessionStatus::Expired)));
    }

    #[test]
    fn execution_sequencing() {
        let gold = DrawingProcedure::from_actions(
            "p",
            "img",
            [
                ("one", acts(&[(2, 2, Color::Red)])),
                ("two", acts(&[(3, 3, Color::Blue)])),
            ],
        );
        let mut s = ExecutionSession::new("x1".into(), &gold, None);
        let view = s.next_instruction(&gold).unwrap();
        assert_eq!((view.index, view.prev_instruction), (1, None));
        assert_eq!(
            s.submit(2, ActionSet::new()),
            Err(SessionError::OutOfOrder { expected: 1, got: 2 })
        );
        s.submit(1, gold.steps[0].actions.clone()).unwrap();
        assert_eq!(
            s.next_instruction(&gold).unwrap().prev_instruction.as_deref(),
            Some("one")
        );
        assert!(matches!(
            s.finalize(&gold),
            Err(SessionError::Incomplete { submitted: 1, total: 2 })
        ));
        s.submit(2, gold.steps[1].actions.clone()).unwrap();
        assert_eq!(
            s.submit(3, ActionSet::new()),
            Err(SessionError::PastEnd { index: 3, total: 2 })
        );
        assert_eq!(s.next_instruction(&gold), Err(SessionError::Finished));
        let report = s.finalize(&gold).unwrap();
        assert!(report.procedure_em(Mode::Action) && report.procedure_em(Mode::Board));
        assert_eq!(report.macro_f1(Mode::Board), 1.0);
    }

    #[test]
    fn empty_submissions_score_zero() {
        let gold = DrawingProcedure::from_actions("p", "img", [("one", acts(&[(2, 2, Color::Red)]))]);
        let mut s = ExecutionSession::new("x1".into(), &gold, None);
        s.submit(1, ActionSet::new()).unwrap();
        let report = s.finalize(&gold).unwrap();
        assert_eq!(report.macro_f1(Mode::Action), 0.0);
        assert_eq!(report.macro_f1(Mode::Board), 0.0);
        assert_eq!(report.macro_em(Mode::Action), 0.0);
    }
}
