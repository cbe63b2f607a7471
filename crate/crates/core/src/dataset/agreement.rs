use super::DrawingProcedure;
use crate::hexboard::ActionSet;
use crate::metrics::{evaluate_procedure, MetricsError, Mode, ProcedureReport};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgreementReport {
    /// One report per executor, in input order.
    pub executors: Vec<ProcedureReport>,
    /// 1-based steps on which no executor reproduced the gold actions.
    pub flagged_steps: Vec<usize>,
}

impl AgreementReport {
    /// Some executor matched every step.
    pub fn procedure_agrees(&self) -> bool {
        self.executors.iter().any(|r| r.procedure_em(Mode::Action))
    }
}

/// Scores each executor against the instructor's gold and flags steps with
/// no exact match from any executor. Executors play on their own boards.
pub fn verify_agreement(
    gold: &DrawingProcedure,
    executions: &[Vec<ActionSet>],
) -> Result<AgreementReport, MetricsError> {
    let executors = executions
        .iter()
        .map(|run| evaluate_procedure(gold, run, false))
        .collect::<Result<Vec<_>, _>>()?;
    let flagged_steps = (0..gold.steps.len())
        .filter(|&i| !executors.iter().any(|r| r.steps[i].action_em))
        .map(|i| i + 1)
        .collect();
    Ok(AgreementReport {
        executors,
        flagged_steps,
    })
}
