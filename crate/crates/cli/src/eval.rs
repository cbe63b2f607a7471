//! `eval`: scores prediction files against gold procedures.
//!
//! Steps are pooled across procedures, so every step weighs the same.
//! Several predictions with the same id are treated as several executors:
//! `avg` pools all of them, `min`/`max` keep the worst/best executor per
//! step before pooling.

use crate::commands::load_dataset;
use crate::{Aggregation, CmdResult, EmGranularity, Failure};
use hexagons_core::dataset::{self, DrawingProcedure, Prediction};
use hexagons_core::metrics::{evaluate_procedure, format_score, macro_min_max, to_f64, Mode, ProcedureReport};
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::PathBuf;

pub struct EvalArgs {
    pub gold: PathBuf,
    pub hyp: PathBuf,
    pub mode: Mode,
    pub oracle_prev: bool,
    pub agg: Aggregation,
    pub em_granularity: EmGranularity,
    pub min_f1: Option<f64>,
    pub min_em: Option<f64>,
    pub report: Option<PathBuf>,
}

/// Pooled scores over a whole file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Totals {
    pub procedures: usize,
    pub steps: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub em: f64,
}

/// Procedure id, executor name and the report.
pub type Scored = (String, Option<String>, ProcedureReport);

#[derive(Serialize)]
struct ProcedureEntry<'a> {
    id: &'a str,
    executor: Option<&'a str>,
    report: &'a ProcedureReport,
}

/// The reports that enter the pool for one gold procedure.
fn selected_reports(reports: &[ProcedureReport], agg: Aggregation, mode: Mode) -> Vec<ProcedureReport> {
    match agg {
        Aggregation::Avg => reports.to_vec(),
        Aggregation::Min | Aggregation::Max => {
            let steps = reports[0].steps.len();
            let per_step: Vec<Vec<_>> = (0..steps)
                .map(|i| reports.iter().map(|r| r.steps[i]).collect())
                .collect();
            let (low, high) = macro_min_max(&per_step, mode).expect("every procedure has steps and executors");
            vec![if agg == Aggregation::Min { low } else { high }]
        }
    }
}

pub fn pool(reports: &[ProcedureReport], mode: Mode, granularity: EmGranularity, procedures: usize) -> Totals {
    let steps: Vec<_> = reports.iter().flat_map(|r| &r.steps).collect();
    let n = steps.len().max(1) as f64;
    let mean = |f: &dyn Fn(&hexagons_core::metrics::StepEvaluation) -> f64| steps.iter().map(|s| f(s)).sum::<f64>() / n;
    let em = match granularity {
        EmGranularity::Step => mean(&|s| if s.em(mode) { 1.0 } else { 0.0 }),
        EmGranularity::Procedure => {
            reports.iter().filter(|r| r.procedure_em(mode)).count() as f64 / reports.len().max(1) as f64
        }
    };
    Totals {
        procedures,
        steps: steps.len(),
        precision: mean(&|s| to_f64(s.score(mode).precision)),
        recall: mean(&|s| to_f64(s.score(mode).recall)),
        f1: mean(&|s| to_f64(s.score(mode).f1)),
        em,
    }
}

/// Scores every gold procedure. Fails on a missing or misaligned prediction.
pub fn score(
    gold: &[DrawingProcedure],
    predictions: &[Prediction],
    args: &EvalArgs,
) -> Result<(Totals, Vec<Scored>), Failure> {
    let mut by_id: BTreeMap<&str, Vec<&Prediction>> = BTreeMap::new();
    for p in predictions {
        by_id.entry(p.id.as_str()).or_default().push(p);
    }
    let mut detailed = Vec::new();
    let mut pooled = Vec::new();
    for procedure in gold {
        let preds = by_id
            .get(procedure.id.as_str())
            .ok_or_else(|| Failure::Check(format!("no prediction for procedure `{}`", procedure.id)))?;
        let mut reports = Vec::with_capacity(preds.len());
        for pred in preds {
            let report = evaluate_procedure(procedure, &pred.action_sets(), args.oracle_prev)
                .map_err(|e| Failure::Check(format!("procedure `{}`: {e}", procedure.id)))?;
            detailed.push((procedure.id.clone(), pred.executor.clone(), report.clone()));
            reports.push(report);
        }
        pooled.extend(selected_reports(&reports, args.agg, args.mode));
    }
    for id in by_id.keys().filter(|id| !gold.iter().any(|g| g.id == **id)) {
        log::warn!("ignoring prediction for unknown procedure `{id}`");
    }
    Ok((pool(&pooled, args.mode, args.em_granularity, gold.len()), detailed))
}

pub fn run(args: &EvalArgs) -> CmdResult {
    let gold = load_dataset(&args.gold)?;
    let predictions = dataset::load_predictions(&args.hyp).map_err(|e| match e {
        dataset::DatasetError::Io { .. } => Failure::Usage(e.to_string()),
        dataset::DatasetError::Invalid(_) => Failure::Check(format!("{}: {e}", args.hyp.display())),
    })?;
    let (totals, detailed) = score(&gold, &predictions, args)?;
    if let Some(path) = &args.report {
        let entries: Vec<ProcedureEntry> = detailed
            .iter()
            .map(|(id, executor, report)| ProcedureEntry {
                id,
                executor: executor.as_deref(),
                report,
            })
            .collect();
        let body = serde_json::json!({ "totals": totals, "procedures": entries });
        std::fs::write(path, serde_json::to_string_pretty(&body).expect("report serializes"))
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    let mode = match args.mode {
        Mode::Board => "board",
        Mode::Action => "action",
    };
    let agg = match args.agg {
        Aggregation::Avg => "avg",
        Aggregation::Min => "min",
        Aggregation::Max => "max",
    };
    let granularity = match args.em_granularity {
        EmGranularity::Step => "step",
        EmGranularity::Procedure => "procedure",
    };
    println!("procedures\t{}", totals.procedures);
    println!("steps\t{}", totals.steps);
    println!("mode\t{mode}");
    println!("agg\t{agg}");
    println!("oracle_prev\t{}", args.oracle_prev);
    println!("precision\t{}", format_score(totals.precision));
    println!("recall\t{}", format_score(totals.recall));
    println!("f1\t{}", format_score(totals.f1));
    println!("em\t{}", format_score(totals.em));
    println!("em_granularity\t{granularity}");
    if let Some(min) = args.min_f1.filter(|&m| totals.f1 < m) {
        return Err(Failure::Check(format!(
            "macro F1 {} is below {min}",
            format_score(totals.f1)
        )));
    }
    if let Some(min) = args.min_em.filter(|&m| totals.em < m) {
        return Err(Failure::Check(format!("EM {} is below {min}", format_score(totals.em))));
    }
    Ok(())
}
