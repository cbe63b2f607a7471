use crate::{CmdResult, Failure, NaiveFormat, RenderFormat};
use hexagons_core::dataset::{self, DrawingProcedure, Prediction, SplitMode};
use hexagons_core::dsl::{eval_program, parse_program};
use hexagons_core::hexboard::render_svg;
use hexagons_core::naive::{predict, ParserState};
use hexagons_core::{ActionSet, Board};
use hexagons_service::ServiceConfig;
use std::fs;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::time::Duration;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

pub(crate) fn load_dataset(path: &Path) -> Result<Vec<DrawingProcedure>, Failure> {
    dataset::load(path).map_err(|e| match e {
        dataset::DatasetError::Io { .. } => Failure::Usage(e.to_string()),
        dataset::DatasetError::Invalid(_) => Failure::Check(format!("{}: {e}", path.display())),
    })
}

/// Writes to `out`, or stdout when absent.
fn emit(out: Option<&Path>, text: &str) -> CmdResult {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|e| Failure::Usage(format!("cannot write to stdout: {e}")))
        }
    }
}

fn has_extension(path: &Path, ext: &str) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case(ext))
}

fn program_procedure(path: &Path, id: &str, image: &str) -> Result<DrawingProcedure, Failure> {
    let source = read(path)?;
    let program = parse_program(&source).map_err(|e| Failure::Check(format!("{}:{e}", path.display())))?;
    let steps =
        eval_program(&program, &Board::new()).map_err(|e| Failure::Check(format!("{}: {e}", path.display())))?;
    Ok(DrawingProcedure::from_actions(
        id,
        image,
        steps.into_iter().map(|s| (s.source, s.actions)),
    ))
}

fn pick_board(procedure: &DrawingProcedure, step: Option<usize>) -> Result<Board, Failure> {
    match step {
        None => Ok(procedure.final_board()),
        Some(0) => Ok(Board::new()),
        Some(n) => procedure
            .steps
            .get(n - 1)
            .map(|s| s.board_after.clone())
            .ok_or_else(|| {
                Failure::Usage(format!(
                    "`{}` has {} steps, not {n}",
                    procedure.id,
                    procedure.steps.len()
                ))
            }),
    }
}

pub fn render(input: &Path, format: RenderFormat, procedure: Option<&str>, step: Option<usize>) -> CmdResult {
    let board = if has_extension(input, "jsonl") {
        let procedures = load_dataset(input)?;
        let chosen = match procedure {
            Some(id) => procedures
                .iter()
                .find(|p| p.id == id)
                .ok_or_else(|| Failure::Usage(format!("no procedure `{id}` in {}", input.display())))?,
            None => procedures
                .first()
                .ok_or_else(|| Failure::Usage(format!("{} holds no procedures", input.display())))?,
        };
        pick_board(chosen, step)?
    } else if has_extension(input, "hexa") {
        pick_board(&program_procedure(input, "program", "program")?, step)?
    } else {
        if step.is_some() || procedure.is_some() {
            return Err(Failure::Usage(
                "--step and --procedure need a dataset or program input".into(),
            ));
        }
        Board::from_grid(&read(input)?).map_err(|e| Failure::Check(format!("{}: {e}", input.display())))?
    };
    let text = match format {
        RenderFormat::Svg => render_svg(&board),
        RenderFormat::Grid => board.to_grid(),
    };
    emit(None, &ensure_newline(text))
}

fn ensure_newline(mut text: String) -> String {
    if !text.ends_with('\n') {
        text.push('\n');
    }
    text
}

pub fn run_dsl(program: &Path, id: &str, image: &str, out: Option<&Path>, store_boards: bool) -> CmdResult {
    let procedure = program_procedure(program, id, image)?;
    emit(out, &dataset::to_jsonl(&[procedure], store_boards))
}

/// `PAINT((row,column),color)` terms joined by ` + `, or `NONE`.
pub fn paint_notation(actions: &ActionSet) -> String {
    if actions.is_empty() {
        return "NONE".into();
    }
    actions
        .iter()
        .map(|a| format!("PAINT(({},{}),{})", a.position.row(), a.position.column(), a.color))
        .collect::<Vec<_>>()
        .join(" + ")
}

fn looks_like_jsonl(path: &Path, text: &str) -> bool {
    has_extension(path, "jsonl") || text.trim_start().starts_with('{')
}

pub fn naive(input: &Path, out: Option<&Path>, format: NaiveFormat) -> CmdResult {
    let text = read(input)?;
    // Plain text is one procedure with an instruction per non-blank line.
    let procedures: Vec<(String, Vec<String>)> = if looks_like_jsonl(input, &text) {
        let (procedures, errors) = dataset::parse_procedures(&text);
        if let Some(first) = errors.first() {
            return Err(Failure::Check(format!("{}: {first}", input.display())));
        }
        procedures
            .into_iter()
            .map(|p| (p.id.clone(), p.instructions().into_iter().map(str::to_string).collect()))
            .collect()
    } else {
        let lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(str::to_string)
            .collect();
        vec![("input".to_string(), lines)]
    };
    let mut rendered = String::new();
    for (id, instructions) in procedures {
        let mut state = ParserState::default();
        let steps: Vec<ActionSet> = instructions.iter().map(|i| predict(i, &mut state)).collect();
        match format {
            NaiveFormat::Jsonl => {
                let mut prediction = Prediction::new(id, steps);
                prediction.executor = Some("naive".into());
                rendered.push_str(&serde_json::to_string(&prediction).expect("predictions serialize"));
                rendered.push('\n');
            }
            NaiveFormat::Paint => {
                for (i, actions) in steps.iter().enumerate() {
                    rendered.push_str(&format!("{id}\t{}\t{}\n", i + 1, paint_notation(actions)));
                }
            }
        }
    }
    emit(out, &rendered)
}

fn runtime() -> Result<tokio::runtime::Runtime, Failure> {
    tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| Failure::Usage(format!("cannot start runtime: {e}")))
}

async fn bind(addr: &str) -> Result<tokio::net::TcpListener, Failure> {
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|e| Failure::Usage(format!("cannot bind {addr}: {e}")))?;
    if let Ok(local) = listener.local_addr() {
        println!("listening\t{local}");
    }
    Ok(listener)
}

pub fn serve_naive_tcp(addr: &str) -> CmdResult {
    runtime()?.block_on(async {
        let listener = bind(addr).await?;
        hexagons_service::protocol::serve_naive_tcp(listener).await;
        Ok(())
    })
}

pub fn serve_naive_http(addr: &str) -> CmdResult {
    runtime()?.block_on(async {
        let listener = bind(addr).await?;
        axum::serve(listener, hexagons_service::protocol::naive_http_router())
            .await
            .map_err(|e| Failure::Usage(format!("server error: {e}")))
    })
}

pub fn validate(file: &Path, agreement: bool) -> CmdResult {
    let (procedures, errors) = dataset::load_lenient(file).map_err(|e| Failure::Usage(e.to_string()))?;
    for e in &errors {
        eprintln!("{}: {e}", file.display());
    }
    println!("valid\t{}", procedures.len());
    println!("invalid\t{}", errors.len());
    if agreement {
        agreement_summary(&procedures)?;
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!("{} invalid record(s)", errors.len())))
    }
}

/// Executors recorded in the file are scored against the gold. EM is
/// reported both per step and per procedure.
fn agreement_summary(procedures: &[DrawingProcedure]) -> CmdResult {
    let mut checked = 0;
    let mut agreeing = 0;
    let mut steps = 0;
    let mut flagged_total = 0;
    let mut step_em_sum = 0.0;
    let mut runs = 0;
    for p in procedures.iter().filter(|p| !p.executions.is_empty()) {
        let executions: Vec<Vec<ActionSet>> = p.executions.iter().map(|r| r.steps.clone()).collect();
        let report = dataset::verify_agreement(p, &executions).map_err(|e| Failure::Check(format!("{}: {e}", p.id)))?;
        checked += 1;
        steps += p.steps.len();
        flagged_total += report.flagged_steps.len();
        if report.procedure_agrees() {
            agreeing += 1;
        }
        for r in &report.executors {
            step_em_sum += r.macro_em(hexagons_core::metrics::Mode::Action);
            runs += 1;
        }
        let flagged: Vec<String> = report.flagged_steps.iter().map(usize::to_string).collect();
        println!(
            "flagged\t{}\t{}",
            p.id,
            if flagged.is_empty() {
                "-".to_string()
            } else {
                flagged.join(",")
            }
        );
    }
    let ratio = |n: f64, d: usize| if d == 0 { 0.0 } else { n / d as f64 };
    println!("agreement_procedures\t{checked}");
    println!("agreement_steps\t{steps}");
    println!("flagged_steps\t{flagged_total}");
    println!(
        "step_em\t{}",
        hexagons_core::metrics::format_score(ratio(step_em_sum, runs))
    );
    println!(
        "procedure_em\t{}",
        hexagons_core::metrics::format_score(ratio(agreeing as f64, checked))
    );
    Ok(())
}

pub fn split(file: &Path, mode: SplitMode, seed: u64, out: Option<&Path>, store_boards: bool) -> CmdResult {
    let procedures = load_dataset(file)?;
    let split = dataset::make_split(&procedures, mode, seed).map_err(|e| Failure::Check(e.to_string()))?;
    if let Some(dir) = out {
        fs::create_dir_all(dir).map_err(|e| Failure::Usage(format!("cannot create {}: {e}", dir.display())))?;
        for (name, ids) in [("train", &split.train), ("dev", &split.dev), ("test", &split.test)] {
            let bucket: Vec<DrawingProcedure> = procedures.iter().filter(|p| ids.contains(&p.id)).cloned().collect();
            let path: PathBuf = dir.join(format!("{name}.jsonl"));
            dataset::save(&bucket, &path, store_boards).map_err(|e| Failure::Usage(e.to_string()))?;
        }
    }
    let (train, dev, test) = split.sizes();
    println!("mode\t{}", split.mode);
    println!("seed\t{}", split.seed);
    println!("train\t{train}");
    println!("dev\t{dev}");
    println!("test\t{test}");
    for (name, ids) in [("train", &split.train), ("dev", &split.dev), ("test", &split.test)] {
        for id in ids {
            println!("{name}\t{id}");
        }
    }
    Ok(())
}

pub fn stats(file: &Path, json: bool) -> CmdResult {
    let summary = dataset::stats(&load_dataset(file)?);
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&summary).expect("summary serializes")
        );
    } else {
        println!("procedures\t{}", summary.procedures);
        println!("images\t{}", summary.images);
        println!("steps\t{}", summary.steps);
        println!("tokens\t{}", summary.tokens);
        println!("avg_steps_per_procedure\t{:.2}", summary.avg_steps_per_procedure);
        println!("avg_tokens_per_procedure\t{:.2}", summary.avg_tokens_per_procedure);
        println!("avg_tokens_per_step\t{:.2}", summary.avg_tokens_per_step);
    }
    Ok(())
}

pub fn serve(bind: SocketAddr, data_dir: Option<PathBuf>, session_timeout: u64, executor_timeout_ms: u64) -> CmdResult {
    let config = ServiceConfig {
        bind,
        data_dir,
        session_timeout: (session_timeout > 0).then(|| Duration::from_secs(session_timeout)),
        executor_timeout: Duration::from_millis(executor_timeout_ms),
    };
    runtime()?.block_on(async {
        hexagons_service::serve(config)
            .await
            .map_err(|e| Failure::Usage(format!("service error: {e}")))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use hexagons_core::{Action, Color, Position};

    #[test]
    fn paint_notation_is_row_first() {
        let actions = ActionSet::from_actions([
            Action::new(Position::new(3, 4).unwrap(), Color::Red),
            Action::new(Position::new(3, 6).unwrap(), Color::Red),
        ])
        .unwrap();
        assert_eq!(paint_notation(&actions), "PAINT((4,3),red) + PAINT((6,3),red)");
        assert_eq!(paint_notation(&ActionSet::new()), "NONE");
    }
}
