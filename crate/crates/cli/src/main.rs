//! `hexagons`: render boards, run drawing programs, score predictions, run
//! the rule-based baseline, check and split datasets, and serve the game.
//!
//! Results go to stdout; diagnostics go to stderr. Exit status is 0 on
//! success, 1 when validation fails or a score threshold is missed, and 2
//! for usage errors.

mod commands;
mod eval;

use clap::{Parser, Subcommand, ValueEnum};
use hexagons_core::dataset::SplitMode;
use hexagons_core::metrics::Mode;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "hexagons", version, about = "Hex-board drawing toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum RenderFormat {
    Svg,
    Grid,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Aggregation {
    Avg,
    Min,
    Max,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EmGranularity {
    Step,
    Procedure,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NaiveFormat {
    Jsonl,
    Paint,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a board as SVG or as a letter grid.
    ///
    /// INPUT is a letter-grid file, a dataset file (.jsonl) or a drawing
    /// program (.hexa).
    Render {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "svg")]
        format: RenderFormat,
        /// Procedure id inside a dataset file; defaults to the first.
        #[arg(long)]
        procedure: Option<String>,
        /// Show the board after this step (1-based) instead of the last.
        #[arg(long)]
        step: Option<usize>,
    },
    /// Evaluate a drawing program and print its steps as a dataset record.
    RunDsl {
        program: PathBuf,
        #[arg(long, default_value = "program")]
        id: String,
        #[arg(long, default_value = "program")]
        image: String,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Include every step's board in the record.
        #[arg(long)]
        store_boards: bool,
    },
    /// Score predictions against gold procedures.
    Eval {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        hyp: PathBuf,
        #[arg(long, value_enum, default_value = "action")]
        mode: ModeArg,
        /// Start every step from the gold previous board.
        #[arg(long)]
        oracle_prev: bool,
        #[arg(long, value_enum, default_value = "avg")]
        agg: Aggregation,
        #[arg(long, value_enum, default_value = "procedure")]
        em_granularity: EmGranularity,
        /// Exit 1 if macro F1 falls below this.
        #[arg(long)]
        min_f1: Option<f64>,
        /// Exit 1 if EM falls below this.
        #[arg(long)]
        min_em: Option<f64>,
        /// Also write per-procedure reports as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run the rule-based baseline over a dataset or plain instructions, or
    /// serve it as a machine executor.
    Naive {
        /// Dataset file (.jsonl) or text with one instruction per line.
        #[arg(long = "in", required_unless_present_any = ["serve", "serve_http"])]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "jsonl")]
        format: NaiveFormat,
        /// Serve the executor protocol over TCP at this address.
        #[arg(long, conflicts_with_all = ["input", "serve_http"])]
        serve: Option<String>,
        /// Serve the executor protocol over HTTP (`POST /execute`).
        #[arg(long, conflicts_with = "input")]
        serve_http: Option<String>,
    },
    /// Check a dataset file record by record.
    Validate {
        file: PathBuf,
        /// Also score recorded executor runs against the gold.
        #[arg(long)]
        agreement: bool,
    },
    /// Split a dataset into train/dev/test.
    Split {
        file: PathBuf,
        #[arg(long, value_enum)]
        mode: SplitArg,
        #[arg(long)]
        seed: u64,
        /// Write train/dev/test .jsonl files into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, requires = "out")]
        store_boards: bool,
    },
    /// Print dataset volume statistics.
    Stats {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Run the game service.
    Serve {
        #[arg(long, env = "HEXAGONS_BIND", default_value = "127.0.0.1:8080")]
        bind: std::net::SocketAddr,
        #[arg(long, env = "HEXAGONS_DATA_DIR")]
        data_dir: Option<PathBuf>,
        /// Idle sessions expire after this many seconds (0 disables).
        #[arg(long, env = "HEXAGONS_SESSION_TIMEOUT", default_value_t = 3600)]
        session_timeout: u64,
        /// Per-request limit for machine executors, in milliseconds.
        #[arg(long, env = "HEXAGONS_EXECUTOR_TIMEOUT_MS", default_value_t = 10_000)]
        executor_timeout_ms: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Board,
    Action,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Board => Mode::Board,
            ModeArg::Action => Mode::Action,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
pub enum SplitArg {
    Random,
    Hard,
}

impl From<SplitArg> for SplitMode {
    fn from(m: SplitArg) -> SplitMode {
        match m {
            SplitArg::Random => SplitMode::Random,
            SplitArg::Hard => SplitMode::Hard,
        }
    }
}

/// How a command failed.
#[derive(Debug)]
pub enum Failure {
    /// Bad invocation or unreadable input: exit 2.
    Usage(String),
    /// The input was read but did not pass: exit 1.
    Check(String),
}

pub type CmdResult = Result<(), Failure>;

/// Exit quietly when stdout is a closed pipe, as in `hexagons stats x | head`.
#[cfg(unix)]
fn reset_sigpipe() {
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
}

#[cfg(not(unix))]
fn reset_sigpipe() {}

fn main() -> ExitCode {
    reset_sigpipe();
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Render {
            input,
            format,
            procedure,
            step,
        } => commands::render(&input, format, procedure.as_deref(), step),
        Command::RunDsl {
            program,
            id,
            image,
            out,
            store_boards,
        } => commands::run_dsl(&program, &id, &image, out.as_deref(), store_boards),
        Command::Eval {
            gold,
            hyp,
            mode,
            oracle_prev,
            agg,
            em_granularity,
            min_f1,
            min_em,
            report,
        } => eval::run(&eval::EvalArgs {
            gold,
            hyp,
            mode: mode.into(),
            oracle_prev,
            agg,
            em_granularity,
            min_f1,
            min_em,
            report,
        }),
        Command::Naive {
            input,
            out,
            format,
            serve,
            serve_http,
        } => match (input, serve, serve_http) {
            (_, Some(addr), _) => commands::serve_naive_tcp(&addr),
            (_, _, Some(addr)) => commands::serve_naive_http(&addr),
            (Some(input), _, _) => commands::naive(&input, out.as_deref(), format),
            (None, None, None) => Err(Failure::Usage("--in is required".into())),
        },
        Command::Validate { file, agreement } => commands::validate(&file, agreement),
        Command::Split {
            file,
            mode,
            seed,
            out,
            store_boards,
        } => commands::split(&file, mode.into(), seed, out.as_deref(), store_boards),
        Command::Stats { file, json } => commands::stats(&file, json),
        Command::Serve {
            bind,
            data_dir,
            session_timeout,
            executor_timeout_ms,
        } => commands::serve(bind, data_dir, session_timeout, executor_timeout_ms),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
