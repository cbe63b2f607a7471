use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn hexagons<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_hexagons"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Tab-separated `key value` lines as pairs.
fn fields(out: &Output) -> Vec<(String, String)> {
    stdout(out)
        .lines()
        .filter_map(|l| l.split_once('\t'))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn field(out: &Output, key: &str) -> String {
    fields(out)
        .into_iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v)
        .unwrap_or_default()
}

#[test]
fn eval_gold_against_itself_is_perfect() {
    let gold = fixture("sample.jsonl");
    let out = hexagons([
        "eval".as_ref(),
        "--gold".as_ref(),
        gold.as_os_str(),
        "--hyp".as_ref(),
        gold.as_os_str(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(field(&out, "f1"), "1.00");
    assert_eq!(field(&out, "em"), "1.00");
    assert_eq!(field(&out, "procedures"), "12");
}

#[test]
fn naive_reproduces_the_pattern_table() {
    let out = hexagons([
        "naive",
        "--format",
        "paint",
        "--in",
        fixture("naive_table.txt").to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let lines: Vec<String> = stdout(&out)
        .lines()
        .map(|l| l.rsplit('\t').next().unwrap().to_string())
        .collect();
    assert_eq!(
        lines,
        [
            "PAINT((4,7),orange)",
            "PAINT((2,1),blue)",
            "PAINT((4,3),red) + PAINT((6,3),red)"
        ]
    );
}

#[test]
fn run_dsl_flower_has_two_steps_and_seven_tiles() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("flower.jsonl");
    let out = hexagons([
        "run-dsl",
        fixture("flower.hexa").to_str().unwrap(),
        "--store-boards",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let procedures = hexagons_core::dataset::load(&out_path).unwrap();
    assert_eq!(procedures[0].steps.len(), 2);
    assert_eq!(procedures[0].final_board().painted().len(), 7);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(hexagons(["frobnicate"]).status.code(), Some(2));
    assert_eq!(hexagons(["stats", "--nope", "x"]).status.code(), Some(2));
    // Seeds are mandatory.
    assert_eq!(
        hexagons(["split", fixture("sample.jsonl").to_str().unwrap(), "--mode", "random"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(hexagons(["stats", "/no/such/file.jsonl"]).status.code(), Some(2));
}

#[test]
fn thresholds_and_missing_predictions_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let gold = fixture("sample.jsonl");
    let hyp = dir.path().join("naive.jsonl");
    let out = hexagons(["naive", "--in", gold.to_str().unwrap(), "--out", hyp.to_str().unwrap()]);
    assert!(out.status.success());
    let args = ["eval", "--gold", gold.to_str().unwrap(), "--hyp", hyp.to_str().unwrap()];
    assert!(hexagons(args).status.success());
    let strict = hexagons(args.iter().copied().chain(["--min-f1", "0.99"]));
    assert_eq!(strict.status.code(), Some(1));
    assert_eq!(field(&strict, "f1"), field(&hexagons(args), "f1"));

    let partial = dir.path().join("partial.jsonl");
    let first = std::fs::read_to_string(&hyp)
        .unwrap()
        .lines()
        .next()
        .unwrap()
        .to_string();
    std::fs::write(&partial, first + "\n").unwrap();
    let out = hexagons([
        "eval",
        "--gold",
        gold.to_str().unwrap(),
        "--hyp",
        partial.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no prediction"));
}

#[test]
fn eval_writes_a_report_and_honours_modes() {
    let dir = tempfile::tempdir().unwrap();
    let gold = fixture("sample.jsonl");
    let report = dir.path().join("report.json");
    let out = hexagons([
        "eval",
        "--gold",
        gold.to_str().unwrap(),
        "--hyp",
        gold.to_str().unwrap(),
        "--mode",
        "board",
        "--oracle-prev",
        "--agg",
        "min",
        "--em-granularity",
        "step",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(field(&out, "mode"), "board");
    assert_eq!(field(&out, "agg"), "min");
    assert_eq!(field(&out, "oracle_prev"), "true");
    assert_eq!(field(&out, "em_granularity"), "step");
    let body: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(body["procedures"].as_array().unwrap().len(), 12);
}

#[test]
fn validate_reports_bad_records() {
    let out = hexagons(["validate", "--agreement", fixture("sample.jsonl").to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(field(&out, "invalid"), "0");
    assert_eq!(field(&out, "flagged_steps"), "1");

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.jsonl");
    let mut text = std::fs::read_to_string(fixture("sample.jsonl")).unwrap();
    text.push_str(
        "{\"id\":\"broken\",\"image_id\":\"x\",\"steps\":[{\"index\":2,\"instruction\":\"a\",\"actions\":[]}]}\n",
    );
    std::fs::write(&bad, text).unwrap();
    let out = hexagons(["validate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(field(&out, "invalid"), "1");
    assert!(String::from_utf8_lossy(&out.stderr).contains("broken"));
}

#[test]
fn split_is_reproducible_and_writes_buckets() {
    let file = fixture("sample.jsonl");
    let dir = tempfile::tempdir().unwrap();
    let run = |seed: &str| {
        hexagons([
            "split",
            file.to_str().unwrap(),
            "--mode",
            "hard",
            "--seed",
            seed,
            "--out",
            dir.path().to_str().unwrap(),
        ])
    };
    let a = run("11");
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&run("11")));
    let total: usize = ["train", "dev", "test"]
        .iter()
        .map(|b| {
            hexagons_core::dataset::load(&dir.path().join(format!("{b}.jsonl")))
                .unwrap()
                .len()
        })
        .sum();
    assert_eq!(total, 12);
}

#[test]
fn stats_and_render() {
    let out = hexagons(["stats", "--json", fixture("sample.jsonl").to_str().unwrap()]);
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["procedures"], 12);
    assert_eq!(summary["steps"], 20);

    let svg = hexagons(["render", fixture("flower.hexa").to_str().unwrap()]);
    assert!(stdout(&svg).starts_with("<svg"));
    let grid = hexagons([
        "render",
        "--format",
        "grid",
        "--step",
        "1",
        fixture("flower.hexa").to_str().unwrap(),
    ]);
    assert_eq!(stdout(&grid).matches('Y').count(), 1);
    assert_eq!(stdout(&grid).matches('R').count(), 0);

    let dir = tempfile::tempdir().unwrap();
    let grid_file = dir.path().join("board.txt");
    std::fs::write(
        &grid_file,
        stdout(&hexagons([
            "render",
            "--format",
            "grid",
            fixture("flower.hexa").to_str().unwrap(),
        ])),
    )
    .unwrap();
    let again = hexagons(["render", "--format", "grid", grid_file.to_str().unwrap()]);
    assert_eq!(stdout(&again).matches('R').count(), 6);
}

#[test]
fn naive_serves_the_executor_protocol_over_tcp() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_hexagons"))
        .args(["naive", "--serve", "127.0.0.1:0"])
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(child.stdout.take().unwrap())
        .read_line(&mut line)
        .unwrap();
    let addr = line.trim().strip_prefix("listening\t").unwrap().to_string();

    let stream = std::net::TcpStream::connect(addr).unwrap();
    let mut writer = stream.try_clone().unwrap();
    let request = serde_json::json!({
        "board": hexagons_core::Board::new(),
        "instruction": "In column 3 color tiles 4 and 6 red",
    });
    writeln!(writer, "{request}").unwrap();
    let mut reply = String::new();
    BufReader::new(stream).read_line(&mut reply).unwrap();
    child.kill().unwrap();
    child.wait().unwrap();
    let reply: serde_json::Value = serde_json::from_str(&reply).unwrap();
    assert_eq!(reply["actions"], serde_json::json!([[3, 4, "red"], [3, 6, "red"]]));
}
