use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const WORKED_EXAMPLE: &str = include_str!("../../core/tests/data/worked_example.json");

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_parity-forge"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        let ws = Self {
            dir: tempfile::tempdir().unwrap(),
        };
        fs::write(ws.path("problem.json"), WORKED_EXAMPLE).unwrap();
        ws
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn arg(&self, name: &str) -> String {
        self.path(name).to_str().unwrap().to_string()
    }

    fn compile(&self, extra: &[&str]) -> Output {
        let (input, output) = (self.arg("problem.json"), self.arg("layout.json"));
        let mut args = vec!["compile", "--input", &input, "--output", &output];
        args.extend_from_slice(extra);
        run(&args)
    }
}

fn read(p: &Path) -> String {
    fs::read_to_string(p).unwrap()
}

#[test]
fn compile_worked_example() {
    let ws = Workspace::new();
    let out = ws.compile(&[]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let layout: serde_json::Value = serde_json::from_str(&read(&ws.path("layout.json"))).unwrap();
    let groups: std::collections::BTreeSet<u64> = layout["plaquettes"]
        .as_array()
        .unwrap()
        .iter()
        .filter_map(|p| p["group"].as_u64())
        .collect();
    assert_eq!(groups.len(), 3);
}

#[test]
fn compile_with_verify_embeds_report() {
    let ws = Workspace::new();
    let out = ws.compile(&["--verify", "--strategy", "beam", "--beam-width", "3", "--seed", "5"]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["rowspace"], "pass");
    assert_eq!(report["dims"], serde_json::json!([3, 3]));
    assert_eq!(report["brute_force"]["status"], "pass");
    assert_eq!(report["energy"]["status"], "pass");
    assert_eq!(report["geometry"], serde_json::json!([]));
}

#[test]
fn malformed_problem_exits_one_with_position() {
    let ws = Workspace::new();
    fs::write(ws.path("problem.json"), "{\"num_logical\": 2,\n \"terms\": [}").unwrap();
    let out = ws.compile(&[]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2, column"));
}

#[test]
fn exhausted_layer_budget_exits_two() {
    let ws = Workspace::new();
    let out = ws.compile(&["--max-layers", "1"]);
    assert_eq!(code(&out), 2);
    assert!(!ws.path("layout.json").exists());
}

#[test]
fn verify_passes_and_detects_mismatch() {
    let ws = Workspace::new();
    assert_eq!(code(&ws.compile(&[])), 0);
    let (layout, problem) = (ws.arg("layout.json"), ws.arg("problem.json"));
    let out = run(&["verify", "--layout", &layout, "--problem", &problem, "--exhaustive"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("\"rowspace\": \"pass\""));

    // Same terms, but 13 is now 24: the layout no longer matches.
    let other = WORKED_EXAMPLE.replace("[1, 3]", "[2, 4]");
    fs::write(ws.path("other.json"), other).unwrap();
    let other = ws.arg("other.json");
    let out = run(&["verify", "--layout", &layout, "--problem", &other]);
    assert_eq!(code(&out), 3);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["rowspace"], "fail");
}

#[test]
fn missing_file_is_an_error() {
    let out = run(&["stats", "--layout", "/nonexistent/layout.json"]);
    assert_ne!(code(&out), 0);
}

#[test]
fn render_ascii_and_svg() {
    let ws = Workspace::new();
    // Wide enough for the beam to find the single-ancilla realization.
    assert_eq!(code(&ws.compile(&["--strategy", "beam", "--beam-width", "8"])), 0);
    let layout = ws.arg("layout.json");
    let txt = ws.arg("layout.txt");
    assert_eq!(code(&run(&["render", "--layout", &layout, "--format", "ascii", "--output", &txt])), 0);
    let drawing = read(&ws.path("layout.txt"));
    for label in ["12", "23", "34", "14", "13", "4", "123"] {
        assert!(drawing.split_whitespace().any(|w| w == label), "{label} missing:\n{drawing}");
    }
    assert_eq!(drawing.matches('·').count(), 1, "{drawing}");
    assert_eq!(drawing.lines().next().map(|l| l.split_whitespace().collect::<Vec<_>>()), Some(vec!["4", "·", "123"]));
    let svg = ws.arg("layout.svg");
    assert_eq!(code(&run(&["render", "--layout", &layout, "--format", "svg", "--output", &svg])), 0);
    let svg = read(&ws.path("layout.svg"));
    let doc: serde_json::Value = serde_json::from_str(&read(&ws.path("layout.json"))).unwrap();
    let plaquettes = doc["plaquettes"].as_array().unwrap().len();
    assert_eq!(svg.matches("<polygon").count(), plaquettes);
    assert_eq!(svg.matches("<svg").count(), 1);
    assert!(svg.trim_end().ends_with("</svg>"));

    let out = run(&["render", "--layout", &layout, "--format", "png", "--output", &txt]);
    assert_ne!(code(&out), 0);
}

#[test]
fn render_empty_layout() {
    let ws = Workspace::new();
    fs::write(ws.path("empty.json"), r#"{"qubits": [], "plaquettes": [], "pins": []}"#).unwrap();
    let (layout, txt) = (ws.arg("empty.json"), ws.arg("empty.txt"));
    assert_eq!(code(&run(&["render", "--layout", &layout, "--format", "ascii", "--output", &txt])), 0);
    assert_eq!(read(&ws.path("empty.txt")), "");
}

#[test]
fn stats_on_a_single_square() {
    let ws = Workspace::new();
    let square = r#"{"qubits": [
        {"id": 0, "col": 0, "row": 0, "kind": "parity", "term": [1, 2]},
        {"id": 1, "col": 1, "row": 0, "kind": "parity", "term": [1, 4]},
        {"id": 2, "col": 0, "row": 1, "kind": "parity", "term": [2, 3]},
        {"id": 3, "col": 1, "row": 1, "kind": "parity", "term": [3, 4]}],
      "plaquettes": [{"cell": [0, 0], "shape": "square", "group": 0}], "pins": []}"#;
    fs::write(ws.path("square.json"), square).unwrap();
    let out = run(&["stats", "--layout", &ws.arg("square.json")]);
    assert_eq!(code(&out), 0);
    let stats: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(stats["qubits"]["parity"], 4);
    assert_eq!(stats["qubits"]["ancilla"], 0);
    assert_eq!(stats["plaquettes"]["square"], 1);
    assert_eq!(stats["groups"], 1);
    assert_eq!(stats["layers"], 1);
}

#[test]
fn output_is_byte_identical_across_runs_and_thread_counts() {
    let ws = Workspace::new();
    assert_eq!(code(&ws.compile(&["--strategy", "beam", "--seed", "9"])), 0);
    let first = read(&ws.path("layout.json"));
    let (input, output) = (ws.arg("problem.json"), ws.arg("layout.json"));
    let out = bin()
        .args(["compile", "--input", &input, "--output", &output, "--strategy", "beam", "--seed", "9"])
        .env("PARITY_FORGE_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert_eq!(read(&ws.path("layout.json")), first);
}
