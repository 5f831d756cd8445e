//! `parity-forge`: compile, verify, render and inspect plaquette layouts.

mod render;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use parity_forge_core::format::{GroupDoc, KindDoc, LayoutDoc};
use parity_forge_core::{compile, verify, CompilerConfig, ProblemSpec, Strategy, VerifyOptions};
use serde_json::json;

const EXIT_PARSE: u8 = 1;
const EXIT_COMPILE: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser)]
#[command(name = "parity-forge", version, about = "Plaquette layout compiler for the parity architecture")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Greedy,
    Beam,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Ascii,
    Svg,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a problem file into a layout file.
    Compile {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value = "greedy")]
        strategy: StrategyArg,
        #[arg(long, default_value_t = 4)]
        beam_width: usize,
        /// Largest number of basis constraints combined into one candidate.
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        no_trim: bool,
        #[arg(long, default_value_t = 512)]
        max_layers: usize,
        /// Run the verifier on the result and print its report.
        #[arg(long)]
        verify: bool,
    },
    /// Check a layout file against its problem and print the report.
    Verify {
        #[arg(long)]
        layout: PathBuf,
        #[arg(long)]
        problem: PathBuf,
        /// Run the exhaustive checks on layouts of up to 24 qubits.
        #[arg(long)]
        exhaustive: bool,
    },
    /// Draw a layout file.
    Render {
        #[arg(long)]
        layout: PathBuf,
        #[arg(long, value_enum)]
        format: Format,
        #[arg(long)]
        output: PathBuf,
    },
    /// Print counts of qubits, plaquettes, layers and groups.
    Stats {
        #[arg(long)]
        layout: PathBuf,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| fail(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| fail(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn load_problem(path: &Path) -> Result<ProblemSpec, Failure> {
    ProblemSpec::parse(&read(path)?).map_err(|e| fail(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn load_layout(path: &Path) -> Result<LayoutDoc, Failure> {
    LayoutDoc::parse(&read(path)?).map_err(|e| fail(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn configure_threads() {
    let threads = std::env::var("PARITY_FORGE_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(0);
    if threads > 0 {
        // Only fails if a pool already exists, in which case it is kept.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
}

fn stats(doc: &LayoutDoc) -> serde_json::Value {
    let mut kinds = BTreeMap::from([("parity", 0), ("ancilla", 0), ("fixed", 0)]);
    for q in &doc.qubits {
        let key = match q.kind {
            KindDoc::Parity => "parity",
            KindDoc::Ancilla => "ancilla",
            KindDoc::Fixed => "fixed",
        };
        *kinds.get_mut(key).unwrap() += 1;
    }
    let mut shapes: BTreeMap<String, usize> = BTreeMap::new();
    for p in &doc.plaquettes {
        *shapes.entry(p.shape.clone()).or_default() += 1;
    }
    let groups: std::collections::BTreeSet<usize> = doc
        .plaquettes
        .iter()
        .filter_map(|p| match p.group {
            GroupDoc::Id(g) => Some(g),
            GroupDoc::Name(_) => None,
        })
        .collect();
    // Rows above the bottom row plus columns right of it: each layer adds
    // at least one of these.
    let max_row = doc.qubits.iter().map(|q| q.row).max().unwrap_or(0);
    let max_col = doc.qubits.iter().map(|q| q.col).max().unwrap_or(0);
    let bottom = doc.qubits.iter().filter(|q| q.row == 0).map(|q| q.col).max().unwrap_or(0);
    let layers = max_row + (max_col - bottom).max(0);
    json!({
        "qubits": kinds,
        "plaquettes": shapes,
        "layers": layers,
        "groups": groups.len(),
    })
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Compile {
            input,
            output,
            strategy,
            beam_width,
            depth,
            seed,
            no_trim,
            max_layers,
            verify: check,
        } => {
            let problem = load_problem(&input)?;
            let cfg = CompilerConfig {
                strategy: match strategy {
                    StrategyArg::Greedy => Strategy::Greedy,
                    StrategyArg::Beam => Strategy::Beam(beam_width),
                },
                candidate_combination_depth: depth,
                max_layers,
                rng_seed: seed,
                trim: !no_trim,
            };
            let compiled = compile(&problem, &cfg).map_err(|e| fail(EXIT_COMPILE, e.to_string()))?;
            let text = compiled.to_json();
            write(&output, &text)?;
            if check {
                let doc = LayoutDoc::parse(&text).map_err(|e| fail(EXIT_VERIFY, e.to_string()))?;
                let report = verify(&doc, &problem, VerifyOptions::exhaustive());
                print!("{}", report.to_json());
                if !report.passed() {
                    return Err(fail(EXIT_VERIFY, "verification failed"));
                }
            }
            Ok(())
        }
        Command::Verify {
            layout,
            problem,
            exhaustive,
        } => {
            let doc = load_layout(&layout)?;
            let problem = load_problem(&problem)?;
            let opts = if exhaustive {
                VerifyOptions::exhaustive()
            } else {
                VerifyOptions::default()
            };
            let report = verify(&doc, &problem, opts);
            print!("{}", report.to_json());
            if report.passed() {
                Ok(())
            } else {
                Err(fail(EXIT_VERIFY, "verification failed"))
            }
        }
        Command::Render { layout, format, output } => {
            let doc = load_layout(&layout)?;
            let text = match format {
                Format::Ascii => render::ascii(&doc),
                Format::Svg => render::svg(&doc),
            };
            write(&output, &text)
        }
        Command::Stats { layout } => {
            let doc = load_layout(&layout)?;
            println!("{}", serde_json::to_string_pretty(&stats(&doc)).expect("stats serialize"));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    configure_threads();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
