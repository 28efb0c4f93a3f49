//! `holonomy` — geometric-phase scenarios, sum-rule verdicts and reports.
//!
//! Exit codes: 0 all checks pass, 1 a sum-rule or gate verdict failed,
//! 2 configuration problem, 3 numeric failure.

use clap::{Args, Parser, Subcommand};

use holonomy_cli::config::{parse_config, ScenarioConfig, ScenarioKind};
use holonomy_cli::report::{emit, Document, Format};
use holonomy_cli::run::run_scenario;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_FAIL: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser)]
#[command(
    name = "holonomy",
    version,
    about = "Geometric and Berry phases, curvature sum rules, monopole charges and gate verdicts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario config file and emit its report
    Run(RunArgs),
    /// List the built-in scenario kinds and their config keys
    ListScenarios,
    /// Determinant feasibility verdict for a named gate
    GateCheck(GateCheckArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Path to a key=value scenario config
    config: PathBuf,
    /// Report format
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write documents into this directory instead of stdout
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Override the config's step count
    #[arg(long)]
    steps: Option<usize>,
    /// Override the config's grid, e.g. 64x64
    #[arg(long)]
    grid: Option<String>,
    /// Override the config's tolerance
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Args)]
struct GateCheckArgs {
    /// Gate name: hadamard | identity
    #[arg(long)]
    gate: String,
    /// Hilbert-space dimension
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Feasibility tolerance on |arg det|
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

fn fail(code: u8, message: impl std::fmt::Display) -> ExitCode {
    eprintln!("holonomy: {message}");
    ExitCode::from(code)
}

/// HOLONOMY_THREADS caps internal parallelism; 0 or unset means auto.
fn configure_threads() -> Result<(), String> {
    match std::env::var("HOLONOMY_THREADS") {
        Err(_) => Ok(()),
        Ok(raw) => {
            let n: usize = raw.trim().parse().map_err(|_| {
                format!("HOLONOMY_THREADS must be an unsigned integer, got `{raw}`")
            })?;
            if n == 0 {
                return Ok(());
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| format!("could not configure {n} worker threads: {e}"))
        }
    }
}

fn apply_overrides(cfg: &mut ScenarioConfig, args: &RunArgs) -> Result<(), String> {
    if let Some(steps) = args.steps {
        if steps == 0 {
            return Err("--steps must be positive".into());
        }
        cfg.steps = steps;
    }
    if let Some(grid) = &args.grid {
        let parsed = grid
            .split_once(['x', 'X'])
            .and_then(|(a, b)| {
                Some((
                    a.trim().parse::<usize>().ok()?,
                    b.trim().parse::<usize>().ok()?,
                ))
            })
            .filter(|&(a, b)| a >= 2 && b >= 2);
        match parsed {
            Some(g) => cfg.grid = g,
            None => return Err(format!("--grid expects AxB with A, B >= 2, got `{grid}`")),
        }
    }
    if let Some(tol) = args.tolerance {
        if !(tol.is_finite() && tol > 0.0) {
            return Err("--tolerance must be a positive real".into());
        }
        cfg.tolerance = tol;
    }
    Ok(())
}

/// Write each document via a temp file and rename, so readers never see a
/// partial report.
fn write_documents(dir: &Path, docs: &[Document]) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for doc in docs {
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(doc.content.as_bytes())?;
        tmp.flush()?;
        tmp.persist(dir.join(&doc.filename)).map_err(|e| e.error)?;
        eprintln!("holonomy: wrote {}", dir.join(&doc.filename).display());
    }
    Ok(())
}

fn print_documents(docs: &[Document]) {
    if docs.len() == 1 {
        print!("{}", docs[0].content);
        return;
    }
    for doc in docs {
        println!("# --- {} ---", doc.filename);
        print!("{}", doc.content);
    }
}

fn execute(cfg: &ScenarioConfig, format: Format, out: Option<&Path>) -> ExitCode {
    let outcome = match run_scenario(cfg) {
        Ok(outcome) => outcome,
        Err(e) => return fail(EXIT_NUMERIC, e),
    };
    let docs = match emit(&outcome, format) {
        Ok(docs) => docs,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    match out {
        Some(dir) => {
            if let Err(e) = write_documents(dir, &docs) {
                return fail(EXIT_NUMERIC, format!("writing output: {e}"));
            }
        }
        None => print_documents(&docs),
    }
    if outcome.report.pass {
        ExitCode::SUCCESS
    } else {
        let failed: Vec<&str> = outcome
            .report
            .checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.as_str())
            .collect();
        fail(EXIT_FAIL, format!("checks failed: {}", failed.join(", ")))
    }
}

fn run_command(args: &RunArgs) -> ExitCode {
    let text = match std::fs::read_to_string(&args.config) {
        Ok(text) => text,
        Err(e) => {
            return fail(
                EXIT_CONFIG,
                format!("reading {}: {e}", args.config.display()),
            )
        }
    };
    let mut cfg = match parse_config(&text) {
        Ok(cfg) => cfg,
        Err(e) => return fail(EXIT_CONFIG, format!("{}: {e}", args.config.display())),
    };
    if let Err(e) = apply_overrides(&mut cfg, args) {
        return fail(EXIT_CONFIG, e);
    }
    execute(&cfg, args.format, args.out.as_deref())
}

fn gate_check_command(args: &GateCheckArgs) -> ExitCode {
    let mut text = format!("kind=gate-check\ngate={}\ndim={}\n", args.gate, args.dim);
    if let Some(tol) = args.tolerance {
        text.push_str(&format!("tolerance={tol}\n"));
    }
    let cfg = match parse_config(&text) {
        Ok(cfg) => cfg,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    execute(&cfg, args.format, args.out.as_deref())
}

fn list_scenarios() -> ExitCode {
    println!("built-in scenario kinds (run `holonomy run <config>` with kind=<name>):\n");
    for kind in ScenarioKind::ALL {
        println!("  {:<18} {}", kind.name(), kind.summary());
    }
    println!("\ncommon defaults: steps=4096, tolerance=1e-6, grid=64x64, seed=0");
    println!("example config:\n  kind=precession\n  theta=1.0472");
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    if let Err(message) = configure_threads() {
        return fail(EXIT_CONFIG, message);
    }
    match Cli::parse().command {
        Command::Run(args) => run_command(&args),
        Command::ListScenarios => list_scenarios(),
        Command::GateCheck(args) => gate_check_command(&args),
    }
}
