use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qcloudsim::results::{parse_results, results_to_string, Summary};
use qcloudsim::runner::{run_scenario, RunError, RunReport};
use qcloudsim::scenario::{parse_generator_params, parse_scenario, qulet_fragment_to_toml, ScenarioError};
use qcloudsim::workload::generate_workload;
use qcloudsim::LogLevel;

const EXIT_OK: u8 = 0;
const EXIT_INTERNAL: u8 = 1;
const EXIT_SYNTAX: u8 = 2;
const EXIT_SEMANTIC: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(name = "qcloudsim", version, about = "Quantum cloud and edge simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output file (results for `run`, qulet fragment for `generate`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Overrides the seed of the scenario or generator parameters.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[arg(long, global = true, value_enum, env = "QSIM_LOG_LEVEL", default_value = "events")]
    log_level: Level,

    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario and print its event log and results.
    Run { scenario: PathBuf },
    /// Parse and check a scenario without running it.
    Validate { scenario: PathBuf },
    /// Generate a synthetic qulet list from a parameter file.
    Generate { params: PathBuf },
    /// Summarize a results file.
    Report { results: PathBuf },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Level {
    Quiet,
    Events,
    Debug,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Table,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        let code = match e {
            ScenarioError::Syntax(_) | ScenarioError::Schema(_) => EXIT_SYNTAX,
            ScenarioError::Semantic(_) => EXIT_SEMANTIC,
        };
        Failure::new(code, e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(EXIT_IO, format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::new(EXIT_IO, format!("cannot write {}: {e}", path.display())))
}

fn stdout(text: &str) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Failure::new(EXIT_IO, format!("cannot write to stdout: {e}")))
}

fn results_table(report: &RunReport) -> String {
    let mut out = format!(
        "{:>8} {:>8} {:>5} {:>10} {:>10} {:>10} {:>12} {:>12} {:>12} {:>10}\n",
        "qulet", "status", "node", "t_n", "t_c", "t_s", "t_w", "t_q", "total", "cost"
    );
    for r in &report.results {
        let b = &r.breakdown;
        out.push_str(&format!(
            "{:>8} {:>8} {:>5} {:>10.4} {:>10.4} {:>10.4} {:>12.4} {:>12.4} {:>12.4} {:>10.4}\n",
            r.qulet_id,
            r.status.as_str(),
            r.node_id.map(|n| n.to_string()).unwrap_or_else(|| "-".into()),
            b.t_n,
            b.t_c,
            b.t_s,
            b.t_w,
            b.t_q,
            b.total,
            r.cost
        ));
    }
    out.push_str(&format!("makespan      {:.4}\n", report.makespan));
    out.push_str(&format!("succeeded     {}/{}\n", report.success_count(), report.results.len()));
    out.push_str(&format!("total cost    {:.4}\n", report.total_cost()));
    for (node, u) in report.utilization() {
        out.push_str(&format!("node {node:<4} utilization {u:.4}\n"));
    }
    out
}

fn cmd_run(cli: &Cli, path: &Path) -> Result<(), Failure> {
    let scenario = parse_scenario(&read(path)?)?;
    let report = run_scenario(&scenario, cli.seed).map_err(|e| match e {
        RunError::IdCollision(_) | RunError::Workload(_) => Failure::new(EXIT_SEMANTIC, e.to_string()),
        RunError::Simulation(_) => Failure::new(EXIT_INTERNAL, e.to_string()),
    })?;
    let level = match cli.log_level {
        Level::Quiet => None,
        Level::Events => Some(LogLevel::Events),
        Level::Debug => Some(LogLevel::Debug),
    };
    if let Some(level) = level {
        stdout(&report.log.to_text(level))?;
    }
    match &cli.out {
        Some(out) => write(out, &results_to_string(&report))?,
        None => {
            let text = match cli.format {
                Format::Csv => results_to_string(&report),
                Format::Table => results_table(&report),
            };
            stdout(&text)?;
        }
    }
    let failed: Vec<String> = report.failed().map(|r| r.qulet_id.to_string()).collect();
    if !failed.is_empty() {
        eprintln!("warning: {} qulet(s) failed: {}", failed.len(), failed.join(", "));
        for r in report.failed() {
            if let Some(reason) = &r.reason {
                eprintln!("  {reason}");
            }
        }
    }
    Ok(())
}

fn cmd_validate(path: &Path) -> Result<(), Failure> {
    parse_scenario(&read(path)?)?;
    stdout("OK\n")
}

fn cmd_generate(cli: &Cli, path: &Path) -> Result<(), Failure> {
    let (params, file_seed) = parse_generator_params(&read(path)?)?;
    let seed = cli.seed.or(file_seed).unwrap_or(0);
    let qulets = generate_workload(&params, seed).map_err(|e| Failure::new(EXIT_SEMANTIC, e.to_string()))?;
    let text = qulet_fragment_to_toml(&qulets);
    match &cli.out {
        Some(out) => write(out, &text),
        None => stdout(&text),
    }
}

fn summary_text(s: &Summary, format: Format) -> String {
    let mut rows: Vec<(String, String)> = vec![
        ("qulets".into(), s.qulets.to_string()),
        ("succeeded".into(), s.succeeded.to_string()),
        ("makespan".into(), format!("{:.4}", s.makespan)),
        ("mean_wait".into(), format!("{:.4}", s.mean_wait)),
        ("p95_wait".into(), format!("{:.4}", s.p95_wait)),
        ("total_cost".into(), format!("{:.4}", s.total_cost)),
    ];
    for (node, u) in &s.utilization {
        rows.push((format!("utilization_node_{node}"), format!("{u:.4}")));
    }
    match format {
        Format::Csv => {
            let mut out = String::from("metric,value\n");
            for (k, v) in rows {
                out.push_str(&format!("{k},{v}\n"));
            }
            out
        }
        Format::Table => {
            let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            rows.into_iter().map(|(k, v)| format!("{k:<width$}  {v:>12}\n")).collect()
        }
    }
}

fn cmd_report(cli: &Cli, path: &Path) -> Result<(), Failure> {
    let file = parse_results(&read(path)?).map_err(|e| Failure::new(EXIT_SYNTAX, format!("malformed results: {e}")))?;
    stdout(&summary_text(&file.summary(), cli.format))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run { scenario } => cmd_run(&cli, scenario),
        Command::Validate { scenario } => cmd_validate(scenario),
        Command::Generate { params } => cmd_generate(&cli, params),
        Command::Report { results } => cmd_report(&cli, results),
    };
    match outcome {
        Ok(()) => ExitCode::from(EXIT_OK),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
