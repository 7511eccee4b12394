use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use majfix_cli::error::EXIT_OK;
use majfix_cli::{load_problem, run_analyze, run_compare, run_solve, run_zones, CliError, Overrides};

#[derive(Parser)]
#[command(name = "majfix", version, about = "Fixed-point existence, uniqueness and error bounds via majorants")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Radii, zones and the existence verdict
    Analyze(Common),
    /// Certified successive approximations
    Solve(Common),
    /// Majorant curves and radius markers as CSV
    Zones(Common),
    /// Contraction-mapping zone against the majorization zones
    Compare(Common),
}

#[derive(Args)]
struct Common {
    /// Problem config (TOML)
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in problem
    #[arg(long)]
    preset: Option<String>,
    /// Output file; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    bound_tol: Option<f64>,
    #[arg(long)]
    max_steps: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    start_offset: Option<f64>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            tol: self.tol,
            bound_tol: self.bound_tol,
            max_steps: self.max_steps,
            start_offset: self.start_offset,
            samples: self.samples,
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn json<T: serde::Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

/// `zones.csv` -> `zones.<suffix>.csv`
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}.csv"))
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let (common, name) = match &cli.command {
        Command::Analyze(c) => (c, "analyze"),
        Command::Solve(c) => (c, "solve"),
        Command::Zones(c) => (c, "zones"),
        Command::Compare(c) => (c, "compare"),
    };
    let problem = load_problem(common.config.as_deref(), common.preset.as_deref())?;
    let o = common.overrides();
    let out = common.out.as_deref();
    match name {
        "analyze" => emit(out, &json(&run_analyze(&problem, &o)?))?,
        "solve" => {
            let outcome = run_solve(&problem, &o)?;
            emit(out, &json(&outcome.doc))?;
            return Ok(outcome.exit_code);
        }
        "zones" => {
            let z = run_zones(&problem, &o)?;
            match out {
                Some(path) => {
                    std::fs::write(path, z.curve_csv())?;
                    std::fs::write(sibling(path, "markers"), z.markers_csv())?;
                    if !z.family.is_empty() {
                        std::fs::write(sibling(path, "family"), z.family_csv())?;
                    }
                }
                None => emit(None, &z.combined())?,
            }
        }
        _ => emit(out, &json(&run_compare(&problem, &o)?))?,
    }
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("majfix: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
