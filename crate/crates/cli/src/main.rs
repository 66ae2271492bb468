use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use colombeau::config::RunConfig;
use colombeau::run::{self, RunOutput};

/// Thread count for the parallel sweeps; unset means all cores.
const THREADS_ENV: &str = "COLOMBEAU_THREADS";

#[derive(Parser)]
#[command(name = "colombeau", version, about = "Generalized-function laboratory for thin-shell wormholes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the association and non-negativity rule suite.
    Rules(Common),
    /// Proper distance table, round trips and throat constants.
    Geometry(Common),
    /// Norms and moments of the configured mollifier.
    MollifierReport(Common),
    /// NEC verdicts over a grid of throat radii and alpha2 values.
    NecSweep(Common),
}

#[derive(Args)]
struct Common {
    /// Configuration file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the CSV here (overrides `output.path`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override one configuration key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn load(c: &Common) -> Result<RunConfig, String> {
    let mut cfg = match &c.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            RunConfig::from_text(&text).map_err(|e| e.to_string())?
        }
        None => RunConfig::default(),
    };
    for kv in &c.set {
        cfg.apply_override(kv).map_err(|e| e.to_string())?;
    }
    if let Some(out) = &c.out {
        cfg.output = out.display().to_string();
    }
    Ok(cfg)
}

fn execute(cli: Cli) -> Result<i32, String> {
    let (common, f): (&Common, fn(&RunConfig) -> colombeau::Result<RunOutput>) = match &cli.command {
        Command::Rules(c) => (c, run::run_rules),
        Command::Geometry(c) => (c, run::run_geometry),
        Command::MollifierReport(c) => (c, run::run_mollifier_report),
        Command::NecSweep(c) => (c, run::run_nec_sweep),
    };
    let cfg = load(common)?;
    let out = f(&cfg).map_err(|e| e.to_string())?;
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    print!("{}", out.report);
    if let (false, Some(csv)) = (cfg.output.is_empty(), &out.csv) {
        std::fs::write(&cfg.output, csv).map_err(|e| format!("cannot write {}: {e}", cfg.output))?;
    }
    Ok(out.exit_code)
}

fn main() -> ExitCode {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    eprintln!("error: cannot configure threads: {e}");
                    return ExitCode::from(1);
                }
            }
            _ => {
                eprintln!("error: {THREADS_ENV} must be a positive integer, got `{v}`");
                return ExitCode::from(1);
            }
        }
    }
    match execute(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
