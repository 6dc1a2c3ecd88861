//! `dowker-lab`: batch experiments on C-spindle convex bodies.

mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use config::Config;

/// Version of the JSON report layout.
const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "dowker-lab", version, about = "Dowker-type experiments for C-spindle convexity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML experiment config; every section is optional.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `out` in the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomized sweeps (overrides `seed` in the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Also write an SVG figure.
    #[arg(long, global = true)]
    svg: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Rebuild the boundary of C from its curvature profile.
    Reconstruct,
    /// Maximum-area inscribed C-n-gons and their second differences.
    Dowker,
    /// Random sweep of the four-point inequality.
    Quadrangle,
    /// Analytic mixed partial of the region area against finite differences.
    DerivativeCheck,
    /// Perimeter-measure and Hausdorff distance between two disks.
    PmDistance,
    /// Capped disks D_n against the unit disk.
    RefinementDemo,
    /// Build a nearly round disk that breaks the four-point inequality.
    Counterexample,
}

impl Command {
    fn name(self) -> &'static str {
        let i = match self {
            Command::Reconstruct => 0,
            Command::Dowker => 1,
            Command::Quadrangle => 2,
            Command::DerivativeCheck => 3,
            Command::PmDistance => 4,
            Command::RefinementDemo => 5,
            Command::Counterexample => 6,
        };
        commands::COMMANDS[i]
    }
}

fn resolve(cli: &Cli, command: &str) -> Result<Config, String> {
    let (mut cfg, text) = match &cli.config {
        Some(path) => config::load(path).map_err(|e| format!("{}: {e}", path.display()))?,
        None => (Config::default(), String::new()),
    };
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    if cli.out.is_some() {
        cfg.out = cli.out.clone();
    }
    config::validate(&cfg, &text, command).map_err(|e| match &cli.config {
        Some(path) => format!("{}: {e}", path.display()),
        None => e.to_string(),
    })?;
    Ok(cfg)
}

fn write(dir: &Path, name: &str, contents: &str) -> std::io::Result<()> {
    std::fs::write(dir.join(name), contents)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = cli.command.name();
    let cfg = match resolve(&cli, command) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
    if let Err(e) = std::fs::create_dir_all(&dir) {
        eprintln!("error: {}: {e}", dir.display());
        return ExitCode::from(2);
    }

    let outcome = commands::run(command, &cfg, cli.svg);
    let mut report = json!({
        "schema_version": SCHEMA_VERSION,
        "version": dowker_core::VERSION,
        "command": command,
        "seed": cfg.seed,
        "config": serde_json::to_value(&cfg).expect("config serializes"),
    });
    match &outcome {
        Ok(out) => {
            report["result"] = out.result.clone();
            report["error"] = Value::Null;
        }
        Err(e) => {
            report["result"] = Value::Null;
            report["error"] = Value::String(e.to_string());
        }
    }
    let json_text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    let mut written = vec![write(&dir, &format!("{command}.json"), &json_text)];
    if let Ok(out) = &outcome {
        written.push(write(&dir, &format!("{command}.csv"), &out.csv));
        if let Some(svg) = &out.svg {
            written.push(write(&dir, &format!("{command}.svg"), svg));
        }
    }
    if let Some(Err(e)) = written.into_iter().find(|w| w.is_err()) {
        eprintln!("error: writing to {}: {e}", dir.display());
        return ExitCode::from(2);
    }
    match outcome {
        Ok(_) => {
            println!("{command}: wrote {}/{command}.{{json,csv}}", dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
