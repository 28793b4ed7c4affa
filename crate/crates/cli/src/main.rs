use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cytower::Error;
use cytower_cli::checks::{self, Level};
use cytower_cli::commands::{self, H11Method};
use serde::Deserialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Table,
}

#[derive(Parser)]
#[command(name = "cytower", version, about = "Exact computations on the Sylvester tower of Calabi-Yau moduli")]
struct Cli {
    /// Worker threads for parallel scans (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Largest number of tuples or sectors to materialize.
    #[arg(long, global = true)]
    cap: Option<u64>,
    /// JSON file with defaults for threads, format and cap.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dimension of M_n and its weights.
    Dim {
        #[arg(long)]
        n: usize,
    },
    /// Map a point of M_{n-1} to M_n.
    Embed {
        /// Point JSON; `-` reads stdin.
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Fiber types of a family or a moduli point at each special place.
    Classify {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Log canonical threshold from the Newton polyhedron.
    Lct {
        /// Polynomial file, one `coefficient : exponents` term per line.
        #[arg(long = "in")]
        input: PathBuf,
        /// Comma separated point to expand around (default: origin).
        #[arg(long)]
        base: Option<String>,
        /// Treat f as Newton nondegenerate, so labels drop the word "torically".
        #[arg(long)]
        nondegenerate: bool,
    },
    /// Hodge number h^{1,1} of the level-n variety.
    H11 {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "fast")]
        method: H11Method,
    },
    /// Run the verification suite.
    Verify {
        #[arg(value_enum, default_value = "quick")]
        level: VerifyLevel,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VerifyLevel {
    Quick,
    Full,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Config {
    threads: Option<usize>,
    format: Option<Format>,
    cap: Option<u64>,
}

struct Settings {
    format: Format,
    cap: u64,
    out: Option<PathBuf>,
}

const DEFAULT_CAP: u64 = 10_000_000;

fn input_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn load_config(path: &PathBuf) -> Result<Config, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    if text.trim().is_empty() {
        return Ok(Config::default());
    }
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn read_input(path: &PathBuf) -> Result<String, String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| e.to_string())?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
    }
}

fn read_json(path: &PathBuf) -> Result<Value, String> {
    serde_json::from_str(&read_input(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn emit(settings: &Settings, v: &Value) -> Result<(), String> {
    let text = match settings.format {
        Format::Json => serde_json::to_string_pretty(v).expect("serializable") + "\n",
        Format::Table => commands::render_table(v),
    };
    match &settings.out {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Library errors that describe bad input exit with 2; failed checks with 1.
fn error_code(e: &Error) -> ExitCode {
    match e {
        Error::Violation(_) => {
            eprintln!("verification failure: {e}");
            ExitCode::from(1)
        }
        _ => input_error(e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match &cli.config {
        Some(p) => match load_config(p) {
            Ok(c) => c,
            Err(e) => return input_error(e),
        },
        None => Config::default(),
    };
    if let Some(t) = cli.threads.or(config.threads) {
        if t == 0 {
            return input_error("--threads must be positive");
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            return input_error(e);
        }
    }
    let settings = Settings {
        format: cli.format.or(config.format).unwrap_or(Format::Json),
        cap: cli.cap.or(config.cap).unwrap_or(DEFAULT_CAP),
        out: cli.out.clone(),
    };

    let result = match cli.command {
        Command::Dim { n } => commands::dim(n, settings.cap),
        Command::Embed { input } => match read_json(&input) {
            Ok(v) => commands::embed_point(&v),
            Err(e) => return input_error(e),
        },
        Command::Classify { input } => match read_json(&input) {
            Ok(v) => commands::classify(&v),
            Err(e) => return input_error(e),
        },
        Command::Lct { input, base, nondegenerate } => match read_input(&input) {
            Ok(text) => commands::lct(text.trim(), base.as_deref(), nondegenerate),
            Err(e) => return input_error(e),
        },
        Command::H11 { n, method } => commands::h11(n, method, settings.cap.into()),
        Command::Verify { level } => {
            let level = match level {
                VerifyLevel::Quick => Level::Quick,
                VerifyLevel::Full => Level::Full,
            };
            let report = checks::run(level);
            eprint!("{}", report.table());
            let v = report.to_json();
            let text = serde_json::to_string_pretty(&v).expect("serializable") + "\n";
            let written = match &settings.out {
                Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            if let Err(e) = written {
                return input_error(e);
            }
            if !report.passed() {
                let failing: Vec<&str> = report
                    .checks
                    .iter()
                    .filter(|c| !c.passed())
                    .map(|c| c.name.as_str())
                    .collect();
                eprintln!("failing: {}", failing.join(", "));
                return ExitCode::from(1);
            }
            return ExitCode::SUCCESS;
        }
    };

    match result {
        Ok(v) => match emit(&settings, &v) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => input_error(e),
        },
        Err(e) => error_code(&e),
    }
}
