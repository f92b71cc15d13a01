//! `decometer` command-line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::Config;
use output::Sink;

/// A failed command: message plus process exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new(2, message)
    }

    pub fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        Self::new(1, format!("{}: {err}", path.display()))
    }

    pub fn context(mut self, what: &str) -> Self {
        self.message = format!("{what}: {}", self.message);
        self
    }
}

impl From<decometer::Error> for Failure {
    fn from(e: decometer::Error) -> Self {
        use decometer::Error as E;
        let code = match &e {
            E::Config(_) | E::Domain(_) => 2,
            E::Stability(_) | E::DecoherenceFree { .. } => 3,
            E::Convergence { .. } | E::UnboundedRoot { .. } | E::Iteration(_) | E::Divergence(_) => 4,
            E::Resolution(_) => 5,
            E::Resource(_) => 6,
        };
        Self::new(code, e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "decometer", version, about = "Decoherence of a measurement pointer coupled to a thermal bath")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Flat `section.key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output path prefix; files are named `<PREFIX>_<name>.<ext>`.
    #[arg(long, global = true, default_value = "decometer")]
    out: String,
    /// Comma-separated subset of `csv,svg`.
    #[arg(long, global = true, default_value = "csv")]
    format: String,
    /// Worker threads for sweeps.
    #[arg(long, global = true, env = "DECOMETER_THREADS")]
    threads: Option<usize>,
    /// Seed for randomized oracle inputs.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, Subcommand, PartialEq, Eq)]
enum Command {
    /// Tabulate the bath correlator and damping kernel over time.
    BathTable,
    /// Peak decoherence exponent as a function of time.
    Dpeak,
    /// Exact and asymptotic decoherence times over a sweep of tau_ent or eta.
    TdecSweep,
    /// Object-pointer density matrix on a position grid at selected times.
    Evolve,
    /// Wigner function of the reduced pointer state.
    Wigner,
    /// Finite boson bath checks of the Gaussian bath identities.
    WickCheck,
    /// Consistency and stability diagnostics.
    Validate,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::BathTable => "bath-table",
            Command::Dpeak => "dpeak",
            Command::TdecSweep => "tdec-sweep",
            Command::Evolve => "evolve",
            Command::Wigner => "wigner",
            Command::WickCheck => "wick-check",
            Command::Validate => "validate",
        }
    }
}

fn run(cli: &Cli) -> Result<commands::Outcome, Failure> {
    let config = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let mut csv = false;
    let mut svg = false;
    for f in cli.format.split(',').map(str::trim).filter(|f| !f.is_empty()) {
        match f {
            "csv" => csv = true,
            "svg" => svg = true,
            other => return Err(Failure::config(format!("--format: unknown format '{other}'"))),
        }
    }
    if let Some(dir) = Path::new(&cli.out).parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
    }
    let mut header = vec![
        ("tool".to_string(), format!("decometer {}", env!("CARGO_PKG_VERSION"))),
        ("command".to_string(), cli.command.name().to_string()),
        ("seed".to_string(), cli.seed.to_string()),
    ];
    header.extend(config.entries().map(|(k, v)| (format!("config {k}"), v.clone())));
    let mut sink = Sink { prefix: cli.out.clone(), csv, svg, header, written: Vec::new() };
    let threads = cli.threads.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Failure::new(6, format!("thread pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::BathTable => commands::bath_table(&config, &mut sink),
        Command::Dpeak => commands::dpeak(&config, &mut sink),
        Command::TdecSweep => commands::tdec_sweep(&config, &mut sink),
        Command::Evolve => commands::evolve(&config, &mut sink),
        Command::Wigner => commands::wigner(&config, &mut sink),
        Command::WickCheck => commands::wick_check(&config, &mut sink, cli.seed),
        Command::Validate => commands::validate(&config, &mut sink),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            for line in &outcome.report {
                println!("{line}");
            }
            ExitCode::from(outcome.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
