use clap::{Parser, Subcommand, ValueEnum};
use lacecheck::check::Checker;
use lacecheck::config::Config;
use lacecheck::corpus;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

#[derive(Parser)]
#[command(name = "lacecheck", version, about = "Check Lace proofs of weak-memory programs")]
struct Cli {
    /// Configuration file (default: ./lacecheck.toml if present).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Solver executable.
    #[arg(long, global = true)]
    solver: Option<PathBuf>,
    /// Per-obligation solver timeout in seconds.
    #[arg(long, global = true)]
    timeout: Option<u64>,
    /// Concurrent solver processes.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check one program.
    Check {
        file: PathBuf,
        /// Register assignments interfere only when so-between.
        #[arg(long)]
        screg: bool,
        /// Check the final assertion.
        #[arg(long, value_enum)]
        pms: Option<OnOff>,
        /// Loop unrolling depth for path analysis.
        #[arg(long)]
        loop_unroll: Option<usize>,
        /// Print the JSON report.
        #[arg(long)]
        json: bool,
        /// List valid obligations too.
        #[arg(long, short)]
        verbose: bool,
    },
    /// Check every program of a directory against its .expect sidecar.
    RunCorpus { dir: PathBuf },
}

fn run(cli: Cli) -> Result<i32, String> {
    let mut cfg = Config::load(cli.config.as_deref()).map_err(|e| e.to_string())?;
    if let Some(s) = cli.solver {
        cfg.solver.path = s;
    }
    if let Some(t) = cli.timeout {
        cfg.solver.timeout = Duration::from_secs(t);
    }
    if let Some(j) = cli.jobs {
        cfg.pool = j.max(1);
    }
    match cli.cmd {
        Cmd::Check { file, screg, pms, loop_unroll, json, verbose } => {
            cfg.options.screg |= screg;
            if let Some(p) = pms {
                cfg.options.pms = matches!(p, OnOff::On);
            }
            if let Some(n) = loop_unroll {
                cfg.options.unroll = n;
            }
            let checker = Checker::new(cfg).map_err(|e| e.to_string())?;
            match checker.check_file(&file) {
                Ok(r) => {
                    print!("{}", if json { r.to_json() + "\n" } else { r.to_text(verbose) });
                    Ok(r.status.exit_code())
                }
                Err(e) => Err(e.to_string()),
            }
        }
        Cmd::RunCorpus { dir } => {
            let checker = Checker::new(cfg).map_err(|e| e.to_string())?;
            let entries = corpus::run_corpus(&checker, &dir).map_err(|e| format!("{}: {e}", dir.display()))?;
            print!("{}", corpus::table(&entries));
            Ok(if entries.iter().all(|e| e.passed()) { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(c) => ExitCode::from(c as u8),
        Err(e) => {
            eprintln!("lacecheck: {e}");
            ExitCode::from(3)
        }
    }
}
