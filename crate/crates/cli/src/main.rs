//! `addiviol` command-line front end. Every command writes one JSON report
//! (stdout or `--out`) and optionally a CSV projection (`--csv`).

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use addiviol::RenyiOrder;

/// Exit code for command-line usage errors.
const EX_USAGE: u8 = 64;
/// Exit code for invalid input data (malformed files, failed validation).
const EX_DATAERR: u8 = 65;
/// Exit code for missing input files.
const EX_NOINPUT: u8 = 66;
/// Exit code for internal failures.
const EX_SOFTWARE: u8 = 70;
/// Exit code for output that could not be written.
const EX_CANTCREAT: u8 = 73;

#[derive(Debug, Parser)]
#[command(name = "addiviol", version, about = "Minimum output entropy and additivity-violation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
struct Common {
    /// Optimizer restarts (default: 32, or 64 for p < 1).
    #[arg(long, global = true, value_parser = positive_usize)]
    restarts: Option<usize>,
    /// Iteration cap per optimizer run.
    #[arg(long, global = true, default_value_t = 1000, value_parser = positive_usize)]
    max_iter: usize,
    /// Convergence tolerance on objective changes.
    #[arg(long, global = true, default_value = "1e-10", value_parser = positive_f64)]
    tol: f64,
    /// Eigenvalues at or below this count as zero for p = 0.
    #[arg(long, global = true, default_value = "1e-9", value_parser = positive_f64)]
    rank_eps: f64,
    /// Base seed; restart r uses seed + r.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also write the table or spectrum as CSV.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// Allow embeddings above 10^7 amplitudes.
    #[arg(long, global = true)]
    large: bool,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "snake_case")]
enum Command {
    /// Compare the joint entropy of the conjugate-pair state with twice the
    /// single-copy minimum. Exit 0 violated, 1 not violated, 2 inconclusive.
    Verify {
        /// antisym | parthasarathy | file:<path>
        #[arg(long)]
        subspace: Selector,
        /// Local dimension for built-in subspaces.
        #[arg(long, value_parser = positive_usize)]
        d: Option<usize>,
        #[arg(long, value_parser = parse_order)]
        p: RenyiOrder,
    },
    /// Violation reports for antisymmetric subspaces with d = 2..=dmax.
    Scan {
        #[arg(long, value_parser = parse_order)]
        p: RenyiOrder,
        #[arg(long, value_parser = positive_usize)]
        dmax: usize,
    },
    /// Output entropy of n uses of the antisymmetric channel.
    Multicopy {
        #[arg(long, default_value_t = 3, value_parser = positive_usize)]
        d: usize,
        #[arg(long, value_parser = positive_usize)]
        n: usize,
        #[arg(long, value_enum)]
        input: InputArg,
        #[arg(long, default_value = "inf", value_parser = parse_order)]
        p: RenyiOrder,
    },
    /// Unextendible product basis checks and p = 0 additivity evidence.
    Upb {
        /// tiles | file:<path>
        #[arg(long)]
        basis: BasisSelector,
        #[arg(long, value_enum, default_value_t = CheckArg::All)]
        check: CheckArg,
    },
    /// Minimum entanglement over a subspace with the von Neumann condition.
    Screen {
        /// antisym | parthasarathy | file:<path>
        #[arg(long)]
        subspace: Selector,
        #[arg(long, value_parser = positive_usize)]
        d: Option<usize>,
        #[arg(long, default_value = "1", value_parser = parse_order)]
        p: RenyiOrder,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum InputArg {
    AntisymTotal,
    Pairing,
    Optimized,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum CheckArg {
    All,
    Partition,
    Genericity,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case")]
enum Selector {
    Antisym,
    Parthasarathy,
    File(PathBuf),
}

impl std::str::FromStr for Selector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "antisym" => Ok(Self::Antisym),
            "parthasarathy" => Ok(Self::Parthasarathy),
            _ => match s.strip_prefix("file:") {
                Some(p) if !p.is_empty() => Ok(Self::File(p.into())),
                _ => Err(format!("expected antisym, parthasarathy or file:<path>, got {s:?}")),
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case")]
enum BasisSelector {
    Tiles,
    File(PathBuf),
}

impl std::str::FromStr for BasisSelector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match (s, s.strip_prefix("file:")) {
            ("tiles", _) => Ok(Self::Tiles),
            (_, Some(p)) if !p.is_empty() => Ok(Self::File(p.into())),
            _ => Err(format!("expected tiles or file:<path>, got {s:?}")),
        }
    }
}

fn parse_order(s: &str) -> Result<RenyiOrder, String> {
    s.parse().map_err(|e: addiviol::Error| e.to_string())
}

fn positive_usize(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(_) => Err("must be a positive finite number".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var("ADDIVIOL_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).with_context(|| {
        format!("ADDIVIOL_THREADS must be a positive integer, got {raw:?}")
    })?;
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
        bail!("configuring {n} worker threads: {e}");
    }
    Ok(())
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(io) = cause.downcast_ref::<std::io::Error>() {
            return match io.kind() {
                std::io::ErrorKind::NotFound => EX_NOINPUT,
                _ => EX_CANTCREAT,
            };
        }
        if cause.downcast_ref::<addiviol::Error>().is_some() || cause.downcast_ref::<serde_json::Error>().is_some() {
            return EX_DATAERR;
        }
        if cause.downcast_ref::<commands::UsageError>().is_some() {
            return EX_USAGE;
        }
    }
    EX_SOFTWARE
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EX_USAGE } else { 0 });
        }
    };
    let outcome = configure_threads().and_then(|()| commands::run(&cli.command, &cli.common));
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
