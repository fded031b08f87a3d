use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use padic_lfun::cli::{run, Command, Overrides, Report, Status};

/// Overconvergent modular symbols and p-adic L-functions.
///
/// Settings are layered: defaults, then --config (JSON), then the
/// PADIC_LAB_CACHE_DIR, PADIC_LAB_THREADS and PADIC_LAB_PREC environment
/// variables, then flags. The JSON report goes to stdout (or --report) and a
/// summary to stderr. Exit codes: 0 pass, 1 check failure, 2 config error,
/// 3 precision exhausted.
#[derive(Parser)]
#[command(name = "padic-lab", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// JSON config file with the same keys as the flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Suppress the summary on stderr.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Dimension and rational eigensystems of a space of symbols.
    Space(Args),
    /// A Hecke matrix (cached on disk) and its characteristic polynomial.
    Hecke(Args),
    /// U_p on the old space at level Mp.
    Stabilise(Args),
    /// Overconvergent lift of an ordinary stabilisation, with control checks.
    Lift(Args),
    /// Interpolation table of the p-adic L-function.
    Lfun(Args),
    /// Base change factorisation over an imaginary quadratic field.
    Artin(Args),
    /// Lift over a truncated weight family.
    Family(Args),
    /// Exact checks at a synthetic p-irregular point.
    IrregularLab(Args),
    /// Evaluation maps, pairings and injectivity.
    Evalpair(Args),
    /// The acceptance suite.
    Selftest {
        /// Only the exact, fast criteria.
        #[arg(long)]
        quick: bool,
        #[command(flatten)]
        args: Args,
    },
}

#[derive(clap::Args)]
struct Args {
    #[command(flatten)]
    o: Overrides,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, flags) = match cli.cmd {
        Cmd::Space(a) => (Command::Space, a.o),
        Cmd::Hecke(a) => (Command::Hecke, a.o),
        Cmd::Stabilise(a) => (Command::Stabilise, a.o),
        Cmd::Lift(a) => (Command::Lift, a.o),
        Cmd::Lfun(a) => (Command::Lfun, a.o),
        Cmd::Artin(a) => (Command::Artin, a.o),
        Cmd::Family(a) => (Command::Family, a.o),
        Cmd::IrregularLab(a) => (Command::IrregularLab, a.o),
        Cmd::Evalpair(a) => (Command::Evalpair, a.o),
        Cmd::Selftest { quick, args } => (Command::Selftest { quick }, args.o),
    };
    let report = match Overrides::resolve(cli.config.as_deref(), flags) {
        Ok(o) => run(cmd, o),
        Err(e) => Report::from_error(cmd.name(), serde_json::Value::Null, &e),
    };
    let text = serde_json::to_string_pretty(&report).expect("report serialises");
    let target = report
        .config
        .get("report")
        .and_then(|v| v.as_str())
        .map(PathBuf::from);
    match target {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, text + "\n") {
                eprintln!("cannot write {}: {e}", path.display());
                return ExitCode::from(Status::ConfigError.exit_code() as u8);
            }
        }
        None => println!("{text}"),
    }
    if !cli.quiet {
        eprint!("{}", report.summary());
    }
    ExitCode::from(report.status.exit_code() as u8)
}
