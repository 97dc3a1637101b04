use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use ewl::arith::CacheStatus;
use ewl_cli::acceptance;
use ewl_cli::{commands, CliError, CliResult, RunConfig};

/// Multiplicatively weighted ergodic averages: numerical experiments.
///
/// Parameters come from a flat `key = value` file (`--config`) and
/// `--set key=value` overrides, which win. Reports are written under `--out`.
#[derive(Parser)]
#[command(name = "ewl", version)]
struct Cli {
    /// Run one acceptance criterion (1..=11) and exit 4 if it fails.
    #[arg(long, value_name = "CRITERION")]
    assert: Option<String>,

    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,

    #[arg(long, global = true, default_value = "ewl-out")]
    out: PathBuf,

    /// Print elapsed time to stderr.
    #[arg(long, global = true)]
    timing: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Build or reuse the sieve cache and print prime, squarefree and sign-sum counts.
    Sieve,
    /// Weighted multilinear averages along orbits, with lacunary diagnostics.
    Avg,
    /// Direct vs Fourier evaluation of the finitary bilinear form on random fields.
    Finitary,
    /// Weighted exponential sum maxima (decay, short intervals, spectral bound).
    Expsum,
    /// Lacunary block maximal functions and the transference identity.
    Maximal,
    /// Prime-dilate correlations, commuting-rotation experiment, aperiodicity.
    Kbsz,
    /// Print the merged configuration in canonical form.
    Config,
}

fn load(cli: &Cli) -> CliResult<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::new(),
    };
    for s in &cli.set {
        cfg.apply_override(s)?;
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> CliResult<()> {
    let cfg = load(cli)?;
    let start = Instant::now();
    if let Some(name) = &cli.assert {
        if cli.command.is_some() {
            return Err(CliError::invalid("assert", "--assert runs on its own, without a command"));
        }
        let id = acceptance::parse_id(name)?;
        let seed = acceptance::seed_from(&cfg)?;
        let verdict = acceptance::evaluate(id, &cli.out, seed)?;
        println!("{verdict}");
        if !verdict.passed() {
            return Err(CliError::Acceptance {
                id,
                detail: verdict.detail,
            });
        }
        return Ok(());
    }
    let name = match cli.command {
        Some(Command::Sieve) => "sieve",
        Some(Command::Avg) => "avg",
        Some(Command::Finitary) => "finitary",
        Some(Command::Expsum) => "expsum",
        Some(Command::Maximal) => "maximal",
        Some(Command::Kbsz) => "kbsz",
        Some(Command::Config) => {
            print!("{}", cfg.to_text());
            return Ok(());
        }
        None => return Err(CliError::invalid("command", "give a command or --assert (see --help)")),
    };
    if name == "sieve" {
        let o = commands::cmd_sieve(&cfg, &cli.out)?;
        println!("{}", o.data);
        let status = match o.data.cache {
            CacheStatus::Hit => "hit",
            CacheStatus::Built => "built",
        };
        eprintln!("cache {status}: {}", o.data.cache_file.display());
        warn_unused(&o.unused);
    } else {
        let (summary, files, unused) = commands::run(name, &cfg, &cli.out)?;
        for line in summary {
            println!("{line}");
        }
        for f in files {
            println!("wrote {}", f.display());
        }
        warn_unused(&unused);
    }
    if cli.timing {
        eprintln!("elapsed {:.3} s", start.elapsed().as_secs_f64());
    }
    Ok(())
}

fn warn_unused(keys: &[String]) {
    for k in keys {
        eprintln!("warning: key `{k}` is not used by this command");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
