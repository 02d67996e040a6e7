use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nomacov::{Method, NetworkConfigBuilder, Tier};
use nomacov_cli::config::{describe, load_config, parse_config, read};
use nomacov_cli::selftest::{self, run_selftest};
use nomacov_cli::sweep::{parse_packet_length, render, run_sweep, SweepSpec};
use nomacov_cli::{CliError, Result};

/// Coverage and throughput of uplink NOMA in aerial-terrestrial networks.
#[derive(Parser)]
#[command(name = "nomacov", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one scenario.
    Eval {
        /// Scenario file; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
        /// Report the finite-blocklength rate for this packet length (or `inf`).
        #[arg(long)]
        packet_length: Option<String>,
    },
    /// Run a parameter sweep described by a spec file.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        /// Base scenario; keys in the spec file override it.
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Check a scenario or spec file without evaluating it.
    Validate {
        #[arg(long, required_unless_present = "spec")]
        config: Option<PathBuf>,
        #[arg(long)]
        spec: Option<PathBuf>,
    },
    /// Compare every analytic estimator with simulation on the pinned grid.
    Selftest {
        #[arg(long, default_value_t = selftest::DEFAULT_TRIALS)]
        trials: u64,
        #[arg(long, default_value_t = selftest::DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Comma-separated: exact, gauss-chebyshev, low-rate, oma, monte-carlo.
    #[arg(long, value_delimiter = ',')]
    estimators: Option<Vec<Method>>,
    /// Comma-separated: terrestrial, aerial.
    #[arg(long, value_delimiter = ',')]
    tiers: Option<Vec<Tier>>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Add a wall-clock column.
    #[arg(long)]
    timing: bool,
}

impl RunArgs {
    fn apply(self, spec: &mut SweepSpec) -> Result<()> {
        if let Some(e) = self.estimators {
            spec.estimators = e;
        }
        if let Some(t) = self.tiers {
            spec.tiers = t;
        }
        if let Some(n) = self.trials {
            spec.trials = n;
        }
        if let Some(s) = self.seed {
            spec.seed = s;
        }
        if self.out.is_some() {
            spec.output = self.out;
        }
        spec.timing |= self.timing;
        spec.validate()
    }
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|source| CliError::Io { path: p.to_path_buf(), source }),
        None => std::io::stdout().write_all(bytes).map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
    }
}

fn base(config: Option<&Path>) -> Result<NetworkConfigBuilder<f64>> {
    match config {
        Some(p) => Ok(load_config(p)?.to_builder()),
        None => Ok(nomacov::Config::builder()),
    }
}

fn sweep_and_write(spec: &SweepSpec) -> Result<()> {
    let rows = run_sweep(spec);
    let failed = rows.iter().filter(|r| r.status.is_err()).count();
    if failed > 0 {
        eprintln!("warning: {failed} cell(s) reported an error; see the status column");
    }
    write_output(spec.output.as_deref(), &render(spec, &rows)?)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Eval { config, run, packet_length } => {
            let cfg = match &config {
                Some(p) => load_config(p)?,
                None => parse_config("")?,
            };
            let mut spec = SweepSpec::single(cfg);
            spec.packet_length = packet_length.as_deref().map(parse_packet_length).transpose()?;
            run.apply(&mut spec)?;
            sweep_and_write(&spec)?;
        }
        Command::Sweep { spec: path, config, run } => {
            let mut spec = SweepSpec::parse(&read(&path)?, base(config.as_deref())?)?;
            run.apply(&mut spec)?;
            sweep_and_write(&spec)?;
        }
        Command::Validate { config, spec } => {
            let cfg = match &spec {
                Some(p) => SweepSpec::parse(&read(p)?, base(config.as_deref())?)?.scenario,
                None => load_config(config.as_deref().expect("clap requires one of the two"))?,
            };
            print!("{}", describe(&cfg));
            eprintln!("ok");
        }
        Command::Selftest { trials, seed, out } => {
            let report = run_selftest(trials, seed)?;
            write_output(out.as_deref(), &selftest::render(&report)?)?;
            let failed = report.failures().count();
            eprintln!("{} of {} comparisons within {} standard errors", report.checked() - failed, report.checked(), selftest::BAND);
            if failed > 0 {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
