mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use thermo_recover::config::{set_max_dim, MAX_DIM_ENV};
use thermo_recover::{Tolerances, WorkMode};

use commands::{CatalysisArgs, OscillatorArgs, RecoverArgs, Report, RunConfig, VerifyArgs, WorkboundArgs};
use output::{emit, pretty, CliError, CliResult};

/// Thermal-operation recovery maps, Renyi work bounds and randomized checks.
///
/// Exit codes: 0 success, 1 a bound or identity failed (a counterexample is
/// written), 2 invalid input (a JSON error object is printed on stderr).
#[derive(Parser)]
#[command(name = "thermo-recover", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Report file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Override a verification tolerance, e.g. `identity=1e-8`. Repeatable.
    #[arg(long = "tol-override", global = true, value_name = "KEY=VALUE")]
    tol_override: Vec<String>,
    /// Where a failing run writes its counterexample (default: next to --out,
    /// else ./counterexample.json).
    #[arg(long, global = true)]
    counterexample: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Std,
    NanoGain,
    NanoInvest,
}

impl From<Mode> for WorkMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Std => WorkMode::Std,
            Mode::NanoGain => WorkMode::NanoGain,
            Mode::NanoInvest => WorkMode::NanoInvest,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Renyi divergence D_alpha(a||b); relative entropy without --alpha.
    Divergence {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Order; `inf` gives the max-divergence.
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Work bounds for rho -> sigma, in units of kT.
    ///
    /// CSV output (--csv or --format csv) is the alpha trace of the nano
    /// bound with columns alpha,difference.
    Workbound {
        #[arg(long)]
        rho: PathBuf,
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long)]
        hs: PathBuf,
        #[arg(long)]
        beta: f64,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Energy-conserving unitary on system x bath; adds the recovery bound.
        #[arg(long, requires = "hb")]
        unitary: Option<PathBuf>,
        #[arg(long, requires = "unitary")]
        hb: Option<PathBuf>,
        /// Comma-separated Renyi orders, `inf` allowed.
        #[arg(long)]
        alpha_grid: Option<String>,
        /// Also report values multiplied by this kT.
        #[arg(long)]
        kt: Option<f64>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Reversal map of a thermal operation and the recovery chain
    /// delta >= D(rho||R(sigma)) >= -log F(rho, R(sigma)).
    Recover {
        #[arg(long)]
        unitary: Option<PathBuf>,
        #[arg(long)]
        hs: Option<PathBuf>,
        #[arg(long)]
        hb: Option<PathBuf>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        sigma: Option<PathBuf>,
        #[arg(long)]
        rho: Option<PathBuf>,
        /// Sample a thermal operation and input state of dims SxB from --seed
        /// instead of reading files.
        #[arg(long, value_name = "SxB", conflicts_with_all = ["unitary", "hs", "hb", "beta", "sigma"])]
        sample: Option<String>,
    },
    /// Qubit erasure with a harmonic-oscillator bath.
    ///
    /// CSV columns: beta_e, p0, n_max, b, p0r (closed form), matrix_p0r,
    /// bound (closed form, kT), pipeline_bound (kT), residual (populations),
    /// pipeline_residual.
    Oscillator {
        #[arg(long)]
        beta_e: f64,
        #[arg(long)]
        p0: Option<f64>,
        /// Bath truncation; chosen automatically when omitted.
        #[arg(long)]
        nmax: Option<usize>,
        /// `p0:start:stop:steps`, inclusive.
        #[arg(long)]
        sweep: Option<String>,
        #[arg(long)]
        kt: Option<f64>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Catalytic thermal operations.
    Catalysis {
        #[command(subcommand)]
        command: CatalysisCommand,
    },
    /// Randomized verification suites.
    ///
    /// CSV columns: suite, metric, max, tolerance, evaluated, trials, passed,
    /// failed, skipped.
    Verify {
        /// Replay one stored instance (or a counterexample dump) through the
        /// identity, chain and Petz suites.
        #[arg(long, conflicts_with_all = ["suites", "dims", "catalyst_dims"])]
        fixture: Option<PathBuf>,
        /// Comma-separated suite names; all when omitted.
        #[arg(long)]
        suites: Option<String>,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        first_trial: u64,
        /// `system;bath` dimension lists, e.g. `2,3;2,3,4`.
        #[arg(long)]
        dims: Option<String>,
        #[arg(long)]
        catalyst_dims: Option<String>,
    },
}

#[derive(Subcommand)]
enum CatalysisCommand {
    /// Sweep sampled instances through the product-structure lemma.
    Verify {
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// `system;catalysts`, e.g. `2;2,3` for two catalysts of dims 2 and 3.
        #[arg(long, default_value = "2,3;2")]
        dims: String,
        #[arg(long)]
        bath_dims: Option<String>,
    },
}

fn run_config(g: &Global) -> CliResult<RunConfig> {
    let mut tolerances = Tolerances::default();
    for o in &g.tol_override {
        tolerances.apply_override(o)?;
    }
    Ok(RunConfig {
        seed: g.seed,
        out: g.out.clone(),
        csv: matches!(g.format, Format::Csv),
        tolerances,
        overrides: g.tol_override.clone(),
        counterexample: g.counterexample.clone(),
    })
}

fn apply_max_dim() -> CliResult<()> {
    if let Ok(raw) = std::env::var(MAX_DIM_ENV) {
        let dim: usize = raw
            .trim()
            .parse()
            .ok()
            .filter(|&d| d > 0)
            .ok_or_else(|| CliError::invalid("invalid_parameter", format!("{MAX_DIM_ENV}={raw} is not a positive integer")))?;
        set_max_dim(dim);
    }
    Ok(())
}

fn dispatch(cfg: &RunConfig, command: Command) -> CliResult<Report> {
    match command {
        Command::Divergence { a, b, alpha } => commands::divergence(cfg, &a, &b, alpha),
        Command::Workbound { rho, sigma, hs, beta, mode, unitary, hb, alpha_grid, kt, csv } => commands::workbound(
            cfg,
            &WorkboundArgs { rho, sigma, hs, beta, mode: mode.into(), unitary, hb, alpha_grid, kt, csv },
        ),
        Command::Recover { unitary, hs, hb, beta, sigma, rho, sample } => {
            commands::recover(cfg, &RecoverArgs { unitary, hs, hb, beta, sigma, rho, sample })
        }
        Command::Oscillator { beta_e, p0, nmax, sweep, kt, csv } => {
            commands::oscillator(cfg, &OscillatorArgs { beta_e, p0, nmax, sweep, kt, csv })
        }
        Command::Catalysis { command: CatalysisCommand::Verify { trials, dims, bath_dims } } => {
            commands::catalysis_verify(cfg, &CatalysisArgs { trials, dims, bath_dims })
        }
        Command::Verify { fixture, suites, trials, first_trial, dims, catalyst_dims } => {
            commands::verify(cfg, &VerifyArgs { fixture, suites, trials, first_trial, dims, catalyst_dims })
        }
    }
}

fn execute(cli: Cli) -> CliResult<()> {
    apply_max_dim()?;
    let cfg = run_config(&cli.global)?;
    let report = dispatch(&cfg, cli.command)?;
    let bytes = if cfg.csv {
        report
            .table
            .as_ref()
            .ok_or_else(|| CliError::invalid("invalid_parameter", "this command has no CSV form"))?
            .to_bytes()?
    } else {
        pretty(&report.json)
    };
    emit(cfg.out.as_ref(), &bytes)?;
    if let Some(failure) = report.failure {
        let path = cfg.counterexample_path();
        output::write_file(&path, &pretty(&failure.dump))?;
        return Err(CliError::Violation {
            message: format!("{}; counterexample written to {}", failure.message, path.display()),
        });
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    ExitCode::SUCCESS
                }
                _ => {
                    let err = CliError::invalid("usage", e.to_string().trim().to_string());
                    eprintln!("{}", err.to_json());
                    ExitCode::from(2)
                }
            };
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
