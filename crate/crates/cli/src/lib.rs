//! Command implementations behind the `ana-dof` binary.
//!
//! [`execute`] writes a command's output to any writer and reports whether
//! the verification it ran passed; [`run`] adds `--out` handling and maps the
//! result to the process exit code.

use std::io::Write;
use std::path::PathBuf;

use ana_dof::{CsitMode, SchemeKind};
use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] ana_dof::Error),
    #[error("{0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Whether the command's own check succeeded. Commands that only compute
/// something always pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "ana-dof",
    version,
    about = "Secrecy DoF formulas and artificial-noise alignment checks"
)]
pub struct Cli {
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Output format. Defaults to plain text for `sdof`, CSV for `sweep`,
    /// and JSON otherwise.
    #[arg(long, global = true)]
    pub format: Option<Format>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct CfgArgs {
    /// Transmit antennas.
    #[arg(long)]
    pub m: u32,
    /// Antennas at receiver A.
    #[arg(long)]
    pub na: u32,
    /// Antennas at receiver B.
    #[arg(long)]
    pub nb: u32,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct SeedArg {
    #[arg(long, env = "ANA_DOF_SEED", default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegionKind {
    SdofDelayed,
    SdofPerfect,
    DofDelayed,
}

impl RegionKind {
    pub fn name(self) -> &'static str {
        match self {
            RegionKind::SdofDelayed => "sdof-delayed",
            RegionKind::SdofPerfect => "sdof-perfect",
            RegionKind::DofDelayed => "dof-delayed",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Wiretap SDoF of one configuration under one CSIT mode.
    Sdof {
        #[command(flatten)]
        cfg: CfgArgs,
        /// perfect, delayed, partial or no.
        #[arg(long)]
        csit: CsitMode,
    },
    /// Wiretap SDoF over a range of transmit antennas and CSIT modes.
    Sweep {
        #[arg(long)]
        na: u32,
        #[arg(long)]
        nb: u32,
        #[arg(long, default_value_t = 1)]
        m_min: u32,
        #[arg(long, default_value_t = 8)]
        m_max: u32,
        /// Comma-separated modes; all four when omitted.
        #[arg(long, value_delimiter = ',')]
        csit: Vec<CsitMode>,
    },
    /// Half-planes and vertices of a two-user region.
    Region {
        #[command(flatten)]
        cfg: CfgArgs,
        #[arg(long, value_enum)]
        which: RegionKind,
    },
    /// Monte Carlo slope estimate of a scheme against its closed-form SDoF.
    Simulate {
        #[arg(long)]
        kind: SchemeKind,
        #[command(flatten)]
        cfg: CfgArgs,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        /// Comma-separated SNR points in dB.
        #[arg(long, value_delimiter = ',', default_value = "40,60,80,100")]
        grid_db: Vec<f64>,
        #[command(flatten)]
        seed: SeedArg,
        /// Allowed gap between estimated and closed-form per-slot slopes.
        #[arg(long, default_value_t = 0.05)]
        tol: f64,
        /// Replace the artificial noise by zeros.
        #[arg(long)]
        no_artificial_noise: bool,
    },
    /// Alignment rank identities and decodability over seeded channel draws.
    Ranks {
        #[arg(long)]
        kind: SchemeKind,
        #[command(flatten)]
        cfg: CfgArgs,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[command(flatten)]
        seed: SeedArg,
        /// Relative singular value threshold.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Checks the entropy inequalities on random exchangeable sources.
    VerifyLemma {
        #[arg(long, default_value_t = 1000)]
        count: usize,
        /// Largest sequence length.
        #[arg(long, default_value_t = 5)]
        l_max: usize,
        /// Largest alphabet size.
        #[arg(long, default_value_t = 2)]
        q: usize,
        #[command(flatten)]
        seed: SeedArg,
        /// Margin below which an inequality counts as violated, in bits.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Append a source that is not entropy-symmetric.
        #[arg(long, hide = true)]
        inject_non_exchangeable: bool,
    },
    /// Seeded channel realization.
    DumpChannel {
        #[command(flatten)]
        cfg: CfgArgs,
        #[arg(long, default_value_t = 1)]
        slots: usize,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Block shapes and sparsity of a scheme's effective channels.
    Structure {
        #[arg(long)]
        kind: SchemeKind,
        #[command(flatten)]
        cfg: CfgArgs,
        #[command(flatten)]
        seed: SeedArg,
    },
}

/// Runs the command, writing its output to `out`.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<Outcome, CliError> {
    commands::dispatch(cli, out)
}

/// Runs the command and returns the process exit code. Errors go to stderr.
pub fn run(cli: &Cli) -> i32 {
    let mut buf = Vec::new();
    let result = execute(cli, &mut buf).and_then(|outcome| {
        match &cli.out {
            Some(path) => std::fs::write(path, &buf)?,
            None => std::io::stdout().write_all(&buf)?,
        }
        Ok(outcome)
    });
    match result {
        Ok(Outcome::Pass) => EXIT_PASS,
        Ok(Outcome::Fail) => EXIT_FAIL,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
