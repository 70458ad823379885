//! Command-line front end. [`run`] returns the process exit code:
//! 0 when every assertion held, 1 on an assertion failure, 2 on a usage or
//! configuration error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use super::ranges::{parse_int_grid, parse_real_grid};
use super::selftest::selftest;
use super::sweeps::{cmd_dirichlet, cmd_hankel_check, cmd_witness, HankelCheckParams, WitnessParams};
use super::{quadrature_config, write_records, Format, HarnessError, RunManifest, SweepOutcome};
use crate::bump::{BumpFunction, BumpSpec};
use crate::trigpoly::QuadratureConfig;

const DEFAULT_P: &str = "0.5:0.99:0.05";

#[derive(Debug, Parser)]
#[command(
    name = "sptri",
    version,
    about = "Triangular projection on Schatten classes: sweeps and checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// L^p norms of the analytic Dirichlet kernel against their envelopes.
    Dirichlet {
        #[arg(long, default_value = "2:16384:x2")]
        n: String,
        #[command(flatten)]
        common: Common,
    },
    /// Witness lower bounds and certified upper bounds for the triangular projection.
    Witness {
        #[arg(long, default_value_t = 10)]
        k_max: u32,
        #[arg(long, default_value_t = 2)]
        k_min: u32,
        /// Also emit p = 1 rows and the log-growth comparison.
        #[arg(long)]
        include_p1: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Randomized checks of the Hankel polynomial and multiplier bounds.
    HankelCheck {
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 128)]
        m_max: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Exact identities and small oracle comparisons.
    Selftest,
}

#[derive(Debug, Args, serde::Serialize)]
struct Common {
    /// Exponent grid: list, `a:b:step` or `a:b:xr`.
    #[arg(long, default_value = DEFAULT_P)]
    p: String,
    /// Relative tolerance of the L^p quadrature refinement.
    #[arg(long, default_value_t = 1e-7)]
    quad_tol: f64,
    /// Output file (stdout when absent); a manifest is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("sptri: {e}");
            e.exit_code()
        }
    }
}

fn execute(command: Command) -> Result<i32, HarnessError> {
    match command {
        Command::Selftest => {
            let report = selftest();
            for c in &report.checks {
                match &c.failure {
                    None => println!("ok   {}", c.name),
                    Some(msg) => println!("FAIL {}: {msg}", c.name),
                }
            }
            Ok(if report.passed() { 0 } else { 1 })
        }
        Command::Dirichlet { n, common } => {
            let ns = parse_int_grid(&n)?;
            let ps = parse_real_grid(&common.p)?;
            let params = serde_json::json!({ "n": ns, "p": ps, "common": &common });
            sweep("dirichlet", &common, params, None, |cfg| cmd_dirichlet(&ns, &ps, cfg))
        }
        Command::Witness {
            k_max,
            k_min,
            include_p1,
            common,
        } => {
            let params = WitnessParams {
                k_min,
                k_max,
                ps: parse_real_grid(&common.p)?,
                include_p1,
            };
            let json = serde_json::json!({ "witness": &params, "common": &common });
            sweep("witness", &common, json, None, |cfg| cmd_witness(&params, cfg))
        }
        Command::HankelCheck {
            trials,
            m_max,
            seed,
            common,
        } => {
            if trials == 0 {
                return Err(HarnessError::Usage("--trials must be at least 1".into()));
            }
            let params = HankelCheckParams {
                trials,
                m_max,
                ps: parse_real_grid(&common.p)?,
                seed,
            };
            let json = serde_json::json!({ "hankel_check": &params, "common": &common });
            sweep("hankel-check", &common, json, Some(seed), |cfg| {
                cmd_hankel_check(&params, cfg)
            })
        }
    }
}

fn sweep(
    name: &str,
    common: &Common,
    params: serde_json::Value,
    seed: Option<u64>,
    body: impl FnOnce(&QuadratureConfig) -> Result<SweepOutcome, HarnessError> + Send,
) -> Result<i32, HarnessError> {
    let cfg = quadrature_config(common.quad_tol)?;
    let started = chrono::Utc::now().to_rfc3339();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = common.jobs {
        if j == 0 {
            return Err(HarnessError::Usage("--jobs must be at least 1".into()));
        }
        pool = pool.num_threads(j);
    }
    let pool = pool
        .build()
        .map_err(|e| HarnessError::Usage(format!("thread pool: {e}")))?;
    let outcome = pool.install(|| body(&cfg))?;
    let finished = chrono::Utc::now().to_rfc3339();

    match &common.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            write_records(&outcome.records, common.format, &mut w)?;
            w.flush()?;
            let manifest = RunManifest {
                tool: env!("CARGO_PKG_NAME").to_string(),
                version: env!("CARGO_PKG_VERSION").to_string(),
                command: name.to_string(),
                params,
                bump: BumpSpec.tag(),
                quadrature: cfg,
                seed,
                started,
                finished,
            };
            manifest.write(path)?;
        }
        None => {
            let stdout = std::io::stdout();
            write_records(&outcome.records, common.format, stdout.lock())?;
        }
    }
    for note in &outcome.notes {
        eprintln!("{note}");
    }
    for f in &outcome.failures {
        eprintln!("FAIL {f}");
    }
    Ok(if outcome.passed() { 0 } else { 1 })
}
