//! Batch front end: configuration files, sweeps, figure recipes, CSV output
//! and analytic-versus-Monte-Carlo reports.
//!
//! Exit codes: 0 success, 1 i/o, 2 parse, 3 validation or conflict,
//! 4 numerical or domain failure, 5 an agreement check failed.

mod config;
mod fit_cache;
pub mod recipes;
mod run;
mod sweep;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};

use crate::error::{Error, Result};
use crate::specfun::db_to_linear;
use crate::vlc::VlcModel;

pub use config::{McNoise, Metric, RunConfig, SnrSource, KEYS};
pub use fit_cache::FitCache;
pub use run::{analytic_value, format_number, mc_value, read_csv, run_metric, write_csv, Row, CSV_HEADER};
pub use sweep::{Scale, SweepSpec, SweepVar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Verb {
    /// Outage probability.
    Op,
    /// Average bit-error probability.
    Bep,
    /// Ergodic capacity.
    Capacity,
    /// Lognormal-sum fit report.
    Fit,
    /// Run every shipped figure recipe with Monte Carlo checks.
    Validate,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "plcvlc", version, about = "PLC/VLC decode-and-forward cascade performance toolkit")]
pub struct Args {
    pub verb: Verb,
    /// Configuration file (`section.key = value` lines).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Sweep as var:start:stop:points[:log].
    #[arg(long)]
    pub sweep: Option<SweepSpec>,
    /// Run a Monte Carlo check with this many trials per point.
    #[arg(long)]
    pub mc: Option<u64>,
    /// Monte Carlo base seed; sweep point i uses seed + i.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write CSV (or the fit report) here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Gauss-Legendre order N_a.
    #[arg(long = "quad-order")]
    pub quad_order: Option<usize>,
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// CSV or report text.
    pub output: String,
    /// Every Monte Carlo agreement check passed (true without checks).
    pub agreed: bool,
    pub warnings: Vec<String>,
}

pub fn exit_code(err: &Error) -> i32 {
    match err.root() {
        Error::Io(_) => 1,
        Error::Parse { .. } => 2,
        Error::Validation { .. } | Error::Conflict(_) => 3,
        Error::Domain { .. } | Error::FitFailure { .. } | Error::Numerical(_) => 4,
        Error::AtSweepPoint { .. } => unreachable!("root() strips sweep annotations"),
    }
}

fn apply_overrides(mut cfg: RunConfig, args: &Args) -> Result<RunConfig> {
    if let Some(seed) = args.seed {
        cfg.mc.seed = seed;
    }
    if let Some(trials) = args.mc {
        cfg.mc.trials = trials;
        cfg.mc.batch_size = cfg.mc.batch_size.min(trials.max(1));
    }
    if let Some(order) = args.quad_order {
        cfg.quad_order = order;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn base_warnings(cfg: &RunConfig) -> Vec<String> {
    VlcModel::new(
        cfg.geometry,
        cfg.semiangle_deg,
        &cfg.receiver,
        db_to_linear(cfg.vlc_mean_snr_db),
        cfg.num_leds,
    )
    .map(|m| m.warnings().to_vec())
    .unwrap_or_default()
}

/// Lognormal-sum fit report as `key = value` lines.
pub fn fit_command(cfg: &RunConfig, fits: &FitCache) -> Result<String> {
    let topology = cfg.topology()?;
    let fading = cfg.fading()?;
    let fit = fits.get_or_fit(&topology, &fading, &cfg.fit)?;
    let limit = fit.limit().powi(topology.num_relays as i32);
    let mut out = String::new();
    let _ = writeln!(out, "num_wires = {}", topology.num_wires);
    let _ = writeln!(out, "num_relays = {}", topology.num_relays);
    let _ = writeln!(out, "mu_h = {}", format_number(fading.mu_h));
    let _ = writeln!(out, "sigma2_h = {}", format_number(fading.sigma2_h));
    let _ = writeln!(out, "samples = {}", cfg.fit.samples);
    let _ = writeln!(out, "seed = {}", cfg.fit.seed);
    let _ = writeln!(out, "a0 = {}", format_number(fit.a0));
    let _ = writeln!(out, "a1 = {}", format_number(fit.a1));
    let _ = writeln!(out, "a2 = {}", format_number(fit.a2));
    let _ = writeln!(out, "fit_error = {}", format_number(fit.fit_error));
    let _ = writeln!(out, "limit_cdf = {}", format_number(limit));
    Ok(out)
}

/// Runs every shipped recipe with Monte Carlo checks; `sweep_var` in the
/// combined CSV is prefixed with the recipe name.
pub fn validate(args: &Args, fits: &FitCache) -> Result<Outcome> {
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for (name, text) in recipes::RECIPES {
        let cfg = apply_overrides(RunConfig::parse(text)?, args)?;
        let metric = cfg.run_metric.ok_or_else(|| Error::validation("run.metric", format!("required in recipe {name}")))?;
        warnings.extend(base_warnings(&cfg).into_iter().map(|w| format!("{name}: {w}")));
        for mut row in run_metric(&cfg, metric, cfg.run_sweep.as_ref(), true, fits)? {
            row.sweep_var = format!("{name}/{}", row.sweep_var);
            rows.push(row);
        }
    }
    Ok(Outcome {
        agreed: rows.iter().all(Row::passed),
        output: write_csv(&rows),
        warnings,
    })
}

/// Executes one parsed invocation.
pub fn execute(args: &Args) -> Result<Outcome> {
    let fits = FitCache::new();
    if args.verb == Verb::Validate {
        if args.config.is_some() || args.sweep.is_some() {
            return Err(Error::Parse {
                line: None,
                msg: "validate runs the shipped recipes; --config and --sweep do not apply".into(),
            });
        }
        return validate(args, &fits);
    }
    let base = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let cfg = apply_overrides(base, args)?;
    let warnings = base_warnings(&cfg);
    let metric = match args.verb {
        Verb::Op => Metric::Op,
        Verb::Bep => Metric::Bep,
        Verb::Capacity => Metric::Capacity,
        Verb::Fit => {
            return Ok(Outcome { output: fit_command(&cfg, &fits)?, agreed: true, warnings });
        }
        Verb::Validate => unreachable!(),
    };
    let sweep = args.sweep.or(cfg.run_sweep);
    let rows = run_metric(&cfg, metric, sweep.as_ref(), args.mc.is_some(), &fits)?;
    Ok(Outcome {
        agreed: rows.iter().all(Row::passed),
        output: write_csv(&rows),
        warnings,
    })
}

/// Parses `argv`, runs, writes output and returns the process exit code.
pub fn main_from<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let outcome = match execute(&args) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    let written = match &args.out {
        Some(path) => std::fs::write(path, &outcome.output).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{}", outcome.output);
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return exit_code(&e);
    }
    if outcome.agreed {
        0
    } else {
        eprintln!("error: at least one analytic value is outside the Monte Carlo agreement band");
        5
    }
}
