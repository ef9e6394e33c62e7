//! Sweep evaluation and CSV emission.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mc::{self, compare_report, AgreementRecord, McConfig, McEstimate};

use super::config::{Metric, RunConfig};
use super::fit_cache::FitCache;
use super::sweep::SweepSpec;

pub const CSV_HEADER: &str = "sweep_var,sweep_value,analytic,mc_mean,mc_stderr,z,pass";

/// One sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub sweep_var: String,
    /// `None` for a run without a sweep.
    pub sweep_value: Option<f64>,
    pub analytic: f64,
    pub agreement: Option<AgreementRecord>,
}

impl Row {
    pub fn passed(&self) -> bool {
        self.agreement.map_or(true, |a| a.pass)
    }
}

/// Number in the CSV dialect: 10 significant digits, `.` separator.
pub fn format_number(x: f64) -> String {
    format!("{x:.9e}")
}

pub fn write_csv(rows: &[Row]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let value = r.sweep_value.map(format_number).unwrap_or_default();
        let _ = write!(out, "{},{},{}", r.sweep_var, value, format_number(r.analytic));
        match &r.agreement {
            Some(a) => {
                let _ = write!(
                    out,
                    ",{},{},{},{}",
                    format_number(a.mc_mean),
                    format_number(a.mc_stderr),
                    format_number(a.z),
                    if a.pass { "pass" } else { "fail" }
                );
            }
            None => out.push_str(",,,,"),
        }
        out.push('\n');
    }
    out
}

/// Parses CSV written by [`write_csv`]. Agreement records are rebuilt from
/// the stored columns with the default z-threshold.
pub fn read_csv(text: &str) -> Result<Vec<Row>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == CSV_HEADER => {}
        _ => return Err(Error::Parse { line: Some(1), msg: "missing CSV header".into() }),
    }
    let num = |line: usize, s: &str| {
        s.parse::<f64>().map_err(|_| Error::Parse { line: Some(line), msg: format!("bad number `{s}`") })
    };
    lines
        .map(|(i, l)| {
            let line = i + 1;
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 7 {
                return Err(Error::Parse { line: Some(line), msg: format!("expected 7 fields, got {}", f.len()) });
            }
            let sweep_value = if f[1].is_empty() { None } else { Some(num(line, f[1])?) };
            let analytic = num(line, f[2])?;
            let agreement = if f[3].is_empty() {
                None
            } else {
                let est = McEstimate {
                    mean: num(line, f[3])?,
                    std_error: num(line, f[4])?,
                    trials: 0,
                    ci95_low: f64::NAN,
                    ci95_high: f64::NAN,
                };
                let mut rec = compare_report(analytic, &est);
                rec.z = num(line, f[5])?;
                rec.pass = match f[6] {
                    "pass" => true,
                    "fail" => false,
                    other => return Err(Error::Parse { line: Some(line), msg: format!("bad pass flag `{other}`") }),
                };
                Some(rec)
            };
            Ok(Row { sweep_var: f[0].to_string(), sweep_value, analytic, agreement })
        })
        .collect()
}

/// Analytic value of `metric` for one configuration.
pub fn analytic_value(cfg: &RunConfig, metric: Metric, fits: &FitCache) -> Result<f64> {
    let model = cfg.build(fits)?;
    let mcfg = cfg.metric_config();
    match metric {
        Metric::Op => Ok(model.outage_probability(mcfg.gamma_th)),
        Metric::Bep => model.average_bep(&cfg.modulation, &mcfg),
        Metric::Capacity => model.ergodic_capacity(&mcfg),
    }
}

/// Monte Carlo estimate of `metric` with the configuration's MC settings.
pub fn mc_value(cfg: &RunConfig, metric: Metric, fits: &FitCache, mc_cfg: &McConfig) -> Result<McEstimate> {
    let model = cfg.build(fits)?;
    let mode = cfg.noise_mode();
    match metric {
        Metric::Op => mc::estimate_op_with(&model, cfg.metric_config().gamma_th, mc_cfg, &mode),
        Metric::Bep => {
            let m = cfg.modulation;
            mc::estimate_mean(&model, mc_cfg, &mode, |g| m.conditional_bep(g))
        }
        Metric::Capacity => mc::estimate_mean(&model, mc_cfg, &mode, |g| g.ln_1p() / std::f64::consts::LN_2),
    }
}

/// Evaluates `metric` at every sweep point (or once, without a sweep).
///
/// With `with_mc`, point `i` draws from seed `mc.seed + i`. Rows come back
/// in sweep order whatever order the points finish in.
pub fn run_metric(
    config: &RunConfig,
    metric: Metric,
    sweep: Option<&SweepSpec>,
    with_mc: bool,
    fits: &FitCache,
) -> Result<Vec<Row>> {
    config.validate()?;
    let points: Vec<(String, Option<f64>, RunConfig)> = match sweep {
        Some(s) => {
            s.validate()?;
            s.values()
                .into_iter()
                .map(|v| (s.variable.name().to_string(), Some(v), s.variable.apply(config, v)))
                .collect()
        }
        None => vec![("none".to_string(), None, config.clone())],
    };

    let annotate = |var: &str, value: Option<f64>, e: Error| match value {
        Some(v) => Error::AtSweepPoint { var: var.to_string(), value: v, source: Box::new(e) },
        None => e,
    };

    // Validate every point and fit sequentially; fits parallelize internally.
    for (var, value, cfg) in &points {
        cfg.validate()
            .and_then(|_| cfg.build(fits).map(|_| ()))
            .map_err(|e| annotate(var, *value, e))?;
    }

    points
        .par_iter()
        .enumerate()
        .map(|(i, (var, value, cfg))| {
            let eval = || -> Result<Row> {
                let analytic = analytic_value(cfg, metric, fits)?;
                let agreement = if with_mc {
                    let mc_cfg = McConfig { seed: cfg.mc.seed.wrapping_add(i as u64), ..cfg.mc };
                    Some(compare_report(analytic, &mc_value(cfg, metric, fits, &mc_cfg)?))
                } else {
                    None
                };
                Ok(Row { sweep_var: var.clone(), sweep_value: *value, analytic, agreement })
            };
            eval().map_err(|e| annotate(var, *value, e))
        })
        .collect()
}
