//! Monte Carlo oracle.
//!
//! Draws come from the exact physical model: lognormal wire gains summed by
//! MRC and maximized over relays, uniform-in-disk users maximized over LEDs,
//! and the minimum of the two hops. No approximation from the analytic layer
//! is used here.
//!
//! Trials are split into `streams` contiguous chunks; chunk `s` always uses
//! stream `(seed, s)`, and per-stream partial results are merged in stream
//! order. The estimate therefore depends only on `(seed, trials, streams)`,
//! not on how many threads run the streams.

use rand::Rng;
use rayon::prelude::*;

use crate::cascade::{CascadeModel, ModulationParams};
use crate::error::{Error, Result};
use crate::plc::{sample_plc_snr, sample_plc_snr_mixture, PlcNoise};
use crate::rng::{self, StreamRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
    /// Trials generated per inner batch.
    pub batch_size: u64,
    pub streams: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            trials: 100_000,
            seed: 20_250_417,
            batch_size: 8192,
            streams: 16,
        }
    }
}

impl McConfig {
    pub fn with_trials(trials: u64, seed: u64) -> Self {
        Self {
            trials,
            seed,
            batch_size: Self::default().batch_size.min(trials),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < 1000 {
            return Err(Error::validation("mc.trials", ">= 1000"));
        }
        if self.batch_size == 0 || self.batch_size > self.trials {
            return Err(Error::validation("mc.batch_size", "in [1, mc.trials]"));
        }
        if self.streams == 0 {
            return Err(Error::validation("mc.streams", ">= 1"));
        }
        Ok(())
    }
}

/// How PLC noise enters each draw.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum NoiseMode {
    /// Averaged noise variance folded into γ̄_R (matches the analysis).
    #[default]
    Folded,
    /// Per-relay Bernoulli impulse state; `rx_power` is P_PLC·β_PLC.
    Mixture { rx_power: f64, noise: PlcNoise },
}

/// Sample mean with its standard error and 95% normal interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: u64,
    pub ci95_low: f64,
    pub ci95_high: f64,
}

impl McEstimate {
    fn from_parts(mean: f64, std_error: f64, trials: u64) -> Self {
        Self {
            mean,
            std_error,
            trials,
            ci95_low: mean - 1.96 * std_error,
            ci95_high: mean + 1.96 * std_error,
        }
    }

    /// Proportion estimate with binomial standard error √(p̂(1−p̂)/n).
    pub fn binomial(successes: u64, trials: u64) -> Self {
        let n = trials as f64;
        let p = successes as f64 / n;
        Self::from_parts(p, (p * (1.0 - p) / n).sqrt(), trials)
    }

    fn from_accumulator(acc: &Accumulator) -> Self {
        let n = acc.count as f64;
        let var = if acc.count > 1 { acc.m2 / (n - 1.0) } else { 0.0 };
        Self::from_parts(acc.mean, (var / n).sqrt(), acc.count)
    }
}

/// Running mean / sum of squared deviations.
#[derive(Debug, Clone, Copy, Default)]
struct Accumulator {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Accumulator {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(&mut self, other: &Accumulator) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        let d = other.mean - self.mean;
        self.mean += d * nb / n;
        self.m2 += other.m2 + d * d * na * nb / n;
        self.count += other.count;
    }
}

/// One draw of γ_eq = min(γ_PLC, γ_VLC^MAX) with independent hops.
pub fn sample_end_to_end_snr<R: Rng + ?Sized>(rng: &mut R, model: &CascadeModel) -> f64 {
    sample_end_to_end_snr_with(rng, model, &NoiseMode::Folded)
}

pub fn sample_end_to_end_snr_with<R: Rng + ?Sized>(
    rng: &mut R,
    model: &CascadeModel,
    mode: &NoiseMode,
) -> f64 {
    let plc = &model.plc;
    let g_plc = match mode {
        NoiseMode::Folded => sample_plc_snr(rng, &plc.topology, &plc.fading, plc.mean_branch_snr),
        NoiseMode::Mixture { rx_power, noise } => {
            sample_plc_snr_mixture(rng, &plc.topology, &plc.fading, *rx_power, noise)
        }
    };
    let g_vlc = model.vlc.sample(rng);
    g_plc.min(g_vlc)
}

// Run `per_trial` over every trial, one accumulator per stream, merged in order.
fn run_streams<T, F, M>(cfg: &McConfig, init: T, per_trial: F, merge: M) -> Result<T>
where
    T: Clone + Send + Sync,
    F: Fn(&mut StreamRng, &mut T) + Sync,
    M: Fn(&mut T, &T),
{
    cfg.validate()?;
    let chunks = rng::split_evenly(cfg.trials, cfg.streams);
    let partials: Vec<T> = chunks
        .par_iter()
        .enumerate()
        .map(|(s, &len)| {
            let mut r = rng::stream(cfg.seed, s as u64);
            let mut acc = init.clone();
            let mut done = 0;
            while done < len {
                let batch = cfg.batch_size.min(len - done);
                for _ in 0..batch {
                    per_trial(&mut r, &mut acc);
                }
                done += batch;
            }
            acc
        })
        .collect();
    let mut total = init;
    for p in &partials {
        merge(&mut total, p);
    }
    Ok(total)
}

/// Mean of `f(γ_eq)` over `cfg.trials` draws.
pub fn estimate_mean<F>(model: &CascadeModel, cfg: &McConfig, mode: &NoiseMode, f: F) -> Result<McEstimate>
where
    F: Fn(f64) -> f64 + Sync,
{
    let acc = run_streams(
        cfg,
        Accumulator::default(),
        |r, acc| acc.push(f(sample_end_to_end_snr_with(r, model, mode))),
        |a, b| a.merge(b),
    )?;
    Ok(McEstimate::from_accumulator(&acc))
}

/// Fraction of draws with γ_eq < γ_th.
pub fn estimate_op(model: &CascadeModel, gamma_th: f64, cfg: &McConfig) -> Result<McEstimate> {
    estimate_op_with(model, gamma_th, cfg, &NoiseMode::Folded)
}

pub fn estimate_op_with(
    model: &CascadeModel,
    gamma_th: f64,
    cfg: &McConfig,
    mode: &NoiseMode,
) -> Result<McEstimate> {
    let hits = run_streams(
        cfg,
        0u64,
        |r, n| {
            if sample_end_to_end_snr_with(r, model, mode) < gamma_th {
                *n += 1;
            }
        },
        |a, b| *a += *b,
    )?;
    Ok(McEstimate::binomial(hits, cfg.trials))
}

/// Mean conditional BEP Γ(p, qγ)/(2Γ(p)).
pub fn estimate_bep(model: &CascadeModel, modulation: &ModulationParams, cfg: &McConfig) -> Result<McEstimate> {
    modulation.validate()?;
    estimate_mean(model, cfg, &NoiseMode::Folded, |g| modulation.conditional_bep(g))
}

/// Mean of log₂(1 + γ_eq).
pub fn estimate_capacity(model: &CascadeModel, cfg: &McConfig) -> Result<McEstimate> {
    estimate_mean(model, cfg, &NoiseMode::Folded, |g| g.ln_1p() / std::f64::consts::LN_2)
}

/// `count` draws of `sample`, in deterministic stream order.
pub fn draw<F>(count: u64, seed: u64, streams: u64, sample: F) -> Vec<f64>
where
    F: Fn(&mut StreamRng) -> f64 + Sync,
{
    let chunks = rng::split_evenly(count, streams);
    chunks
        .par_iter()
        .enumerate()
        .flat_map_iter(|(s, &len)| {
            let mut r = rng::stream(seed, s as u64);
            (0..len).map(|_| sample(&mut r)).collect::<Vec<_>>()
        })
        .collect()
}

/// KS distance between a sorted sample and a CDF.
pub fn ks_statistic<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Two-sample KS distance between sorted samples.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

pub const DEFAULT_Z_THRESHOLD: f64 = 3.0;

/// Analytic value against an MC estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgreementRecord {
    pub analytic: f64,
    pub mc_mean: f64,
    pub mc_stderr: f64,
    pub abs_dev: f64,
    pub rel_dev: f64,
    /// |analytic − mean| in standard errors.
    pub z: f64,
    pub z_threshold: f64,
    pub pass: bool,
}

pub fn compare_report(analytic: f64, mc: &McEstimate) -> AgreementRecord {
    compare_report_with(analytic, mc, DEFAULT_Z_THRESHOLD)
}

pub fn compare_report_with(analytic: f64, mc: &McEstimate, z_threshold: f64) -> AgreementRecord {
    let abs_dev = (analytic - mc.mean).abs();
    let rel_dev = if analytic != 0.0 { abs_dev / analytic.abs() } else if abs_dev == 0.0 { 0.0 } else { f64::INFINITY };
    let z = if mc.std_error > 0.0 {
        abs_dev / mc.std_error
    } else if abs_dev <= 1e-12 * analytic.abs().max(1.0) {
        // degenerate estimate (every draw identical) that the analytic value matches
        0.0
    } else {
        f64::INFINITY
    };
    AgreementRecord {
        analytic,
        mc_mean: mc.mean,
        mc_stderr: mc.std_error,
        abs_dev,
        rel_dev,
        z,
        z_threshold,
        pass: z < z_threshold,
    }
}
