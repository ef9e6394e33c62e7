//! Multiwire PLC hop.
//!
//! Each of the `M` relays combines `K` lognormally faded wires with MRC and
//! the source picks the strongest relay. The closed-form statistics use the
//! lognormal-sum CDF family `Φ(a₀ − a₁·x^(−a₂/κ))`, whose constants are
//! fitted here against a seeded reference sample of the wire-gain sum.

use std::f64::consts::{LN_10, PI};

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::optim::{nelder_mead, NelderMeadOptions};
use crate::rng;
use crate::specfun::{ln_std_normal_cdf, std_normal_cdf};

/// κ = ln(10)/10, the dB-to-neper factor of the sum approximation.
pub const KAPPA: f64 = LN_10 / 10.0;

pub const MAX_RELAYS: u32 = 16;
pub const MAX_WIRES: u32 = 16;

/// Cable parameters of a PLC link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlcLinkParams {
    /// α₁ (1/m)
    pub alpha1: f64,
    /// α₂ (1/m per MHz^k_att)
    pub alpha2: f64,
    /// Frequency exponent of the attenuation law.
    pub k_att: f64,
    pub freq_mhz: f64,
    pub length_m: f64,
    /// Transmit power P_PLC in watts, when γ̄_R is derived from power.
    pub tx_power: Option<f64>,
}

impl Default for PlcLinkParams {
    fn default() -> Self {
        Self {
            alpha1: 0.0093,
            alpha2: 0.0051,
            k_att: 1.0,
            freq_mhz: 20.0,
            length_m: 5.0,
            tx_power: None,
        }
    }
}

impl PlcLinkParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha1 >= 0.0) {
            return Err(Error::validation("plc.alpha1", ">= 0"));
        }
        if !(self.alpha2 >= 0.0) {
            return Err(Error::validation("plc.alpha2", ">= 0"));
        }
        if !(self.k_att > 0.0) {
            return Err(Error::validation("plc.k_att", "> 0"));
        }
        if !(self.freq_mhz > 0.0) {
            return Err(Error::validation("plc.freq_mhz", "> 0"));
        }
        if !(self.length_m >= 0.0) || !self.length_m.is_finite() {
            return Err(Error::validation("plc.length_m", ">= 0 and finite"));
        }
        if let Some(p) = self.tx_power {
            if !(p > 0.0) {
                return Err(Error::validation("plc.tx_power", "> 0"));
            }
        }
        Ok(())
    }

    /// β_PLC = exp(−2(α₁ + α₂·f^k_att)·ℓ).
    pub fn cable_attenuation(&self) -> f64 {
        (-2.0 * (self.alpha1 + self.alpha2 * self.freq_mhz.powf(self.k_att)) * self.length_m).exp()
    }
}

/// Free-function form of [`PlcLinkParams::cable_attenuation`].
pub fn cable_attenuation(link: &PlcLinkParams) -> f64 {
    link.cable_attenuation()
}

/// Background plus Bernoulli-gated impulsive noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlcNoise {
    pub impulse_prob: f64,
    /// σ_g² (W)
    pub bg_var: f64,
    /// σ_i² (W)
    pub imp_var: f64,
}

impl Default for PlcNoise {
    fn default() -> Self {
        Self {
            impulse_prob: 0.05,
            bg_var: 1.0,
            imp_var: 10.0,
        }
    }
}

impl PlcNoise {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.impulse_prob) {
            return Err(Error::validation("plc.impulse_prob", "in [0, 1]"));
        }
        if !(self.bg_var > 0.0) {
            return Err(Error::validation("plc.bg_var", "> 0"));
        }
        if !(self.imp_var >= 0.0) {
            return Err(Error::validation("plc.imp_var", ">= 0"));
        }
        Ok(())
    }

    /// σ_PLC² = (1−p)σ_g² + p(σ_g² + σ_i²).
    pub fn effective_noise_power(&self) -> f64 {
        let p = self.impulse_prob;
        (1.0 - p) * self.bg_var + p * (self.bg_var + self.imp_var)
    }
}

pub fn effective_noise_power(noise: &PlcNoise) -> f64 {
    noise.effective_noise_power()
}

/// γ̄_R = P·β/σ², or `None` without a transmit power.
pub fn mean_branch_snr_from_power(link: &PlcLinkParams, noise: &PlcNoise) -> Option<f64> {
    link.tx_power
        .map(|p| p * link.cable_attenuation() / noise.effective_noise_power())
}

/// Lognormal wire gain h with ln h ~ N(μ_h, σ_h²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LognormalFading {
    pub mu_h: f64,
    pub sigma2_h: f64,
}

impl LognormalFading {
    pub fn new(mu_h: f64, sigma2_h: f64) -> Result<Self> {
        if !mu_h.is_finite() {
            return Err(Error::validation("plc.mu_h", "finite"));
        }
        if !(sigma2_h > 0.0) || !sigma2_h.is_finite() {
            return Err(Error::validation("plc.sigma2_h", "> 0"));
        }
        Ok(Self { mu_h, sigma2_h })
    }

    /// E{h²} = exp(2μ_h + 2σ_h²).
    pub fn mean_square(&self) -> f64 {
        (2.0 * self.mu_h + 2.0 * self.sigma2_h).exp()
    }

    /// One draw of h².
    pub fn sample_gain_sq<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let z: f64 = rng.sample(StandardNormal);
        (2.0 * (self.mu_h + self.sigma2_h.sqrt() * z)).exp()
    }
}

/// Fading whose log-mean makes E{h²} = 1/K.
pub fn normalize_fading(num_wires: u32, sigma2_h: f64) -> Result<LognormalFading> {
    if num_wires == 0 {
        return Err(Error::validation("plc.k", ">= 1"));
    }
    LognormalFading::new(-0.5 * f64::from(num_wires).ln() - sigma2_h, sigma2_h)
}

/// M relays, K wires per relay.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlcTopology {
    pub num_relays: u32,
    pub num_wires: u32,
}

impl PlcTopology {
    pub fn new(num_relays: u32, num_wires: u32) -> Result<Self> {
        if !(1..=MAX_RELAYS).contains(&num_relays) {
            return Err(Error::validation("plc.m", format!("integer in [1, {MAX_RELAYS}]")));
        }
        if !(1..=MAX_WIRES).contains(&num_wires) {
            return Err(Error::validation("plc.k", format!("integer in [1, {MAX_WIRES}]")));
        }
        Ok(Self {
            num_relays,
            num_wires,
        })
    }
}

/// Settings of the lognormal-sum fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitConfig {
    /// Size of the reference sample.
    pub samples: u64,
    pub seed: u64,
    /// Probability range whose quantiles form the fitting grid.
    pub prob_lo: f64,
    pub prob_hi: f64,
    pub points: usize,
    /// A fit with max deviation at or above this is rejected.
    pub max_error: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            samples: 10_000_000,
            seed: 0x00F1_7C0D_E5EE_D001,
            prob_lo: 0.001,
            prob_hi: 0.999,
            points: 512,
            max_error: 0.01,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples < 1000 {
            return Err(Error::validation("plc.fit_samples", ">= 1000"));
        }
        if !(self.prob_lo > 0.0 && self.prob_lo < self.prob_hi && self.prob_hi < 1.0) {
            return Err(Error::validation("plc.fit_prob_lo/plc.fit_prob_hi", "0 < lo < hi < 1"));
        }
        if self.points < 8 {
            return Err(Error::validation("plc.fit_points", ">= 8"));
        }
        if !(self.max_error > 0.0) {
            return Err(Error::validation("plc.fit_max_error", "> 0"));
        }
        Ok(())
    }
}

/// Constants of F(x) = Φ(a₀ − a₁·x^(−a₂/κ)) for the normalized sum x = Σh².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LognormalSumFit {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    /// Max absolute CDF deviation on the fitting grid.
    pub fit_error: f64,
}

impl LognormalSumFit {
    /// Constants supplied directly (e.g. from a stored fit report).
    pub fn new(a0: f64, a1: f64, a2: f64, fit_error: f64) -> Result<Self> {
        if !a0.is_finite() {
            return Err(Error::validation("fit.a0", "finite"));
        }
        if !(a1 > 0.0) || !a1.is_finite() {
            return Err(Error::validation("fit.a1", "> 0"));
        }
        if !(a2 > 0.0) || !a2.is_finite() {
            return Err(Error::validation("fit.a2", "> 0"));
        }
        Ok(Self { a0, a1, a2, fit_error })
    }

    pub fn kappa(&self) -> f64 {
        KAPPA
    }

    /// Exponent a₂/κ.
    pub fn exponent(&self) -> f64 {
        self.a2 / KAPPA
    }

    /// Gaussian argument a₀ − a₁·exp(−(a₂/κ)·ln x), from ln x.
    #[inline]
    pub fn argument_ln(&self, ln_x: f64) -> f64 {
        let e = (-self.exponent() * ln_x).exp();
        if e.is_infinite() {
            f64::NEG_INFINITY
        } else {
            self.a0 - self.a1 * e
        }
    }

    /// Approximate CDF of the normalized sum at `x`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        std_normal_cdf(self.argument_ln(x.ln()))
    }

    /// Value approached as x → ∞.
    pub fn limit(&self) -> f64 {
        std_normal_cdf(self.a0)
    }
}

/// Draws of S = Σ_{k=1..K} h_k², generated on parallel seeded streams.
pub fn sample_wire_sums(num_wires: u32, fading: &LognormalFading, count: u64, seed: u64) -> Vec<f64> {
    const CHUNK: u64 = 1 << 18;
    let chunks = count.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let len = CHUNK.min(count - c * CHUNK);
            let mut r = rng::stream(seed, c);
            (0..len)
                .map(|_| (0..num_wires).map(|_| fading.sample_gain_sq(&mut r)).sum::<f64>())
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Fit (a₀, a₁, a₂) by minimax on the empirical CDF of the wire-gain sum.
///
/// The reference is a sorted sample of `cfg.samples` draws; the objective is
/// the largest deviation over `cfg.points` quantiles spread uniformly in
/// probability over `[prob_lo, prob_hi]`.
pub fn fit_lognormal_sum(
    topology: &PlcTopology,
    fading: &LognormalFading,
    cfg: &FitConfig,
) -> Result<LognormalSumFit> {
    cfg.validate()?;
    let mut sample = sample_wire_sums(topology.num_wires, fading, cfg.samples, cfg.seed);
    sample.par_sort_unstable_by(f64::total_cmp);
    fit_to_sorted_sample(&sample, cfg)
}

/// Fit against an already sorted reference sample.
pub fn fit_to_sorted_sample(sorted: &[f64], cfg: &FitConfig) -> Result<LognormalSumFit> {
    let n = sorted.len();
    if n < 2 {
        return Err(Error::Numerical("empty reference sample".into()));
    }
    let nf = n as f64;
    // (ln x, ECDF just below x, ECDF at x)
    let grid: Vec<(f64, f64, f64)> = (0..cfg.points)
        .map(|j| {
            let q = cfg.prob_lo + (cfg.prob_hi - cfg.prob_lo) * j as f64 / (cfg.points - 1) as f64;
            let idx = ((q * nf).ceil() as usize).clamp(1, n) - 1;
            (sorted[idx].ln(), idx as f64 / nf, (idx + 1) as f64 / nf)
        })
        .collect();

    let (mean_ln, sd_ln) = {
        let logs = grid.iter().map(|g| g.0);
        let m = logs.clone().sum::<f64>() / grid.len() as f64;
        let v = logs.map(|l| (l - m).powi(2)).sum::<f64>() / grid.len() as f64;
        (m, v.sqrt().max(1e-6))
    };

    let objective = |theta: &[f64]| -> f64 {
        let a0 = theta[0];
        let a1 = theta[1].exp();
        let c = theta[2].exp() / KAPPA;
        grid.iter()
            .map(|&(lx, lo, hi)| {
                let e = (-c * lx).exp();
                let f = if e.is_finite() { std_normal_cdf(a0 - a1 * e) } else { 0.0 };
                (f - lo).abs().max((f - hi).abs())
            })
            .fold(0.0, f64::max)
    };

    // Local linearization of the family around the log-median gives a0 = 1/(c·s),
    // a1 = a0·exp(c·m); the products c·s below span near-lognormal to strongly skewed.
    let mut best: Option<(Vec<f64>, f64)> = None;
    for cs in [0.002, 0.01, 0.03, 0.08, 0.15, 0.25, 0.4, 0.6] {
        let c = cs / sd_ln;
        let a0 = 1.0 / cs;
        let ln_a1 = a0.ln() + c * mean_ln;
        let start = [a0, ln_a1, (c * KAPPA).ln()];
        let mut point = start.to_vec();
        let mut value = objective(&point);
        for _ in 0..6 {
            let (p, v) = nelder_mead(
                objective,
                &point,
                NelderMeadOptions {
                    max_evals: 3000,
                    f_tol: 1e-12,
                    initial_step: 0.05,
                },
            );
            let improved = v < value - 1e-9;
            if v < value {
                point = p;
                value = v;
            }
            if !improved {
                break;
            }
        }
        if best.as_ref().is_none_or(|b| value < b.1) {
            best = Some((point, value));
        }
    }
    let (theta, fit_error) = best.expect("at least one start");
    let fit = LognormalSumFit::new(theta[0], theta[1].exp(), theta[2].exp(), fit_error)
        .map_err(|_| Error::Numerical("fit left the valid parameter region".into()))?;
    if !(fit_error < cfg.max_error) {
        return Err(Error::FitFailure {
            fit_error,
            limit: cfg.max_error,
        });
    }
    Ok(fit)
}

/// Statistics of the selected-relay PLC SNR γ_PLC.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlcModel {
    pub topology: PlcTopology,
    pub fading: LognormalFading,
    pub fit: LognormalSumFit,
    /// γ̄_R, linear.
    pub mean_branch_snr: f64,
}

impl PlcModel {
    pub fn new(
        topology: PlcTopology,
        fading: LognormalFading,
        fit: LognormalSumFit,
        mean_branch_snr: f64,
    ) -> Result<Self> {
        if !(mean_branch_snr > 0.0) || !mean_branch_snr.is_finite() {
            return Err(Error::validation("plc.mean_snr", "> 0 (linear)"));
        }
        Ok(Self {
            topology,
            fading,
            fit,
            mean_branch_snr,
        })
    }

    fn relays(&self) -> i32 {
        self.topology.num_relays as i32
    }

    /// F_PLC(γ) = Φ(a₀ − a₁(γ/γ̄_R)^(−a₂/κ))^M.
    pub fn cdf(&self, gamma: f64) -> f64 {
        if !(gamma > 0.0) {
            return 0.0;
        }
        let arg = self.fit.argument_ln((gamma / self.mean_branch_snr).ln());
        std_normal_cdf(arg).powi(self.relays()).clamp(0.0, 1.0)
    }

    /// f_PLC(γ), evaluated through its logarithm.
    pub fn pdf(&self, gamma: f64) -> f64 {
        if !(gamma > 0.0) {
            return 0.0;
        }
        let c = self.fit.exponent();
        let ln_x = (gamma / self.mean_branch_snr).ln();
        let arg = self.fit.argument_ln(ln_x);
        if !arg.is_finite() {
            return 0.0;
        }
        let m = f64::from(self.topology.num_relays);
        let ln_pdf = (m * self.fit.a1 * c).ln() - 0.5 * (2.0 * PI).ln() - gamma.ln() - c * ln_x
            - 0.5 * arg * arg
            + (m - 1.0) * ln_std_normal_cdf(arg);
        ln_pdf.exp()
    }

    /// Φ(a₀)^M, the approximate CDF's value at γ → ∞.
    pub fn limit_cdf(&self) -> f64 {
        self.fit.limit().powi(self.relays())
    }

    /// SNR below which F_PLC < exp(-700)-ish; used to trim integration ranges.
    pub fn negligible_below(&self) -> f64 {
        // a₀ − a₁x^(−c) = −38 ⇔ x = ((a₀ + 38)/a₁)^(−1/c)
        let ratio = (self.fit.a0 + 38.0) / self.fit.a1;
        if ratio <= 0.0 {
            return 0.0;
        }
        self.mean_branch_snr * (-ratio.ln() / self.fit.exponent()).exp()
    }
}

pub fn plc_snr_cdf(gamma: f64, model: &PlcModel) -> f64 {
    model.cdf(gamma)
}

pub fn plc_snr_pdf(gamma: f64, model: &PlcModel) -> f64 {
    model.pdf(gamma)
}

/// Exact draw of γ_PLC = max_m γ̄_R Σ_k h²_{m,k}.
pub fn sample_plc_snr<R: Rng + ?Sized>(
    rng: &mut R,
    topology: &PlcTopology,
    fading: &LognormalFading,
    mean_branch_snr: f64,
) -> f64 {
    let mut best = 0.0f64;
    for _ in 0..topology.num_relays {
        let s: f64 = (0..topology.num_wires).map(|_| fading.sample_gain_sq(rng)).sum();
        best = best.max(s);
    }
    mean_branch_snr * best
}

/// Draw of γ_PLC with a per-relay Bernoulli noise state instead of the
/// averaged variance; `rx_power` is P_PLC·β_PLC.
pub fn sample_plc_snr_mixture<R: Rng + ?Sized>(
    rng: &mut R,
    topology: &PlcTopology,
    fading: &LognormalFading,
    rx_power: f64,
    noise: &PlcNoise,
) -> f64 {
    let mut best = 0.0f64;
    for _ in 0..topology.num_relays {
        let s: f64 = (0..topology.num_wires).map(|_| fading.sample_gain_sq(rng)).sum();
        let var = if rng.random::<f64>() < noise.impulse_prob {
            noise.bg_var + noise.imp_var
        } else {
            noise.bg_var
        };
        best = best.max(rx_power * s / var);
    }
    best
}
