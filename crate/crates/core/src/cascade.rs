//! End-to-end statistics of the decode-and-forward cascade and the three
//! performance metrics built on them.
//!
//! The relay forwards only what it decoded, so the end-to-end SNR is
//! `min(γ_PLC, γ_VLC^MAX)` and, by independence,
//! `F_eq = F_PLC + F_VLC − F_PLC·F_VLC`. Because the VLC SNR is confined to
//! `[γ_e, γ_c]`, every integral splits at those two points.
//!
//! Metric integrals are evaluated with Gauss-Legendre sums after an affine
//! map of each sub-interval onto `[-1, 1]`. [`Integration::SinglePanel`]
//! maps the whole interval at once; the default [`Integration::LogPanels`]
//! first substitutes `γ = e^t` and maps unit-width panels in `t`, which keeps
//! the power-law and near-singular integrands well resolved when the
//! interval spans many decades.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::plc::PlcModel;
use crate::specfun::{gamma, gauss_legendre_rule, upper_incomplete_gamma, QuadratureRule};
use crate::vlc::VlcModel;

/// Binary modulation constants (p, q) of the conditional error Γ(p, qγ)/(2Γ(p)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationParams {
    pub p_mod: f64,
    pub q_mod: f64,
}

impl ModulationParams {
    pub const BPSK: ModulationParams = ModulationParams { p_mod: 0.5, q_mod: 1.0 };

    pub fn new(p_mod: f64, q_mod: f64) -> Result<Self> {
        let m = Self { p_mod, q_mod };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p_mod > 0.0) || !self.p_mod.is_finite() {
            return Err(Error::validation("cascade.p_mod", "> 0"));
        }
        if !(self.q_mod > 0.0) || !self.q_mod.is_finite() {
            return Err(Error::validation("cascade.q_mod", "> 0"));
        }
        Ok(())
    }

    /// Conditional bit-error probability at SNR γ.
    pub fn conditional_bep(&self, gamma: f64) -> f64 {
        crate::specfun::regularized_upper_gamma(self.p_mod, self.q_mod * gamma.max(0.0))
            .map(|q| 0.5 * q)
            .unwrap_or(f64::NAN)
    }
}

/// How each metric integral is laid onto Gauss-Legendre nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Integration {
    /// One affine map of the whole interval onto [-1, 1].
    SinglePanel,
    /// Unit-width panels in ln γ, each mapped onto [-1, 1].
    #[default]
    LogPanels,
}

pub const MIN_QUAD_ORDER: usize = 8;
pub const DEFAULT_QUAD_ORDER: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricConfig {
    /// Gauss-Legendre order N_a.
    pub quad_order: usize,
    /// Outage threshold γ_th, linear.
    pub gamma_th: f64,
    pub integration: Integration,
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self {
            quad_order: DEFAULT_QUAD_ORDER,
            gamma_th: 1.0,
            integration: Integration::LogPanels,
        }
    }
}

impl MetricConfig {
    pub fn validate(&self) -> Result<()> {
        if !(MIN_QUAD_ORDER..=crate::specfun::MAX_QUAD_ORDER).contains(&self.quad_order) {
            return Err(Error::domain(
                "quadrature order",
                format!(
                    "N_a must lie in [{MIN_QUAD_ORDER}, {}], got {}",
                    crate::specfun::MAX_QUAD_ORDER,
                    self.quad_order
                ),
            ));
        }
        if !(self.gamma_th > 0.0) || !self.gamma_th.is_finite() {
            return Err(Error::validation("cascade.gamma_th_db", "finite"));
        }
        Ok(())
    }
}

/// Width of one log-domain panel, in nepers.
const PANEL_WIDTH: f64 = 1.0;
const MAX_PANELS: usize = 4096;

struct Integrator {
    rule: QuadratureRule,
    scheme: Integration,
}

impl Integrator {
    fn new(cfg: &MetricConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            rule: gauss_legendre_rule(cfg.quad_order)?,
            scheme: cfg.integration,
        })
    }

    /// ∫ f over [lo, hi]. In log mode `lo` must be positive; callers pass
    /// the point below which the integrand is negligible.
    fn integrate<F: Fn(f64) -> f64>(&self, lo: f64, hi: f64, f: F) -> f64 {
        if !(hi > lo) {
            return 0.0;
        }
        match self.scheme {
            Integration::SinglePanel => self.rule.integrate(lo, hi, f),
            Integration::LogPanels => {
                let (a, b) = (lo.max(f64::MIN_POSITIVE).ln(), hi.ln());
                let panels = (((b - a) / PANEL_WIDTH).ceil() as usize).clamp(1, MAX_PANELS);
                let w = (b - a) / panels as f64;
                (0..panels)
                    .map(|k| {
                        let t0 = a + k as f64 * w;
                        self.rule.integrate(t0, t0 + w, |t| {
                            let g = t.exp();
                            f(g) * g
                        })
                    })
                    .sum()
            }
        }
    }

    /// Lower limit for integrals that start at 0 and carry a PLC factor.
    fn lower_from_zero(&self, plc: &PlcModel) -> f64 {
        match self.scheme {
            Integration::SinglePanel => 0.0,
            Integration::LogPanels => plc.negligible_below(),
        }
    }
}

/// Four terms of the CDF-form average BEP.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BepTerms {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub i4: f64,
    /// q^p/(2Γ(p)), multiplies I₁ − I₂ + I₃ + I₄.
    pub prefactor: f64,
}

impl BepTerms {
    pub fn bep(&self) -> f64 {
        self.prefactor * (self.i1 - self.i2 + self.i3 + self.i4)
    }
}

/// C = C₁ + C₂ − C₃ in bits/s/Hz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityTerms {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl CapacityTerms {
    pub fn capacity(&self) -> f64 {
        self.c1 + self.c2 - self.c3
    }
}

/// The PLC and VLC hops behind one decode-and-forward relay.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeModel {
    pub plc: PlcModel,
    pub vlc: VlcModel,
}

impl CascadeModel {
    pub fn new(plc: PlcModel, vlc: VlcModel) -> Self {
        Self { plc, vlc }
    }

    /// (γ_e, γ_c) of the VLC hop.
    pub fn support(&self) -> (f64, f64) {
        self.vlc.snr_support()
    }

    /// F_eq(γ), piecewise over the VLC support.
    pub fn cdf(&self, gamma: f64) -> f64 {
        let (ge, gc) = self.support();
        if gamma > gc {
            return 1.0;
        }
        let fp = self.plc.cdf(gamma);
        if gamma < ge {
            return fp;
        }
        let fv = self.vlc.cdf_max(gamma);
        (fp + fv - fp * fv).clamp(0.0, 1.0)
    }

    /// F_eq(γ) with the VLC term in binomially expanded form.
    pub fn cdf_expanded(&self, gamma: f64) -> f64 {
        let (ge, gc) = self.support();
        if gamma > gc {
            return 1.0;
        }
        let fp = self.plc.cdf(gamma);
        if gamma < ge {
            return fp;
        }
        let fv = self.vlc.cdf_max_expanded(gamma);
        fp + fv - fp * fv
    }

    /// f_eq(γ) = f_P(1 − F_V) + f_V(1 − F_P) on the support, f_P below, 0 above.
    pub fn pdf(&self, gamma: f64) -> f64 {
        let (ge, gc) = self.support();
        if gamma > gc {
            return 0.0;
        }
        let fp = self.plc.pdf(gamma);
        if gamma < ge {
            return fp;
        }
        let big_fp = self.plc.cdf(gamma);
        let big_fv = self.vlc.cdf_max(gamma);
        fp * (1.0 - big_fv) + self.vlc.pdf_max(gamma) * (1.0 - big_fp)
    }

    /// P_out = F_eq(γ_th).
    pub fn outage_probability(&self, gamma_th: f64) -> f64 {
        self.cdf(gamma_th)
    }

    /// I₁…I₄ of the CDF-form average BEP.
    pub fn bep_terms(&self, modulation: &ModulationParams, cfg: &MetricConfig) -> Result<BepTerms> {
        modulation.validate()?;
        let integ = Integrator::new(cfg)?;
        let (p, q) = (modulation.p_mod, modulation.q_mod);
        let (ge, gc) = self.support();
        let plc = &self.plc;
        let inv = 1.0 / (self.vlc.m_v + 3.0);
        let n = self.vlc.num_leds;

        // e^{−qγ} underflows past here; log panels stop there.
        let tail = match cfg.integration {
            Integration::SinglePanel => f64::INFINITY,
            Integration::LogPanels => (750.0 + 10.0 * p.max(1.0)) / q,
        };
        let weight = |g: f64, extra_exp: f64| ((p - 1.0 - extra_exp) * g.ln() - q * g).exp();

        let i1 = integ.integrate(integ.lower_from_zero(plc), gc.min(tail), |g| {
            weight(g, 0.0) * plc.cdf(g)
        });

        let (lo, hi) = (ge, gc.min(tail));
        let mut i2 = 0.0;
        let mut i3 = 0.0;
        for i in 0..=n {
            let coeff = self.vlc.expansion_coeff(n, i);
            let s = f64::from(i) * inv;
            i2 += coeff * integ.integrate(lo, hi, |g| weight(g, s) * plc.cdf(g));
            i3 += coeff * integ.integrate(lo, hi, |g| weight(g, s));
        }

        let i4 = upper_incomplete_gamma(p, q * gc)? / q.powf(p);
        let prefactor = q.powf(p) / (2.0 * gamma(p));
        let terms = BepTerms { i1, i2, i3, i4, prefactor };
        if !terms.bep().is_finite() {
            return Err(Error::Numerical(format!("non-finite BEP terms {terms:?}")));
        }
        Ok(terms)
    }

    /// Average bit-error probability.
    pub fn average_bep(&self, modulation: &ModulationParams, cfg: &MetricConfig) -> Result<f64> {
        Ok(self.bep_terms(modulation, cfg)?.bep())
    }

    /// C₁, C₂, C₃ of the ergodic capacity.
    pub fn capacity_terms(&self, cfg: &MetricConfig) -> Result<CapacityTerms> {
        let integ = Integrator::new(cfg)?;
        let (ge, gc) = self.support();
        let plc = &self.plc;
        let vlc = &self.vlc;
        let inv = 1.0 / (vlc.m_v + 3.0);
        let n = vlc.num_leds;

        let c1 = integ.integrate(integ.lower_from_zero(plc), gc, |x| x.ln_1p() * plc.pdf(x)) / LN_2;

        // C₂: Σ_i N/(m+3)·(−1)^i C(N−1,i) ε^(N−1−i) υ^(i+1) γ̄^((i+1)/(m+3)) · (Ĩ₆ − Ĩ₇)
        let mut c2 = 0.0;
        for i in 0..n {
            let coeff = f64::from(n) * inv * vlc.expansion_coeff(n - 1, i) * vlc.ups * vlc.mean_snr.powf(inv);
            let e = (vlc.m_v + 4.0 + f64::from(i)) * inv;
            let i6 = integ.integrate(ge, gc, |x| x.ln_1p() * x.powf(-e));
            let i7 = integ.integrate(ge, gc, |x| x.ln_1p() * x.powf(-e) * plc.cdf(x));
            c2 += coeff * (i6 - i7);
        }
        c2 /= LN_2;

        let mut c3 = 0.0;
        for i in 0..=n {
            let s = f64::from(i) * inv;
            let i8 = integ.integrate(ge, gc, |x| x.ln_1p() * x.powf(-s) * plc.pdf(x));
            c3 += vlc.expansion_coeff(n, i) * i8;
        }
        c3 /= LN_2;

        let terms = CapacityTerms { c1, c2, c3 };
        if !terms.capacity().is_finite() {
            return Err(Error::Numerical(format!("non-finite capacity terms {terms:?}")));
        }
        Ok(terms)
    }

    /// Ergodic capacity in bits/s/Hz.
    pub fn ergodic_capacity(&self, cfg: &MetricConfig) -> Result<f64> {
        Ok(self.capacity_terms(cfg)?.capacity())
    }
}

pub fn end_to_end_cdf(gamma: f64, model: &CascadeModel) -> f64 {
    model.cdf(gamma)
}

pub fn end_to_end_pdf(gamma: f64, model: &CascadeModel) -> f64 {
    model.pdf(gamma)
}

pub fn outage_probability(model: &CascadeModel, gamma_th: f64) -> f64 {
    model.outage_probability(gamma_th)
}

pub fn average_bep(model: &CascadeModel, modulation: &ModulationParams, cfg: &MetricConfig) -> Result<f64> {
    model.average_bep(modulation, cfg)
}

pub fn ergodic_capacity(model: &CascadeModel, cfg: &MetricConfig) -> Result<f64> {
    model.ergodic_capacity(cfg)
}
