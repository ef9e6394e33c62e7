//! Flat `section.key = value` run configuration.
//!
//! Lines are `key = value`; `#` starts a comment; blank lines are ignored.
//! Every key is optional and unknown keys are rejected. dB quantities are
//! converted to linear once, when models are built.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::cascade::{CascadeModel, Integration, MetricConfig, ModulationParams, DEFAULT_QUAD_ORDER};
use crate::error::{Error, Result};
use crate::mc::{McConfig, NoiseMode};
use crate::plc::{
    mean_branch_snr_from_power, normalize_fading, FitConfig, LognormalFading, PlcLinkParams, PlcModel, PlcNoise,
    PlcTopology, MAX_RELAYS, MAX_WIRES,
};
use crate::specfun::db_to_linear;
use crate::vlc::{ReceiverParams, VlcGeometry, VlcModel, MAX_LEDS};

use super::fit_cache::FitCache;
use super::sweep::SweepSpec;

/// Where γ̄_R comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnrSource {
    /// `plc.mean_snr_db`.
    Direct,
    /// P_PLC·β_PLC/σ²_PLC from `plc.tx_power` and the cable and noise keys.
    TxPower,
}

/// Noise model used by Monte Carlo draws of the PLC hop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McNoise {
    Folded,
    Mixture,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Op,
    Bep,
    Capacity,
}

impl Metric {
    pub fn name(&self) -> &'static str {
        match self {
            Metric::Op => "op",
            Metric::Bep => "bep",
            Metric::Capacity => "capacity",
        }
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "op" => Ok(Metric::Op),
            "bep" => Ok(Metric::Bep),
            "capacity" => Ok(Metric::Capacity),
            _ => Err(Error::Parse { line: None, msg: format!("unknown metric `{s}` (op, bep, capacity)") }),
        }
    }
}

/// Complete parameter set of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub link: PlcLinkParams,
    pub noise: PlcNoise,
    pub num_wires: u32,
    pub num_relays: u32,
    /// Explicit μ_h; derived from K when absent.
    pub mu_h: Option<f64>,
    pub sigma2_h: f64,
    pub plc_mean_snr_db: f64,
    pub snr_source: SnrSource,
    pub fit: FitConfig,

    pub receiver: ReceiverParams,
    /// ρ (A/W). Carried for completeness; γ̄_VLC is configured directly.
    pub eo_efficiency: f64,
    pub geometry: VlcGeometry,
    pub semiangle_deg: f64,
    pub num_leds: u32,
    pub vlc_mean_snr_db: f64,

    pub gamma_th_db: f64,
    pub modulation: ModulationParams,
    pub quad_order: usize,
    pub integration: Integration,

    pub mc: McConfig,
    pub mc_noise: McNoise,

    /// Metric a recipe runs by default.
    pub run_metric: Option<Metric>,
    /// Sweep a recipe runs by default.
    pub run_sweep: Option<SweepSpec>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            link: PlcLinkParams::default(),
            noise: PlcNoise::default(),
            num_wires: 3,
            num_relays: 1,
            mu_h: None,
            sigma2_h: 1.0,
            plc_mean_snr_db: 10.0,
            snr_source: SnrSource::Direct,
            fit: FitConfig::default(),
            receiver: ReceiverParams::default(),
            eo_efficiency: 0.64,
            geometry: VlcGeometry::default(),
            semiangle_deg: 60.0,
            num_leds: 1,
            vlc_mean_snr_db: 50.0,
            gamma_th_db: 0.0,
            modulation: ModulationParams::BPSK,
            quad_order: DEFAULT_QUAD_ORDER,
            integration: Integration::LogPanels,
            mc: McConfig::default(),
            mc_noise: McNoise::Folded,
            run_metric: None,
            run_sweep: None,
        }
    }
}

/// Every accepted key, in documentation order.
pub const KEYS: &[&str] = &[
    "plc.alpha1",
    "plc.alpha2",
    "plc.k_att",
    "plc.freq_mhz",
    "plc.length_m",
    "plc.tx_power",
    "plc.snr_source",
    "plc.mean_snr_db",
    "plc.impulse_prob",
    "plc.bg_var",
    "plc.imp_var",
    "plc.k",
    "plc.m",
    "plc.mu_h",
    "plc.sigma2_h",
    "plc.fit_samples",
    "plc.fit_seed",
    "plc.fit_points",
    "plc.fit_prob_lo",
    "plc.fit_prob_hi",
    "plc.fit_max_error",
    "vlc.pd_area",
    "vlc.responsivity",
    "vlc.filter_gain",
    "vlc.refr_index",
    "vlc.fov_deg",
    "vlc.eo_efficiency",
    "vlc.vertical_len_m",
    "vlc.cell_radius_m",
    "vlc.semiangle_deg",
    "vlc.n",
    "vlc.mean_snr_db",
    "cascade.gamma_th_db",
    "cascade.p_mod",
    "cascade.q_mod",
    "cascade.quad_order",
    "cascade.integration",
    "mc.trials",
    "mc.seed",
    "mc.batch_size",
    "mc.streams",
    "mc.noise",
    "run.metric",
    "run.sweep",
];

struct Entry {
    line: usize,
    value: String,
}

fn parse_value<T: FromStr>(key: &str, e: &Entry) -> Result<T> {
    e.value.parse::<T>().map_err(|_| Error::Parse {
        line: Some(e.line),
        msg: format!("`{key}`: cannot parse `{}`", e.value),
    })
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: BTreeMap<String, Entry> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body.split_once('=').ok_or_else(|| Error::Parse {
                line: Some(line),
                msg: format!("expected `key = value`, got `{body}`"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || value.is_empty() {
                return Err(Error::Parse { line: Some(line), msg: format!("empty key or value in `{body}`") });
            }
            if !KEYS.contains(&key) {
                return Err(Error::validation(key, "unknown key"));
            }
            if entries.insert(key.to_string(), Entry { line, value: value.to_string() }).is_some() {
                return Err(Error::Parse { line: Some(line), msg: format!("duplicate key `{key}`") });
            }
        }
        let cfg = Self::from_entries(&entries)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn from_entries(entries: &BTreeMap<String, Entry>) -> Result<Self> {
        let mut c = RunConfig::default();
        for (key, e) in entries {
            match key.as_str() {
                "plc.alpha1" => c.link.alpha1 = parse_value(key, e)?,
                "plc.alpha2" => c.link.alpha2 = parse_value(key, e)?,
                "plc.k_att" => c.link.k_att = parse_value(key, e)?,
                "plc.freq_mhz" => c.link.freq_mhz = parse_value(key, e)?,
                "plc.length_m" => c.link.length_m = parse_value(key, e)?,
                "plc.tx_power" => c.link.tx_power = Some(parse_value(key, e)?),
                "plc.mean_snr_db" => c.plc_mean_snr_db = parse_value(key, e)?,
                "plc.snr_source" => {}
                "plc.impulse_prob" => c.noise.impulse_prob = parse_value(key, e)?,
                "plc.bg_var" => c.noise.bg_var = parse_value(key, e)?,
                "plc.imp_var" => c.noise.imp_var = parse_value(key, e)?,
                "plc.k" => c.num_wires = parse_value(key, e)?,
                "plc.m" => c.num_relays = parse_value(key, e)?,
                "plc.mu_h" => c.mu_h = Some(parse_value(key, e)?),
                "plc.sigma2_h" => c.sigma2_h = parse_value(key, e)?,
                "plc.fit_samples" => c.fit.samples = parse_value(key, e)?,
                "plc.fit_seed" => c.fit.seed = parse_value(key, e)?,
                "plc.fit_points" => c.fit.points = parse_value(key, e)?,
                "plc.fit_prob_lo" => c.fit.prob_lo = parse_value(key, e)?,
                "plc.fit_prob_hi" => c.fit.prob_hi = parse_value(key, e)?,
                "plc.fit_max_error" => c.fit.max_error = parse_value(key, e)?,
                "vlc.pd_area" => c.receiver.pd_area = parse_value(key, e)?,
                "vlc.responsivity" => c.receiver.responsivity = parse_value(key, e)?,
                "vlc.filter_gain" => c.receiver.filter_gain = parse_value(key, e)?,
                "vlc.refr_index" => c.receiver.refr_index = parse_value(key, e)?,
                "vlc.fov_deg" => c.receiver.fov_half_angle = parse_value(key, e)?,
                "vlc.eo_efficiency" => c.eo_efficiency = parse_value(key, e)?,
                "vlc.vertical_len_m" => c.geometry.vertical_len = parse_value(key, e)?,
                "vlc.cell_radius_m" => c.geometry.cell_radius = parse_value(key, e)?,
                "vlc.semiangle_deg" => c.semiangle_deg = parse_value(key, e)?,
                "vlc.n" => c.num_leds = parse_value(key, e)?,
                "vlc.mean_snr_db" => c.vlc_mean_snr_db = parse_value(key, e)?,
                "cascade.gamma_th_db" => c.gamma_th_db = parse_value(key, e)?,
                "cascade.p_mod" => c.modulation.p_mod = parse_value(key, e)?,
                "cascade.q_mod" => c.modulation.q_mod = parse_value(key, e)?,
                "cascade.quad_order" => c.quad_order = parse_value(key, e)?,
                "cascade.integration" => {
                    c.integration = match e.value.as_str() {
                        "log_panels" => Integration::LogPanels,
                        "single_panel" => Integration::SinglePanel,
                        other => {
                            return Err(Error::Parse {
                                line: Some(e.line),
                                msg: format!("`{key}`: expected log_panels or single_panel, got `{other}`"),
                            })
                        }
                    }
                }
                "mc.trials" => c.mc.trials = parse_value(key, e)?,
                "mc.seed" => c.mc.seed = parse_value(key, e)?,
                "mc.batch_size" => c.mc.batch_size = parse_value(key, e)?,
                "mc.streams" => c.mc.streams = parse_value(key, e)?,
                "mc.noise" => {
                    c.mc_noise = match e.value.as_str() {
                        "folded" => McNoise::Folded,
                        "mixture" => McNoise::Mixture,
                        other => {
                            return Err(Error::Parse {
                                line: Some(e.line),
                                msg: format!("`{key}`: expected folded or mixture, got `{other}`"),
                            })
                        }
                    }
                }
                "run.metric" => {
                    c.run_metric = Some(e.value.parse().map_err(|err: Error| Error::Parse {
                        line: Some(e.line),
                        msg: err.to_string(),
                    })?)
                }
                "run.sweep" => {
                    c.run_sweep = Some(SweepSpec::parse(&e.value).map_err(|err| match err {
                        Error::Parse { msg, .. } => Error::Parse { line: Some(e.line), msg },
                        other => other,
                    })?)
                }
                _ => unreachable!("key list and match arms out of sync: {key}"),
            }
        }
        if !entries.contains_key("mc.batch_size") {
            c.mc.batch_size = c.mc.batch_size.min(c.mc.trials);
        }
        c.snr_source = resolve_snr_source(entries)?;
        Ok(c)
    }

    /// Re-checks every invariant of the referenced module types.
    pub fn validate(&self) -> Result<()> {
        self.link.validate()?;
        self.noise.validate()?;
        PlcTopology::new(self.num_relays, self.num_wires)?;
        if !(self.sigma2_h > 0.0) || !self.sigma2_h.is_finite() {
            return Err(Error::validation("plc.sigma2_h", "> 0"));
        }
        if let Some(mu) = self.mu_h {
            if !mu.is_finite() {
                return Err(Error::validation("plc.mu_h", "finite"));
            }
        }
        if !self.plc_mean_snr_db.is_finite() {
            return Err(Error::validation("plc.mean_snr_db", "finite"));
        }
        self.fit.validate()?;
        self.receiver.validate()?;
        if !(self.eo_efficiency > 0.0) {
            return Err(Error::validation("vlc.eo_efficiency", "> 0"));
        }
        self.geometry.validate()?;
        if !(self.semiangle_deg > 0.0 && self.semiangle_deg < 90.0) {
            return Err(Error::validation("vlc.semiangle_deg", "in (0, 90) degrees"));
        }
        if !(1..=MAX_LEDS).contains(&self.num_leds) {
            return Err(Error::validation("vlc.n", format!("integer in [1, {MAX_LEDS}]")));
        }
        if !self.vlc_mean_snr_db.is_finite() {
            return Err(Error::validation("vlc.mean_snr_db", "finite"));
        }
        if !self.gamma_th_db.is_finite() {
            return Err(Error::validation("cascade.gamma_th_db", "finite"));
        }
        self.modulation.validate()?;
        self.metric_config().validate()?;
        self.mc.validate()?;
        if self.snr_source == SnrSource::TxPower && self.link.tx_power.is_none() {
            return Err(Error::validation("plc.tx_power", "required when plc.snr_source = tx_power"));
        }
        debug_assert!(self.num_relays <= MAX_RELAYS && self.num_wires <= MAX_WIRES);
        Ok(())
    }

    pub fn metric_config(&self) -> MetricConfig {
        MetricConfig {
            quad_order: self.quad_order,
            gamma_th: db_to_linear(self.gamma_th_db),
            integration: self.integration,
        }
    }

    /// (μ_h, σ_h²), with μ_h derived from K unless set explicitly.
    pub fn fading(&self) -> Result<LognormalFading> {
        match self.mu_h {
            Some(mu) => LognormalFading::new(mu, self.sigma2_h),
            None => normalize_fading(self.num_wires, self.sigma2_h),
        }
    }

    /// γ̄_R, linear.
    pub fn plc_mean_snr(&self) -> f64 {
        match self.snr_source {
            SnrSource::Direct => db_to_linear(self.plc_mean_snr_db),
            SnrSource::TxPower => mean_branch_snr_from_power(&self.link, &self.noise)
                .expect("validated: tx_power present for the tx_power source"),
        }
    }

    pub fn noise_mode(&self) -> NoiseMode {
        match self.mc_noise {
            McNoise::Folded => NoiseMode::Folded,
            McNoise::Mixture => NoiseMode::Mixture {
                rx_power: self.plc_mean_snr() * self.noise.effective_noise_power(),
                noise: self.noise,
            },
        }
    }

    pub fn topology(&self) -> Result<PlcTopology> {
        PlcTopology::new(self.num_relays, self.num_wires)
    }

    /// Builds both hops, fitting (or reusing) the lognormal-sum constants.
    pub fn build(&self, fits: &FitCache) -> Result<CascadeModel> {
        let topology = self.topology()?;
        let fading = self.fading()?;
        let fit = fits.get_or_fit(&topology, &fading, &self.fit)?;
        let plc = PlcModel::new(topology, fading, fit, self.plc_mean_snr())?;
        let vlc = VlcModel::new(
            self.geometry,
            self.semiangle_deg,
            &self.receiver,
            db_to_linear(self.vlc_mean_snr_db),
            self.num_leds,
        )?;
        Ok(CascadeModel::new(plc, vlc))
    }
}

fn resolve_snr_source(entries: &BTreeMap<String, Entry>) -> Result<SnrSource> {
    let has_power = entries.contains_key("plc.tx_power");
    let has_direct = entries.contains_key("plc.mean_snr_db");
    match entries.get("plc.snr_source").map(|e| (e.line, e.value.as_str())) {
        None if has_power && has_direct => Err(Error::Conflict(
            "both plc.tx_power and plc.mean_snr_db are set; choose one with plc.snr_source".into(),
        )),
        None if has_power => Ok(SnrSource::TxPower),
        None => Ok(SnrSource::Direct),
        Some((_, "direct")) if has_power && !has_direct => Err(Error::Conflict(
            "plc.snr_source = direct but only plc.tx_power is given".into(),
        )),
        Some((_, "direct")) => Ok(SnrSource::Direct),
        Some((_, "tx_power")) if has_direct && !has_power => Err(Error::Conflict(
            "plc.snr_source = tx_power but only plc.mean_snr_db is given".into(),
        )),
        Some((_, "tx_power")) => Ok(SnrSource::TxPower),
        Some((line, other)) => Err(Error::Parse {
            line: Some(line),
            msg: format!("`plc.snr_source`: expected direct or tx_power, got `{other}`"),
        }),
    }
}
