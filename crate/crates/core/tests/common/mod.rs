#![allow(dead_code)]

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use plcvlc::cascade::CascadeModel;
use plcvlc::plc::{fit_lognormal_sum, normalize_fading, FitConfig, LognormalSumFit, PlcModel, PlcTopology};
use plcvlc::specfun::db_to_linear;
use plcvlc::vlc::{ReceiverParams, VlcGeometry, VlcModel};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Lognormal-sum fit for K wires at σ_h² = 1, cached per (K, samples).
pub fn fit(num_wires: u32, samples: u64) -> LognormalSumFit {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u64), LognormalSumFit>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(f) = cache.lock().unwrap().get(&(num_wires, samples)) {
        return *f;
    }
    let topo = PlcTopology::new(1, num_wires).unwrap();
    let fading = normalize_fading(num_wires, 1.0).unwrap();
    let cfg = FitConfig { samples, ..FitConfig::default() };
    let f = fit_lognormal_sum(&topo, &fading, &cfg).unwrap();
    cache.lock().unwrap().insert((num_wires, samples), f);
    f
}

#[derive(Debug, Clone, Copy)]
pub struct Scenario {
    pub num_wires: u32,
    pub num_relays: u32,
    pub num_leds: u32,
    pub plc_db: f64,
    pub vlc_db: f64,
    pub semiangle: f64,
    pub fov: f64,
    pub vertical_len: f64,
}

impl Scenario {
    pub fn fig3(num_relays: u32, num_leds: u32, vlc_db: f64) -> Self {
        Self {
            num_wires: 3,
            num_relays,
            num_leds,
            plc_db: 10.0,
            vlc_db,
            semiangle: 30.0,
            fov: 60.0,
            vertical_len: 2.5,
        }
    }

    pub fn fig4(semiangle: f64, vertical_len: f64, vlc_db: f64) -> Self {
        Self {
            num_wires: 3,
            num_relays: 4,
            num_leds: 4,
            plc_db: 15.0,
            vlc_db,
            semiangle,
            fov: 75.0,
            vertical_len,
        }
    }

    pub fn fig5(plc_db: f64, vlc_db: f64) -> Self {
        Self {
            num_wires: 3,
            num_relays: 3,
            num_leds: 4,
            plc_db,
            vlc_db,
            semiangle: 60.0,
            fov: 75.0,
            vertical_len: 2.5,
        }
    }

    /// Random valid configuration for identity checks.
    pub fn random(rng: &mut impl Rng) -> Self {
        Self {
            num_wires: rng.random_range(2..=4),
            num_relays: rng.random_range(1..=4),
            num_leds: rng.random_range(1..=8),
            plc_db: rng.random_range(0.0..30.0),
            vlc_db: rng.random_range(40.0..140.0),
            semiangle: rng.random_range(10.0..70.0),
            fov: rng.random_range(60.0..85.0),
            vertical_len: rng.random_range(1.5..4.0),
        }
    }

    pub fn model_with(&self, samples: u64) -> CascadeModel {
        let topo = PlcTopology::new(self.num_relays, self.num_wires).unwrap();
        let fading = normalize_fading(self.num_wires, 1.0).unwrap();
        let plc = PlcModel::new(topo, fading, fit(self.num_wires, samples), db_to_linear(self.plc_db)).unwrap();
        let rx = ReceiverParams { fov_half_angle: self.fov, ..ReceiverParams::default() };
        let geo = VlcGeometry { vertical_len: self.vertical_len, cell_radius: 2.5 };
        let vlc = VlcModel::new(geo, self.semiangle, &rx, db_to_linear(self.vlc_db), self.num_leds).unwrap();
        CascadeModel::new(plc, vlc)
    }

    /// Model with the full-size fit.
    pub fn model(&self) -> CascadeModel {
        self.model_with(FitConfig::default().samples)
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64, m: f64, fm: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)
        + simpson(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson on [a, b] to relative tolerance `rtol`.
pub fn adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rtol: f64) -> f64 {
    // fixed pre-split so narrow features are not stepped over
    let pieces = 256;
    let coarse: f64 = {
        let h = (b - a) / pieces as f64;
        (0..=pieces).map(|k| f(a + k as f64 * h).abs() * h).sum()
    };
    if coarse == 0.0 {
        return 0.0;
    }
    let tol = rtol * coarse;
    let h = (b - a) / pieces as f64;
    (0..pieces)
        .map(|k| {
            let (x0, x1) = (a + k as f64 * h, a + (k + 1) as f64 * h);
            let xm = 0.5 * (x0 + x1);
            let (f0, f1, fm) = (f(x0), f(x1), f(xm));
            let whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
            simpson(&f, x0, f0, x1, f1, xm, fm, whole, tol / pieces as f64, 24)
        })
        .sum()
}

/// ∫_lo^hi f(γ)dγ through γ = e^t.
pub fn log_integral<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, rtol: f64) -> f64 {
    if !(hi > lo) {
        return 0.0;
    }
    adaptive(|t| {
        let g = t.exp();
        f(g) * g
    }, lo.ln(), hi.ln(), rtol)
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
