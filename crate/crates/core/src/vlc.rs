//! Multiple-LED VLC hop: Lambertian line-of-sight gain, user uniformly
//! placed in a circular cell, best of `N` i.i.d. LED links.

use std::f64::consts::PI;

use rand::Rng;

use crate::error::{Error, Result};
use crate::specfun::{binomial_coeff, compensated_sum};

pub const MAX_LEDS: u32 = 16;

/// Vertical LED-to-user distance and cell radius, in metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VlcGeometry {
    pub vertical_len: f64,
    pub cell_radius: f64,
}

impl Default for VlcGeometry {
    fn default() -> Self {
        Self {
            vertical_len: 2.5,
            cell_radius: 2.5,
        }
    }
}

impl VlcGeometry {
    pub fn validate(&self) -> Result<()> {
        if !(self.vertical_len > 0.0) || !self.vertical_len.is_finite() {
            return Err(Error::validation("vlc.vertical_len_m", "> 0"));
        }
        if !(self.cell_radius > 0.0) || !self.cell_radius.is_finite() {
            return Err(Error::validation("vlc.cell_radius_m", "> 0"));
        }
        Ok(())
    }

    /// Incidence angle (degrees) of a user at the cell edge.
    pub fn edge_incidence_deg(&self) -> f64 {
        (self.cell_radius / self.vertical_len).atan().to_degrees()
    }
}

/// Photodetector front end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReceiverParams {
    /// A (m²)
    pub pd_area: f64,
    /// R_p (A/W)
    pub responsivity: f64,
    /// U, optical filter gain
    pub filter_gain: f64,
    /// η
    pub refr_index: f64,
    /// Ψ in degrees
    pub fov_half_angle: f64,
}

impl Default for ReceiverParams {
    fn default() -> Self {
        Self {
            pd_area: 1e-4,
            responsivity: 1.0,
            filter_gain: 1.0,
            refr_index: 1.5,
            fov_half_angle: 60.0,
        }
    }
}

impl ReceiverParams {
    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("vlc.pd_area", self.pd_area),
            ("vlc.responsivity", self.responsivity),
            ("vlc.filter_gain", self.filter_gain),
            ("vlc.refr_index", self.refr_index),
        ];
        for (key, v) in checks {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::validation(key, "> 0"));
            }
        }
        if !(self.fov_half_angle > 0.0 && self.fov_half_angle <= 90.0) {
            return Err(Error::validation("vlc.fov_deg", "in (0, 90] degrees"));
        }
        Ok(())
    }
}

/// m_v = −1/log₂(cos φ½).
pub fn lambertian_order(semiangle_deg: f64) -> Result<f64> {
    if !(semiangle_deg > 0.0 && semiangle_deg < 90.0) {
        return Err(Error::domain(
            "lambertian_order",
            format!("semiangle must lie in (0, 90) degrees, got {semiangle_deg}"),
        ));
    }
    Ok(-1.0 / semiangle_deg.to_radians().cos().log2())
}

/// g(ψ) = η²/sin²Ψ inside the field of view, 0 outside.
pub fn concentrator_gain(psi_deg: f64, rx: &ReceiverParams) -> f64 {
    if (0.0..=rx.fov_half_angle).contains(&psi_deg) {
        let s = rx.fov_half_angle.to_radians().sin();
        rx.refr_index * rx.refr_index / (s * s)
    } else {
        0.0
    }
}

/// Ξ = A·R_p·U·g/(2π) with the in-FOV concentrator gain.
pub fn xi_constant(rx: &ReceiverParams) -> f64 {
    rx.pd_area * rx.responsivity * rx.filter_gain * concentrator_gain(0.0, rx) / (2.0 * PI)
}

/// Precomputed statistics of the VLC SNR.
#[derive(Debug, Clone, PartialEq)]
pub struct VlcModel {
    pub geometry: VlcGeometry,
    /// Lambertian order m_v.
    pub m_v: f64,
    /// Ξ
    pub xi: f64,
    /// ε = (r_e² + L²)/r_e²
    pub eps: f64,
    /// υ = [Ξ(m_v+1)L^(m_v+1)]^(2/(m_v+3))/r_e²
    pub ups: f64,
    /// γ̄_VLC, linear.
    pub mean_snr: f64,
    pub num_leds: u32,
    pub gamma_e: f64,
    pub gamma_c: f64,
    warnings: Vec<String>,
}

impl VlcModel {
    /// Model from LED semiangle and receiver parameters.
    pub fn new(
        geometry: VlcGeometry,
        semiangle_deg: f64,
        rx: &ReceiverParams,
        mean_snr: f64,
        num_leds: u32,
    ) -> Result<Self> {
        rx.validate()?;
        let m_v = lambertian_order(semiangle_deg)
            .map_err(|_| Error::validation("vlc.semiangle_deg", "in (0, 90) degrees"))?;
        let mut model = Self::from_constants(geometry, m_v, xi_constant(rx), mean_snr, num_leds)?;
        let edge = geometry.edge_incidence_deg();
        if edge > rx.fov_half_angle {
            model.warnings.push(format!(
                "cell-edge incidence angle {edge:.2} deg exceeds the FOV {:.2} deg; \
                 the constant concentrator gain assumes every user is inside the FOV",
                rx.fov_half_angle
            ));
        }
        Ok(model)
    }

    /// Model from an explicit Lambertian order and Ξ.
    pub fn from_constants(
        geometry: VlcGeometry,
        m_v: f64,
        xi: f64,
        mean_snr: f64,
        num_leds: u32,
    ) -> Result<Self> {
        geometry.validate()?;
        if !(m_v > 0.0) || !m_v.is_finite() {
            return Err(Error::validation("vlc.m_v", "> 0"));
        }
        if !(xi > 0.0) || !xi.is_finite() {
            return Err(Error::validation("vlc.xi", "> 0 (check filter gain and area)"));
        }
        if !(mean_snr > 0.0) || !mean_snr.is_finite() {
            return Err(Error::validation("vlc.mean_snr", "> 0 (linear)"));
        }
        if !(1..=MAX_LEDS).contains(&num_leds) {
            return Err(Error::validation("vlc.n", format!("integer in [1, {MAX_LEDS}]")));
        }
        let (l, r) = (geometry.vertical_len, geometry.cell_radius);
        let r2 = r * r;
        let l2 = l * l;
        // ln[Ξ(m_v+1)L^(m_v+1)]
        let ln_peak = (xi * (m_v + 1.0)).ln() + (m_v + 1.0) * l.ln();
        let eps = (r2 + l2) / r2;
        let ups = (2.0 * ln_peak / (m_v + 3.0)).exp() / r2;
        let gamma_e = mean_snr * (2.0 * ln_peak - (m_v + 3.0) * (r2 + l2).ln()).exp();
        let gamma_c = mean_snr * (2.0 * ln_peak - 2.0 * (m_v + 3.0) * l.ln()).exp();
        if !(gamma_e > 0.0 && gamma_c > gamma_e && gamma_c.is_finite()) {
            return Err(Error::Numerical(format!(
                "degenerate VLC SNR support [{gamma_e:e}, {gamma_c:e}]"
            )));
        }
        Ok(Self {
            geometry,
            m_v,
            xi,
            eps,
            ups,
            mean_snr,
            num_leds,
            gamma_e,
            gamma_c,
            warnings: Vec::new(),
        })
    }

    /// Copy with a different γ̄_VLC.
    pub fn with_mean_snr(&self, mean_snr: f64) -> Result<Self> {
        let mut m = Self::from_constants(self.geometry, self.m_v, self.xi, mean_snr, self.num_leds)?;
        m.warnings = self.warnings.clone();
        Ok(m)
    }

    /// Model-validity warnings collected at construction.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// 1/(m_v + 3)
    #[inline]
    fn inv(&self) -> f64 {
        1.0 / (self.m_v + 3.0)
    }

    #[inline]
    fn in_support(&self, gamma: f64) -> bool {
        gamma >= self.gamma_e && gamma <= self.gamma_c
    }

    /// h_u(r) = Ξ(m_v+1)L^(m_v+1)/(r² + L²)^((m_v+3)/2).
    pub fn dc_channel_gain(&self, radial_dist: f64) -> Result<f64> {
        if !(radial_dist >= 0.0) {
            return Err(Error::domain(
                "dc_channel_gain",
                format!("radial distance must be >= 0, got {radial_dist}"),
            ));
        }
        Ok(self.gain_unchecked(radial_dist))
    }

    fn gain_unchecked(&self, r: f64) -> f64 {
        let l = self.geometry.vertical_len;
        let ln = (self.xi * (self.m_v + 1.0)).ln() + (self.m_v + 1.0) * l.ln()
            - 0.5 * (self.m_v + 3.0) * (r * r + l * l).ln();
        ln.exp()
    }

    /// (γ_e, γ_c)
    pub fn snr_support(&self) -> (f64, f64) {
        (self.gamma_e, self.gamma_c)
    }

    /// Single-link CDF: ε − υ(γ/γ̄)^(−1/(m_v+3)) on the support.
    pub fn cdf_single(&self, gamma: f64) -> f64 {
        if gamma < self.gamma_e {
            0.0
        } else if gamma > self.gamma_c {
            1.0
        } else {
            (self.eps - self.ups * (gamma / self.mean_snr).powf(-self.inv())).clamp(0.0, 1.0)
        }
    }

    /// Single-link power-law PDF.
    pub fn pdf_single(&self, gamma: f64) -> f64 {
        if !self.in_support(gamma) {
            return 0.0;
        }
        let inv = self.inv();
        self.ups * inv * self.mean_snr.powf(inv) * gamma.powf(-(self.m_v + 4.0) * inv)
    }

    /// CDF of the best of N links, power form F^N.
    pub fn cdf_max(&self, gamma: f64) -> f64 {
        self.cdf_single(gamma).powi(self.num_leds as i32)
    }

    /// PDF of the best of N links, N·F^(N−1)·f.
    pub fn pdf_max(&self, gamma: f64) -> f64 {
        if !self.in_support(gamma) {
            return 0.0;
        }
        let n = self.num_leds as i32;
        f64::from(self.num_leds) * self.cdf_single(gamma).powi(n - 1) * self.pdf_single(gamma)
    }

    /// Coefficient (−1)^i C(n,i) ε^(n−i) υ^i γ̄^(i/(m_v+3)) of γ^(−i/(m_v+3)).
    pub fn expansion_coeff(&self, n: u32, i: u32) -> f64 {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let c = binomial_coeff(n, i).expect("n <= MAX_LEDS") as f64;
        sign * c
            * self.eps.powi((n - i) as i32)
            * self.ups.powi(i as i32)
            * self.mean_snr.powf(f64::from(i) * self.inv())
    }

    /// Σ_i (−1)^i C(n,i) ε^(n−i) u^i with u = υ(γ/γ̄)^(−1/(m_v+3)); the
    /// termwise form of (ε − u)^n.
    fn expanded_power(&self, n: u32, gamma: f64) -> f64 {
        let u = self.ups * (gamma / self.mean_snr).powf(-self.inv());
        compensated_sum((0..=n).map(|i| {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            let c = binomial_coeff(n, i).expect("n <= MAX_LEDS") as f64;
            sign * c * self.eps.powi((n - i) as i32) * u.powi(i as i32)
        }))
    }

    /// Binomially expanded CDF of the best of N links.
    pub fn cdf_max_expanded(&self, gamma: f64) -> f64 {
        if gamma < self.gamma_e {
            return 0.0;
        }
        if gamma > self.gamma_c {
            return 1.0;
        }
        self.expanded_power(self.num_leds, gamma)
    }

    /// Binomially expanded PDF of the best of N links.
    pub fn pdf_max_expanded(&self, gamma: f64) -> f64 {
        if !self.in_support(gamma) {
            return 0.0;
        }
        f64::from(self.num_leds) * self.expanded_power(self.num_leds - 1, gamma) * self.pdf_single(gamma)
    }

    /// One draw of the best-of-N SNR with N i.i.d. uniform-in-disk users.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut best = 0.0f64;
        for _ in 0..self.num_leds {
            let u: f64 = rng.random();
            let r = self.geometry.cell_radius * u.sqrt();
            let h = self.gain_unchecked(r);
            best = best.max(self.mean_snr * h * h);
        }
        best.clamp(self.gamma_e, self.gamma_c)
    }
}

pub fn snr_support(model: &VlcModel) -> (f64, f64) {
    model.snr_support()
}

pub fn dc_channel_gain(radial_dist: f64, model: &VlcModel) -> Result<f64> {
    model.dc_channel_gain(radial_dist)
}

pub fn vlc_cdf_single(gamma: f64, model: &VlcModel) -> f64 {
    model.cdf_single(gamma)
}

pub fn vlc_pdf_single(gamma: f64, model: &VlcModel) -> f64 {
    model.pdf_single(gamma)
}

pub fn vlc_cdf_max(gamma: f64, model: &VlcModel) -> f64 {
    model.cdf_max(gamma)
}

pub fn vlc_pdf_max(gamma: f64, model: &VlcModel) -> f64 {
    model.pdf_max(gamma)
}

pub fn sample_vlc_snr<R: Rng + ?Sized>(rng: &mut R, model: &VlcModel) -> f64 {
    model.sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use crate::specfun::gauss_legendre_rule;

    fn table_rx(fov: f64) -> ReceiverParams {
        ReceiverParams { fov_half_angle: fov, ..Default::default() }
    }

    fn model(semi: f64, n: u32, snr_db: f64) -> VlcModel {
        VlcModel::new(VlcGeometry::default(), semi, &table_rx(60.0), 10f64.powf(snr_db / 10.0), n).unwrap()
    }

    #[test]
    fn lambertian_orders() {
        assert!((lambertian_order(60.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((lambertian_order(30.0).unwrap() - 4.818_841_679).abs() < 1e-6);
        assert!((lambertian_order(15.0).unwrap() - 19.993_727_358).abs() < 1e-8);
        assert!(lambertian_order(0.0).is_err());
        assert!(lambertian_order(90.0).is_err());
        assert!(lambertian_order(-5.0).is_err());
    }

    #[test]
    fn concentrator_and_xi() {
        let rx = table_rx(60.0);
        assert!((concentrator_gain(0.0, &rx) - 3.0).abs() < 1e-12);
        assert_eq!(concentrator_gain(61.0, &rx), 0.0);
        assert!((concentrator_gain(10.0, &table_rx(75.0)) - 2.411_542_732).abs() < 1e-6);
        let xi = xi_constant(&rx);
        assert!((xi - 4.774_648_3e-5).abs() < 1e-11);
        let double = ReceiverParams { pd_area: 2e-4, ..rx };
        assert!((xi_constant(&double) - 2.0 * xi).abs() < 1e-18);
        let opaque = ReceiverParams { filter_gain: 0.0, ..rx };
        assert_eq!(xi_constant(&opaque), 0.0);
        assert!(VlcModel::new(VlcGeometry::default(), 60.0, &opaque, 1e6, 1).is_err());
        assert!(table_rx(120.0).validate().is_err());
    }

    #[test]
    fn channel_gain_and_support() {
        let xi = 4.7746e-5;
        let m = VlcModel::from_constants(VlcGeometry::default(), 1.0, xi, 1e6, 1).unwrap();
        let h0 = m.dc_channel_gain(0.0).unwrap();
        assert!((h0 - xi * 2.0 / 6.25).abs() < 1e-18);
        let he = m.dc_channel_gain(2.5).unwrap();
        assert!((he - 3.819_68e-6).abs() < 1e-11);
        // with R_p = 0.64 folded into Ξ
        let m64 = VlcModel::from_constants(VlcGeometry::default(), 1.0, xi * 0.64, 1e6, 1).unwrap();
        assert!((m64.dc_channel_gain(2.5).unwrap() - 2.4446e-6).abs() < 1e-10);
        assert!((he * he * m.mean_snr - m.gamma_e).abs() < 1e-12 * m.gamma_e);
        assert!((h0 * h0 * m.mean_snr - m.gamma_c).abs() < 1e-12 * m.gamma_c);
        assert!((m.gamma_c / m.gamma_e - 16.0).abs() < 1e-10);
        assert!(m.dc_channel_gain(-0.1).is_err());
        // strictly decreasing in r
        let mut prev = f64::INFINITY;
        for i in 0..50 {
            let h = m.dc_channel_gain(i as f64 * 0.05).unwrap();
            assert!(h < prev);
            prev = h;
        }
        // linear in mean SNR
        let m2 = m.with_mean_snr(3e6).unwrap();
        assert!((m2.gamma_e / m.gamma_e - 3.0).abs() < 1e-12);
        // support collapses as the cell shrinks
        let tiny = VlcModel::from_constants(VlcGeometry { vertical_len: 2.5, cell_radius: 1e-3 }, 1.0, xi, 1e6, 1).unwrap();
        assert!((tiny.gamma_c - tiny.gamma_e) / tiny.gamma_c < 1e-5);
    }

    #[test]
    fn cdf_endpoints_and_pdf_mass() {
        for semi in [15.0, 30.0, 60.0] {
            let m = model(semi, 1, 60.0);
            let (ge, gc) = m.snr_support();
            assert!((m.eps - m.ups * (ge / m.mean_snr).powf(-1.0 / (m.m_v + 3.0))).abs() < 1e-10);
            assert!((m.eps - m.ups * (gc / m.mean_snr).powf(-1.0 / (m.m_v + 3.0)) - 1.0).abs() < 1e-10);
            let ratio = ((m.geometry.cell_radius.powi(2) + m.geometry.vertical_len.powi(2))
                / m.geometry.vertical_len.powi(2))
                .powf(m.m_v + 3.0);
            assert!((gc / ge / ratio - 1.0).abs() < 1e-10);
            // PDF mass, integrated in ln γ
            let rule = gauss_legendre_rule(64).unwrap();
            let (a, b) = (ge.ln(), gc.ln());
            let panels = ((b - a).ceil() as usize).max(1);
            let w = (b - a) / panels as f64;
            let mass: f64 = (0..panels)
                .map(|i| rule.integrate(a + i as f64 * w, a + (i + 1) as f64 * w, |t| m.pdf_single(t.exp()) * t.exp()))
                .sum();
            assert!((mass - 1.0).abs() < 1e-8, "semi={semi}: {mass}");
            // CDF by integrating the PDF from γ_e
            for k in 1..=100 {
                let g = (a + (b - a) * k as f64 / 100.0).exp();
                let t_hi = g.ln();
                let n = ((t_hi - a).ceil() as usize).max(1);
                let w = (t_hi - a) / n as f64;
                let cdf: f64 = (0..n)
                    .map(|i| rule.integrate(a + i as f64 * w, a + (i + 1) as f64 * w, |t| m.pdf_single(t.exp()) * t.exp()))
                    .sum();
                assert!((cdf - m.cdf_single(g)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn expansion_matches_power_form() {
        for n in [1, 2, 4, 8] {
            let m = model(30.0, n, 70.0);
            let (ge, gc) = m.snr_support();
            for k in 0..200 {
                let g = ge * (gc / ge).powf(k as f64 / 199.0);
                assert!((m.cdf_max_expanded(g) - m.cdf_max(g)).abs() < 1e-10);
                let p = m.pdf_max(g);
                assert!((m.pdf_max_expanded(g) - p).abs() <= 1e-10 * p.max(m.pdf_single(g)), "n={n}: {} vs {p}", m.pdf_max_expanded(g));
            }
            assert!((m.cdf_max_expanded(gc) - 1.0).abs() < 1e-9);
            assert!(m.cdf_max_expanded(ge).abs() < 1e-9);
        }
        let m1 = model(30.0, 1, 70.0);
        let g = m1.gamma_e * 3.0;
        assert_eq!(m1.cdf_max(g), m1.cdf_single(g));
        assert_eq!(m1.pdf_max(g), m1.pdf_single(g));
    }

    #[test]
    fn outside_support() {
        let m = model(30.0, 4, 70.0);
        assert_eq!(m.cdf_max(m.gamma_e * 0.5), 0.0);
        assert_eq!(m.cdf_max(m.gamma_c * 2.0), 1.0);
        assert_eq!(m.pdf_max(m.gamma_c * 2.0), 0.0);
        assert_eq!(m.pdf_max_expanded(m.gamma_e * 0.5), 0.0);
    }

    #[test]
    fn pdf_max_central_difference() {
        let m = model(30.0, 4, 70.0);
        let (ge, gc) = m.snr_support();
        for k in 1..20 {
            let g = ge * (gc / ge).powf(k as f64 / 20.0);
            let h = g * 1e-6;
            let fd = (m.cdf_max(g + h) - m.cdf_max(g - h)) / (2.0 * h);
            assert!(((fd - m.pdf_max(g)) / m.pdf_max(g)).abs() < 1e-4);
        }
    }

    #[test]
    fn ordering_in_led_count() {
        let ms: Vec<VlcModel> = [1, 2, 4, 8].iter().map(|&n| model(60.0, n, 70.0)).collect();
        let (ge, gc) = ms[0].snr_support();
        for k in 1..100 {
            let g = ge + (gc - ge) * k as f64 / 100.0;
            for w in ms.windows(2) {
                assert!(w[1].cdf_max(g) <= w[0].cdf_max(g));
            }
        }
    }

    #[test]
    fn edge_outside_fov_warns() {
        let geo = VlcGeometry { vertical_len: 1.0, cell_radius: 2.5 };
        let m = VlcModel::new(geo, 60.0, &table_rx(60.0), 1e6, 1).unwrap();
        assert_eq!(m.warnings().len(), 1);
        let m = VlcModel::new(VlcGeometry::default(), 60.0, &table_rx(60.0), 1e6, 1).unwrap();
        assert!(m.warnings().is_empty());
    }

    #[test]
    fn samples_stay_in_support() {
        let m = model(30.0, 4, 70.0);
        let mut r = rng::stream(1, 0);
        for _ in 0..10_000 {
            let g = m.sample(&mut r);
            assert!(g >= m.gamma_e && g <= m.gamma_c);
        }
    }
}
