//! `var:start:stop:points[:log]` sweep grids.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

use super::config::{RunConfig, SnrSource};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    VlcMeanSnrDb,
    PlcMeanSnrDb,
    NumRelays,
    NumLeds,
    NumWires,
    SemiangleDeg,
    FovDeg,
    VerticalLenM,
}

impl SweepVar {
    pub const ALL: [SweepVar; 8] = [
        SweepVar::VlcMeanSnrDb,
        SweepVar::PlcMeanSnrDb,
        SweepVar::NumRelays,
        SweepVar::NumLeds,
        SweepVar::NumWires,
        SweepVar::SemiangleDeg,
        SweepVar::FovDeg,
        SweepVar::VerticalLenM,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SweepVar::VlcMeanSnrDb => "vlc_mean_snr_db",
            SweepVar::PlcMeanSnrDb => "plc_mean_snr_db",
            SweepVar::NumRelays => "num_relays",
            SweepVar::NumLeds => "num_leds",
            SweepVar::NumWires => "num_wires",
            SweepVar::SemiangleDeg => "semiangle_deg",
            SweepVar::FovDeg => "fov_deg",
            SweepVar::VerticalLenM => "vertical_len_m",
        }
    }

    pub fn is_integer(&self) -> bool {
        matches!(self, SweepVar::NumRelays | SweepVar::NumLeds | SweepVar::NumWires)
    }

    /// Copy of `base` with this variable set to `value`.
    pub fn apply(&self, base: &RunConfig, value: f64) -> RunConfig {
        let mut c = base.clone();
        match self {
            SweepVar::VlcMeanSnrDb => c.vlc_mean_snr_db = value,
            SweepVar::PlcMeanSnrDb => {
                c.plc_mean_snr_db = value;
                c.snr_source = SnrSource::Direct;
            }
            SweepVar::NumRelays => c.num_relays = value.round() as u32,
            SweepVar::NumLeds => c.num_leds = value.round() as u32,
            SweepVar::NumWires => c.num_wires = value.round() as u32,
            SweepVar::SemiangleDeg => c.semiangle_deg = value,
            SweepVar::FovDeg => c.receiver.fov_half_angle = value,
            SweepVar::VerticalLenM => c.geometry.vertical_len = value,
        }
        c
    }
}

impl FromStr for SweepVar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepVar::ALL.into_iter().find(|v| v.name() == s).ok_or_else(|| Error::Parse {
            line: None,
            msg: format!(
                "unknown sweep variable `{s}` (one of {})",
                SweepVar::ALL.map(|v| v.name()).join(", ")
            ),
        })
    }
}

impl fmt::Display for SweepVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVar,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub scale: Scale,
}

fn bad(spec: &str, why: impl fmt::Display) -> Error {
    Error::Parse {
        line: None,
        msg: format!("sweep `{spec}`: {why}"),
    }
}

impl SweepSpec {
    pub fn new(variable: SweepVar, start: f64, stop: f64, points: usize, scale: Scale) -> Result<Self> {
        let s = Self { variable, start, stop, points, scale };
        s.validate()?;
        Ok(s)
    }

    /// Parses `var:start:stop:points[:log]`.
    pub fn parse(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.trim().split(':').map(str::trim).collect();
        if !(4..=5).contains(&parts.len()) {
            return Err(bad(spec, "expected var:start:stop:points[:log]"));
        }
        let variable: SweepVar = parts[0].parse()?;
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad(spec, format!("`{s}` is not a number")));
        let (start, stop) = (num(parts[1])?, num(parts[2])?);
        let points = parts[3]
            .parse::<usize>()
            .map_err(|_| bad(spec, format!("`{}` is not a point count", parts[3])))?;
        let scale = match parts.get(4) {
            None | Some(&"lin") | Some(&"linear") => Scale::Linear,
            Some(&"log") => Scale::Log,
            Some(other) => return Err(bad(spec, format!("unknown scale `{other}`"))),
        };
        Self::new(variable, start, stop, points, scale).map_err(|e| match e {
            Error::Validation { constraint, .. } => bad(spec, constraint),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let key = "sweep";
        if !(self.start.is_finite() && self.stop.is_finite() && self.start < self.stop) {
            return Err(Error::validation(key, "start < stop, both finite"));
        }
        if self.points < 2 {
            return Err(Error::validation(key, "points >= 2"));
        }
        if self.scale == Scale::Log && !(self.start > 0.0) {
            return Err(Error::validation(key, "log scale needs start > 0"));
        }
        if self.variable.is_integer() {
            let off_grid = self.values().into_iter().find(|v| (v - v.round()).abs() > 1e-9);
            if let Some(v) = off_grid {
                return Err(Error::validation(key, format!("{} takes integers; grid point {v} is not", self.variable)));
            }
        }
        Ok(())
    }

    /// Grid values; the endpoints are exact.
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                if i == 0 {
                    return self.start;
                }
                if i == n - 1 {
                    return self.stop;
                }
                let t = i as f64 / (n - 1) as f64;
                match self.scale {
                    Scale::Linear => self.start + t * (self.stop - self.start),
                    Scale::Log => (self.start.ln() + t * (self.stop / self.start).ln()).exp(),
                }
            })
            .collect()
    }
}

impl fmt::Display for SweepSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}:{}", self.variable, self.start, self.stop, self.points)?;
        if self.scale == Scale::Log {
            f.write_str(":log")?;
        }
        Ok(())
    }
}

impl FromStr for SweepSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepSpec::parse(s)
    }
}
