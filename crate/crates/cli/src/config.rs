//! JSON configuration: sections `decay`, `protocol` and `sweep`. Rates in
//! s⁻¹, times in seconds, angles and angular frequencies in rad, rad/s.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, TAU};
use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crossdecay::protocol::{ProtocolConfig, Readout, DEFAULT_DETUNING, DEFAULT_G, DEFAULT_OMEGA};
use crossdecay::{Frame, SymmetricDecayParameters};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    #[default]
    Analytic,
    Simulated,
    Both,
}

impl Engine {
    pub fn tags(self) -> &'static [&'static str] {
        match self {
            Engine::Analytic => &["analytic"],
            Engine::Simulated => &["simulated"],
            Engine::Both => &["analytic", "simulated"],
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    #[default]
    TwoCavity,
    SingleCavityResonant,
    SingleCavityDetuned,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepVariable {
    #[serde(rename = "phi")]
    Phi,
    #[serde(rename = "T")]
    Window,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecaySection {
    pub k: f64,
    pub r: f64,
    pub gamma: f64,
}

impl Default for DecaySection {
    fn default() -> Self {
        Self { k: 1000.0, r: 500.0, gamma: FRAC_PI_2 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProtocolSection {
    pub experiment: Experiment,
    pub readout: Readout,
    pub theta: f64,
    pub phi: f64,
    #[serde(rename = "T")]
    pub window: f64,
    #[serde(rename = "G")]
    pub g: f64,
    pub omega: f64,
    /// Defaults to `omega` + 2π·1 MHz.
    pub omega_a: Option<f64>,
    pub n_max: usize,
    pub frame: Frame,
    pub dissipate_during_pulses: bool,
}

impl Default for ProtocolSection {
    fn default() -> Self {
        Self {
            experiment: Experiment::TwoCavity,
            readout: Readout::Overlap,
            theta: FRAC_PI_4,
            phi: FRAC_PI_2,
            window: 500e-6,
            g: DEFAULT_G,
            omega: DEFAULT_OMEGA,
            omega_a: None,
            n_max: 1,
            frame: Frame::Rotating,
            dissipate_during_pulses: false,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub variable: Option<SweepVariable>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub count: Option<usize>,
    pub r_list: Option<Vec<f64>>,
    pub engine: Option<Engine>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub decay: DecaySection,
    pub protocol: ProtocolSection,
    pub sweep: SweepSection,
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Config = serde_json::from_str(text).context("invalid configuration")?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("in {}", path.display()))
    }

    fn check(&self) -> Result<()> {
        let p = &self.protocol;
        let numbers = [
            ("decay.k", self.decay.k),
            ("decay.r", self.decay.r),
            ("decay.gamma", self.decay.gamma),
            ("protocol.theta", p.theta),
            ("protocol.phi", p.phi),
            ("protocol.T", p.window),
            ("protocol.G", p.g),
            ("protocol.omega", p.omega),
            ("protocol.omega_a", p.omega_a.unwrap_or(0.0)),
        ];
        for (name, v) in numbers {
            if !v.is_finite() {
                bail!("{name} must be finite, got {v}");
            }
        }
        if p.n_max == 0 {
            bail!("protocol.n_max must be >= 1");
        }
        if p.window < 0.0 {
            bail!("protocol.T must be >= 0, got {}", p.window);
        }
        if p.g <= 0.0 {
            bail!("protocol.G must be > 0, got {}", p.g);
        }
        Ok(())
    }

    pub fn omega_a(&self) -> f64 {
        self.protocol.omega_a.unwrap_or(self.protocol.omega + DEFAULT_DETUNING)
    }

    /// Protocol for cross-decay magnitude `r`.
    pub fn protocol_config(&self, r: f64) -> Result<ProtocolConfig> {
        let decay = SymmetricDecayParameters::new(self.decay.k, r, self.decay.gamma, self.protocol.omega)
            .with_context(|| format!("decay parameters k = {}, r = {r}", self.decay.k))?;
        let p = &self.protocol;
        let mut cfg = ProtocolConfig::new(decay, p.theta, p.phi, p.window);
        cfg.g = p.g;
        cfg.omega = p.omega;
        cfg.omega_a = self.omega_a();
        cfg.n_max = p.n_max;
        cfg.frame = p.frame;
        cfg.dissipate_during_pulses = p.dissipate_during_pulses;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sweep grid: `count` evenly spaced points including both ends.
    pub fn grid(&self, default_start: f64, default_stop: f64, default_count: usize, points: Option<usize>) -> Result<Vec<f64>> {
        let start = self.sweep.start.unwrap_or(default_start);
        let stop = self.sweep.stop.unwrap_or(default_stop);
        let count = points.or(self.sweep.count).unwrap_or(default_count);
        if count < 2 {
            bail!("sweep count must be >= 2, got {count}");
        }
        if !(start.is_finite() && stop.is_finite()) || start >= stop {
            bail!("sweep range needs finite start < stop, got [{start}, {stop}]");
        }
        Ok(linspace(start, stop, count))
    }

    pub fn r_list(&self, default: &[f64], cli: Option<&[f64]>) -> Result<Vec<f64>> {
        let list = cli.map(<[f64]>::to_vec).or_else(|| self.sweep.r_list.clone()).unwrap_or_else(|| default.to_vec());
        if list.is_empty() {
            bail!("r list is empty");
        }
        for &r in &list {
            if !r.is_finite() || r < 0.0 || r > self.decay.k {
                bail!("r = {r} must lie in [0, k = {}]", self.decay.k);
            }
        }
        Ok(list)
    }
}

pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    let step = (stop - start) / (count - 1) as f64;
    (0..count).map(|i| if i + 1 == count { stop } else { start + step * i as f64 }).collect()
}

/// Default φ range of the phase sweep.
pub const PHI_RANGE: (f64, f64) = (0.0, TAU);
/// Default window range for the discriminator sweep, five decay times at k = 1000 s⁻¹.
pub const WINDOW_RANGE: (f64, f64) = (0.0, 5e-3);
