//! Scenario configuration: parsing, strict validation and parameter overrides.

use std::path::Path;

use mzsim_core::gaussian::LossSpec;
use mzsim_core::herald::{Mechanism, MAX_PHOTONS};
use mzsim_core::DetectionScheme;
use serde::{Deserialize, Serialize};

use crate::error::{ScenarioError, ScenarioResult};

pub const MAX_MODES: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// One entry per mode; mode 1 first.
    pub inputs: Vec<InputState>,
    #[serde(default)]
    pub modifications: Vec<Modification>,
    /// Absent means no interferometer: the inputs go straight to noise and detection.
    #[serde(default)]
    pub interferometer: Option<Interferometer>,
    #[serde(default)]
    pub noise: Noise,
    #[serde(default)]
    pub detection: Vec<DetectionScheme>,
    #[serde(default)]
    pub metrics: Metrics,
    #[serde(default)]
    pub engine: Engine,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub drift: Option<DriftSpec>,
    #[serde(default)]
    pub counts: Option<CountsSpec>,
    #[serde(default)]
    pub seed: u64,
    /// Largest photon number reported in distributions and used for count sampling.
    #[serde(default = "default_n_max")]
    pub n_max: usize,
}

fn default_n_max() -> usize {
    30
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InputState {
    Vacuum,
    Coherent {
        amplitude: f64,
        #[serde(default)]
        theta: f64,
    },
    Thermal {
        nbar: f64,
    },
    Fock {
        n: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    #[default]
    Input,
    Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum Modification {
    Squeeze {
        mode: usize,
        r: f64,
        #[serde(default)]
        theta: f64,
        #[serde(default)]
        stage: Stage,
    },
    Displace {
        mode: usize,
        amplitude: f64,
        #[serde(default)]
        theta: f64,
        #[serde(default)]
        stage: Stage,
    },
    Add {
        mode: usize,
        #[serde(default = "one")]
        m: usize,
        mechanism: Mechanism,
        #[serde(default)]
        stage: Stage,
    },
    Subtract {
        mode: usize,
        #[serde(default = "one")]
        m: usize,
        /// Herald on any click instead of exactly `m` photons.
        #[serde(default)]
        click: bool,
        transmissivity: f64,
        #[serde(default)]
        stage: Stage,
    },
}

fn one() -> usize {
    1
}

impl Modification {
    pub fn mode(&self) -> usize {
        match *self {
            Self::Squeeze { mode, .. } | Self::Displace { mode, .. } | Self::Add { mode, .. } | Self::Subtract { mode, .. } => mode,
        }
    }

    pub fn stage(&self) -> Stage {
        match *self {
            Self::Squeeze { stage, .. } | Self::Displace { stage, .. } | Self::Add { stage, .. } | Self::Subtract { stage, .. } => stage,
        }
    }

    pub fn is_herald(&self) -> bool {
        matches!(self, Self::Add { .. } | Self::Subtract { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Interferometer {
    pub phi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Noise {
    #[serde(default)]
    pub loss: LossSpec,
    #[serde(default)]
    pub thermal: Option<ThermalNoise>,
}

impl Noise {
    pub fn is_trivial(&self) -> bool {
        self.loss.total() == 0.0 && self.thermal.is_none()
    }
}

/// Thermal light of mean photon number `nbar_env` mixed into every mode on `BS(eta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalNoise {
    pub nbar_env: f64,
    pub eta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Metrics {
    pub phase_variance: bool,
    /// Per-scheme minimum of the phase variance and its location.
    pub optimum: bool,
    pub cfi: bool,
    pub qfi: bool,
    pub snr: bool,
    pub distributions: bool,
}

impl Default for Metrics {
    fn default() -> Self {
        Self { phase_variance: true, optimum: false, cfi: false, qfi: false, snr: false, distributions: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    /// Mean/covariance propagation whenever every element is Gaussian.
    #[default]
    Auto,
    Wigner,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parameter {
    #[serde(rename = "phi")]
    Phi,
    #[serde(rename = "alpha_sq")]
    AlphaSq,
    #[serde(rename = "r")]
    R,
    #[serde(rename = "T")]
    T,
    #[serde(rename = "L")]
    L,
    #[serde(rename = "D")]
    D,
    #[serde(rename = "nbar")]
    Nbar,
    #[serde(rename = "nbar_env")]
    NbarEnv,
    #[serde(rename = "m")]
    M,
}

impl Parameter {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "phi" => Self::Phi,
            "alpha_sq" => Self::AlphaSq,
            "r" => Self::R,
            "T" => Self::T,
            "L" => Self::L,
            "D" => Self::D,
            "nbar" => Self::Nbar,
            "nbar_env" => Self::NbarEnv,
            "m" => Self::M,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Phi => "phi",
            Self::AlphaSq => "alpha_sq",
            Self::R => "r",
            Self::T => "T",
            Self::L => "L",
            Self::D => "D",
            Self::Nbar => "nbar",
            Self::NbarEnv => "nbar_env",
            Self::M => "m",
        }
    }
}

/// Inclusive arithmetic grid `start, start + step, ..., ≤ stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Grid {
    pub fn parse(s: &str) -> Option<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return None;
        }
        let v: Vec<f64> = parts.iter().map(|p| p.trim().parse().ok()).collect::<Option<_>>()?;
        Some(Self { start: v[0], stop: v[1], step: v[2] })
    }

    pub fn points(&self) -> Vec<f64> {
        if !(self.step > 0.0) || !self.start.is_finite() || !self.stop.is_finite() || self.stop < self.start {
            return Vec::new();
        }
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..n).map(|i| self.start + i as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: Parameter,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SweepSpec {
    pub fn grid(&self) -> Grid {
        Grid { start: self.start, stop: self.stop, step: self.step }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriftDistribution {
    /// `φ ~ Normal(φ_opt, σ)` with a per-scheme σ.
    #[default]
    Gaussian,
    /// `φ ~ Uniform(φ_opt (1 - f), φ_opt (1 + f))`.
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DriftSpec {
    pub trials: usize,
    pub distribution: DriftDistribution,
    pub sigma_parity: f64,
    pub sigma_other: f64,
    pub uniform_fraction: f64,
}

impl Default for DriftSpec {
    fn default() -> Self {
        Self { trials: 1000, distribution: DriftDistribution::Gaussian, sigma_parity: 0.001, sigma_other: 0.15, uniform_fraction: 0.2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountsSpec {
    /// Attempts per grid point, identical for every scheme.
    pub trials: u64,
    /// Transmissivity grid applied to the heralded modification.
    #[serde(default)]
    pub transmissivity: Option<Grid>,
    /// Photon numbers added or subtracted by the heralded modification.
    #[serde(default)]
    pub m: Vec<usize>,
    /// Counted mode; defaults to the heralded modification's mode.
    #[serde(default)]
    pub mode: Option<usize>,
}

impl ScenarioConfig {
    pub fn from_path(path: &Path) -> ScenarioResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io { path: path.display().to_string(), source })?;
        let toml = path.extension().and_then(|e| e.to_str()).map(|e| e.eq_ignore_ascii_case("toml")).unwrap_or(false);
        if toml {
            Self::from_toml(&text)
        } else {
            Self::from_json(&text)
        }
    }

    pub fn from_json(text: &str) -> ScenarioResult<Self> {
        let mut de = serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(&mut de).map_err(|e| ScenarioError::config(e.path().to_string(), e.inner().to_string()))?;
        de.end().map_err(|e| ScenarioError::config(".", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> ScenarioResult<Self> {
        let de = toml::Deserializer::new(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| ScenarioError::config(e.path().to_string(), e.inner().message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn modes(&self) -> usize {
        self.inputs.len()
    }

    pub fn heralds(&self) -> impl Iterator<Item = (usize, &Modification)> {
        self.modifications.iter().enumerate().filter(|(_, m)| m.is_herald())
    }

    /// True when every element maps Gaussian states to Gaussian states.
    pub fn is_gaussian(&self) -> bool {
        self.inputs.iter().all(|i| !matches!(i, InputState::Fock { n } if *n > 0)) && self.heralds().next().is_none()
    }

    pub fn validate(&self) -> ScenarioResult<()> {
        let n = self.modes();
        if n == 0 || n > MAX_MODES {
            return Err(ScenarioError::config("inputs", format!("expected 1 to {MAX_MODES} input modes, got {n}")));
        }
        for (i, input) in self.inputs.iter().enumerate() {
            let path = format!("inputs[{i}]");
            match *input {
                InputState::Vacuum => {}
                InputState::Coherent { amplitude, theta } => {
                    finite_nonneg(&format!("{path}.amplitude"), amplitude)?;
                    finite(&format!("{path}.theta"), theta)?;
                }
                InputState::Thermal { nbar } => finite_nonneg(&format!("{path}.nbar"), nbar)?,
                InputState::Fock { n } if n > MAX_PHOTONS => {
                    return Err(ScenarioError::config(format!("{path}.n"), format!("Fock number {n} exceeds {MAX_PHOTONS}")));
                }
                InputState::Fock { .. } => {}
            }
        }
        if let Some(mzi) = &self.interferometer {
            if n < 2 {
                return Err(ScenarioError::config("interferometer", "the interferometer needs at least two input modes"));
            }
            finite("interferometer.phi", mzi.phi)?;
        }
        let mut touched = vec![false; n];
        for (i, m) in self.modifications.iter().enumerate() {
            let path = format!("modifications[{i}]");
            let mode = m.mode();
            if mode == 0 || mode > n {
                return Err(ScenarioError::config(format!("{path}.mode"), format!("mode {mode} outside 1..={n}")));
            }
            if m.stage() == Stage::Output && self.interferometer.is_none() {
                return Err(ScenarioError::config(format!("{path}.stage"), "output-stage modifications need an interferometer"));
            }
            match *m {
                Modification::Squeeze { r, theta, .. } => {
                    finite_nonneg(&format!("{path}.r"), r)?;
                    finite(&format!("{path}.theta"), theta)?;
                }
                Modification::Displace { amplitude, theta, stage, .. } => {
                    finite_nonneg(&format!("{path}.amplitude"), amplitude)?;
                    finite(&format!("{path}.theta"), theta)?;
                    if stage == Stage::Input && !touched[mode - 1] && self.inputs[mode - 1] == InputState::Vacuum {
                        return Err(ScenarioError::config(
                            path,
                            "displacement is not available on a vacuum input; select a coherent input instead",
                        ));
                    }
                }
                Modification::Add { m: k, mechanism, .. } => {
                    photon_count(&format!("{path}.m"), k)?;
                    match mechanism {
                        Mechanism::BeamSplitter { transmissivity } => unit(&format!("{path}.mechanism.transmissivity"), transmissivity)?,
                        Mechanism::Spdc { r, theta } => {
                            finite_nonneg(&format!("{path}.mechanism.r"), r)?;
                            finite(&format!("{path}.mechanism.theta"), theta)?;
                        }
                    }
                }
                Modification::Subtract { m: k, click, transmissivity, .. } => {
                    if !click {
                        photon_count(&format!("{path}.m"), k)?;
                    }
                    unit(&format!("{path}.transmissivity"), transmissivity)?;
                }
            }
            if m.stage() == Stage::Input {
                touched[mode - 1] = true;
            }
        }
        unit("noise.loss.internal", self.noise.loss.internal)?;
        unit("noise.loss.detector", self.noise.loss.detector)?;
        if let Some(t) = &self.noise.thermal {
            finite_nonneg("noise.thermal.nbar_env", t.nbar_env)?;
            unit("noise.thermal.eta", t.eta)?;
        }
        for (i, d) in self.detection.iter().enumerate() {
            for mode in d.modes() {
                if mode == 0 || mode > n {
                    return Err(ScenarioError::config(format!("detection[{i}]"), format!("mode {mode} outside 1..={n}")));
                }
            }
            if let DetectionScheme::IntensityDifference { mode_a, mode_b } = *d {
                if mode_a == mode_b {
                    return Err(ScenarioError::config(format!("detection[{i}]"), "intensity difference needs two distinct modes"));
                }
            }
            if let DetectionScheme::Homodyne { angle, .. } = *d {
                finite(&format!("detection[{i}].angle"), angle)?;
            }
        }
        let phase_metrics = self.metrics.phase_variance || self.metrics.optimum || self.metrics.cfi || self.metrics.qfi;
        if phase_metrics && self.interferometer.is_none() {
            return Err(ScenarioError::config("metrics", "phase-estimation metrics need an interferometer"));
        }
        if self.n_max == 0 || self.n_max > 200 {
            return Err(ScenarioError::config("n_max", format!("expected 1..=200, got {}", self.n_max)));
        }
        if let Some(s) = &self.sweep {
            self.check_sweep(s.parameter, &s.grid(), "sweep")?;
        }
        if let Some(d) = &self.drift {
            self.check_drift(d)?;
        }
        if let Some(c) = &self.counts {
            self.check_counts(c)?;
        }
        Ok(())
    }

    pub fn check_sweep(&self, parameter: Parameter, grid: &Grid, path: &str) -> ScenarioResult<()> {
        let points = grid.points();
        if points.is_empty() {
            return Err(ScenarioError::config(path, "grid is empty"));
        }
        // Every grid value must produce a valid configuration.
        for v in points {
            self.with_parameter(parameter, v).map_err(|e| match e {
                ScenarioError::Config { path: p, message } => ScenarioError::config(format!("{path} ({}={v}): {p}", parameter.name()), message),
                other => other,
            })?;
        }
        Ok(())
    }

    fn check_drift(&self, d: &DriftSpec) -> ScenarioResult<()> {
        if d.trials == 0 {
            return Err(ScenarioError::config("drift.trials", "at least one trial is required"));
        }
        finite_nonneg("drift.sigma_parity", d.sigma_parity)?;
        finite_nonneg("drift.sigma_other", d.sigma_other)?;
        unit("drift.uniform_fraction", d.uniform_fraction)?;
        if self.interferometer.is_none() {
            return Err(ScenarioError::config("drift", "phase drift needs an interferometer"));
        }
        if self.detection.is_empty() {
            return Err(ScenarioError::config("detection", "phase drift needs at least one detection scheme"));
        }
        Ok(())
    }

    fn check_counts(&self, c: &CountsSpec) -> ScenarioResult<()> {
        if c.trials == 0 {
            return Err(ScenarioError::config("counts.trials", "at least one trial is required"));
        }
        let heralds: Vec<_> = self.heralds().collect();
        if heralds.len() > 1 {
            return Err(ScenarioError::config("counts", "count simulation supports at most one heralded modification"));
        }
        if heralds.is_empty() && (c.transmissivity.is_some() || !c.m.is_empty()) {
            return Err(ScenarioError::config("counts", "transmissivity and m grids need a heralded modification"));
        }
        if let Some(g) = &c.transmissivity {
            self.check_sweep(Parameter::T, g, "counts.transmissivity")?;
        }
        for (i, &k) in c.m.iter().enumerate() {
            self.with_parameter(Parameter::M, k as f64).map_err(|e| ScenarioError::config(format!("counts.m[{i}]"), e.to_string()))?;
        }
        let mode = c.mode.or_else(|| heralds.first().map(|(_, m)| m.mode())).unwrap_or(1);
        if mode == 0 || mode > self.modes() {
            return Err(ScenarioError::config("counts.mode", format!("mode {mode} outside 1..={}", self.modes())));
        }
        Ok(())
    }

    /// Copy of the configuration with one parameter overridden. Fails when the
    /// configuration has nothing the parameter applies to.
    pub fn with_parameter(&self, parameter: Parameter, value: f64) -> ScenarioResult<Self> {
        let mut c = self.clone();
        c.sweep = None;
        c.drift = None;
        c.counts = None;
        let mut hit = false;
        match parameter {
            Parameter::Phi => {
                if let Some(mzi) = c.interferometer.as_mut() {
                    mzi.phi = value;
                    hit = true;
                }
            }
            Parameter::AlphaSq => {
                if value < 0.0 {
                    return Err(ScenarioError::config("alpha_sq", format!("must be >= 0, got {value}")));
                }
                for input in c.inputs.iter_mut() {
                    if let InputState::Coherent { amplitude, .. } = input {
                        *amplitude = value.sqrt();
                        hit = true;
                    }
                }
            }
            Parameter::R => {
                for m in c.modifications.iter_mut() {
                    if let Modification::Squeeze { r, .. } = m {
                        *r = value;
                        hit = true;
                    }
                }
            }
            Parameter::T => {
                for m in c.modifications.iter_mut() {
                    match m {
                        Modification::Subtract { transmissivity, .. }
                        | Modification::Add { mechanism: Mechanism::BeamSplitter { transmissivity }, .. } => {
                            *transmissivity = value;
                            hit = true;
                        }
                        _ => {}
                    }
                }
            }
            Parameter::L => {
                c.noise.loss.internal = value;
                hit = true;
            }
            Parameter::D => {
                c.noise.loss.detector = value;
                hit = true;
            }
            Parameter::Nbar => {
                for input in c.inputs.iter_mut() {
                    if let InputState::Thermal { nbar } = input {
                        *nbar = value;
                        hit = true;
                    }
                }
            }
            Parameter::NbarEnv => {
                if let Some(t) = c.noise.thermal.as_mut() {
                    t.nbar_env = value;
                    hit = true;
                }
            }
            Parameter::M => {
                if value.fract() != 0.0 || value < 0.0 {
                    return Err(ScenarioError::config("m", format!("photon number must be a non-negative integer, got {value}")));
                }
                for m in c.modifications.iter_mut() {
                    match m {
                        Modification::Add { m: k, .. } | Modification::Subtract { m: k, click: false, .. } => {
                            *k = value as usize;
                            hit = true;
                        }
                        _ => {}
                    }
                }
            }
        }
        if !hit {
            return Err(ScenarioError::config(parameter.name(), "parameter does not apply to this configuration"));
        }
        c.validate()?;
        Ok(c)
    }
}

fn finite(path: &str, v: f64) -> ScenarioResult<()> {
    if !v.is_finite() {
        return Err(ScenarioError::config(path, format!("must be finite, got {v}")));
    }
    Ok(())
}

fn finite_nonneg(path: &str, v: f64) -> ScenarioResult<()> {
    if !(v >= 0.0) || !v.is_finite() {
        return Err(ScenarioError::config(path, format!("must be finite and >= 0, got {v}")));
    }
    Ok(())
}

fn unit(path: &str, v: f64) -> ScenarioResult<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(ScenarioError::config(path, format!("must lie in [0, 1], got {v}")));
    }
    Ok(())
}

fn photon_count(path: &str, k: usize) -> ScenarioResult<()> {
    if k == 0 || k > MAX_PHOTONS {
        return Err(ScenarioError::config(path, format!("expected 1..={MAX_PHOTONS}, got {k}")));
    }
    Ok(())
}
