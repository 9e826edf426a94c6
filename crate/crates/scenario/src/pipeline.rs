//! State pipeline and per-point metrics.
//!
//! inputs → input-stage modifications → interferometer → output-stage
//! modifications → loss and thermal noise → detection → metrics.

use std::f64::consts::PI;

use mzsim_core::estimation::{
    self, click_pattern_probabilities, golden_section_minimize, phase_variance_at, probabilistic_cfi, qfi_mixed_gaussian, qfi_pure_wigner,
    BranchSet, Minimum, GOLDEN_TOL,
};
use mzsim_core::herald::{self, AddSubSpec, Herald, Mechanism, Operation};
use mzsim_core::measure::{Measurable, MeasurementMoments};
use mzsim_core::symplectic::{displacement, mach_zehnder, squeezer, SymplecticTransform};
use mzsim_core::{CoreError, CoreResult, DetectionScheme, GaussianState, WignerExpr};
use serde::{Deserialize, Serialize};

use crate::config::{Engine, InputState, Modification, ScenarioConfig, Stage};
use crate::error::ScenarioResult;

/// Coarse scan resolution used to bracket phase-variance minima.
const OPTIMUM_SCAN: usize = 72;

#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Gaussian(GaussianState),
    Wigner(WignerExpr),
}

impl State {
    pub fn to_wigner(&self) -> CoreResult<WignerExpr> {
        match self {
            Self::Gaussian(g) => WignerExpr::from_gaussian(g),
            Self::Wigner(w) => Ok(w.clone()),
        }
    }

    pub fn modes(&self) -> usize {
        match self {
            Self::Gaussian(g) => g.modes(),
            Self::Wigner(w) => w.modes(),
        }
    }

    pub fn measure(&self, scheme: &DetectionScheme) -> CoreResult<MeasurementMoments> {
        match self {
            Self::Gaussian(g) => scheme.measure(g),
            Self::Wigner(w) => scheme.measure(w),
        }
    }

    pub fn total_mean_photon(&self) -> CoreResult<f64> {
        (1..=self.modes())
            .map(|m| match self {
                Self::Gaussian(g) => g.photon_mean(m),
                Self::Wigner(w) => w.photon_mean(m),
            })
            .sum()
    }

    fn transform(&self, f: &SymplecticTransform) -> CoreResult<Self> {
        Ok(match self {
            Self::Gaussian(g) => Self::Gaussian(g.propagate(f)?),
            Self::Wigner(w) => Self::Wigner(w.apply_symplectic(f)?),
        })
    }

    fn attenuate(&self, mode: usize, eta: f64, nbar_env: f64) -> CoreResult<Self> {
        Ok(match self {
            Self::Gaussian(g) => Self::Gaussian(g.inject_thermal(mode, nbar_env, eta)?),
            Self::Wigner(w) => Self::Wigner(w.attenuate(mode, eta, nbar_env)?),
        })
    }
}

/// Result of pushing the configured inputs through the pipeline at one phase.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluated {
    /// Heralded (or only) branch, normalized.
    pub state: State,
    /// Product of all herald success probabilities; 1 without heralding.
    pub probability: f64,
    /// Complementary branch of a single herald, normalized, with its probability.
    pub failure: Option<(WignerExpr, f64)>,
    /// Total mean photon number entering the interferometer (success branch).
    pub mean_photons_in: f64,
}

fn herald_spec(m: &Modification) -> Option<(Operation, AddSubSpec)> {
    match *m {
        Modification::Add { mode, m, mechanism, .. } => Some((Operation::Add, AddSubSpec { mode, m, mechanism, herald: Herald::FockCount })),
        Modification::Subtract { mode, m, click, transmissivity, .. } => Some((
            Operation::Subtract,
            AddSubSpec {
                mode,
                m: if click { 1 } else { m },
                mechanism: Mechanism::BeamSplitter { transmissivity },
                herald: if click { Herald::Click } else { Herald::FockCount },
            },
        )),
        _ => None,
    }
}

fn gate(m: &Modification, modes: usize) -> CoreResult<Option<SymplecticTransform>> {
    Ok(match *m {
        Modification::Squeeze { mode, r, theta, .. } => Some(squeezer(r, theta)?.embed(&[mode], modes)?),
        Modification::Displace { mode, amplitude, theta, .. } => Some(displacement(amplitude, theta)?.embed(&[mode], modes)?),
        _ => None,
    })
}

/// Branches carried through the pipeline: the success branch first, then the
/// failure branch of a single herald when requested.
struct Branches {
    items: Vec<(State, f64)>,
}

impl Branches {
    fn map(&mut self, f: impl Fn(&State) -> CoreResult<State>) -> CoreResult<()> {
        for (s, _) in self.items.iter_mut() {
            *s = f(s)?;
        }
        Ok(())
    }
}

pub fn uses_gaussian_path(cfg: &ScenarioConfig) -> bool {
    cfg.engine == Engine::Auto && cfg.is_gaussian()
}

/// Runs the state pipeline with the interferometer phase set to `phi`.
pub fn evaluate(cfg: &ScenarioConfig, phi: Option<f64>, with_failure: bool) -> CoreResult<Evaluated> {
    let n = cfg.modes();
    let gaussian = uses_gaussian_path(cfg);
    let initial = if gaussian {
        let parts: Vec<GaussianState> = cfg.inputs.iter().map(gaussian_input).collect::<CoreResult<_>>()?;
        State::Gaussian(GaussianState::tensor(&parts)?)
    } else {
        let parts: Vec<WignerExpr> = cfg.inputs.iter().map(wigner_input).collect::<CoreResult<_>>()?;
        State::Wigner(WignerExpr::tensor(&parts)?)
    };
    let track_failure = with_failure && cfg.heralds().count() == 1;
    let mut b = Branches { items: vec![(initial, 1.0)] };

    apply_stage(cfg, Stage::Input, &mut b, track_failure, n)?;
    let mean_photons_in = b.items[0].0.total_mean_photon()?;
    if let Some(mzi) = &cfg.interferometer {
        let f = mach_zehnder(phi.unwrap_or(mzi.phi))?.embed(&[1, 2], n)?;
        b.map(|s| s.transform(&f))?;
    }
    apply_stage(cfg, Stage::Output, &mut b, track_failure, n)?;

    let eta = 1.0 - cfg.noise.loss.total();
    if eta < 1.0 {
        for mode in 1..=n {
            b.map(|s| s.attenuate(mode, eta, 0.0))?;
        }
    }
    if let Some(t) = &cfg.noise.thermal {
        for mode in 1..=n {
            b.map(|s| s.attenuate(mode, t.eta, t.nbar_env))?;
        }
    }

    let mut items = b.items.into_iter();
    let (state, probability) = items.next().expect("success branch");
    let failure = match items.next() {
        Some((s, p)) => Some((s.to_wigner()?, p)),
        None => None,
    };
    Ok(Evaluated { state, probability, failure, mean_photons_in })
}

fn apply_stage(cfg: &ScenarioConfig, stage: Stage, b: &mut Branches, track_failure: bool, n: usize) -> CoreResult<()> {
    for m in cfg.modifications.iter().filter(|m| m.stage() == stage) {
        if let Some(f) = gate(m, n)? {
            b.map(|s| s.transform(&f))?;
            continue;
        }
        let (op, spec) = herald_spec(m).expect("heralded modification");
        let mut next = Vec::with_capacity(2);
        for (i, (s, p)) in b.items.iter().enumerate() {
            let w = s.to_wigner()?;
            let h = herald::apply(&w, op, &spec)?;
            if track_failure && i == 0 {
                let f = herald::apply_failure(&w, op, &spec)?;
                next.push((State::Wigner(h.state), p * h.probability));
                next.push((State::Wigner(f.state), p * f.probability));
            } else {
                next.push((State::Wigner(h.state), p * h.probability));
            }
        }
        b.items = next;
    }
    Ok(())
}

fn gaussian_input(i: &InputState) -> CoreResult<GaussianState> {
    match *i {
        InputState::Vacuum | InputState::Fock { n: 0 } => GaussianState::vacuum(1),
        InputState::Coherent { amplitude, theta } => GaussianState::coherent(amplitude, theta),
        InputState::Thermal { nbar } => GaussianState::thermal(nbar),
        InputState::Fock { .. } => Err(CoreError::Domain("Fock input on the Gaussian path".into())),
    }
}

fn wigner_input(i: &InputState) -> CoreResult<WignerExpr> {
    match *i {
        InputState::Fock { n } => WignerExpr::fock(n),
        _ => WignerExpr::from_gaussian(&gaussian_input(i)?),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeReport {
    pub scheme: String,
    pub mean: f64,
    pub variance: f64,
    pub phase_variance: Option<f64>,
    pub optimal_phi: Option<f64>,
    pub optimal_phase_variance: Option<f64>,
    pub snr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeDistribution {
    pub mode: usize,
    pub probs: Vec<f64>,
    pub tail: f64,
}

/// Metrics at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub index: usize,
    pub parameter: Option<String>,
    pub value: Option<f64>,
    pub phi: Option<f64>,
    pub engine: String,
    pub herald_probability: Option<f64>,
    pub mean_photons_in: Option<f64>,
    pub mean_photons_out: Option<f64>,
    pub snl: Option<f64>,
    pub hl: Option<f64>,
    pub qfi: Option<f64>,
    pub qcrb: Option<f64>,
    pub cfi: Option<f64>,
    pub schemes: Vec<SchemeReport>,
    pub distributions: Vec<ModeDistribution>,
    pub warnings: Vec<String>,
}

/// Errors that describe the physics at a point rather than a broken run.
pub fn is_soft(e: &CoreError) -> bool {
    matches!(
        e,
        CoreError::ImprobableBranch { .. } | CoreError::DegenerateBranch { .. } | CoreError::SignalStationary { .. } | CoreError::PurityViolation { .. }
    )
}

/// Keeps soft failures as warnings and propagates the rest.
fn soft<T>(r: CoreResult<T>, what: &str, warnings: &mut Vec<String>) -> CoreResult<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(e) if is_soft(&e) => {
            warnings.push(format!("{what}: {e}"));
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

/// Photons injected by addition that the scheme counts directly, removed from the SNR signal.
fn injected_photons(cfg: &ScenarioConfig, scheme: &DetectionScheme) -> usize {
    let DetectionScheme::Intensity { mode } = *scheme else { return 0 };
    cfg.modifications
        .iter()
        .filter_map(|m| match *m {
            Modification::Add { mode: am, m, stage, .. } if am == mode && (stage == Stage::Output || cfg.interferometer.is_none()) => Some(m),
            _ => None,
        })
        .sum()
}

pub fn scheme_moments<'a>(cfg: &'a ScenarioConfig, scheme: &'a DetectionScheme) -> impl Fn(f64) -> CoreResult<MeasurementMoments> + 'a {
    move |phi| evaluate(cfg, Some(phi), false)?.state.measure(scheme)
}

/// Global minimum of the phase variance over `(0, 2π)`: a coarse scan brackets
/// the best cell, golden-section search refines it.
pub fn optimal_phase(cfg: &ScenarioConfig, scheme: &DetectionScheme) -> CoreResult<Minimum> {
    let moments = scheme_moments(cfg, scheme);
    let f = |x: f64| phase_variance_at(&moments, x);
    let step = 2.0 * PI / OPTIMUM_SCAN as f64;
    let mut best: Option<(f64, f64)> = None;
    let mut last_err = None;
    // π is scanned exactly: bright parity signals vanish everywhere else on the grid.
    let candidates = (0..OPTIMUM_SCAN).map(|k| (k as f64 + 0.5) * step).chain(std::iter::once(PI));
    for x in candidates {
        match f(x) {
            Ok(v) if v.is_finite() && best.map_or(true, |(_, b)| v < b) => best = Some((x, v)),
            Ok(_) => {}
            Err(e) if is_soft(&e) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    let Some((x0, v0)) = best else {
        return Err(last_err.unwrap_or(CoreError::SignalStationary { phi: 0.0, derivative: 0.0 }));
    };
    let refined = golden_section_minimize(&f, x0 - step, x0 + step, GOLDEN_TOL);
    let mut out = match refined {
        Ok(m) if m.value <= v0 => m,
        Ok(_) => Minimum { phi: x0, value: v0 },
        Err(e) if is_soft(&e) => Minimum { phi: x0, value: v0 },
        Err(e) => return Err(e),
    };
    // Parity-type observables are stationary exactly at π, which golden-section never samples.
    if (PI - out.phi).abs() < step {
        if let Ok(v) = f(PI) {
            if v <= out.value {
                out = Minimum { phi: PI, value: v };
            }
        }
    }
    Ok(out)
}

/// Joint click/no-click CFI on every remaining mode; with one herald the failure
/// branch and the herald outcome itself are included.
fn click_cfi(cfg: &ScenarioConfig, phi: f64) -> CoreResult<f64> {
    let modes: Vec<usize> = (1..=cfg.modes()).collect();
    let success = {
        let modes = modes.clone();
        BranchSet::complete(move |x| click_pattern_probabilities(&evaluate(cfg, Some(x), false)?.state.to_wigner()?, &modes))
    };
    let heralds = cfg.heralds().count();
    if heralds == 0 {
        return estimation::cfi(&success, phi);
    }
    let p = |x: f64| Ok(evaluate(cfg, Some(x), false)?.probability);
    if heralds == 1 {
        let failure = BranchSet::complete(move |x| {
            let (f, _) = evaluate(cfg, Some(x), true)?.failure.ok_or_else(|| CoreError::Domain("missing failure branch".into()))?;
            click_pattern_probabilities(&f, &modes)
        });
        probabilistic_cfi(&p, &success, Some(&failure), true, phi)
    } else {
        probabilistic_cfi(&p, &success, None, true, phi)
    }
}

fn qfi(cfg: &ScenarioConfig, gaussian: bool, phi: f64) -> CoreResult<f64> {
    if gaussian {
        let family = |x: f64| match evaluate(cfg, Some(x), false)?.state {
            State::Gaussian(g) => Ok(g),
            State::Wigner(_) => Err(CoreError::Domain("expected a Gaussian state".into())),
        };
        qfi_mixed_gaussian(&family, phi)
    } else {
        let family = |x: f64| evaluate(cfg, Some(x), false)?.state.to_wigner();
        qfi_pure_wigner(&family, phi)
    }
}

/// Evaluates every configured metric at the configuration's own parameters.
pub fn run_point(cfg: &ScenarioConfig, index: usize, parameter: Option<(&str, f64)>) -> ScenarioResult<PointReport> {
    let gaussian = uses_gaussian_path(cfg);
    let phi = cfg.interferometer.map(|m| m.phi);
    let mut report = PointReport {
        index,
        parameter: parameter.map(|p| p.0.to_string()),
        value: parameter.map(|p| p.1),
        phi,
        engine: if gaussian { "gaussian" } else { "wigner" }.into(),
        herald_probability: None,
        mean_photons_in: None,
        mean_photons_out: None,
        snl: None,
        hl: None,
        qfi: None,
        qcrb: None,
        cfi: None,
        schemes: Vec::new(),
        distributions: Vec::new(),
        warnings: Vec::new(),
    };
    let mut warnings = Vec::new();
    let Some(ev) = soft(evaluate(cfg, None, false), "state", &mut warnings)? else {
        report.warnings = warnings;
        return Ok(report);
    };
    report.herald_probability = Some(ev.probability);
    report.mean_photons_in = Some(ev.mean_photons_in);
    report.mean_photons_out = Some(ev.state.total_mean_photon()?);
    if ev.mean_photons_in > 0.0 {
        report.snl = Some(estimation::snl(ev.mean_photons_in)?);
        report.hl = Some(estimation::hl(ev.mean_photons_in)?);
    }
    if let Some(phi) = phi {
        if cfg.metrics.qfi {
            report.qfi = soft(qfi(cfg, gaussian, phi), "qfi", &mut warnings)?;
            report.qcrb = report.qfi.filter(|q| *q > 0.0).map(|q| 1.0 / q);
        }
        if cfg.metrics.cfi {
            report.cfi = soft(click_cfi(cfg, phi), "cfi", &mut warnings)?;
        }
    }
    for scheme in &cfg.detection {
        let name = scheme.name();
        let m = ev.state.measure(scheme)?;
        let mut s = SchemeReport {
            scheme: name.clone(),
            mean: m.mean,
            variance: m.variance,
            phase_variance: None,
            optimal_phi: None,
            optimal_phase_variance: None,
            snr: None,
        };
        if let Some(phi) = phi {
            if cfg.metrics.phase_variance {
                let moments = scheme_moments(cfg, scheme);
                s.phase_variance = soft(phase_variance_at(&moments, phi), &format!("{name} phase variance"), &mut warnings)?;
            }
            if cfg.metrics.optimum {
                if let Some(best) = soft(optimal_phase(cfg, scheme), &format!("{name} optimum"), &mut warnings)? {
                    s.optimal_phi = Some(best.phi);
                    s.optimal_phase_variance = Some(best.value);
                }
            }
        }
        if cfg.metrics.snr {
            match estimation::snr(&m, injected_photons(cfg, scheme)) {
                Ok(v) => s.snr = Some(v),
                Err(e) => warnings.push(format!("{name} snr: {e}")),
            }
        }
        report.schemes.push(s);
    }
    if cfg.metrics.distributions {
        let w = ev.state.to_wigner()?;
        for mode in 1..=cfg.modes() {
            let d = w.photon_number_distribution(mode, cfg.n_max)?;
            report.distributions.push(ModeDistribution { mode, probs: d.probs, tail: d.tail });
        }
    }
    report.warnings = warnings;
    Ok(report)
}
