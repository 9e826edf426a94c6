//! Heralded photon addition and subtraction.
//!
//! Every model couples the signal mode to an ancilla appended as the last mode,
//! then projects the ancilla. The ancilla is the first port of the coupling
//! element, so for `T → 1` the beam splitter leaves the ancilla untouched.

use serde::{Deserialize, Serialize};

use crate::error::{domain, CoreResult};
use crate::gaussian::GaussianState;
use crate::symplectic::{beam_splitter, mode_rows, two_mode_squeezer, SymplecticTransform};
use crate::wigner::WignerExpr;

pub const MAX_PHOTONS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Success,
    Failure,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeraldedState {
    pub state: WignerExpr,
    pub probability: f64,
    pub branch: Branch,
    pub label: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Mechanism {
    BeamSplitter { transmissivity: f64 },
    Spdc { r: f64, theta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Herald {
    FockCount,
    Click,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operation {
    Add,
    Subtract,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AddSubSpec {
    pub mode: usize,
    pub m: usize,
    pub mechanism: Mechanism,
    pub herald: Herald,
}

impl AddSubSpec {
    pub fn validate(&self, op: Operation) -> CoreResult<()> {
        if self.m == 0 && self.herald == Herald::FockCount {
            return domain("photon number m must be at least 1");
        }
        if self.m > MAX_PHOTONS {
            return domain(format!("photon number m = {} exceeds the cutoff {MAX_PHOTONS}", self.m));
        }
        match self.mechanism {
            Mechanism::BeamSplitter { transmissivity } if !(0.0..=1.0).contains(&transmissivity) => {
                domain(format!("transmissivity must lie in [0, 1], got {transmissivity}"))
            }
            Mechanism::Spdc { r, .. } if !(r >= 0.0) => domain(format!("squeezing must be >= 0, got {r}")),
            Mechanism::Spdc { .. } if op == Operation::Subtract => domain("subtraction uses the beam-splitter model"),
            Mechanism::Spdc { .. } if self.herald == Herald::Click => domain("SPDC addition heralds on a photon count"),
            Mechanism::BeamSplitter { .. } if op == Operation::Add && self.herald == Herald::Click => {
                domain("beam-splitter addition heralds on the ancilla vacuum")
            }
            _ => Ok(()),
        }
    }
}

fn with_ancilla(expr: &WignerExpr, mode: usize, ancilla: WignerExpr, coupling: SymplecticTransform, ancilla_first: bool) -> CoreResult<WignerExpr> {
    let n = expr.modes();
    mode_rows(mode, n)?;
    let joint = WignerExpr::tensor(&[expr.clone(), ancilla])?;
    let order = if ancilla_first { [n + 1, mode] } else { [mode, n + 1] };
    joint.apply_symplectic(&coupling.embed(&order, n + 1)?)
}

fn success(pair: (WignerExpr, f64), label: String) -> HeraldedState {
    HeraldedState { state: pair.0, probability: pair.1, branch: Branch::Success, label }
}

fn failure(pair: (WignerExpr, f64), label: String) -> HeraldedState {
    HeraldedState { state: pair.0, probability: pair.1, branch: Branch::Failure, label }
}

fn vacuum_expr() -> CoreResult<WignerExpr> {
    WignerExpr::from_gaussian(&GaussianState::vacuum(1)?)
}

/// Couples Fock `m` on `BS(T)` and heralds on the ancilla vacuum.
pub fn add_photons_bs(expr: &WignerExpr, mode: usize, m: usize, t: f64) -> CoreResult<HeraldedState> {
    AddSubSpec { mode, m, mechanism: Mechanism::BeamSplitter { transmissivity: t }, herald: Herald::FockCount }.validate(Operation::Add)?;
    let joint = with_ancilla(expr, mode, WignerExpr::fock(m)?, beam_splitter(t)?, true)?;
    Ok(success(joint.project_fock(expr.modes() + 1, 0)?, format!("vacuum on ancilla after Fock {m} input")))
}

/// Two-mode squeezing with a vacuum ancilla, heralded on one ancilla photon.
pub fn add_photon_spdc(expr: &WignerExpr, mode: usize, r: f64, theta: f64) -> CoreResult<HeraldedState> {
    add_photons_spdc(expr, mode, 1, r, theta)
}

/// SPDC model heralded on `m` ancilla photons.
pub fn add_photons_spdc(expr: &WignerExpr, mode: usize, m: usize, r: f64, theta: f64) -> CoreResult<HeraldedState> {
    AddSubSpec { mode, m, mechanism: Mechanism::Spdc { r, theta }, herald: Herald::FockCount }.validate(Operation::Add)?;
    let joint = with_ancilla(expr, mode, vacuum_expr()?, two_mode_squeezer(r, theta)?, false)?;
    Ok(success(joint.project_fock(expr.modes() + 1, m)?, format!("Fock {m} on SPDC idler")))
}

/// Signal and vacuum ancilla after the tapping beam splitter, before any herald.
pub fn subtraction_joint(expr: &WignerExpr, mode: usize, t: f64) -> CoreResult<WignerExpr> {
    with_ancilla(expr, mode, vacuum_expr()?, beam_splitter(t)?, true)
}

/// Taps the mode on `BS(T)` with a vacuum ancilla and heralds on `m` ancilla photons.
pub fn subtract_photons(expr: &WignerExpr, mode: usize, m: usize, t: f64) -> CoreResult<HeraldedState> {
    AddSubSpec { mode, m, mechanism: Mechanism::BeamSplitter { transmissivity: t }, herald: Herald::FockCount }.validate(Operation::Subtract)?;
    let joint = subtraction_joint(expr, mode, t)?;
    Ok(success(joint.project_fock(expr.modes() + 1, m)?, format!("Fock {m} on ancilla")))
}

/// Subtraction heralded by a click (`1 - F₀`) on the ancilla.
pub fn subtract_click(expr: &WignerExpr, mode: usize, t: f64) -> CoreResult<HeraldedState> {
    AddSubSpec { mode, m: 1, mechanism: Mechanism::BeamSplitter { transmissivity: t }, herald: Herald::Click }.validate(Operation::Subtract)?;
    let joint = subtraction_joint(expr, mode, t)?;
    Ok(success(joint.project_click(expr.modes() + 1)?, "click on ancilla".into()))
}

/// Complement of [`subtract_photons`]: the ancilla did not register exactly `m` photons.
pub fn failure_branch(expr: &WignerExpr, mode: usize, m: usize, t: f64) -> CoreResult<HeraldedState> {
    AddSubSpec { mode, m, mechanism: Mechanism::BeamSplitter { transmissivity: t }, herald: Herald::FockCount }.validate(Operation::Subtract)?;
    let joint = subtraction_joint(expr, mode, t)?;
    Ok(failure(joint.project_not_fock(expr.modes() + 1, m)?, format!("not Fock {m} on ancilla")))
}

/// Complement of [`subtract_click`]: no click on the ancilla.
pub fn failure_branch_click(expr: &WignerExpr, mode: usize, t: f64) -> CoreResult<HeraldedState> {
    let joint = subtraction_joint(expr, mode, t)?;
    Ok(failure(joint.project_no_click(expr.modes() + 1)?, "no click on ancilla".into()))
}

/// Complement of [`add_photons_bs`]: the ancilla was not found empty.
pub fn failure_branch_add(expr: &WignerExpr, mode: usize, m: usize, t: f64) -> CoreResult<HeraldedState> {
    let joint = with_ancilla(expr, mode, WignerExpr::fock(m)?, beam_splitter(t)?, true)?;
    Ok(failure(joint.project_not_fock(expr.modes() + 1, 0)?, "ancilla not empty".into()))
}

/// Dispatches a spec to the matching model and returns the success branch.
pub fn apply(expr: &WignerExpr, op: Operation, spec: &AddSubSpec) -> CoreResult<HeraldedState> {
    spec.validate(op)?;
    match (op, spec.mechanism, spec.herald) {
        (Operation::Add, Mechanism::BeamSplitter { transmissivity }, _) => add_photons_bs(expr, spec.mode, spec.m, transmissivity),
        (Operation::Add, Mechanism::Spdc { r, theta }, _) => add_photons_spdc(expr, spec.mode, spec.m, r, theta),
        (Operation::Subtract, Mechanism::BeamSplitter { transmissivity }, Herald::FockCount) => {
            subtract_photons(expr, spec.mode, spec.m, transmissivity)
        }
        (Operation::Subtract, Mechanism::BeamSplitter { transmissivity }, Herald::Click) => subtract_click(expr, spec.mode, transmissivity),
        (Operation::Subtract, Mechanism::Spdc { .. }, _) => domain("subtraction uses the beam-splitter model"),
    }
}

/// Failure branch matching [`apply`].
pub fn apply_failure(expr: &WignerExpr, op: Operation, spec: &AddSubSpec) -> CoreResult<HeraldedState> {
    spec.validate(op)?;
    match (op, spec.mechanism, spec.herald) {
        (Operation::Add, Mechanism::BeamSplitter { transmissivity }, _) => failure_branch_add(expr, spec.mode, spec.m, transmissivity),
        (Operation::Add, Mechanism::Spdc { r, theta }, _) => {
            let joint = with_ancilla(expr, spec.mode, vacuum_expr()?, two_mode_squeezer(r, theta)?, false)?;
            Ok(failure(joint.project_not_fock(expr.modes() + 1, spec.m)?, format!("not Fock {} on SPDC idler", spec.m)))
        }
        (Operation::Subtract, Mechanism::BeamSplitter { transmissivity }, Herald::FockCount) => {
            failure_branch(expr, spec.mode, spec.m, transmissivity)
        }
        (Operation::Subtract, Mechanism::BeamSplitter { transmissivity }, Herald::Click) => {
            failure_branch_click(expr, spec.mode, transmissivity)
        }
        (Operation::Subtract, Mechanism::Spdc { .. }, _) => domain("subtraction uses the beam-splitter model"),
    }
}
