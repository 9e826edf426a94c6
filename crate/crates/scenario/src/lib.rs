//! Configuration-driven scenarios for the interferometer engine: single runs,
//! parameter sweeps, phase-drift Monte Carlo and simulated heralded counting.

pub mod config;
pub mod counts;
pub mod drift;
pub mod emit;
pub mod error;
pub mod pipeline;
pub mod report;
pub mod sweep;

pub use config::{Grid, Parameter, ScenarioConfig};
pub use error::{ScenarioError, ScenarioResult};
pub use report::RunReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Run,
    Sweep,
    Drift,
    Counts,
    Validate,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Run => "run",
            Self::Sweep => "sweep",
            Self::Drift => "drift",
            Self::Counts => "counts",
            Self::Validate => "validate",
        }
    }
}

/// Parses `<param>=<start>:<stop>:<step>`.
pub fn parse_grid_arg(s: &str) -> ScenarioResult<(Parameter, Grid)> {
    let (name, range) = s.split_once('=').ok_or_else(|| ScenarioError::config("--grid", format!("expected <param>=<start>:<stop>:<step>, got {s:?}")))?;
    let p = Parameter::parse(name.trim()).ok_or_else(|| ScenarioError::config("--grid", format!("unknown parameter {name:?}")))?;
    let g = Grid::parse(range).ok_or_else(|| ScenarioError::config("--grid", format!("malformed range {range:?}")))?;
    Ok((p, g))
}

/// Runs one subcommand. A `grid` override takes precedence over the config's sweep section.
pub fn execute(command: Command, cfg: &ScenarioConfig, grid: Option<(Parameter, Grid)>) -> ScenarioResult<RunReport> {
    let mut report = RunReport::new(command.name(), cfg);
    match command {
        Command::Validate => {}
        Command::Run => report.points.push(pipeline::run_point(cfg, 0, None)?),
        Command::Sweep => {
            let (p, g) = match grid {
                Some(pg) => pg,
                None => {
                    let s = cfg.sweep.ok_or_else(|| ScenarioError::config("sweep", "no sweep section and no --grid given"))?;
                    (s.parameter, s.grid())
                }
            };
            report.points = sweep::run_sweep(cfg, p, &g)?;
        }
        Command::Drift => report.drift = drift::run_drift(cfg)?,
        Command::Counts => report.counts = counts::run_counts(cfg)?,
    }
    Ok(report)
}
