use rayon::prelude::*;

use crate::config::{Grid, Parameter, ScenarioConfig};
use crate::error::ScenarioResult;
use crate::pipeline::{run_point, PointReport};

/// Evaluates every grid point in parallel; the output is ordered by grid index.
pub fn run_sweep(cfg: &ScenarioConfig, parameter: Parameter, grid: &Grid) -> ScenarioResult<Vec<PointReport>> {
    cfg.check_sweep(parameter, grid, "grid")?;
    let configs: Vec<(f64, ScenarioConfig)> =
        grid.points().into_iter().map(|v| cfg.with_parameter(parameter, v).map(|c| (v, c))).collect::<ScenarioResult<_>>()?;
    configs
        .par_iter()
        .enumerate()
        .map(|(i, (v, c))| run_point(c, i, Some((parameter.name(), *v))))
        .collect()
}
