use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::counts::CountsRow;
use crate::drift::DriftTrace;
use crate::pipeline::PointReport;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub generator: String,
    pub command: String,
    pub seed: u64,
    pub config: ScenarioConfig,
    pub points: Vec<PointReport>,
    pub drift: Vec<DriftTrace>,
    pub counts: Vec<CountsRow>,
}

impl RunReport {
    pub fn new(command: &str, config: &ScenarioConfig) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            generator: concat!("mzsim ", env!("CARGO_PKG_VERSION")).to_string(),
            command: command.to_string(),
            seed: config.seed,
            config: config.clone(),
            points: Vec::new(),
            drift: Vec::new(),
            counts: Vec::new(),
        }
    }
}
