use serde::{Deserialize, Serialize};

use crate::adapt::RunResult;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub scenario: String,
    pub total_steps: usize,
    pub rejections: usize,
    pub final_elements: usize,
    pub final_time: f64,
    pub final_dissipation: f64,
    pub branch_time: Option<f64>,
    pub aborted: Option<String>,
    pub wall_time: f64,
}

impl Summary {
    pub fn new(scenario: &str, r: &RunResult) -> Self {
        Self {
            scenario: scenario.to_string(),
            total_steps: r.records.len(),
            rejections: r.rejections,
            final_elements: r.mesh.n_triangles(),
            final_time: r.state.t,
            final_dissipation: r.records.last().map_or(0.0, |x| x.dissipation),
            branch_time: r.branch_time,
            aborted: r.aborted.clone(),
            wall_time: r.wall_time,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }
}
