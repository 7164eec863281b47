/*
Copyright 2026 The errt Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/
use serde::{Deserialize, Serialize};

use super::params::{PlannerParams, Variant};
use crate::error::Result;
use crate::geometry::Config;

/// A point on the best-cost curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostSample {
    pub iteration: u64,
    pub collision_checks: u64,
    /// Seconds since the start of the run; dropped from timing-free views.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<f64>,
    pub cost: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Solved,
    CostTarget,
    TimeLimit,
    IterationLimit,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EpisodeCounters {
    pub episodes: u64,
    pub steps: u64,
    pub jumps_attempted: u64,
    pub jumps_succeeded: u64,
    pub connect_attempts: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlannerReport {
    pub variant: Variant,
    pub seed: u64,
    pub params: PlannerParams,
    pub start: Config,
    pub goal: Config,
    pub success: bool,
    pub termination: Termination,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
    pub collision_checks: u64,
    pub iterations: u64,
    pub path: Vec<Config>,
    pub path_length: Option<f64>,
    pub first_solution: Option<CostSample>,
    pub cost_trace: Vec<CostSample>,
    pub tree_sizes: Vec<usize>,
    pub counters: EpisodeCounters,
}

impl PlannerReport {
    /// Copy without any wall-clock measurements, so that equal seeds and
    /// configs give equal values.
    pub fn without_timing(&self) -> PlannerReport {
        let strip = |s: &CostSample| CostSample { time: None, ..s.clone() };
        PlannerReport {
            wall_time: None,
            first_solution: self.first_solution.as_ref().map(strip),
            cost_trace: self.cost_trace.iter().map(strip).collect(),
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
