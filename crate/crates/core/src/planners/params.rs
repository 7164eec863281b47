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

use crate::episode::GeneratorConfig;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Rrt,
    RrtStar,
    RrtConnect,
    Errt,
    ErrtStar,
    ErrtConnect,
}

impl Variant {
    pub const ALL: [Variant; 6] =
        [Variant::Rrt, Variant::RrtStar, Variant::RrtConnect, Variant::Errt, Variant::ErrtStar, Variant::ErrtConnect];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Rrt => "rrt",
            Variant::RrtStar => "rrt_star",
            Variant::RrtConnect => "rrt_connect",
            Variant::Errt => "errt",
            Variant::ErrtStar => "errt_star",
            Variant::ErrtConnect => "errt_connect",
        }
    }

    pub fn is_episodic(self) -> bool {
        matches!(self, Variant::Errt | Variant::ErrtStar | Variant::ErrtConnect)
    }

    pub fn is_star(self) -> bool {
        matches!(self, Variant::RrtStar | Variant::ErrtStar)
    }

    pub fn is_connect(self) -> bool {
        matches!(self, Variant::RrtConnect | Variant::ErrtConnect)
    }

    /// The classical planner an episodic variant is compared against.
    pub fn baseline(self) -> Variant {
        match self {
            Variant::Errt => Variant::Rrt,
            Variant::ErrtStar => Variant::RrtStar,
            Variant::ErrtConnect => Variant::RrtConnect,
            v => v,
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown planner variant `{s}`")))
    }
}

/// Mechanism switches for ablation runs. All off by default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Ablations {
    /// Check knots front to back instead of bisecting.
    pub no_bisection: bool,
    /// Multiply `d_dense` by `downsample_factor`.
    pub downsample: bool,
    pub downsample_factor: f64,
    /// Halve `alpha_jump`.
    pub half_step_jump: bool,
    pub no_jump: bool,
    /// Added to `l_max`.
    pub l_max_delta: u32,
}

impl Default for Ablations {
    fn default() -> Self {
        Ablations { no_bisection: false, downsample: false, downsample_factor: 2.0, half_step_jump: false, no_jump: false, l_max_delta: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlannerParams {
    pub variant: Variant,
    /// Steps per episode.
    #[serde(alias = "L_max")]
    pub l_max: u32,
    pub alpha_jump: f64,
    pub goal_tolerance: f64,
    /// Wall-clock budget in seconds.
    pub time_limit: Option<f64>,
    /// Budget in loop iterations (one extension attempt each).
    pub max_iterations: Option<u64>,
    /// Keep refining after the first solution (star variants only).
    pub anytime: bool,
    /// Anytime runs stop once the best cost is at or below this.
    pub cost_target: Option<f64>,
    /// Steering distance of the classical planners and of tree connection.
    pub extension_step: f64,
    pub collision_resolution: f64,
    /// Probability of sampling the goal in the classical planners.
    pub goal_bias: f64,
    /// Cap on the rewiring radius; twice `extension_step` when absent.
    pub rewire_radius_max: Option<f64>,
    pub ablations: Ablations,
    pub generator: String,
    pub generator_config: GeneratorConfig,
    pub seed: u64,
}

impl Default for PlannerParams {
    fn default() -> Self {
        PlannerParams {
            variant: Variant::Errt,
            l_max: 8,
            alpha_jump: 2.0,
            goal_tolerance: 0.05,
            time_limit: Some(1.0),
            max_iterations: None,
            anytime: false,
            cost_target: None,
            extension_step: 2.0,
            collision_resolution: 0.05,
            goal_bias: 0.05,
            rewire_radius_max: None,
            ablations: Ablations::default(),
            generator: "heuristic".to_string(),
            generator_config: GeneratorConfig::default(),
            seed: 0,
        }
    }
}

impl PlannerParams {
    pub fn for_variant(variant: Variant) -> Self {
        PlannerParams { variant, ..PlannerParams::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: String| Err(Error::InvalidParameter(what));
        if self.l_max == 0 {
            return bad("l_max must be positive".into());
        }
        for (name, v) in [
            ("alpha_jump", self.alpha_jump),
            ("extension_step", self.extension_step),
            ("collision_resolution", self.collision_resolution),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive and finite"));
            }
        }
        if !(self.goal_tolerance >= 0.0) {
            return bad("goal_tolerance must be non-negative".into());
        }
        if !(0.0..=1.0).contains(&self.goal_bias) {
            return bad("goal_bias must lie in [0, 1]".into());
        }
        match (self.time_limit, self.max_iterations) {
            (None, None) => return bad("set time_limit, max_iterations or both".into()),
            (Some(t), _) if !(t > 0.0) => return bad("time_limit must be positive".into()),
            (_, Some(0)) => return bad("max_iterations must be positive".into()),
            _ => {}
        }
        if self.anytime && !self.variant.is_star() {
            return bad(format!("anytime mode needs rrt_star or errt_star, not {}", self.variant));
        }
        if let Some(r) = self.rewire_radius_max {
            if !(r > 0.0) {
                return bad("rewire_radius_max must be positive".into());
            }
        }
        if !(self.ablations.downsample_factor > 0.0) {
            return bad("downsample_factor must be positive".into());
        }
        self.generator_config.validate()
    }

    pub fn effective_l_max(&self) -> u32 {
        self.l_max + self.ablations.l_max_delta
    }

    pub fn effective_alpha_jump(&self) -> f64 {
        if self.ablations.half_step_jump {
            self.alpha_jump / 2.0
        } else {
            self.alpha_jump
        }
    }

    pub fn effective_generator_config(&self) -> GeneratorConfig {
        let mut g = self.generator_config.clone();
        if self.ablations.downsample {
            g.d_dense *= self.ablations.downsample_factor;
        }
        g
    }

    pub fn rewire_radius_cap(&self) -> f64 {
        self.rewire_radius_max.unwrap_or(2.0 * self.extension_step)
    }
}
