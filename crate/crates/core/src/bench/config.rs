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
use std::collections::BTreeMap;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::exec::derive_seed;
use crate::envgen::{fixtures, generate, sample_problem, EnvSpec};
use crate::error::{Error, Result};
use crate::geometry::Environment;
use crate::planners::{PlannerParams, Problem, Variant};

/// One family of benchmark environments: a preset name, an explicit spec
/// or a hand-built fixture. Exactly one source must be given.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvGroup {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<EnvSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixture: Option<String>,
}

impl EnvGroup {
    pub fn preset(name: &str) -> Self {
        EnvGroup { preset: Some(name.to_string()), ..EnvGroup::default() }
    }

    pub fn fixture(name: &str) -> Self {
        EnvGroup { fixture: Some(name.to_string()), ..EnvGroup::default() }
    }

    pub fn spec(spec: EnvSpec) -> Self {
        EnvGroup { spec: Some(spec), ..EnvGroup::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let sources = self.preset.is_some() as u8 + self.spec.is_some() as u8 + self.fixture.is_some() as u8;
        if sources != 1 {
            return Err(Error::InvalidParameter("an environment group needs exactly one of preset, spec, fixture".into()));
        }
        if let Some(p) = &self.preset {
            if EnvSpec::preset(p).is_none() {
                return Err(Error::InvalidParameter(format!("unknown preset `{p}`")));
            }
        }
        if let Some(f) = &self.fixture {
            if !fixtures::NAMES.contains(&f.as_str()) {
                return Err(Error::InvalidParameter(format!("unknown fixture `{f}`")));
            }
        }
        if let Some(s) = &self.spec {
            s.validate()?;
        }
        Ok(())
    }

    pub fn default_label(&self, index: usize) -> String {
        self.label
            .clone()
            .or_else(|| self.preset.clone())
            .or_else(|| self.fixture.clone())
            .unwrap_or_else(|| format!("spec{index}"))
    }

    fn env_spec(&self) -> Option<EnvSpec> {
        self.spec.clone().or_else(|| self.preset.as_deref().and_then(EnvSpec::preset))
    }

    /// Environment and start/goal pair of the trial seeded with `seed`.
    pub fn instance(&self, seed: u64, min_clearance: Option<f64>) -> Result<(Arc<Environment>, Problem)> {
        if let Some(name) = &self.fixture {
            let (env, problem) = fixtures::by_name(name, seed)?;
            return Ok((Arc::new(env), problem));
        }
        let spec = self.env_spec().expect("validated group").with_seed(seed);
        let env = generate(&spec)?;
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 1));
        let problem = sample_problem(&env, min_clearance.unwrap_or(spec.min_clearance), &mut rng)?;
        Ok((Arc::new(env), problem))
    }
}

/// Mechanism changes compared against the full planner.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ablation {
    Full,
    NoBisection,
    NoBisectionDownsample,
    Downsample,
    HalfStepJump,
    NoJump,
    #[serde(rename = "l_max_plus_2")]
    LMaxPlus2,
}

impl Ablation {
    pub const STUDIED: [Ablation; 6] = [
        Ablation::NoBisection,
        Ablation::NoBisectionDownsample,
        Ablation::Downsample,
        Ablation::HalfStepJump,
        Ablation::NoJump,
        Ablation::LMaxPlus2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Ablation::Full => "full",
            Ablation::NoBisection => "no_bisection",
            Ablation::NoBisectionDownsample => "no_bisection_downsample",
            Ablation::Downsample => "downsample",
            Ablation::HalfStepJump => "half_step_jump",
            Ablation::NoJump => "no_jump",
            Ablation::LMaxPlus2 => "l_max_plus_2",
        }
    }

    pub fn apply(self, params: &mut PlannerParams) {
        let a = &mut params.ablations;
        match self {
            Ablation::Full => {}
            Ablation::NoBisection => a.no_bisection = true,
            Ablation::NoBisectionDownsample => {
                a.no_bisection = true;
                a.downsample = true;
            }
            Ablation::Downsample => a.downsample = true,
            Ablation::HalfStepJump => a.half_step_jump = true,
            Ablation::NoJump => a.no_jump = true,
            Ablation::LMaxPlus2 => a.l_max_delta = 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetMode {
    /// Stop runs after a fixed number of iterations; results are
    /// reproducible bit for bit.
    Iterations,
    /// Stop runs on wall time, as in the original protocol.
    Time,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnytimeConfig {
    /// Cost thresholds relative to the reference cost, loosest first.
    pub thresholds: Vec<f64>,
    pub reference_variant: Variant,
    pub reference_iterations: u64,
}

impl Default for AnytimeConfig {
    fn default() -> Self {
        AnytimeConfig { thresholds: vec![1.10, 1.05, 1.03], reference_variant: Variant::RrtStar, reference_iterations: 50_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub name: String,
    pub master_seed: u64,
    /// Environments (each with one start/goal pair) per group.
    pub trials: usize,
    /// Planner seeds per environment.
    pub repeats: usize,
    pub envs: Vec<EnvGroup>,
    /// Variants to run; each suite has its own default.
    pub variants: Option<Vec<Variant>>,
    /// Base planner parameters shared by all variants.
    pub params: PlannerParams,
    /// Per-variant JSON patches merged over `params`.
    pub overrides: BTreeMap<Variant, serde_json::Value>,
    pub budget_mode: BudgetMode,
    pub max_iterations: u64,
    pub time_limit: f64,
    pub iteration_limits: BTreeMap<Variant, u64>,
    pub time_limits: BTreeMap<Variant, f64>,
    /// Give every variant the same environment, problem and planner seed.
    pub paired: bool,
    /// Start/goal clearance; the environment spec's value when absent.
    pub min_clearance: Option<f64>,
    pub workers: Option<usize>,
    pub write_reports: bool,
    pub anytime: AnytimeConfig,
    pub ablations: Vec<Ablation>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            name: "bench".into(),
            master_seed: 0,
            trials: 10,
            repeats: 1,
            envs: vec![EnvGroup::preset("desk2d")],
            variants: None,
            params: PlannerParams::default(),
            overrides: BTreeMap::new(),
            budget_mode: BudgetMode::Iterations,
            max_iterations: 20_000,
            time_limit: 1.0,
            iteration_limits: BTreeMap::new(),
            time_limits: BTreeMap::new(),
            paired: true,
            min_clearance: None,
            workers: None,
            write_reports: true,
            anytime: AnytimeConfig::default(),
            ablations: Ablation::STUDIED.to_vec(),
        }
    }
}

impl BenchConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: BenchConfig = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        BenchConfig::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 || self.repeats == 0 {
            return Err(Error::InvalidParameter("trials and repeats must be at least 1".into()));
        }
        if self.envs.is_empty() {
            return Err(Error::InvalidParameter("at least one environment group is needed".into()));
        }
        for g in &self.envs {
            g.validate()?;
        }
        if self.max_iterations == 0 || !(self.time_limit > 0.0) {
            return Err(Error::InvalidParameter("max_iterations and time_limit must be positive".into()));
        }
        if self.anytime.thresholds.iter().any(|t| !(*t >= 1.0)) || self.anytime.thresholds.is_empty() {
            return Err(Error::InvalidParameter("anytime thresholds must be at least 1".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidParameter("workers must be positive".into()));
        }
        for v in Variant::ALL {
            self.params_for(v, Ablation::Full, 0)?;
        }
        Ok(())
    }

    pub fn group_labels(&self) -> Vec<String> {
        let mut labels: Vec<String> = Vec::new();
        for (i, g) in self.envs.iter().enumerate() {
            let mut l = g.default_label(i);
            if labels.contains(&l) {
                l = format!("{l}-{i}");
            }
            labels.push(l);
        }
        labels
    }

    /// Planner parameters of one run.
    pub fn params_for(&self, variant: Variant, ablation: Ablation, seed: u64) -> Result<PlannerParams> {
        let mut value = serde_json::to_value(&self.params)?;
        if let Some(patch) = self.overrides.get(&variant) {
            merge(&mut value, patch);
        }
        let mut p: PlannerParams = serde_json::from_value(value)?;
        p.variant = variant;
        p.seed = seed;
        match self.budget_mode {
            BudgetMode::Iterations => {
                p.max_iterations = Some(*self.iteration_limits.get(&variant).unwrap_or(&self.max_iterations));
                p.time_limit = None;
            }
            BudgetMode::Time => {
                p.time_limit = Some(*self.time_limits.get(&variant).unwrap_or(&self.time_limit));
                p.max_iterations = None;
            }
        }
        ablation.apply(&mut p);
        p.validate()?;
        Ok(p)
    }
}

fn merge(base: &mut serde_json::Value, patch: &serde_json::Value) {
    match (base, patch) {
        (serde_json::Value::Object(b), serde_json::Value::Object(p)) => {
            for (k, v) in p {
                merge(b.entry(k.clone()).or_insert(serde_json::Value::Null), v);
            }
        }
        (b, p) => *b = p.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_minimal_config() {
        let c = BenchConfig::from_json(r#"{"trials": 3, "envs": [{"preset": "desk3d"}, {"fixture": "near_goal"}]}"#).unwrap();
        assert_eq!(c.trials, 3);
        assert_eq!(c.group_labels(), vec!["desk3d", "near_goal"]);
        assert!(BenchConfig::from_json(r#"{"envs": [{"preset": "desk3d", "fixture": "near_goal"}]}"#).is_err());
        assert!(BenchConfig::from_json(r#"{"trials": 0}"#).is_err());
        assert!(BenchConfig::from_json(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn overrides_and_budgets_apply() {
        let c = BenchConfig::from_json(
            r#"{"overrides": {"rrt": {"extension_step": 1.0}}, "iteration_limits": {"rrt_star": 7},
                "budget_mode": "iterations", "max_iterations": 100}"#,
        )
        .unwrap();
        let p = c.params_for(Variant::Rrt, Ablation::Full, 4).unwrap();
        assert_eq!((p.extension_step, p.max_iterations, p.time_limit, p.seed), (1.0, Some(100), None, 4));
        assert_eq!(c.params_for(Variant::RrtStar, Ablation::Full, 0).unwrap().max_iterations, Some(7));
        let p = c.params_for(Variant::Errt, Ablation::NoBisectionDownsample, 0).unwrap();
        assert!(p.ablations.no_bisection && p.ablations.downsample);
        for a in Ablation::STUDIED {
            assert_eq!(serde_json::to_value(a).unwrap(), a.name());
        }

        let t = BenchConfig { budget_mode: BudgetMode::Time, time_limits: [(Variant::RrtStar, 2.0)].into(), ..BenchConfig::default() };
        assert_eq!(t.params_for(Variant::RrtStar, Ablation::Full, 0).unwrap().time_limit, Some(2.0));
        assert_eq!(t.params_for(Variant::Rrt, Ablation::Full, 0).unwrap().max_iterations, None);
    }

    #[test]
    fn instances_repeat() {
        let g = EnvGroup::preset("desk2d");
        let (a, pa) = g.instance(11, None).unwrap();
        let (b, pb) = g.instance(11, None).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        assert_eq!(pa, pb);
    }
}
