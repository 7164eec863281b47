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
//! Episode generation: the generator interface, the heuristic reference
//! generator, incremental bound, adaptive noise and the path pipeline that
//! turns one generator call into a re-sampled candidate path.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{obstacles_within_radius, Config, Environment, ObstacleFeature};
use crate::spline::{build_spline, resample_equidistant, ActionPath, ResampledPath};
use crate::tree::{NodeId, SearchTree};

/// What a generator observes at a configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentState {
    /// Velocity of the agent in metres per step (zero at the tree root).
    pub velocity: Config,
    /// Goal relative to the agent.
    pub goal: Config,
    /// Obstacles within the perception radius, nearest first.
    pub env_features: Vec<ObstacleFeature>,
    /// Index of this step within the current episode.
    pub step_index: usize,
}

/// Tuning of the heuristic potential-field generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HeuristicGains {
    pub attractive_gain: f64,
    /// Repulsive gain as a multiple of `bound`.
    pub repulsive_gain_factor: f64,
    /// Repulsion acts while the distance to an obstacle's centre is below
    /// this multiple of its bounding radius.
    pub influence_factor: f64,
    /// Weight of the previous heading when blending in the new force.
    pub momentum: f64,
    /// Clearance a pseudo-step tries to keep from perceived obstacles (m).
    pub clearance_margin: f64,
    /// Fraction of the repulsive force turned sideways to slip around
    /// obstacles that sit straight on the line to the goal.
    pub swirl: f64,
}

impl Default for HeuristicGains {
    fn default() -> Self {
        HeuristicGains {
            attractive_gain: 1.0,
            repulsive_gain_factor: 0.5,
            influence_factor: 2.0,
            momentum: 0.5,
            clearance_margin: 0.1,
            swirl: 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorConfig {
    /// Action points per generator call.
    pub m: usize,
    /// Per-component half-range of the last action point (m).
    pub bound: f64,
    /// Knot spacing of re-sampled paths (m).
    pub d_dense: f64,
    pub noise_base_sigma: f64,
    pub noise_growth: f64,
    /// Perception radius for obstacle features (m).
    pub perception_radius: f64,
    pub heuristic: HeuristicGains,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig::with_bound(2.0)
    }
}

impl GeneratorConfig {
    pub fn with_bound(bound: f64) -> Self {
        GeneratorConfig {
            m: 8,
            bound,
            d_dense: 0.25,
            noise_base_sigma: 0.05 * bound,
            noise_growth: 2.0,
            perception_radius: 2.0 * bound,
            heuristic: HeuristicGains::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.to_string()));
        if self.m == 0 {
            return bad("m must be positive");
        }
        if !(self.bound > 0.0) || !(self.d_dense > 0.0) || !(self.perception_radius > 0.0) {
            return bad("bound, d_dense and perception_radius must be positive");
        }
        if !(self.noise_base_sigma >= 0.0) || !(self.noise_growth > 1.0) {
            return bad("noise_base_sigma must be >= 0 and noise_growth > 1");
        }
        Ok(())
    }
}

/// A policy that proposes an action path from an agent state. Must be
/// deterministic in `(state, config)`.
pub trait EpisodeGenerator: Send + Sync {
    fn name(&self) -> &str;
    fn step(&self, state: &AgentState, config: &GeneratorConfig) -> ActionPath;
}

/// Deterministic potential-field generator standing in for a learned policy.
#[derive(Clone, Copy, Debug, Default)]
pub struct HeuristicGenerator;

impl EpisodeGenerator for HeuristicGenerator {
    fn name(&self) -> &str {
        "heuristic"
    }

    fn step(&self, state: &AgentState, config: &GeneratorConfig) -> ActionPath {
        heuristic_step(state, config)
    }
}

/// Name-to-generator table used by planner configs.
#[derive(Clone)]
pub struct GeneratorRegistry {
    entries: BTreeMap<String, Arc<dyn EpisodeGenerator>>,
}

impl Default for GeneratorRegistry {
    fn default() -> Self {
        let mut r = GeneratorRegistry { entries: BTreeMap::new() };
        r.register(Arc::new(HeuristicGenerator));
        r
    }
}

impl GeneratorRegistry {
    pub fn register(&mut self, generator: Arc<dyn EpisodeGenerator>) {
        self.entries.insert(generator.name().to_string(), generator);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn EpisodeGenerator>> {
        self.entries.get(name).cloned().ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

/// Clamps component `j` of point `i` (1-based) into `[-(i/m)·bound, (i/m)·bound]`.
pub fn apply_incremental_bound(raw: &[Config], bound: f64) -> ActionPath {
    let m = raw.len() as f64;
    ActionPath::new(
        raw.iter()
            .enumerate()
            .map(|(i, p)| {
                let lim = (i + 1) as f64 / m * bound;
                p.map(|_, v| v.clamp(-lim, lim))
            })
            .collect(),
    )
}

/// Standard deviation of the exploration noise for a node that already
/// started `selection_count` episodes; zero on first use.
pub fn adaptive_noise_sigma(selection_count: u32, config: &GeneratorConfig) -> f64 {
    if selection_count == 0 {
        0.0
    } else {
        config.noise_base_sigma * config.noise_growth.powi(selection_count as i32 - 1)
    }
}

/// Adds per-component Gaussian noise growing with `selection_count`, then
/// re-applies the incremental bound.
pub fn inject_adaptive_noise<R: Rng + ?Sized>(action: ActionPath, selection_count: u32, config: &GeneratorConfig, rng: &mut R) -> ActionPath {
    let sigma = adaptive_noise_sigma(selection_count, config);
    if sigma == 0.0 {
        return action;
    }
    let normal = Normal::new(0.0, sigma).expect("finite sigma");
    let noisy: Vec<Config> = action.points.iter().map(|p| p.map(|_, v| v + normal.sample(rng))).collect();
    apply_incremental_bound(&noisy, config.bound)
}

/// Potential-field rollout: `m` pseudo-steps of length `bound / m`, each
/// heading along the momentum-blended sum of goal attraction and obstacle
/// repulsion, turned aside when the step would graze a perceived obstacle.
pub fn heuristic_step(state: &AgentState, config: &GeneratorConfig) -> ActionPath {
    let g = &config.heuristic;
    let dim = state.goal.dim();
    let step = config.bound / config.m as f64;
    let k_rep = g.repulsive_gain_factor * config.bound;
    let mut p = Config::zeros(dim);
    let mut heading = state.velocity.normalized();
    let mut points = Vec::with_capacity(config.m);

    for _ in 0..config.m {
        let to_goal = state.goal - p;
        let dist = to_goal.norm();
        if dist <= 1e-12 {
            points.push(p);
            continue;
        }
        if dist <= step && clearance_along(&state.env_features, &p, &state.goal) > g.clearance_margin {
            p = state.goal;
            heading = to_goal.normalized();
            points.push(p);
            continue;
        }

        let mut force = to_goal * (g.attractive_gain / dist);
        for f in &state.env_features {
            let shape = &f.shape;
            let radius = shape.bounding_radius();
            let reach = (g.influence_factor - 1.0).max(0.0) * radius;
            let rho = shape.distance(&p);
            if rho >= reach {
                continue;
            }
            let away = (p - shape.closest_point(&p)).normalized().or_else(|| (p - *shape.center()).normalized());
            let Some(away) = away else { continue };
            let r = rho.max(1e-3);
            let mag = k_rep * (1.0 / r - 1.0 / reach) / (r * r);
            force = force + away * mag + sideways(&away, &to_goal) * (mag * g.swirl);
        }
        let pull = force.normalized().unwrap_or_else(|| to_goal * (1.0 / dist));
        let mut dir = match heading {
            Some(h) => (h * g.momentum + pull * (1.0 - g.momentum)).normalized().unwrap_or(pull),
            None => pull,
        };
        let len = step.min(dist);
        dir = clear_direction(&state.env_features, &p, dir, &to_goal, len, g.clearance_margin);
        p = p + dir * len;
        heading = Some(dir);
        points.push(p);
    }
    apply_incremental_bound(&points, config.bound)
}

/// Unit vector perpendicular to `normal`, on the side that keeps moving
/// towards `towards` (deterministic fallback when they are parallel).
fn sideways(normal: &Config, towards: &Config) -> Config {
    let along = *towards - *normal * normal.dot(towards);
    if let Some(s) = along.normalized() {
        return s;
    }
    if normal.dim() == 2 {
        Config::new2(-normal.get(1), normal.get(0))
    } else {
        let axis = if normal.get(2).abs() < 0.9 { Config::new3(0.0, 0.0, 1.0) } else { Config::new3(1.0, 0.0, 0.0) };
        cross(normal, &axis).normalized().unwrap_or(axis)
    }
}

fn cross(a: &Config, b: &Config) -> Config {
    Config::new3(
        a.get(1) * b.get(2) - a.get(2) * b.get(1),
        a.get(2) * b.get(0) - a.get(0) * b.get(2),
        a.get(0) * b.get(1) - a.get(1) * b.get(0),
    )
}

fn clearance_along(features: &[ObstacleFeature], a: &Config, b: &Config) -> f64 {
    let mut best = f64::INFINITY;
    for k in 1..=4 {
        let q = a.lerp(b, k as f64 / 4.0);
        for f in features {
            best = best.min(f.shape.distance(&q));
        }
    }
    best
}

/// First direction, fanning out from `dir`, whose step keeps the clearance
/// margin; the clearest candidate when none does.
fn clear_direction(features: &[ObstacleFeature], p: &Config, dir: Config, to_goal: &Config, len: f64, margin: f64) -> Config {
    if features.is_empty() {
        return dir;
    }
    let perps: Vec<Config> = if dir.dim() == 2 {
        let s = Config::new2(-dir.get(1), dir.get(0));
        vec![s, -s]
    } else {
        let u = sideways(&dir, to_goal);
        let w = cross(&dir, &u).normalized().unwrap_or(u);
        vec![u, -u, w, -w]
    };
    let mut best = (f64::NEG_INFINITY, dir);
    for k in 0..8 {
        let angle = k as f64 * std::f64::consts::PI / 8.0;
        let (s, c) = angle.sin_cos();
        let cands: Vec<Config> = if k == 0 { vec![dir] } else { perps.iter().map(|u| dir * c + *u * s).collect() };
        for cand in cands {
            let clearance = clearance_along(features, p, &(*p + cand * len));
            if clearance > margin {
                return cand;
            }
            if clearance > best.0 {
                best = (clearance, cand);
            }
        }
    }
    best.1
}

/// Builds the agent state at tree node `node`, queries the generator,
/// applies adaptive noise, and re-samples the fitted spline.
#[allow(clippy::too_many_arguments)]
pub fn gen_path<R: Rng + ?Sized>(
    generator: &dyn EpisodeGenerator,
    tree: &mut SearchTree,
    node: NodeId,
    goal: &Config,
    env: &Environment,
    config: &GeneratorConfig,
    step_index: usize,
    rng: &mut R,
) -> Result<ResampledPath> {
    let n = tree.node(node)?;
    let q_init = n.config;
    let selection_count = n.episode_start_count;
    let velocity = match n.parent {
        Some(p) => (q_init - *tree.config(p)).normalized().map(|u| u * config.d_dense).unwrap_or(Config::zeros(q_init.dim())),
        None => Config::zeros(q_init.dim()),
    };
    let state = AgentState {
        velocity,
        goal: *goal - q_init,
        env_features: obstacles_within_radius(&q_init, config.perception_radius, env)?,
        step_index,
    };
    let action = generator.step(&state, config);
    if action.len() != config.m {
        return Err(Error::ContractViolation(format!(
            "generator `{}` returned {} points, expected {}",
            generator.name(),
            action.len(),
            config.m
        )));
    }
    let action = inject_adaptive_noise(action, selection_count, config, rng);
    tree.node_mut(node)?.episode_start_count += 1;
    let spline = build_spline(&q_init, &action)?;
    Ok(resample_equidistant(&spline, config.d_dense))
}
