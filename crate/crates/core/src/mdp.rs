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
//! Training-side MDP: stepping a resampled path through an environment,
//! the shaped reward, a replay buffer and the concentrated-collecting loop
//! that retries from the state before a collision.

use std::collections::BTreeMap;
use std::io::Write;
use std::sync::Arc;

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::episode::{inject_adaptive_noise, AgentState, EpisodeGenerator, GeneratorConfig};
use crate::error::{Error, Result};
use crate::geometry::{obstacles_within_radius, CollisionChecker, Config, Environment};
use crate::spline::{build_spline, polyline_length, resample_equidistant, ActionPath, ResampledPath};

/// Floor on `l_safe` in the collision penalty (m).
pub const EPSILON_LSAFE: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RewardWeights {
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
    pub beta1: f64,
    pub beta2: f64,
}

impl Default for RewardWeights {
    fn default() -> Self {
        RewardWeights { alpha1: -1.0, alpha2: -0.5, alpha3: -20.0, beta1: 50.0, beta2: 2.0 }
    }
}

impl RewardWeights {
    pub fn validate(&self) -> Result<()> {
        let neg = [self.alpha1, self.alpha2, self.alpha3].iter().all(|a| *a < 0.0);
        let pos = [self.beta1, self.beta2].iter().all(|b| *b > 0.0);
        if neg && pos {
            Ok(())
        } else {
            Err(Error::InvalidParameter("reward weights need alpha < 0 and beta > 0".into()))
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RewardComponents {
    pub len: f64,
    pub smooth: f64,
    pub collide: f64,
    pub reach: f64,
    pub advance: f64,
}

impl RewardComponents {
    pub fn weighted(&self, w: &RewardWeights) -> f64 {
        w.alpha1 * self.len + w.alpha2 * self.smooth + w.alpha3 * self.collide + w.beta1 * self.reach + w.beta2 * self.advance
    }
}

/// `1 + 1/l_safe`, with `l_safe` floored at [`EPSILON_LSAFE`].
pub fn collide_penalty(l_safe: f64) -> f64 {
    1.0 + 1.0 / l_safe.max(EPSILON_LSAFE)
}

/// Mean of `1 − cos θ` between consecutive unit directions of `points`,
/// with the direction of `prev_velocity` (if non-zero) in front.
pub fn smoothness(points: &[Config], prev_velocity: &Config) -> f64 {
    let mut dirs: Vec<Config> = prev_velocity.normalized().into_iter().collect();
    dirs.extend(points.windows(2).filter_map(|w| (w[1] - w[0]).normalized()));
    if dirs.len() < 2 {
        return 0.0;
    }
    let total: f64 = dirs.windows(2).map(|d| 1.0 - d[0].dot(&d[1]).clamp(-1.0, 1.0)).sum();
    total / (dirs.len() - 1) as f64
}

/// Reward of executing `path` (starting at `prev_q`). `collision` carries
/// `l_safe` when the execution hit an obstacle.
pub fn reward(
    prev_q: &Config,
    path: &[Config],
    goal: &Config,
    collision: Option<f64>,
    weights: &RewardWeights,
    reach_radius: f64,
    prev_velocity: &Config,
) -> Result<(f64, RewardComponents)> {
    let last = path.last().ok_or_else(|| Error::InvalidParameter("empty path".into()))?;
    let c = RewardComponents {
        len: polyline_length(path),
        smooth: smoothness(path, prev_velocity),
        collide: collision.map_or(0.0, collide_penalty),
        reach: if last.distance(goal) <= reach_radius { 1.0 } else { 0.0 },
        advance: prev_q.distance(goal) - last.distance(goal),
    };
    Ok((c.weighted(weights), c))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MdpConfig {
    pub gamma: f64,
    pub max_re: usize,
    pub reach_radius: f64,
    pub weights: RewardWeights,
    pub generator: GeneratorConfig,
    /// Exploration noise on the first attempt from a state (m); it grows by
    /// `generator.noise_growth` with every retry.
    pub exploration_sigma: f64,
    pub collision_resolution: f64,
    pub buffer_capacity: usize,
    pub batch_size: usize,
    /// Learner update cadence in environment steps.
    pub update_every: usize,
    /// Steps after which an episode without a terminal event is reset.
    pub max_episode_steps: usize,
    /// Edge of the cells of the visit histogram (m).
    pub region_cell: f64,
}

impl Default for MdpConfig {
    fn default() -> Self {
        MdpConfig {
            gamma: 0.99,
            max_re: 3,
            reach_radius: 0.5,
            weights: RewardWeights::default(),
            generator: GeneratorConfig::default(),
            exploration_sigma: 0.3,
            collision_resolution: 0.05,
            buffer_capacity: 100_000,
            batch_size: 64,
            update_every: 50,
            max_episode_steps: 200,
            region_cell: 1.0,
        }
    }
}

impl MdpConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.to_string()));
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return bad("gamma must lie in (0, 1)");
        }
        if self.max_re == 0 || self.buffer_capacity == 0 || self.batch_size == 0 || self.update_every == 0 {
            return bad("max_re, buffer_capacity, batch_size and update_every must be positive");
        }
        if self.max_episode_steps == 0 {
            return bad("max_episode_steps must be positive");
        }
        if !(self.exploration_sigma >= 0.0) {
            return bad("exploration_sigma must be non-negative");
        }
        if !(self.reach_radius > 0.0) || !(self.collision_resolution > 0.0) || !(self.region_cell > 0.0) {
            return bad("reach_radius, collision_resolution and region_cell must be positive");
        }
        self.weights.validate()?;
        self.generator.validate()
    }
}

/// What happened when a resampled path was executed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepOutcome {
    /// Knots actually traversed, starting at the current configuration.
    pub executed: Vec<Config>,
    pub final_q: Config,
    /// Direction of the last executed segment scaled to `d_dense`.
    pub velocity: Config,
    pub collided: bool,
    pub reached: bool,
    /// Collision-free length before impact; the executed length otherwise.
    pub l_safe: f64,
    pub reward: f64,
    pub components: RewardComponents,
}

/// Walks `path` knot to knot. A colliding segment truncates the walk at its
/// start knot; a knot within `reach_radius` of the goal ends it.
pub fn env_step(
    current_q: &Config,
    prev_velocity: &Config,
    goal: &Config,
    path: &ResampledPath,
    env: &Environment,
    cfg: &MdpConfig,
) -> Result<StepOutcome> {
    let checker = CollisionChecker::new(env);
    let mut executed = vec![*current_q];
    let mut l_safe = 0.0;
    let mut collided = false;
    let mut reached = current_q.distance(goal) <= cfg.reach_radius;
    for knot in path.knots.iter().skip(1) {
        if reached {
            break;
        }
        let prev = *executed.last().expect("non-empty");
        let out = checker.segment_check(&prev, knot, cfg.collision_resolution)?;
        if !out.valid {
            collided = true;
            l_safe += out.l_safe;
            break;
        }
        l_safe += out.l_safe;
        executed.push(*knot);
        reached = knot.distance(goal) <= cfg.reach_radius;
    }
    let final_q = *executed.last().expect("non-empty");
    let velocity = match executed.len() {
        1 => *prev_velocity,
        n => (executed[n - 1] - executed[n - 2])
            .normalized()
            .map_or(*prev_velocity, |u| u * cfg.generator.d_dense),
    };
    let collision = collided.then_some(l_safe);
    let (r, components) = reward(current_q, &executed, goal, collision, &cfg.weights, cfg.reach_radius, prev_velocity)?;
    Ok(StepOutcome { executed, final_q, velocity, collided, reached, l_safe, reward: r, components })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub s: AgentState,
    pub a: ActionPath,
    pub r: f64,
    pub s_prime: AgentState,
    pub done: bool,
    pub collided: bool,
    pub l_safe: f64,
}

/// Fixed-capacity ring buffer of transitions.
#[derive(Clone, Debug)]
pub struct ReplayBuffer {
    items: Vec<Transition>,
    capacity: usize,
    head: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        ReplayBuffer { items: Vec::new(), capacity, head: 0 }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn push(&mut self, t: Transition) {
        if self.items.len() < self.capacity {
            self.items.push(t);
        } else {
            self.items[self.head] = t;
        }
        self.head = (self.head + 1) % self.capacity;
    }

    /// Oldest first.
    pub fn iter(&self) -> impl Iterator<Item = &Transition> {
        let split = if self.items.len() < self.capacity { 0 } else { self.head };
        self.items[split..].iter().chain(self.items[..split].iter())
    }

    /// Uniform batch without replacement; shorter when the buffer holds
    /// fewer than `batch` items.
    pub fn sample<R: Rng + ?Sized>(&self, batch: usize, rng: &mut R) -> Vec<&Transition> {
        let n = batch.min(self.items.len());
        sample(rng, self.items.len(), n).into_iter().map(|i| &self.items[i]).collect()
    }

    /// One JSON object per line, oldest first.
    pub fn export_ndjson<W: Write>(&self, mut out: W) -> Result<()> {
        for t in self.iter() {
            serde_json::to_writer(&mut out, t)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LearnerDiagnostics {
    pub batch_size: usize,
    pub mean_reward: f64,
    pub collision_fraction: f64,
}

/// Consumer of replay batches. Policy and critic parameters are whatever
/// state an implementation keeps.
pub trait Learner {
    fn update(&mut self, batch: &[&Transition], gamma: f64) -> LearnerDiagnostics;
}

/// Learner that only records batch statistics.
#[derive(Clone, Debug, Default)]
pub struct RecordingLearner {
    pub history: Vec<LearnerDiagnostics>,
}

impl Learner for RecordingLearner {
    fn update(&mut self, batch: &[&Transition], _gamma: f64) -> LearnerDiagnostics {
        let n = batch.len().max(1) as f64;
        let d = LearnerDiagnostics {
            batch_size: batch.len(),
            mean_reward: batch.iter().map(|t| t.r).sum::<f64>() / n,
            collision_fraction: batch.iter().filter(|t| t.collided).count() as f64 / n,
        };
        self.history.push(d.clone());
        d
    }
}

/// A start/goal pair in an environment, handed out on every reset.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub env: Arc<Environment>,
    pub start: Config,
    pub goal: Config,
}

/// Source of fresh scenarios for random resets.
pub trait EnvFactory {
    fn reset(&mut self, rng: &mut ChaCha8Rng) -> Result<Scenario>;
}

impl<F: FnMut(&mut ChaCha8Rng) -> Result<Scenario>> EnvFactory for F {
    fn reset(&mut self, rng: &mut ChaCha8Rng) -> Result<Scenario> {
        self(rng)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CollectStats {
    pub transitions: usize,
    pub collisions: usize,
    pub retries: usize,
    pub resets: usize,
    pub goals_reached: usize,
    pub learner_updates: usize,
    /// Retries spent at each state a collision happened from, in order.
    pub retry_runs: Vec<usize>,
    /// Transitions by the grid cell of their start state.
    pub region_histogram: BTreeMap<Vec<i64>, u64>,
}

/// Collects `budget` transitions. After a collision the next attempt starts
/// again from the state before it, at most `max_re` times, and then the
/// scenario is reset. Exploration noise grows with the retry count.
pub fn collect<F: EnvFactory, L: Learner>(
    factory: &mut F,
    generator: &dyn EpisodeGenerator,
    learner: &mut L,
    cfg: &MdpConfig,
    budget: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(ReplayBuffer, CollectStats)> {
    cfg.validate()?;
    if budget == 0 {
        return Err(Error::InvalidParameter("budget must be positive".into()));
    }
    let gen_cfg = &cfg.generator;
    let explore_cfg = GeneratorConfig { noise_base_sigma: cfg.exploration_sigma, ..gen_cfg.clone() };
    let mut buffer = ReplayBuffer::new(cfg.buffer_capacity);
    let mut stats = CollectStats::default();
    let mut scenario = factory.reset(rng)?;
    let mut q = scenario.start;
    let mut velocity = Config::zeros(q.dim());
    let mut step_index = 0usize;
    let mut retries = 0usize;

    for t in 1..=budget {
        let s = observe(&scenario, &q, &velocity, step_index, gen_cfg)?;
        let action = generator.step(&s, gen_cfg);
        if action.len() != gen_cfg.m {
            return Err(Error::ContractViolation(format!("generator returned {} points, expected {}", action.len(), gen_cfg.m)));
        }
        let action = inject_adaptive_noise(action, retries as u32 + 1, &explore_cfg, rng);
        let path = resample_equidistant(&build_spline(&q, &action)?, gen_cfg.d_dense);
        let out = env_step(&q, &velocity, &scenario.goal, &path, &scenario.env, cfg)?;
        let s_prime = observe(&scenario, &out.final_q, &out.velocity, step_index + 1, gen_cfg)?;
        *stats.region_histogram.entry(region_of(&q, cfg.region_cell)).or_insert(0) += 1;
        buffer.push(Transition {
            s,
            a: action,
            r: out.reward,
            s_prime,
            done: out.collided || out.reached,
            collided: out.collided,
            l_safe: out.l_safe,
        });
        stats.transitions += 1;
        if t % cfg.update_every == 0 && buffer.len() >= cfg.batch_size {
            let batch = buffer.sample(cfg.batch_size, rng);
            learner.update(&batch, cfg.gamma);
            stats.learner_updates += 1;
        }

        let mut reset = false;
        if out.collided {
            stats.collisions += 1;
            if retries < cfg.max_re {
                retries += 1;
                stats.retries += 1;
            } else {
                stats.retry_runs.push(retries);
                reset = true;
            }
        } else {
            if retries > 0 {
                stats.retry_runs.push(retries);
            }
            retries = 0;
            q = out.final_q;
            velocity = out.velocity;
            step_index += 1;
            if out.reached {
                stats.goals_reached += 1;
                reset = true;
            } else if step_index >= cfg.max_episode_steps {
                reset = true;
            }
        }
        if reset {
            stats.resets += 1;
            scenario = factory.reset(rng)?;
            q = scenario.start;
            velocity = Config::zeros(q.dim());
            step_index = 0;
            retries = 0;
        }
    }
    Ok((buffer, stats))
}

fn observe(scenario: &Scenario, q: &Config, velocity: &Config, step_index: usize, cfg: &GeneratorConfig) -> Result<AgentState> {
    Ok(AgentState {
        velocity: *velocity,
        goal: scenario.goal - *q,
        env_features: obstacles_within_radius(q, cfg.perception_radius, &scenario.env)?,
        step_index,
    })
}

fn region_of(q: &Config, cell: f64) -> Vec<i64> {
    q.coords().iter().map(|c| (c / cell).floor() as i64).collect()
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;

    use super::*;
    use crate::episode::HeuristicGenerator;
    use crate::geometry::{Aabb, Obstacle, OrientedBox, Sphere};

    fn p2(x: f64, y: f64) -> Config {
        Config::new2(x, y)
    }

    fn open_env() -> Environment {
        Environment::empty(Aabb::new(p2(-50.0, -50.0), p2(50.0, 50.0)).unwrap()).unwrap()
    }

    fn straight(a: Config, b: Config, spacing: f64) -> ResampledPath {
        let n = (a.distance(&b) / spacing).round() as usize;
        ResampledPath { knots: (0..=n).map(|i| a.lerp(&b, i as f64 / n as f64)).collect(), spacing }
    }

    #[test]
    fn penalty_examples() {
        assert_eq!(collide_penalty(0.5), 3.0);
        assert_eq!(collide_penalty(1.0), 2.0);
        assert_eq!(collide_penalty(0.0), 1.0 + 1.0 / EPSILON_LSAFE);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut xs: Vec<f64> = (0..100).map(|_| rng.gen_range(EPSILON_LSAFE..10.0)).collect();
        xs.sort_by(f64::total_cmp);
        for w in xs.windows(2) {
            assert!(collide_penalty(w[0]).is_finite());
            assert!(w[0] == w[1] || collide_penalty(w[0]) > collide_penalty(w[1]));
        }
    }

    #[test]
    fn reward_examples() {
        let goal = p2(10.0, 0.0);
        let path = straight(p2(0.0, 0.0), p2(2.0, 0.0), 0.25);
        let zero = Config::zeros(2);
        let (_, c) = reward(&p2(0.0, 0.0), &path.knots, &goal, None, &RewardWeights::default(), 0.5, &zero).unwrap();
        assert!((c.len - 2.0).abs() < 1e-12);
        assert!(c.smooth.abs() < 1e-12);
        assert_eq!((c.collide, c.reach), (0.0, 0.0));
        assert!((c.advance - 2.0).abs() < 1e-12);
        let w = RewardWeights { alpha1: -1.0, alpha2: -1.0, alpha3: -1.0, beta1: 10.0, beta2: 1.0 };
        let (r, _) = reward(&p2(0.0, 0.0), &path.knots, &goal, None, &w, 0.5, &zero).unwrap();
        assert!(r.abs() < 1e-12);
        let near = straight(p2(8.0, 0.0), p2(9.75, 0.0), 0.25);
        let (_, c) = reward(&p2(8.0, 0.0), &near.knots, &goal, None, &w, 0.5, &zero).unwrap();
        assert_eq!(c.reach, 1.0);
        assert!(reward(&zero, &[], &goal, None, &w, 0.5, &zero).is_err());
        assert!(RewardWeights { alpha1: 1.0, ..RewardWeights::default() }.validate().is_err());
    }

    #[test]
    fn smoothness_signs() {
        let straight_line: Vec<Config> = (0..6).map(|i| p2(i as f64, 2.0 * i as f64)).collect();
        assert!(smoothness(&straight_line, &p2(0.5, 1.0)).abs() < 1e-12);
        let bent = vec![p2(0.0, 0.0), p2(1.0, 0.0), p2(2.0, 1e-5)];
        assert!(smoothness(&bent, &Config::zeros(2)) > 0.0);
        // Turning against the incoming velocity counts too.
        let s = smoothness(&straight_line, &p2(-1.0, 0.0));
        assert!(s > 0.0 && s <= 2.0);
    }

    #[test]
    fn advance_telescopes_over_an_episode() {
        let env = open_env();
        let cfg = MdpConfig::default();
        let goal = p2(30.0, 17.0);
        let start = p2(-20.0, 4.0);
        let mut q = start;
        let mut v = Config::zeros(2);
        let mut sum = 0.0;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let target = q + p2(rng.gen_range(-1.0..2.0), rng.gen_range(-1.0..2.0));
            let path = straight(q, target, 0.25);
            let out = env_step(&q, &v, &goal, &path, &env, &cfg).unwrap();
            assert!(!out.collided);
            sum += out.components.advance;
            q = out.final_q;
            v = out.velocity;
        }
        assert!((sum - (start.distance(&goal) - q.distance(&goal))).abs() < 1e-9);
    }

    #[test]
    fn env_step_cases() {
        let cfg = MdpConfig::default();
        let env = open_env();
        let out = env_step(&p2(0.0, 0.0), &Config::zeros(2), &p2(20.0, 0.0), &straight(p2(0.0, 0.0), p2(2.0, 0.0), 0.25), &env, &cfg).unwrap();
        assert!(!out.collided && !out.reached);

        let out = env_step(&p2(0.0, 0.0), &Config::zeros(2), &p2(2.2, 0.0), &straight(p2(0.0, 0.0), p2(2.0, 0.0), 0.25), &env, &cfg).unwrap();
        assert!(out.reached);
        assert_eq!(out.components.reach, 1.0);
    }

    #[test]
    fn env_step_collision_matches_fine_walk() {
        let cfg = MdpConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let c = p2(rng.gen_range(1.0..3.0), rng.gen_range(-0.3..0.3));
            let env = Environment::new(
                2,
                Aabb::new(p2(-10.0, -10.0), p2(10.0, 10.0)).unwrap(),
                vec![Obstacle::Sphere(Sphere::new(c, 0.4).unwrap())],
            )
            .unwrap();
            let path = straight(p2(0.0, 0.0), p2(4.0, 0.0), 0.25);
            let out = env_step(&p2(0.0, 0.0), &Config::zeros(2), &p2(9.0, 0.0), &path, &env, &cfg).unwrap();
            assert!(out.collided);
            // Oracle: first colliding arc length along the knots at 1e-4 m.
            let mut s = 0.0;
            while !env.is_occupied(&p2(s, 0.0)) {
                s += 1e-4;
            }
            assert!(out.l_safe <= s + 1e-9 && out.l_safe >= s - cfg.collision_resolution - 1e-4, "{} vs {}", out.l_safe, s);
            assert!(out.components.collide > 1.0);
            assert!(out.executed.iter().all(|k| !env.is_occupied(k)));
        }
    }

    fn transition(r: f64) -> Transition {
        let st = AgentState { velocity: Config::zeros(2), goal: p2(1.0, 0.0), env_features: vec![], step_index: 0 };
        Transition { s: st.clone(), a: ActionPath::new(vec![p2(r, 0.0)]), r, s_prime: st, done: false, collided: false, l_safe: 0.0 }
    }

    #[test]
    fn replay_ring_and_sampling() {
        let mut buf = ReplayBuffer::new(5);
        for i in 0..12 {
            buf.push(transition(i as f64));
            assert!(buf.len() <= 5);
        }
        assert_eq!(buf.iter().map(|t| t.r).collect::<Vec<_>>(), vec![7.0, 8.0, 9.0, 10.0, 11.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let batch = buf.sample(4, &mut rng);
        assert_eq!(batch.len(), 4);
        let mut rs: Vec<f64> = batch.iter().map(|t| t.r).collect();
        rs.sort_by(f64::total_cmp);
        rs.dedup();
        assert_eq!(rs.len(), 4);
        let mut out = Vec::new();
        buf.export_ndjson(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().count(), 5);
        let first: Transition = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(first.r, 7.0);
    }

    /// Heads straight for the goal, ignoring obstacles.
    struct Beeline;
    impl EpisodeGenerator for Beeline {
        fn name(&self) -> &str {
            "beeline"
        }
        fn step(&self, state: &AgentState, cfg: &GeneratorConfig) -> ActionPath {
            let dir = state.goal.normalized().unwrap_or(Config::zeros(2));
            ActionPath::new((1..=cfg.m).map(|i| dir * (i as f64 * cfg.bound / cfg.m as f64)).collect())
        }
    }

    #[test]
    fn every_action_colliding_retries_then_resets() {
        // The start sits in a tight pocket: every step collides.
        let walls = vec![
            Obstacle::Box(OrientedBox::axis_aligned(p2(0.3, 0.0), p2(0.05, 1.0)).unwrap()),
            Obstacle::Box(OrientedBox::axis_aligned(p2(-0.3, 0.0), p2(0.05, 1.0)).unwrap()),
            Obstacle::Box(OrientedBox::axis_aligned(p2(0.0, 0.3), p2(1.0, 0.05)).unwrap()),
            Obstacle::Box(OrientedBox::axis_aligned(p2(0.0, -0.3), p2(1.0, 0.05)).unwrap()),
        ];
        let env = Arc::new(Environment::new(2, Aabb::new(p2(-10.0, -10.0), p2(10.0, 10.0)).unwrap(), walls).unwrap());
        let mut resets = 0;
        let mut factory = |_: &mut ChaCha8Rng| {
            resets += 1;
            Ok(Scenario { env: env.clone(), start: p2(0.0, 0.0), goal: p2(8.0, 0.0) })
        };
        let cfg = MdpConfig { max_re: 3, ..MdpConfig::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut learner = RecordingLearner::default();
        let (_, stats) = collect(&mut factory, &Beeline, &mut learner, &cfg, 12, &mut rng).unwrap();
        assert_eq!(stats.collisions, 12);
        assert_eq!(stats.retry_runs, vec![3, 3, 3]);
        assert_eq!(stats.resets, 3);
        assert_eq!(resets, 4);
    }

    #[test]
    fn collision_free_run_has_no_retries() {
        let env = Arc::new(open_env());
        let mut factory = |rng: &mut ChaCha8Rng| {
            Ok(Scenario { env: env.clone(), start: p2(rng.gen_range(-40.0..-30.0), 0.0), goal: p2(40.0, 0.0) })
        };
        let cfg = MdpConfig { batch_size: 8, update_every: 10, ..MdpConfig::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut learner = RecordingLearner::default();
        let (buf, stats) = collect(&mut factory, &HeuristicGenerator, &mut learner, &cfg, 100, &mut rng).unwrap();
        assert_eq!((stats.retries, stats.collisions, stats.transitions), (0, 0, 100));
        assert_eq!(buf.len(), 100);
        assert_eq!(learner.history.len(), 10);
    }

    #[test]
    fn data_concentrates_at_a_narrow_gap() {
        // Wall at x = 0 with a 0.8 m gap around y = 0.
        let walls = vec![
            Obstacle::Box(OrientedBox::axis_aligned(p2(0.0, 5.4), p2(0.25, 5.0)).unwrap()),
            Obstacle::Box(OrientedBox::axis_aligned(p2(0.0, -5.4), p2(0.25, 5.0)).unwrap()),
        ];
        let env = Arc::new(Environment::new(2, Aabb::new(p2(-10.0, -10.0), p2(10.0, 10.0)).unwrap(), walls).unwrap());
        let mut factory = |rng: &mut ChaCha8Rng| {
            Ok(Scenario {
                env: env.clone(),
                start: p2(rng.gen_range(-9.0..-6.0), rng.gen_range(-8.0..8.0)),
                goal: p2(rng.gen_range(6.0..9.0), rng.gen_range(-8.0..8.0)),
            })
        };
        let cfg = MdpConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut learner = RecordingLearner::default();
        let (_, stats) = collect(&mut factory, &HeuristicGenerator, &mut learner, &cfg, 10_000, &mut rng).unwrap();
        let gap: u64 = stats.region_histogram.iter().filter(|(k, _)| (-2..=1).contains(&k[0]) && (-2..=1).contains(&k[1])).map(|(_, v)| v).sum();
        let gap_mean = gap as f64 / 16.0;
        let open: Vec<u64> = stats.region_histogram.iter().filter(|(k, _)| k[0] >= 3 || k[0] <= -4).map(|(_, v)| *v).collect();
        let open_mean = open.iter().sum::<u64>() as f64 / open.len() as f64;
        assert!(gap_mean > open_mean, "gap {gap_mean} vs open {open_mean}");
        assert!(stats.retries > 0);
    }
}
