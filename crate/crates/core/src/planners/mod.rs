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
//! Episodic planners (ERRT, ERRT*, ERRT-Connect) and the classical
//! RRT, RRT* and RRT-Connect they are measured against.

mod baseline;
mod bisection;
mod connect;
mod episodic;
mod params;
mod report;

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use bisection::{dynamic_bisection, linear_scan, EpisodeState, CONVERGED};
pub use connect::{connect_and_swap, greedy_connect, Bridge};
pub use episodic::episode_restart;
pub use params::{Ablations, PlannerParams, Variant};
pub use report::{CostSample, EpisodeCounters, PlannerReport, Termination};

use crate::episode::GeneratorRegistry;
use crate::error::{Error, Result};
use crate::geometry::{Aabb, CollisionChecker, Config, Environment};
use crate::spline::polyline_length;
use crate::tree::SearchTree;

/// A single-query planning problem.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Problem {
    pub start: Config,
    pub goal: Config,
}

/// Report plus the final search trees (start tree first).
#[derive(Clone, Debug)]
pub struct PlanOutput {
    pub report: PlannerReport,
    pub trees: Vec<SearchTree>,
}

/// Checks that start and goal are free configurations of `env`.
pub fn validate_problem(env: &Environment, problem: &Problem) -> Result<()> {
    for (name, q) in [("start", &problem.start), ("goal", &problem.goal)] {
        if q.dim() != env.dim() {
            return Err(Error::InvalidProblem(format!("{name} has dimension {}, environment {}", q.dim(), env.dim())));
        }
        if !q.is_finite() {
            return Err(Error::InvalidProblem(format!("{name} is not finite")));
        }
        if !env.bounds().contains(q) {
            return Err(Error::InvalidProblem(format!("{name} {q:?} lies outside the bounds")));
        }
        if env.is_occupied(q) {
            return Err(Error::InvalidProblem(format!("{name} {q:?} is in collision")));
        }
    }
    Ok(())
}

/// Runs the configured planner. `registry` resolves the generator of the
/// episodic variants.
pub fn plan(env: &Environment, problem: &Problem, params: &PlannerParams, registry: &GeneratorRegistry) -> Result<PlanOutput> {
    params.validate()?;
    validate_problem(env, problem)?;
    let mut run = Run::new(env, problem, params);
    if problem.start.distance(&problem.goal) <= params.goal_tolerance {
        run.offer_cost(0.0);
        return Ok(run.finish(vec![SearchTree::new(problem.start)], Some(vec![problem.start])));
    }
    match params.variant {
        Variant::Rrt | Variant::RrtStar => baseline::rrt(run),
        Variant::RrtConnect => baseline::rrt_connect(run),
        Variant::Errt | Variant::ErrtStar | Variant::ErrtConnect => {
            let generator = registry.get(&params.generator)?;
            episodic::errt(run, generator.as_ref())
        }
    }
}

/// Counts points sampled every `resolution / 10` along `path` that lie in
/// collision or out of bounds. Independent of the collision checker.
pub fn path_violations(env: &Environment, path: &[Config], resolution: f64) -> usize {
    let fine = resolution / 10.0;
    let mut bad = path.first().map_or(0, |q| env.is_occupied(q) as usize);
    for w in path.windows(2) {
        let n = (w[0].distance(&w[1]) / fine).ceil().max(1.0) as usize;
        bad += (1..=n).filter(|&i| env.is_occupied(&w[0].lerp(&w[1], i as f64 / n as f64))).count();
    }
    bad
}

/// Uniform configuration inside `bounds`.
pub fn sample_uniform<R: Rng + ?Sized>(bounds: &Aabb, rng: &mut R) -> Config {
    let (lo, hi) = (bounds.min, bounds.max);
    lo.map(|i, l| {
        let h = hi.get(i);
        if h > l {
            rng.gen_range(l..h)
        } else {
            l
        }
    })
}

/// Moves from `from` towards `to` by at most `step`.
pub fn steer(from: &Config, to: &Config, step: f64) -> Config {
    let d = from.distance(to);
    if d <= step {
        *to
    } else {
        from.lerp(to, step / d)
    }
}

/// Mutable state shared by every planner loop: checker, rng, budget and
/// the best-solution bookkeeping.
pub(crate) struct Run<'a> {
    pub env: &'a Environment,
    pub problem: Problem,
    pub params: &'a PlannerParams,
    pub checker: CollisionChecker<'a>,
    pub rng: ChaCha8Rng,
    pub iterations: u64,
    pub counters: EpisodeCounters,
    started: Instant,
    best_cost: f64,
    first_solution: Option<CostSample>,
    cost_trace: Vec<CostSample>,
}

impl<'a> Run<'a> {
    fn new(env: &'a Environment, problem: &Problem, params: &'a PlannerParams) -> Self {
        Run {
            env,
            problem: *problem,
            params,
            checker: CollisionChecker::new(env),
            rng: ChaCha8Rng::seed_from_u64(params.seed),
            iterations: 0,
            counters: EpisodeCounters::default(),
            started: Instant::now(),
            best_cost: f64::INFINITY,
            first_solution: None,
            cost_trace: Vec::new(),
        }
    }

    pub fn elapsed(&self) -> f64 {
        self.started.elapsed().as_secs_f64()
    }

    pub fn best_cost(&self) -> f64 {
        self.best_cost
    }

    pub fn solved(&self) -> bool {
        self.best_cost.is_finite()
    }

    /// Why the loop has to stop before the next iteration, if it must.
    pub fn should_stop(&self) -> Option<Termination> {
        if self.solved() {
            if !self.params.anytime {
                return Some(Termination::Solved);
            }
            if self.params.cost_target.is_some_and(|t| self.best_cost <= t) {
                return Some(Termination::CostTarget);
            }
        }
        if self.params.max_iterations.is_some_and(|m| self.iterations >= m) {
            return Some(Termination::IterationLimit);
        }
        if self.params.time_limit.is_some_and(|t| self.elapsed() >= t) {
            return Some(Termination::TimeLimit);
        }
        None
    }

    /// Records a solution of `cost` if it beats the best so far.
    pub fn offer_cost(&mut self, cost: f64) {
        if cost < self.best_cost - 1e-12 {
            self.best_cost = cost;
            let sample = CostSample {
                iteration: self.iterations,
                collision_checks: self.checker.checks(),
                time: Some(self.elapsed()),
                cost,
            };
            if self.first_solution.is_none() {
                self.first_solution = Some(sample.clone());
            }
            self.cost_trace.push(sample);
        }
    }

    pub fn segment_free(&self, a: &Config, b: &Config) -> Result<bool> {
        self.checker.segment_free(a, b, self.params.collision_resolution)
    }

    /// Builds the report; `path` is the best solution when there is one.
    pub fn finish(self, trees: Vec<SearchTree>, path: Option<Vec<Config>>) -> PlanOutput {
        let wall_time = self.elapsed();
        let termination = if path.is_some() && !self.params.anytime {
            Termination::Solved
        } else {
            self.should_stop().unwrap_or(Termination::IterationLimit)
        };
        let path_length = path.as_ref().map(|p| polyline_length(p));
        let report = PlannerReport {
            variant: self.params.variant,
            seed: self.params.seed,
            params: self.params.clone(),
            start: self.problem.start,
            goal: self.problem.goal,
            success: path.is_some(),
            termination,
            wall_time: Some(wall_time),
            collision_checks: self.checker.checks(),
            iterations: self.iterations,
            path: path.unwrap_or_default(),
            path_length,
            first_solution: self.first_solution,
            cost_trace: self.cost_trace,
            tree_sizes: trees.iter().map(SearchTree::len).collect(),
            counters: self.counters,
        };
        PlanOutput { report, trees }
    }
}

/// Drops consecutive duplicate configurations.
pub(crate) fn dedup_path(mut path: Vec<Config>) -> Vec<Config> {
    path.dedup_by(|b, a| a.distance(b) <= 1e-12);
    path
}
