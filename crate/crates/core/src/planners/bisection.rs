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
//! Episode bookkeeping and the dynamic bisection search over a candidate
//! path's knots.

use serde::{Deserialize, Serialize};

use crate::spline::ResampledPath;
use crate::tree::NodeId;

/// Cursor value meaning "this step has converged".
pub const CONVERGED: i64 = -1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeState {
    /// Current candidate path; knot 0 is the step's start node.
    pub a_r: ResampledPath,
    pub k: i64,
    pub k_lower: i64,
    pub k_upper: i64,
    pub step_count: u32,
    pub min_goal_distance: f64,
    pub step_end: bool,
    pub episode_end: bool,
    pub jump: bool,
    /// Node the current step started from.
    pub step_start: NodeId,
    /// Node created for the last knot, when it was accepted.
    pub last_knot_node: Option<NodeId>,
}

impl EpisodeState {
    /// State before the first episode: both end flags set so the loop
    /// begins with a restart.
    pub fn initial() -> Self {
        EpisodeState {
            a_r: ResampledPath { knots: Vec::new(), spacing: 0.0 },
            k: CONVERGED,
            k_lower: 0,
            k_upper: 0,
            step_count: 0,
            min_goal_distance: f64::INFINITY,
            step_end: true,
            episode_end: true,
            jump: false,
            step_start: 0,
            last_knot_node: None,
        }
    }

    /// `LEN(a_r)`: index of the last knot.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> i64 {
        self.a_r.knots.len() as i64 - 1
    }

    /// Starts a step on `path` from `start`: probe the last knot first.
    pub fn begin_step(&mut self, path: ResampledPath, start: NodeId) {
        self.a_r = path;
        self.k = self.len();
        self.k_lower = 0;
        self.k_upper = self.len() + 1;
        self.step_end = false;
        self.step_start = start;
        self.last_knot_node = None;
    }

    /// Starts a new episode seeded at a node `seed_distance` from the goal.
    pub fn begin_episode(&mut self, seed_distance: f64) {
        self.step_count = 0;
        self.min_goal_distance = seed_distance;
        self.episode_end = false;
        self.jump = false;
    }

    /// Sets the step/episode/jump flags once the cursor has converged.
    pub fn finish_step(&mut self, l_max: u32, alpha_jump: f64, no_jump: bool) {
        self.step_end = true;
        self.step_count += 1;
        self.episode_end = self.step_count >= l_max || self.k_lower < self.len();
        self.jump = self.episode_end && self.min_goal_distance < alpha_jump && !no_jump;
    }
}

/// One bisection update after probing knot `state.k`. Returns the next
/// knot to probe or [`CONVERGED`].
pub fn dynamic_bisection(state: &mut EpisodeState, isvalid: bool) -> i64 {
    if isvalid {
        state.k_lower = state.k;
        state.k_upper = state.len() + 1;
    } else {
        state.k_upper = state.k;
    }
    state.k = if state.k_upper - state.k_lower > 1 { (state.k_upper + state.k_lower) / 2 } else { CONVERGED };
    state.k
}

/// Front-to-back replacement used by the no-bisection ablation: probe
/// knots in order and stop at the first failure.
pub fn linear_scan(state: &mut EpisodeState, isvalid: bool) -> i64 {
    if isvalid {
        state.k_lower = state.k;
        state.k = if state.k < state.len() { state.k + 1 } else { CONVERGED };
    } else {
        state.k_upper = state.k;
        state.k = CONVERGED;
    }
    state.k
}
