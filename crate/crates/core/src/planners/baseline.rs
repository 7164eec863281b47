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
//! Classical RRT, RRT* and RRT-Connect with the same instrumentation as
//! the episodic planners.

use rand::Rng;

use super::connect::{greedy_connect, Bridge};
use super::episodic::best_goal_path;
use super::{sample_uniform, steer, PlanOutput, Run};
use crate::error::Result;
use crate::tree::{rrt_star_radius, NodeId, SearchTree};

pub(super) fn rrt(mut run: Run<'_>) -> Result<PlanOutput> {
    let params = run.params;
    let env = run.env;
    let (start, goal) = (run.problem.start, run.problem.goal);
    let star = params.variant.is_star();
    let volume = env.bounds().volume();
    let mut tree = SearchTree::new(start);
    let mut goal_nodes: Vec<NodeId> = Vec::new();

    while run.should_stop().is_none() {
        run.iterations += 1;
        let q_rand = if run.rng.gen_bool(params.goal_bias) { goal } else { sample_uniform(env.bounds(), &mut run.rng) };
        let near_id = tree.nearest(&q_rand);
        let q_near = *tree.config(near_id);
        let q_new = steer(&q_near, &q_rand, params.extension_step);
        if q_near.distance(&q_new) <= 1e-12 {
            continue;
        }
        if star && run.solved() && start.distance(&q_new) + q_new.distance(&goal) > run.best_cost() + 1e-9 {
            continue;
        }
        if !run.segment_free(&q_near, &q_new)? {
            continue;
        }
        let id = tree.insert(q_new, near_id)?;
        if star {
            let r = rrt_star_radius(tree.len(), env.dim(), volume, params.rewire_radius_cap());
            let nb = tree.near(&q_new, r);
            tree.rewire(id, &nb, &run.checker, params.collision_resolution)?;
        }
        if q_new.distance(&goal) <= params.goal_tolerance {
            goal_nodes.push(id);
        }
        if let Some(best) = goal_nodes.iter().map(|&g| tree.cost(g)).min_by(f64::total_cmp) {
            run.offer_cost(best);
        }
    }
    let path = best_goal_path(&tree, &goal_nodes)?;
    Ok(run.finish(vec![tree], path))
}

pub(super) fn rrt_connect(mut run: Run<'_>) -> Result<PlanOutput> {
    let params = run.params;
    let env = run.env;
    let mut trees = [SearchTree::new(run.problem.start), SearchTree::new(run.problem.goal)];
    let mut active = 0usize;
    let mut bridge: Option<Bridge> = None;

    while run.should_stop().is_none() && bridge.is_none() {
        run.iterations += 1;
        let q_rand = sample_uniform(env.bounds(), &mut run.rng);
        let (a, b) = (active, 1 - active);
        let near_id = trees[a].nearest(&q_rand);
        let q_near = *trees[a].config(near_id);
        let q_new = steer(&q_near, &q_rand, params.extension_step);
        if q_near.distance(&q_new) > 1e-12 && run.segment_free(&q_near, &q_new)? {
            let id = trees[a].insert(q_new, near_id)?;
            run.counters.connect_attempts += 1;
            let (last, reached) = greedy_connect(&mut trees[b], &q_new, params.extension_step, &run.checker, params.collision_resolution)?;
            if reached {
                let joined = if a == 0 { Bridge::join(&trees[0], id, &trees[1], last)? } else { Bridge::join(&trees[0], last, &trees[1], id)? };
                run.offer_cost(joined.cost);
                bridge = Some(joined);
            }
        }
        active = b;
    }
    Ok(run.finish(trees.into(), bridge.map(|b| b.path)))
}
