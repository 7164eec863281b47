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
//! The episodic exploration loop shared by ERRT, ERRT* and ERRT-Connect.

use rand::Rng;

use super::bisection::{dynamic_bisection, linear_scan, EpisodeState, CONVERGED};
use super::connect::{connect_and_swap, Bridge};
use super::{sample_uniform, PlanOutput, Run};
use crate::episode::{gen_path, EpisodeGenerator};
use crate::error::Result;
use crate::geometry::Environment;
use crate::tree::{rrt_star_radius, NodeId, SearchTree};

/// Seeds a new episode at the tree node nearest to a uniform sample.
pub fn episode_restart<R: Rng + ?Sized>(tree: &SearchTree, env: &Environment, rng: &mut R) -> NodeId {
    let q = sample_uniform(env.bounds(), rng);
    tree.nearest(&q)
}

pub(super) fn errt(mut run: Run<'_>, generator: &dyn EpisodeGenerator) -> Result<PlanOutput> {
    let params = run.params;
    let env = run.env;
    let (start, goal) = (run.problem.start, run.problem.goal);
    let star = params.variant.is_star();
    let connect = params.variant.is_connect();
    let gen_cfg = params.effective_generator_config();
    let l_max = params.effective_l_max();
    let alpha_jump = params.effective_alpha_jump();
    let no_jump = params.ablations.no_jump;
    let linear = params.ablations.no_bisection;
    let tol = params.goal_tolerance;
    let res = params.collision_resolution;
    let volume = env.bounds().volume();
    let dim = env.dim();

    let mut trees = [SearchTree::new(start), SearchTree::new(goal)];
    let targets = [goal, start];
    let mut active = 0usize;
    let mut newest: [NodeId; 2] = [0, 0];
    let mut goal_nodes: Vec<NodeId> = Vec::new();
    let mut bridge: Option<Bridge> = None;
    let mut ep = EpisodeState::initial();

    while run.should_stop().is_none() {
        run.iterations += 1;
        let target = targets[active];

        if ep.step_end && !ep.jump {
            let seed = if ep.episode_end {
                run.counters.episodes += 1;
                let n = episode_restart(&trees[active], env, &mut run.rng);
                ep.begin_episode(trees[active].config(n).distance(&target));
                n
            } else {
                ep.last_knot_node.expect("a step only continues from an accepted last knot")
            };
            let path = gen_path(generator, &mut trees[active], seed, &target, env, &gen_cfg, ep.step_count as usize, &mut run.rng)?;
            ep.begin_step(path, seed);
            if ep.len() < 1 {
                // Nothing to probe: close the episode right away.
                run.counters.steps += 1;
                ep.finish_step(l_max, alpha_jump, no_jump);
                ep.episode_end = true;
                ep.jump = ep.min_goal_distance < alpha_jump && !no_jump;
                continue;
            }
            if linear {
                ep.k = 1;
            }
        }

        let jumping = ep.jump;
        let q_new = if jumping { target } else { ep.a_r.knots[ep.k as usize] };
        let tree = &mut trees[active];
        let near_id = tree.nearest(&q_new);
        let q_near = *tree.config(near_id);
        let mut added = None;
        let isvalid = if jumping && star && q_near.distance(&q_new) <= tol {
            // The goal is already in the tree: look for a cheaper parent.
            let r = rrt_star_radius(tree.len(), dim, volume, params.rewire_radius_cap());
            let nb = tree.near(&q_near, r);
            tree.rewire(near_id, &nb, &run.checker, res)?;
            true
        } else {
            let pruned = star && run.solved() && start.distance(&q_new) + q_new.distance(&goal) > run.best_cost() + 1e-9;
            let valid = !pruned && run.checker.segment_free(&q_near, &q_new, res)?;
            if valid {
                let id = tree.insert(q_new, near_id)?;
                if star {
                    let r = rrt_star_radius(tree.len(), dim, volume, params.rewire_radius_cap());
                    let nb = tree.near(&q_new, r);
                    tree.rewire(id, &nb, &run.checker, res)?;
                }
                newest[active] = id;
                added = Some(id);
            }
            valid
        };

        if let Some(id) = added {
            let d = q_new.distance(&target);
            ep.min_goal_distance = ep.min_goal_distance.min(d);
            if !jumping && ep.k == ep.len() {
                ep.last_knot_node = Some(id);
            }
            if d <= tol {
                if connect {
                    let b = if active == 0 {
                        Bridge::join(&trees[0], id, &trees[1], SearchTree::ROOT)?
                    } else {
                        Bridge::join(&trees[0], SearchTree::ROOT, &trees[1], id)?
                    };
                    bridge.get_or_insert(b);
                } else {
                    goal_nodes.push(id);
                }
            }
        }

        let mut episode_over = false;
        if jumping {
            run.counters.jumps_attempted += 1;
            if isvalid {
                run.counters.jumps_succeeded += 1;
            }
            ep.jump = false;
            ep.step_end = true;
            ep.episode_end = true;
            episode_over = true;
        } else {
            let k = if linear { linear_scan(&mut ep, isvalid) } else { dynamic_bisection(&mut ep, isvalid) };
            if k == CONVERGED {
                run.counters.steps += 1;
                ep.finish_step(l_max, alpha_jump, no_jump);
                episode_over = ep.episode_end && !ep.jump;
            }
        }

        if connect && episode_over && bridge.is_none() {
            run.counters.connect_attempts += 1;
            let from = active;
            let (b, last) = connect_and_swap(&mut trees, &mut active, newest[from], params.extension_step, &run.checker, res)?;
            newest[1 - from] = last;
            bridge = b;
        }

        if let Some(b) = &bridge {
            run.offer_cost(b.cost);
        } else if let Some(best) = goal_nodes.iter().map(|&g| trees[0].cost(g)).min_by(f64::total_cmp) {
            run.offer_cost(best);
        }
    }

    let path = if connect {
        bridge.map(|b| b.path)
    } else {
        best_goal_path(&trees[0], &goal_nodes)?
    };
    let trees = if connect { trees.into() } else { vec![std::mem::replace(&mut trees[0], SearchTree::new(start))] };
    Ok(run.finish(trees, path))
}

pub(super) fn best_goal_path(tree: &SearchTree, goal_nodes: &[NodeId]) -> Result<Option<Vec<crate::geometry::Config>>> {
    match goal_nodes.iter().copied().min_by(|&a, &b| tree.cost(a).total_cmp(&tree.cost(b)).then(a.cmp(&b))) {
        Some(g) => Ok(Some(tree.path_to_root(g)?.0)),
        None => Ok(None),
    }
}
