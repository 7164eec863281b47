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

use super::{dedup_path, steer};
use crate::error::Result;
use crate::geometry::{CollisionChecker, Config};
use crate::spline::polyline_length;
use crate::tree::{NodeId, SearchTree};

/// A start-to-goal path through both trees of a bidirectional search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bridge {
    pub path: Vec<Config>,
    pub cost: f64,
}

impl Bridge {
    /// Joins the root path of `start_node` in the start tree with the
    /// reversed root path of `goal_node` in the goal tree.
    pub fn join(start_tree: &SearchTree, start_node: NodeId, goal_tree: &SearchTree, goal_node: NodeId) -> Result<Bridge> {
        let (mut path, _) = start_tree.path_to_root(start_node)?;
        let (mut tail, _) = goal_tree.path_to_root(goal_node)?;
        tail.reverse();
        path.extend(tail);
        let path = dedup_path(path);
        Ok(Bridge { cost: polyline_length(&path), path })
    }
}

/// Extends `tree` from its node nearest to `target` in straight steps of
/// at most `step` until `target` is reached or a step collides. Returns
/// the last node and whether it sits on `target`.
pub fn greedy_connect(tree: &mut SearchTree, target: &Config, step: f64, checker: &CollisionChecker<'_>, resolution: f64) -> Result<(NodeId, bool)> {
    let mut cur = tree.nearest(target);
    loop {
        let q = *tree.config(cur);
        if q.distance(target) <= 1e-12 {
            return Ok((cur, true));
        }
        let next = steer(&q, target, step);
        if !checker.segment_free(&q, &next, resolution)? {
            return Ok((cur, false));
        }
        cur = tree.insert(next, cur)?;
    }
}

/// Tries to reach node `newest` of the active tree from the other tree,
/// then swaps the roles of the two trees. `trees[0]` is rooted at the
/// start. Returns the bridged path on success and the other tree's last
/// node.
pub fn connect_and_swap(
    trees: &mut [SearchTree; 2],
    active: &mut usize,
    newest: NodeId,
    step: f64,
    checker: &CollisionChecker<'_>,
    resolution: f64,
) -> Result<(Option<Bridge>, NodeId)> {
    let a = *active;
    let b = 1 - a;
    let target = *trees[a].config(newest);
    let (last, reached) = greedy_connect(&mut trees[b], &target, step, checker, resolution)?;
    *active = b;
    if !reached {
        return Ok((None, last));
    }
    let bridge = if a == 0 {
        Bridge::join(&trees[0], newest, &trees[1], last)?
    } else {
        Bridge::join(&trees[0], last, &trees[1], newest)?
    };
    Ok((Some(bridge), last))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Aabb, Environment, Obstacle, OrientedBox};

    fn p2(x: f64, y: f64) -> Config {
        Config::new2(x, y)
    }

    #[test]
    fn clear_line_connects() {
        let env = Environment::empty(Aabb::new(p2(0.0, 0.0), p2(20.0, 20.0)).unwrap()).unwrap();
        let checker = CollisionChecker::new(&env);
        let mut trees = [SearchTree::new(p2(1.0, 1.0)), SearchTree::new(p2(19.0, 1.0))];
        let n = trees[0].insert(p2(5.0, 3.0), 0).unwrap();
        let mut active = 0;
        let (bridge, _) = connect_and_swap(&mut trees, &mut active, n, 2.0, &checker, 0.05).unwrap();
        let bridge = bridge.unwrap();
        assert_eq!(active, 1);
        assert_eq!(bridge.path.first(), Some(&p2(1.0, 1.0)));
        assert_eq!(bridge.path.last(), Some(&p2(19.0, 1.0)));
        for w in bridge.path.windows(2) {
            assert!(checker.segment_free(&w[0], &w[1], 0.005).unwrap());
        }
    }

    #[test]
    fn blocked_connection_still_swaps() {
        let wall = Obstacle::Box(OrientedBox::axis_aligned(p2(10.0, 10.0), p2(0.5, 10.0)).unwrap());
        let env = Environment::new(2, Aabb::new(p2(0.0, 0.0), p2(20.0, 20.0)).unwrap(), vec![wall]).unwrap();
        let checker = CollisionChecker::new(&env);
        let mut trees = [SearchTree::new(p2(1.0, 1.0)), SearchTree::new(p2(19.0, 1.0))];
        let mut active = 1;
        let (bridge, last) = connect_and_swap(&mut trees, &mut active, 0, 2.0, &checker, 0.05).unwrap();
        assert!(bridge.is_none());
        assert_eq!(active, 0);
        assert!(trees[0].config(last).get(0) < 9.5);
    }

    #[test]
    fn greedy_connect_matches_straight_line_oracle() {
        use rand::{Rng, SeedableRng};
        // Corridor with a few posts; the greedy walk succeeds exactly when
        // the straight segment from the nearest node is free.
        let posts = vec![
            Obstacle::Box(OrientedBox::axis_aligned(p2(6.0, 2.0), p2(0.3, 0.6)).unwrap()),
            Obstacle::Box(OrientedBox::axis_aligned(p2(12.0, 3.0), p2(0.3, 0.6)).unwrap()),
            Obstacle::Box(OrientedBox::axis_aligned(p2(9.0, 1.0), p2(0.3, 0.4)).unwrap()),
        ];
        let env = Environment::new(2, Aabb::new(p2(0.0, 0.0), p2(20.0, 4.0)).unwrap(), posts).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let checker = CollisionChecker::new(&env);
            let mut tree = SearchTree::new(p2(19.0, 2.0));
            for _ in 0..3 {
                let q = p2(rng.gen_range(14.0..19.5), rng.gen_range(0.2..3.8));
                if !env.is_occupied(&q) && checker.segment_free(tree.config(0), &q, 0.05).unwrap() {
                    tree.insert(q, 0).unwrap();
                }
            }
            let target = p2(rng.gen_range(0.5..8.0), rng.gen_range(0.2..3.8));
            if env.is_occupied(&target) {
                continue;
            }
            let from = *tree.config(tree.nearest(&target));
            let oracle = (0..=20_000).all(|i| !env.is_occupied(&from.lerp(&target, i as f64 / 20_000.0)));
            let (_, reached) = greedy_connect(&mut tree, &target, 2.0, &checker, 0.05).unwrap();
            assert_eq!(reached, oracle, "{from:?} -> {target:?}");
        }
    }
}
