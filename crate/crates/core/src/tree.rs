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
//! The planner tree: node arena, cost bookkeeping, nearest-neighbour index
//! and the RRT* choose-parent / rewire step.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CollisionChecker, Config};

pub type NodeId = usize;

const NONE: u32 = u32::MAX;

#[derive(Clone, Debug)]
struct KdNode {
    point: Config,
    id: NodeId,
    left: u32,
    right: u32,
    axis: u8,
}

/// Incremental KD-tree over node configurations. Never rebalanced; random
/// insertion order keeps it shallow in practice.
#[derive(Clone, Debug, Default)]
pub struct KdIndex {
    nodes: Vec<KdNode>,
}

impl KdIndex {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn insert(&mut self, point: Config, id: NodeId) {
        let dim = point.dim();
        let slot = self.nodes.len() as u32;
        if self.nodes.is_empty() {
            self.nodes.push(KdNode { point, id, left: NONE, right: NONE, axis: 0 });
            return;
        }
        let mut cur = 0usize;
        loop {
            let node = &self.nodes[cur];
            let axis = node.axis as usize;
            let go_left = point.raw()[axis] < node.point.raw()[axis];
            let next = if go_left { node.left } else { node.right };
            if next == NONE {
                let child_axis = ((axis + 1) % dim) as u8;
                let n = &mut self.nodes[cur];
                if go_left {
                    n.left = slot;
                } else {
                    n.right = slot;
                }
                self.nodes.push(KdNode { point, id, left: NONE, right: NONE, axis: child_axis });
                return;
            }
            cur = next as usize;
        }
    }

    /// Closest entry to `q`; equal distances resolve to the smaller id.
    pub fn nearest(&self, q: &Config) -> Option<(NodeId, f64)> {
        if self.nodes.is_empty() {
            return None;
        }
        let mut best = (f64::INFINITY, usize::MAX);
        self.nearest_rec(0, q, &mut best);
        Some((best.1, best.0.sqrt()))
    }

    fn nearest_rec(&self, idx: u32, q: &Config, best: &mut (f64, NodeId)) {
        let node = &self.nodes[idx as usize];
        let d2 = (node.point - *q).norm_squared();
        if d2 < best.0 || (d2 == best.0 && node.id < best.1) {
            *best = (d2, node.id);
        }
        let axis = node.axis as usize;
        let diff = q.raw()[axis] - node.point.raw()[axis];
        let (first, second) = if diff < 0.0 { (node.left, node.right) } else { (node.right, node.left) };
        if first != NONE {
            self.nearest_rec(first, q, best);
        }
        if second != NONE && diff * diff <= best.0 {
            self.nearest_rec(second, q, best);
        }
    }

    /// Entries within `radius` of `q` (inclusive), ascending by distance then id.
    pub fn within(&self, q: &Config, radius: f64) -> Vec<(NodeId, f64)> {
        let mut out = Vec::new();
        if !self.nodes.is_empty() {
            self.within_rec(0, q, radius * radius, &mut out);
        }
        out.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        out.into_iter().map(|(id, d2)| (id, d2.sqrt())).collect()
    }

    fn within_rec(&self, idx: u32, q: &Config, r2: f64, out: &mut Vec<(NodeId, f64)>) {
        let node = &self.nodes[idx as usize];
        let d2 = (node.point - *q).norm_squared();
        if d2 <= r2 {
            out.push((node.id, d2));
        }
        let axis = node.axis as usize;
        let diff = q.raw()[axis] - node.point.raw()[axis];
        let (first, second) = if diff < 0.0 { (node.left, node.right) } else { (node.right, node.left) };
        if first != NONE {
            self.within_rec(first, q, r2, out);
        }
        if second != NONE && diff * diff <= r2 {
            self.within_rec(second, q, r2, out);
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TreeNode {
    pub id: NodeId,
    pub config: Config,
    pub parent: Option<NodeId>,
    pub cost: f64,
    pub children: Vec<NodeId>,
    /// How many episodes have been started from this node.
    pub episode_start_count: u32,
}

/// One line of a tree dump.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: NodeId,
    pub config: Config,
    pub parent: Option<NodeId>,
    pub cost: f64,
}

#[derive(Clone, Debug)]
pub struct SearchTree {
    nodes: Vec<TreeNode>,
    index: KdIndex,
}

impl SearchTree {
    pub fn new(root: Config) -> Self {
        let mut index = KdIndex::default();
        index.insert(root, 0);
        SearchTree {
            nodes: vec![TreeNode { id: 0, config: root, parent: None, cost: 0.0, children: Vec::new(), episode_start_count: 0 }],
            index,
        }
    }

    pub const ROOT: NodeId = 0;

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> &TreeNode {
        &self.nodes[0]
    }

    pub fn node(&self, id: NodeId) -> Result<&TreeNode> {
        self.nodes.get(id).ok_or(Error::UnknownNode(id))
    }

    pub fn node_mut(&mut self, id: NodeId) -> Result<&mut TreeNode> {
        self.nodes.get_mut(id).ok_or(Error::UnknownNode(id))
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn config(&self, id: NodeId) -> &Config {
        &self.nodes[id].config
    }

    pub fn cost(&self, id: NodeId) -> f64 {
        self.nodes[id].cost
    }

    pub fn index_len(&self) -> usize {
        self.index.len()
    }

    pub fn insert(&mut self, config: Config, parent: NodeId) -> Result<NodeId> {
        let p = self.node(parent)?;
        config.check_dim(p.config.dim())?;
        let cost = p.cost + p.config.distance(&config);
        let id = self.nodes.len();
        self.nodes.push(TreeNode { id, config, parent: Some(parent), cost, children: Vec::new(), episode_start_count: 0 });
        self.nodes[parent].children.push(id);
        self.index.insert(config, id);
        Ok(id)
    }

    /// Node closest to `q`, ties to the smallest id.
    pub fn nearest(&self, q: &Config) -> NodeId {
        self.index.nearest(q).expect("tree always holds its root").0
    }

    /// Nodes within `radius` of `q`, ascending by distance then id.
    pub fn near(&self, q: &Config, radius: f64) -> Vec<NodeId> {
        self.index.within(q, radius).into_iter().map(|(id, _)| id).collect()
    }

    fn is_ancestor(&self, ancestor: NodeId, mut node: NodeId) -> bool {
        while let Some(p) = self.nodes[node].parent {
            if p == ancestor {
                return true;
            }
            node = p;
        }
        false
    }

    fn set_parent(&mut self, node: NodeId, parent: NodeId) {
        if let Some(old) = self.nodes[node].parent {
            self.nodes[old].children.retain(|&c| c != node);
        }
        self.nodes[node].parent = Some(parent);
        self.nodes[parent].children.push(node);
        let cost = self.nodes[parent].cost + self.nodes[parent].config.distance(&self.nodes[node].config);
        self.nodes[node].cost = cost;
        self.propagate_costs(node);
    }

    fn propagate_costs(&mut self, from: NodeId) {
        let mut stack: Vec<NodeId> = self.nodes[from].children.clone();
        while let Some(n) = stack.pop() {
            let p = self.nodes[n].parent.expect("child has a parent");
            self.nodes[n].cost = self.nodes[p].cost + self.nodes[p].config.distance(&self.nodes[n].config);
            stack.extend_from_slice(&self.nodes[n].children);
        }
    }

    /// RRT* choose-parent followed by rewire of `neighborhood` through
    /// `new_node`. Only strict cost improvements over collision-free edges
    /// are applied. Returns the number of parent changes.
    pub fn rewire(&mut self, new_node: NodeId, neighborhood: &[NodeId], checker: &CollisionChecker<'_>, resolution: f64) -> Result<usize> {
        self.node(new_node)?;
        let mut changes = 0;
        let q_new = self.nodes[new_node].config;

        let mut candidates: Vec<(f64, NodeId)> = neighborhood
            .iter()
            .filter(|&&v| v != new_node && Some(v) != self.nodes[new_node].parent)
            .map(|&v| (self.nodes[v].cost + self.nodes[v].config.distance(&q_new), v))
            .collect();
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for (c, v) in candidates {
            if !improves(c, self.nodes[new_node].cost) {
                break;
            }
            if self.is_ancestor(new_node, v) {
                continue;
            }
            if checker.segment_free(&self.nodes[v].config, &q_new, resolution)? {
                self.set_parent(new_node, v);
                changes += 1;
                break;
            }
        }

        for &v in neighborhood {
            if v == new_node || Some(v) == self.nodes[new_node].parent {
                continue;
            }
            let c = self.nodes[new_node].cost + q_new.distance(&self.nodes[v].config);
            if !improves(c, self.nodes[v].cost) || self.is_ancestor(v, new_node) {
                continue;
            }
            if checker.segment_free(&q_new, &self.nodes[v].config, resolution)? {
                self.set_parent(v, new_node);
                changes += 1;
            }
        }
        Ok(changes)
    }

    /// Configurations from the root to `id`, and the cost of that path.
    pub fn path_to_root(&self, id: NodeId) -> Result<(Vec<Config>, f64)> {
        let cost = self.node(id)?.cost;
        let mut path = Vec::new();
        let mut cur = Some(id);
        while let Some(n) = cur {
            path.push(self.nodes[n].config);
            cur = self.nodes[n].parent;
        }
        path.reverse();
        Ok((path, cost))
    }

    pub fn dump(&self) -> Vec<NodeRecord> {
        self.nodes
            .iter()
            .map(|n| NodeRecord { id: n.id, config: n.config, parent: n.parent, cost: n.cost })
            .collect()
    }

    /// Largest gap between stored costs and costs recomputed from the edges.
    pub fn cost_drift(&self) -> f64 {
        self.nodes
            .iter()
            .map(|n| {
                let (path, _) = self.path_to_root(n.id).unwrap();
                let sum: f64 = path.windows(2).map(|w| w[0].distance(&w[1])).sum();
                (sum - n.cost).abs()
            })
            .fold(0.0, f64::max)
    }
}

#[inline]
fn improves(candidate: f64, current: f64) -> bool {
    candidate < current - 1e-9 * current.abs().max(1.0)
}

/// RRT* connection radius `min(gamma * (ln n / n)^(1/d), r_max)` with
/// `gamma = 1.1 * 2 (1 + 1/d)^(1/d) (volume / unit_ball)^(1/d)`.
pub fn rrt_star_radius(n: usize, dim: usize, volume: f64, r_max: f64) -> f64 {
    let d = dim as f64;
    let unit_ball = if dim == 2 { std::f64::consts::PI } else { 4.0 / 3.0 * std::f64::consts::PI };
    let gamma = 1.1 * 2.0 * (1.0 + 1.0 / d).powf(1.0 / d) * (volume / unit_ball).powf(1.0 / d);
    let n = n.max(2) as f64;
    (gamma * (n.ln() / n).powf(1.0 / d)).min(r_max)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::geometry::{Aabb, Environment, Obstacle, Sphere};

    fn p2(x: f64, y: f64) -> Config {
        Config::new2(x, y)
    }

    fn empty_env() -> Environment {
        Environment::empty(Aabb::new(p2(-100.0, -100.0), p2(100.0, 100.0)).unwrap()).unwrap()
    }

    #[test]
    fn insert_costs() {
        let mut t = SearchTree::new(p2(0.0, 0.0));
        let a = t.insert(p2(3.0, 4.0), SearchTree::ROOT).unwrap();
        assert_eq!(t.cost(a), 5.0);
        let mut t = SearchTree::new(p2(0.0, 0.0));
        let a = t.insert(p2(3.0, 0.0), 0).unwrap();
        let b = t.insert(p2(3.0, 4.0), a).unwrap();
        assert_eq!(t.cost(b), 7.0);
        assert!(matches!(t.insert(p2(1.0, 1.0), 99), Err(Error::UnknownNode(99))));
    }

    #[test]
    fn index_tracks_nodes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut t = SearchTree::new(p2(0.0, 0.0));
        for _ in 0..1000 {
            let parent = rng.gen_range(0..t.len());
            t.insert(p2(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0)), parent).unwrap();
        }
        assert_eq!(t.index_len(), t.len());
        assert_eq!(t.len(), 1001);
    }

    #[test]
    fn nearest_examples() {
        let t = SearchTree::new(p2(4.0, 4.0));
        assert_eq!(t.nearest(&p2(-50.0, 3.0)), 0);
        let mut t = SearchTree::new(p2(0.0, 0.0));
        let a = t.insert(p2(1.0, 1.0), 0).unwrap();
        t.insert(p2(2.0, 2.0), a).unwrap();
        assert_eq!(t.nearest(&p2(1.0, 1.0)), a);
        // Equidistant from 0 and the node at (2, 0): smallest id wins.
        t.insert(p2(2.0, 0.0), 0).unwrap();
        assert_eq!(t.nearest(&p2(1.0, -1.0)), 0);
    }

    #[test]
    fn near_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut t = SearchTree::new(p2(0.0, 0.0));
        for i in 0..1000 {
            t.insert(p2(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0)), i).unwrap();
        }
        assert!(t.near(&p2(0.5, 0.5), 0.0).is_empty());
        assert_eq!(t.near(&p2(0.0, 0.0), 0.0), vec![0]);
        assert_eq!(t.near(&p2(0.0, 0.0), 30.0).len(), 1001);
        for _ in 0..100 {
            let q = p2(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
            let r = rng.gen_range(0.1..3.0);
            let mut brute: Vec<(f64, usize)> = t.nodes().iter().map(|n| (n.config.distance(&q), n.id)).filter(|(d, _)| *d <= r).collect();
            brute.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            assert_eq!(t.near(&q, r), brute.into_iter().map(|(_, id)| id).collect::<Vec<_>>());
        }
    }

    #[test]
    fn rewire_ties_are_not_improvements() {
        let env = empty_env();
        let checker = CollisionChecker::new(&env);
        let mut t = SearchTree::new(p2(0.0, 0.0));
        let a = t.insert(p2(10.0, 0.0), 0).unwrap();
        let n = t.insert(p2(5.0, 0.0), 0).unwrap();
        assert_eq!(t.rewire(n, &[0, a], &checker, 0.05).unwrap(), 0);
        assert_eq!(t.node(a).unwrap().parent, Some(0));

        let mut t = SearchTree::new(p2(0.0, 0.0));
        let a = t.insert(p2(6.0, 8.0), 0).unwrap();
        let n = t.insert(p2(6.0, 0.0), 0).unwrap();
        assert_eq!(t.rewire(n, &[0, a], &checker, 0.05).unwrap(), 0);
        assert_eq!(t.cost(a), 10.0);
    }

    #[test]
    fn rewire_reparents_through_better_node() {
        let env = empty_env();
        let checker = CollisionChecker::new(&env);
        let mut t = SearchTree::new(p2(0.0, 0.0));
        let a = t.insert(p2(0.0, 5.0), 0).unwrap();
        let b = t.insert(p2(5.0, 5.0), a).unwrap();
        let c = t.insert(p2(6.0, 6.0), b).unwrap();
        let n = t.insert(p2(4.0, 4.0), a).unwrap();
        let changes = t.rewire(n, &[0, a, b], &checker, 0.05).unwrap();
        // n takes the root as parent, then b moves under n; c follows b.
        assert_eq!(changes, 2);
        assert_eq!(t.node(n).unwrap().parent, Some(0));
        assert_eq!(t.node(b).unwrap().parent, Some(n));
        assert!((t.cost(c) - (32f64.sqrt() + 2.0 * 2f64.sqrt())).abs() < 1e-12);
        assert!(t.cost_drift() < 1e-12);
        let (path, len) = t.path_to_root(c).unwrap();
        assert_eq!(path, vec![p2(0.0, 0.0), p2(4.0, 4.0), p2(5.0, 5.0), p2(6.0, 6.0)]);
        assert!((len - path.windows(2).map(|w| w[0].distance(&w[1])).sum::<f64>()).abs() < 1e-12);
    }

    #[test]
    fn path_to_root_examples() {
        let t = SearchTree::new(p2(1.0, 2.0));
        assert_eq!(t.path_to_root(0).unwrap(), (vec![p2(1.0, 2.0)], 0.0));
        let mut t = SearchTree::new(p2(0.0, 0.0));
        let a = t.insert(p2(3.0, 0.0), 0).unwrap();
        let b = t.insert(p2(3.0, 4.0), a).unwrap();
        assert_eq!(t.path_to_root(b).unwrap(), (vec![p2(0.0, 0.0), p2(3.0, 0.0), p2(3.0, 4.0)], 7.0));
        assert!(t.path_to_root(17).is_err());
    }

    #[test]
    fn radius_shrinks_and_caps() {
        let r = rrt_star_radius(10, 2, 400.0, 2.0);
        assert_eq!(r, 2.0);
        let small = rrt_star_radius(1_000_000, 2, 400.0, 2.0);
        assert!(small < 0.2 && small > 0.0);
    }

    /// Expected costs after one rewire, derived from the pre-rewire snapshot:
    /// the new node takes the cheapest valid neighbour as parent, then each
    /// neighbour keeps the cheaper of its old cost and the route through the
    /// new node; descendants follow their ancestors.
    fn rewire_oracle(t: &SearchTree, new: NodeId, nbhd: &[NodeId], valid: &dyn Fn(&Config, &Config) -> bool) -> Vec<f64> {
        let mut parent: Vec<Option<NodeId>> = t.nodes().iter().map(|n| n.parent).collect();
        let q = t.config(new);
        let mut best = t.cost(new);
        for &v in nbhd {
            if v == new || Some(v) == parent[new] {
                continue;
            }
            let c = t.cost(v) + t.config(v).distance(q);
            if c < best - 1e-9 * best.max(1.0) && valid(t.config(v), q) {
                best = c;
                parent[new] = Some(v);
            }
        }
        for &v in nbhd {
            if v == new || Some(v) == parent[new] {
                continue;
            }
            let c = best + q.distance(t.config(v));
            if c < t.cost(v) - 1e-9 * t.cost(v).max(1.0) && valid(q, t.config(v)) {
                parent[v] = Some(new);
            }
        }
        (0..t.len())
            .map(|mut n| {
                let mut cost = 0.0;
                while let Some(p) = parent[n] {
                    cost += t.config(p).distance(t.config(n));
                    n = p;
                }
                cost
            })
            .collect()
    }

    proptest! {
        #[test]
        fn nearest_matches_linear_scan(pts in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 1..100), qs in prop::collection::vec((-12.0f64..12.0, -12.0f64..12.0), 100)) {
            let mut t = SearchTree::new(p2(pts[0].0, pts[0].1));
            for (i, (x, y)) in pts.iter().enumerate().skip(1) {
                t.insert(p2(*x, *y), i - 1).unwrap();
            }
            for (x, y) in qs {
                let q = p2(x, y);
                let brute = t.nodes().iter().map(|n| (n.config.distance(&q), n.id)).min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))).unwrap().1;
                prop_assert_eq!(t.nearest(&q), brute);
            }
        }

        #[test]
        fn rewire_matches_parent_assignment_oracle(seed in 0u64..10_000, n in 5usize..50) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let bounds = Aabb::new(p2(0.0, 0.0), p2(10.0, 10.0)).unwrap();
            let obstacles = (0..4).map(|_| Obstacle::Sphere(Sphere::new(p2(rng.gen_range(1.0..9.0), rng.gen_range(1.0..9.0)), rng.gen_range(0.3..1.2)).unwrap())).collect();
            let env = Environment::new(2, bounds, obstacles).unwrap();
            let checker = CollisionChecker::new(&env);
            let free = |rng: &mut ChaCha8Rng| loop {
                let q = p2(rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0));
                if !env.is_occupied(&q) { return q; }
            };
            let mut t = SearchTree::new(free(&mut rng));
            for _ in 1..n {
                let q = free(&mut rng);
                let parent = rng.gen_range(0..t.len());
                t.insert(q, parent).unwrap();
            }
            let q = free(&mut rng);
            let near = t.nearest(&q);
            let new = t.insert(q, near).unwrap();
            let nbhd = t.near(&q, rng.gen_range(1.0..8.0));
            let oracle = rewire_oracle(&t, new, &nbhd, &|a, b| !env.segment_hits(a, b));
            let before: Vec<f64> = t.nodes().iter().map(|n| n.cost).collect();
            t.rewire(new, &nbhd, &checker, 0.05).unwrap();
            for (i, node) in t.nodes().iter().enumerate() {
                prop_assert!((node.cost - oracle[i]).abs() < 1e-9, "node {}: {} vs {}", i, node.cost, oracle[i]);
                prop_assert!(node.cost <= before[i] + 1e-12);
            }
            prop_assert!(t.cost_drift() < 1e-9);
        }
    }
}
