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
use errt::envgen::fixtures;
use errt::episode::GeneratorRegistry;
use errt::geometry::{segment_sample_count, Aabb, Config, Environment, Obstacle, OrientedBox, Sphere};
use errt::planners::*;
use errt::tree::SearchTree;
use errt::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn p2(x: f64, y: f64) -> Config {
    Config::new2(x, y)
}

fn empty_20() -> Environment {
    Environment::empty(Aabb::new(p2(0.0, 0.0), p2(20.0, 20.0)).unwrap()).unwrap()
}

/// Wall across x = 10 with a single 0.8 m gap.
fn gap_map() -> Environment {
    let walls = vec![
        Obstacle::Box(OrientedBox::axis_aligned(p2(10.0, 15.2), p2(0.25, 4.8)).unwrap()),
        Obstacle::Box(OrientedBox::axis_aligned(p2(10.0, 4.8), p2(0.25, 4.8)).unwrap()),
    ];
    Environment::new(2, Aabb::new(p2(0.0, 0.0), p2(20.0, 20.0)).unwrap(), walls).unwrap()
}

fn params(variant: Variant, seed: u64) -> PlannerParams {
    PlannerParams { variant, seed, ..PlannerParams::default() }
}

#[test]
fn empty_map_paths_are_near_straight() {
    let env = empty_20();
    let reg = GeneratorRegistry::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for v in Variant::ALL {
        let mut ratios = Vec::new();
        for seed in 0..10 {
            let (start, goal) = loop {
                let a = p2(rng.gen_range(1.0..19.0), rng.gen_range(1.0..19.0));
                let b = p2(rng.gen_range(1.0..19.0), rng.gen_range(1.0..19.0));
                if a.distance(&b) >= 10.0 {
                    break (a, b);
                }
            };
            let out = plan(&env, &Problem { start, goal }, &params(v, seed), &reg).unwrap();
            let r = &out.report;
            assert!(r.success, "{v} seed {seed}");
            let ratio = r.path_length.unwrap() / start.distance(&goal).max(1e-9);
            if v.is_episodic() {
                assert!(ratio <= 1.05, "{v} seed {seed}: ratio {ratio}");
            }
            ratios.push(ratio);
            assert_eq!(r.path[0], start);
            assert!(r.path.last().unwrap().distance(&goal) <= r.params.goal_tolerance);
        }
        // Single classical runs are random walks; bound their mean.
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        assert!(mean <= 1.5, "{v}: mean ratio {mean}");
    }
}

#[test]
fn invalid_problems_are_reported() {
    let wall = Obstacle::Sphere(Sphere::new(p2(10.0, 10.0), 1.0).unwrap());
    let env = Environment::new(2, Aabb::new(p2(0.0, 0.0), p2(20.0, 20.0)).unwrap(), vec![wall]).unwrap();
    let reg = GeneratorRegistry::default();
    for v in Variant::ALL {
        let inside = Problem { start: p2(1.0, 1.0), goal: p2(10.2, 10.0) };
        assert!(matches!(plan(&env, &inside, &params(v, 0), &reg), Err(Error::InvalidProblem(_))));
        let outside = Problem { start: p2(-1.0, 1.0), goal: p2(5.0, 5.0) };
        assert!(matches!(plan(&env, &outside, &params(v, 0), &reg), Err(Error::InvalidProblem(_))));
    }
    let bad = PlannerParams { anytime: true, ..params(Variant::Errt, 0) };
    let ok = Problem { start: p2(1.0, 1.0), goal: p2(5.0, 5.0) };
    assert!(matches!(plan(&env, &ok, &bad, &reg), Err(Error::InvalidParameter(_))));
}

#[test]
fn reports_repeat_exactly() {
    let env = gap_map();
    let reg = GeneratorRegistry::default();
    let problem = Problem { start: p2(2.0, 3.0), goal: p2(18.0, 16.0) };
    for v in Variant::ALL {
        let p = PlannerParams { time_limit: None, max_iterations: Some(20_000), ..params(v, 7) };
        let a = plan(&env, &problem, &p, &reg).unwrap().report.without_timing();
        let b = plan(&env, &problem, &p, &reg).unwrap().report.without_timing();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap(), "{v}");
        let back = PlannerReport::from_json(&a.to_json().unwrap()).unwrap();
        assert_eq!(back, a);
    }
}

#[test]
fn narrow_gap_is_solved_by_every_variant() {
    let reg = GeneratorRegistry::default();
    for v in Variant::ALL {
        let mut ok = 0;
        for seed in 0..100u64 {
            let (env, problem) = fixtures::narrow_gap(seed);
            let out = plan(&env, &problem, &PlannerParams { time_limit: Some(10.0), ..params(v, seed) }, &reg).unwrap();
            if out.report.success {
                ok += 1;
                assert_eq!(path_violations(&env, &out.report.path, out.report.params.collision_resolution), 0);
            }
        }
        assert!(ok >= 95, "{v}: {ok}/100");
    }
}

#[test]
fn restarts_follow_voronoi_volumes() {
    let env = empty_20();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut tree = SearchTree::new(p2(10.0, 10.0));
    for _ in 0..9 {
        let q = p2(rng.gen_range(0.0..20.0), rng.gen_range(0.0..20.0));
        tree.insert(q, 0).unwrap();
    }
    // Oracle: Voronoi cell areas by a 1000 x 1000 midpoint grid.
    let mut area = vec![0.0; tree.len()];
    let n = 1000;
    for i in 0..n {
        for j in 0..n {
            let q = p2((i as f64 + 0.5) * 20.0 / n as f64, (j as f64 + 0.5) * 20.0 / n as f64);
            let best = (0..tree.len()).min_by(|&a, &b| tree.config(a).distance(&q).total_cmp(&tree.config(b).distance(&q))).unwrap();
            area[best] += 1.0 / (n * n) as f64;
        }
    }
    let mut counts = vec![0usize; tree.len()];
    let draws = 100_000;
    for _ in 0..draws {
        counts[episode_restart(&tree, &env, &mut rng)] += 1;
    }
    for (id, (&c, &a)) in counts.iter().zip(&area).enumerate() {
        let f = c as f64 / draws as f64;
        // 2% of the cell volume, widened by four binomial standard errors.
        let sigma = (a * (1.0 - a) / draws as f64).sqrt();
        assert!((f - a).abs() <= 0.02 * a + 4.0 * sigma, "node {id}: {f} vs {a}");
    }
    let single = SearchTree::new(p2(3.0, 3.0));
    assert!((0..100).all(|_| episode_restart(&single, &env, &mut rng) == 0));
}

#[test]
fn collision_checks_match_the_sample_count() {
    // One goal-biased extension of 1 m: the only checks are its samples.
    let env = empty_20();
    let reg = GeneratorRegistry::default();
    let problem = Problem { start: p2(5.0, 5.0), goal: p2(6.0, 5.0) };
    let p = PlannerParams { goal_bias: 1.0, ..params(Variant::Rrt, 0) };
    let r = plan(&env, &problem, &p, &reg).unwrap().report;
    assert!(r.success);
    assert_eq!(r.iterations, 1);
    assert_eq!(r.collision_checks, segment_sample_count(1.0, p.collision_resolution));
}

#[test]
fn episodes_respect_l_max() {
    let env = empty_20();
    let reg = GeneratorRegistry::default();
    let problem = Problem { start: p2(1.0, 1.0), goal: p2(19.0, 19.0) };
    for l_max in [1u32, 2, 3] {
        let p = PlannerParams { l_max, ..params(Variant::Errt, 1) };
        let r = plan(&env, &problem, &p, &reg).unwrap().report;
        assert!(r.success);
        assert!(r.counters.steps <= r.counters.episodes * l_max as u64);
    }
}

#[test]
fn jump_bridges_the_last_gap() {
    let reg = GeneratorRegistry::default();
    for seed in 0..5 {
        let (env, problem) = fixtures::near_goal(seed);
        let p = PlannerParams { time_limit: None, max_iterations: Some(5_000), ..params(Variant::Errt, seed) };
        let r = plan(&env, &problem, &p, &reg).unwrap().report;
        assert!(r.success && r.counters.jumps_succeeded >= 1, "seed {seed}");

        // Gate: a jump threshold below the stall distance never fires.
        let gated = PlannerParams { alpha_jump: 1e-3, ..p.clone() };
        let r = plan(&env, &problem, &gated, &reg).unwrap().report;
        assert_eq!(r.counters.jumps_attempted, 0);
    }
}

#[test]
fn anytime_cost_never_increases() {
    let env = gap_map();
    let reg = GeneratorRegistry::default();
    let problem = Problem { start: p2(2.0, 3.0), goal: p2(18.0, 16.0) };
    for v in [Variant::RrtStar, Variant::ErrtStar] {
        let p = PlannerParams { anytime: true, time_limit: None, max_iterations: Some(4_000), ..params(v, 2) };
        let r = plan(&env, &problem, &p, &reg).unwrap().report;
        assert!(r.success);
        assert!(r.cost_trace.windows(2).all(|w| w[1].cost <= w[0].cost));
        assert!((r.cost_trace.last().unwrap().cost - r.path_length.unwrap()).abs() < 1e-9);
        assert_eq!(path_violations(&env, &r.path, p.collision_resolution), 0);
    }
}
