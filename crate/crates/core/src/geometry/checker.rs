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
use std::cell::Cell;

use serde::{Deserialize, Serialize};

use super::{Config, Environment, Obstacle};
use crate::error::Result;

/// Result of a straight-segment collision check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentCheckOutcome {
    pub valid: bool,
    /// Collision-free arc length from the segment start up to the last free
    /// sample. Equals the segment length when `valid`.
    pub l_safe: f64,
}

/// An obstacle seen from a configuration, as handed to episode generators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObstacleFeature {
    /// Index of the obstacle in the environment.
    pub index: usize,
    /// Exact distance from the observing configuration to the obstacle.
    pub distance: f64,
    /// The obstacle with its center expressed relative to the observer.
    pub shape: Obstacle,
}

/// Collision queries against one environment, with a counter of the point
/// tests performed. One checker belongs to one planner run.
#[derive(Debug)]
pub struct CollisionChecker<'e> {
    env: &'e Environment,
    checks: Cell<u64>,
}

impl<'e> CollisionChecker<'e> {
    pub fn new(env: &'e Environment) -> Self {
        CollisionChecker { env, checks: Cell::new(0) }
    }

    pub fn env(&self) -> &'e Environment {
        self.env
    }

    /// Number of point tests performed so far.
    pub fn checks(&self) -> u64 {
        self.checks.get()
    }

    #[inline]
    fn bump(&self) {
        self.checks.set(self.checks.get() + 1);
    }

    /// True iff `q` lies inside an obstacle or outside the bounds.
    pub fn point_in_collision(&self, q: &Config) -> Result<bool> {
        q.check_dim(self.env.dim())?;
        self.bump();
        Ok(self.env.is_occupied(q))
    }

    /// Checks the straight segment `[a, b]` by walking samples spaced
    /// `len / ceil(len / resolution)` apart, both endpoints included.
    ///
    /// Each sample test covers the sample itself and the stretch of segment
    /// back to the previous sample, so a valid outcome certifies the whole
    /// segment, not just the samples.
    pub fn segment_check(&self, a: &Config, b: &Config, resolution: f64) -> Result<SegmentCheckOutcome> {
        a.check_dim(self.env.dim())?;
        b.check_dim(self.env.dim())?;
        assert!(resolution > 0.0, "resolution must be positive");
        let len = a.distance(b);
        if len == 0.0 {
            let hit = self.point_in_collision(a)?;
            return Ok(SegmentCheckOutcome { valid: !hit, l_safe: 0.0 });
        }
        let n = (len / resolution).ceil().max(1.0) as usize;
        let spacing = len / n as f64;
        self.bump();
        if self.env.is_occupied(a) {
            return Ok(SegmentCheckOutcome { valid: false, l_safe: 0.0 });
        }
        let mut prev = *a;
        for i in 1..=n {
            let s = if i == n { *b } else { a.lerp(b, i as f64 / n as f64) };
            self.bump();
            if self.env.segment_hits(&prev, &s) {
                return Ok(SegmentCheckOutcome { valid: false, l_safe: (i - 1) as f64 * spacing });
            }
            prev = s;
        }
        Ok(SegmentCheckOutcome { valid: true, l_safe: len })
    }

    /// Convenience wrapper returning only validity.
    pub fn segment_free(&self, a: &Config, b: &Config, resolution: f64) -> Result<bool> {
        Ok(self.segment_check(a, b, resolution)?.valid)
    }
}

/// Number of point tests `segment_check` performs on a collision-free segment.
pub fn segment_sample_count(len: f64, resolution: f64) -> u64 {
    if len == 0.0 {
        1
    } else {
        (len / resolution).ceil().max(1.0) as u64 + 1
    }
}

/// Features of every obstacle whose closest point is within `radius` of `q`
/// (boundary inclusive), nearest first, ties by insertion index.
pub fn obstacles_within_radius(q: &Config, radius: f64, env: &Environment) -> Result<Vec<ObstacleFeature>> {
    q.check_dim(env.dim())?;
    Ok(env
        .obstacles_near(q, radius)
        .into_iter()
        .map(|(index, distance)| ObstacleFeature {
            index,
            distance,
            shape: env.obstacles()[index].relative_to(q),
        })
        .collect())
}
