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

use super::{Aabb, Config, Obstacle};
use crate::error::{Error, Result};

const MAX_GRID_CELLS: usize = 1 << 21;

/// The workspace: a bounded region of configuration space plus obstacles.
///
/// Configurations outside `bounds` are treated as colliding.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "EnvironmentFile", into = "EnvironmentFile")]
pub struct Environment {
    dim: usize,
    bounds: Aabb,
    obstacles: Vec<Obstacle>,
    provenance: Option<serde_json::Value>,
    grid: Grid,
}

/// On-disk layout of an environment file.
#[derive(Serialize, Deserialize)]
struct EnvironmentFile {
    dim: usize,
    bounds: Aabb,
    obstacles: Vec<Obstacle>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<serde_json::Value>,
}

impl TryFrom<EnvironmentFile> for Environment {
    type Error = Error;
    fn try_from(f: EnvironmentFile) -> Result<Self> {
        let mut env = Environment::new(f.dim, f.bounds, f.obstacles)?;
        env.provenance = f.provenance;
        Ok(env)
    }
}

impl From<Environment> for EnvironmentFile {
    fn from(e: Environment) -> Self {
        EnvironmentFile { dim: e.dim, bounds: e.bounds, obstacles: e.obstacles, provenance: e.provenance }
    }
}

impl PartialEq for Environment {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.bounds == other.bounds && self.obstacles == other.obstacles
    }
}

impl Environment {
    pub fn new(dim: usize, bounds: Aabb, obstacles: Vec<Obstacle>) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::UnsupportedDimension(dim));
        }
        bounds.min.check_dim(dim)?;
        let bounds = Aabb::new(bounds.min, bounds.max)?;
        for (i, o) in obstacles.iter().enumerate() {
            o.center().check_dim(dim)?;
            if !o.aabb().intersects(&bounds) {
                return Err(Error::InvalidEnvironment(format!("obstacle {i} lies entirely outside the bounds")));
            }
        }
        let grid = Grid::build(&bounds, &obstacles);
        Ok(Environment { dim, bounds, obstacles, provenance: None, grid })
    }

    pub fn empty(bounds: Aabb) -> Result<Self> {
        Environment::new(bounds.dim(), bounds, Vec::new())
    }

    pub fn with_provenance(mut self, value: serde_json::Value) -> Self {
        self.provenance = Some(value);
        self
    }

    pub fn provenance(&self) -> Option<&serde_json::Value> {
        self.provenance.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bounds(&self) -> &Aabb {
        &self.bounds
    }

    pub fn obstacles(&self) -> &[Obstacle] {
        &self.obstacles
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Environment::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    /// Uncounted point membership in the obstacle space (out of bounds included).
    #[inline]
    pub fn is_occupied(&self, q: &Config) -> bool {
        if !self.bounds.contains(q) {
            return true;
        }
        self.grid.point_candidates(q).iter().any(|&i| self.obstacles[i as usize].contains(q))
    }

    /// Same answer as [`Environment::is_occupied`], scanning every obstacle.
    pub fn is_occupied_brute_force(&self, q: &Config) -> bool {
        !self.bounds.contains(q) || self.obstacles.iter().any(|o| o.contains(q))
    }

    /// Uncounted test of the closed segment `[a, b]`: any point outside the
    /// bounds or inside an obstacle.
    #[inline]
    pub fn segment_hits(&self, a: &Config, b: &Config) -> bool {
        if !self.bounds.contains(a) || !self.bounds.contains(b) {
            return true;
        }
        let region = Aabb::around_segment(a, b);
        let mut hit = false;
        self.grid.for_each_candidate(&region, |i| {
            if self.obstacles[i].intersects_segment(a, b) {
                hit = true;
                return false;
            }
            true
        });
        hit
    }

    /// Distance from `q` to the nearest obstacle surface (0 when inside).
    /// Returns `f64::INFINITY` for an obstacle-free environment.
    pub fn clearance(&self, q: &Config) -> f64 {
        self.obstacles.iter().map(|o| o.distance(q)).fold(f64::INFINITY, f64::min)
    }

    /// Indices of obstacles whose closest point is within `radius` of `q`,
    /// ascending by distance, ties by index.
    pub fn obstacles_near(&self, q: &Config, radius: f64) -> Vec<(usize, f64)> {
        let region = Aabb::around_point(q, radius);
        let mut out = Vec::new();
        self.grid.for_each_candidate(&region, |i| {
            let d = self.obstacles[i].distance(q);
            if d <= radius {
                out.push((i, d));
            }
            true
        });
        out.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        out.dedup_by_key(|e| e.0);
        out
    }
}

/// Uniform grid over the bounds; each cell lists the obstacles whose
/// bounding box overlaps it.
#[derive(Clone, Debug, Default)]
struct Grid {
    origin: [f64; 3],
    cell: f64,
    dims: [usize; 3],
    offsets: Vec<u32>,
    items: Vec<u32>,
}

impl Grid {
    fn build(bounds: &Aabb, obstacles: &[Obstacle]) -> Grid {
        let dim = bounds.dim();
        if obstacles.is_empty() {
            return Grid::default();
        }
        let mut radii: Vec<f64> = obstacles.iter().map(Obstacle::bounding_radius).collect();
        radii.sort_by(f64::total_cmp);
        let median = radii[radii.len() / 2];
        let ext = bounds.extent();
        let mut cell = (2.0 * median).max(ext.coords().iter().cloned().fold(f64::INFINITY, f64::min) * 1e-4);
        let count = |cell: f64| -> [usize; 3] {
            let mut d = [1usize; 3];
            for (i, v) in d.iter_mut().enumerate().take(dim) {
                *v = ((ext.get(i) / cell).ceil() as usize).max(1);
            }
            d
        };
        let mut dims = count(cell);
        while dims.iter().product::<usize>() > MAX_GRID_CELLS {
            cell *= 1.5;
            dims = count(cell);
        }
        let mut origin = [0.0; 3];
        origin[..dim].copy_from_slice(bounds.min.coords());
        let mut grid = Grid { origin, cell, dims, offsets: Vec::new(), items: Vec::new() };

        let ncells = dims.iter().product::<usize>();
        let mut counts = vec![0u32; ncells + 1];
        let ranges: Vec<_> = obstacles.iter().map(|o| grid.cell_range(&o.aabb())).collect();
        for r in &ranges {
            grid.for_cells(r, |c| counts[c + 1] += 1);
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let mut fill = counts.clone();
        let mut items = vec![0u32; counts[ncells] as usize];
        for (idx, r) in ranges.iter().enumerate() {
            grid.for_cells(r, |c| {
                items[fill[c] as usize] = idx as u32;
                fill[c] += 1;
            });
        }
        grid.offsets = counts;
        grid.items = items;
        grid
    }

    #[inline]
    fn axis_cell(&self, axis: usize, v: f64) -> usize {
        let c = ((v - self.origin[axis]) / self.cell).floor();
        if c <= 0.0 {
            0
        } else {
            (c as usize).min(self.dims[axis] - 1)
        }
    }

    fn cell_range(&self, region: &Aabb) -> [(usize, usize); 3] {
        let mut r = [(0, 0); 3];
        for (axis, slot) in r.iter_mut().enumerate().take(region.dim()) {
            *slot = (self.axis_cell(axis, region.min.raw()[axis]), self.axis_cell(axis, region.max.raw()[axis]));
        }
        r
    }

    fn for_cells(&self, r: &[(usize, usize); 3], mut f: impl FnMut(usize)) {
        for z in r[2].0..=r[2].1 {
            for y in r[1].0..=r[1].1 {
                for x in r[0].0..=r[0].1 {
                    f((z * self.dims[1] + y) * self.dims[0] + x);
                }
            }
        }
    }

    #[inline]
    fn point_candidates(&self, q: &Config) -> &[u32] {
        if self.offsets.is_empty() {
            return &[];
        }
        let raw = q.raw();
        let (x, y) = (self.axis_cell(0, raw[0]), self.axis_cell(1, raw[1]));
        let z = if q.dim() == 3 { self.axis_cell(2, raw[2]) } else { 0 };
        let c = (z * self.dims[1] + y) * self.dims[0] + x;
        &self.items[self.offsets[c] as usize..self.offsets[c + 1] as usize]
    }

    /// Visits each obstacle listed in any cell overlapping `region`, at most
    /// once, in ascending index order. Stops early when `f` returns false.
    fn for_each_candidate(&self, region: &Aabb, mut f: impl FnMut(usize) -> bool) {
        if self.offsets.is_empty() {
            return;
        }
        let r = self.cell_range(region);
        let single = r.iter().all(|(a, b)| a == b);
        if single {
            let c = (r[2].0 * self.dims[1] + r[1].0) * self.dims[0] + r[0].0;
            for &i in &self.items[self.offsets[c] as usize..self.offsets[c + 1] as usize] {
                if !f(i as usize) {
                    return;
                }
            }
            return;
        }
        let mut found: Vec<u32> = Vec::new();
        self.for_cells(&r, |c| found.extend_from_slice(&self.items[self.offsets[c] as usize..self.offsets[c + 1] as usize]));
        found.sort_unstable();
        found.dedup();
        for i in found {
            if !f(i as usize) {
                return;
            }
        }
    }
}
