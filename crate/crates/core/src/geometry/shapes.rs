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

use super::Config;
use crate::error::{Error, Result};

/// Axis-aligned box, used for bounds and bounding volumes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: Config,
    pub max: Config,
}

impl Aabb {
    pub fn new(min: Config, max: Config) -> Result<Self> {
        max.check_dim(min.dim())?;
        if min.coords().iter().zip(max.coords()).any(|(a, b)| a >= b) {
            return Err(Error::InvalidEnvironment("bounds min must be below max on every axis".into()));
        }
        Ok(Aabb { min, max })
    }

    pub fn dim(&self) -> usize {
        self.min.dim()
    }

    #[inline]
    pub fn contains(&self, q: &Config) -> bool {
        (0..self.dim()).all(|i| {
            let v = q.raw()[i];
            v >= self.min.raw()[i] && v <= self.max.raw()[i]
        })
    }

    pub fn intersects(&self, other: &Aabb) -> bool {
        (0..self.dim()).all(|i| self.min.raw()[i] <= other.max.raw()[i] && other.min.raw()[i] <= self.max.raw()[i])
    }

    pub fn extent(&self) -> Config {
        self.max - self.min
    }

    pub fn volume(&self) -> f64 {
        self.extent().coords().iter().product()
    }

    pub fn diagonal(&self) -> f64 {
        self.extent().norm()
    }

    pub(crate) fn around_segment(a: &Config, b: &Config) -> Aabb {
        let min = Config::from_array(
            [a.raw()[0].min(b.raw()[0]), a.raw()[1].min(b.raw()[1]), a.raw()[2].min(b.raw()[2])],
            a.dim(),
        );
        let max = Config::from_array(
            [a.raw()[0].max(b.raw()[0]), a.raw()[1].max(b.raw()[1]), a.raw()[2].max(b.raw()[2])],
            a.dim(),
        );
        Aabb { min, max }
    }

    pub(crate) fn around_point(q: &Config, r: f64) -> Aabb {
        Aabb { min: q.map(|_, v| v - r), max: q.map(|_, v| v + r) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SphereRepr")]
pub struct Sphere {
    pub center: Config,
    pub radius: f64,
}

#[derive(Deserialize)]
struct SphereRepr {
    center: Config,
    radius: f64,
}

impl TryFrom<SphereRepr> for Sphere {
    type Error = Error;
    fn try_from(r: SphereRepr) -> Result<Self> {
        Sphere::new(r.center, r.radius)
    }
}

impl Sphere {
    pub fn new(center: Config, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidObstacle(format!("sphere radius must be positive, got {radius}")));
        }
        Ok(Sphere { center, radius })
    }

    #[inline]
    pub fn contains(&self, q: &Config) -> bool {
        (*q - self.center).norm_squared() <= self.radius * self.radius
    }

    pub fn closest_point(&self, q: &Config) -> Config {
        let d = *q - self.center;
        let n = d.norm();
        if n <= self.radius {
            *q
        } else {
            self.center + d * (self.radius / n)
        }
    }

    #[inline]
    pub fn distance(&self, q: &Config) -> f64 {
        ((*q - self.center).norm() - self.radius).max(0.0)
    }

    /// Inclusive test of the closed segment `[a, b]` against the ball.
    pub fn intersects_segment(&self, a: &Config, b: &Config) -> bool {
        let ab = *b - *a;
        let len2 = ab.norm_squared();
        let t = if len2 > 0.0 { ((self.center - *a).dot(&ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
        let p = *a + ab * t;
        (p - self.center).norm_squared() <= self.radius * self.radius
    }
}

/// Box orientation: an angle in radians for 2D boxes, a row-major rotation
/// matrix for 3D boxes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Rotation {
    Planar(f64),
    Spatial([f64; 9]),
}

impl Rotation {
    pub fn identity(dim: usize) -> Rotation {
        if dim == 2 {
            Rotation::Planar(0.0)
        } else {
            Rotation::Spatial([1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0])
        }
    }

    /// Rotation matrix whose columns are the box axes in world coordinates.
    pub fn matrix(&self) -> [[f64; 3]; 3] {
        match self {
            Rotation::Planar(theta) => {
                let (s, c) = theta.sin_cos();
                [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
            }
            Rotation::Spatial(m) => [[m[0], m[1], m[2]], [m[3], m[4], m[5]], [m[6], m[7], m[8]]],
        }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        match (self, dim) {
            (Rotation::Planar(t), 2) if t.is_finite() => Ok(()),
            (Rotation::Spatial(_), 3) => {
                let m = self.matrix();
                for i in 0..3 {
                    for j in 0..3 {
                        let dot: f64 = (0..3).map(|k| m[i][k] * m[j][k]).sum();
                        let want = if i == j { 1.0 } else { 0.0 };
                        if !((dot - want).abs() <= 1e-9) {
                            return Err(Error::InvalidObstacle("rotation matrix is not orthonormal".into()));
                        }
                    }
                }
                let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                    - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                    + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
                if det <= 0.0 {
                    return Err(Error::InvalidObstacle("rotation matrix must have determinant +1".into()));
                }
                Ok(())
            }
            _ => Err(Error::InvalidObstacle(format!("rotation does not match dimension {dim}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BoxRepr", into = "BoxRepr")]
pub struct OrientedBox {
    center: Config,
    half_extents: Config,
    rotation: Rotation,
    axes: [[f64; 3]; 3],
}

#[derive(Serialize, Deserialize)]
struct BoxRepr {
    center: Config,
    half_extents: Config,
    rotation: Rotation,
}

impl TryFrom<BoxRepr> for OrientedBox {
    type Error = Error;
    fn try_from(r: BoxRepr) -> Result<Self> {
        OrientedBox::new(r.center, r.half_extents, r.rotation)
    }
}

impl From<OrientedBox> for BoxRepr {
    fn from(b: OrientedBox) -> Self {
        BoxRepr { center: b.center, half_extents: b.half_extents, rotation: b.rotation }
    }
}

impl OrientedBox {
    pub fn new(center: Config, half_extents: Config, rotation: Rotation) -> Result<Self> {
        half_extents.check_dim(center.dim())?;
        if half_extents.coords().iter().any(|h| *h <= 0.0) {
            return Err(Error::InvalidObstacle("box half extents must be positive".into()));
        }
        rotation.validate(center.dim())?;
        let axes = rotation.matrix();
        Ok(OrientedBox { center, half_extents, rotation, axes })
    }

    pub fn axis_aligned(center: Config, half_extents: Config) -> Result<Self> {
        let rot = Rotation::identity(center.dim());
        OrientedBox::new(center, half_extents, rot)
    }

    pub fn center(&self) -> &Config {
        &self.center
    }

    pub fn half_extents(&self) -> &Config {
        &self.half_extents
    }

    pub fn rotation(&self) -> &Rotation {
        &self.rotation
    }

    /// Expresses a world point in the box frame (inverse rotation).
    #[inline]
    pub fn to_local(&self, q: &Config) -> Config {
        let d = (*q - self.center).raw().to_owned();
        let m = &self.axes;
        let mut out = [0.0; 3];
        for (j, o) in out.iter_mut().enumerate() {
            *o = m[0][j] * d[0] + m[1][j] * d[1] + m[2][j] * d[2];
        }
        Config::from_array(out, self.center.dim())
    }

    fn to_world(&self, local: &Config) -> Config {
        let l = local.raw();
        let m = &self.axes;
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = m[i][0] * l[0] + m[i][1] * l[1] + m[i][2] * l[2];
        }
        self.center + Config::from_array(out, self.center.dim())
    }

    #[inline]
    pub fn contains(&self, q: &Config) -> bool {
        let l = self.to_local(q);
        l.coords().iter().zip(self.half_extents.coords()).all(|(v, h)| v.abs() <= *h)
    }

    pub fn closest_point(&self, q: &Config) -> Config {
        let l = self.to_local(q);
        let h = self.half_extents;
        let clamped = l.map(|i, v| v.clamp(-h.get(i), h.get(i)));
        self.to_world(&clamped)
    }

    #[inline]
    pub fn distance(&self, q: &Config) -> f64 {
        let l = self.to_local(q);
        let h = self.half_extents;
        l.coords()
            .iter()
            .zip(h.coords())
            .map(|(v, h)| {
                let e = v.abs() - h;
                if e > 0.0 {
                    e * e
                } else {
                    0.0
                }
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Inclusive slab test of the closed segment `[a, b]` in the box frame.
    pub fn intersects_segment(&self, a: &Config, b: &Config) -> bool {
        let la = self.to_local(a);
        let lb = self.to_local(b);
        let d = lb - la;
        let (mut t0, mut t1) = (0.0_f64, 1.0_f64);
        for i in 0..self.center.dim() {
            let h = self.half_extents.get(i);
            let p = la.get(i);
            let v = d.get(i);
            if v.abs() < 1e-300 {
                if p.abs() > h {
                    return false;
                }
            } else {
                let mut ta = (-h - p) / v;
                let mut tb = (h - p) / v;
                if ta > tb {
                    std::mem::swap(&mut ta, &mut tb);
                }
                t0 = t0.max(ta);
                t1 = t1.min(tb);
                if t0 > t1 {
                    return false;
                }
            }
        }
        true
    }

    pub fn bounding_radius(&self) -> f64 {
        self.half_extents.norm()
    }

    pub fn aabb(&self) -> Aabb {
        let m = &self.axes;
        let h = self.half_extents.raw();
        let ext = self.center.map(|i, _| (0..3).map(|j| m[i][j].abs() * h[j]).sum());
        Aabb { min: self.center - ext, max: self.center + ext }
    }
}

/// An obstacle of the environment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Obstacle {
    Sphere(Sphere),
    Box(OrientedBox),
}

impl Obstacle {
    pub fn dim(&self) -> usize {
        self.center().dim()
    }

    pub fn center(&self) -> &Config {
        match self {
            Obstacle::Sphere(s) => &s.center,
            Obstacle::Box(b) => b.center(),
        }
    }

    #[inline]
    pub fn contains(&self, q: &Config) -> bool {
        match self {
            Obstacle::Sphere(s) => s.contains(q),
            Obstacle::Box(b) => b.contains(q),
        }
    }

    /// Exact distance from `q` to the closest point of the obstacle (0 inside).
    #[inline]
    pub fn distance(&self, q: &Config) -> f64 {
        match self {
            Obstacle::Sphere(s) => s.distance(q),
            Obstacle::Box(b) => b.distance(q),
        }
    }

    pub fn closest_point(&self, q: &Config) -> Config {
        match self {
            Obstacle::Sphere(s) => s.closest_point(q),
            Obstacle::Box(b) => b.closest_point(q),
        }
    }

    #[inline]
    pub fn intersects_segment(&self, a: &Config, b: &Config) -> bool {
        match self {
            Obstacle::Sphere(s) => s.intersects_segment(a, b),
            Obstacle::Box(bx) => bx.intersects_segment(a, b),
        }
    }

    pub fn bounding_radius(&self) -> f64 {
        match self {
            Obstacle::Sphere(s) => s.radius,
            Obstacle::Box(b) => b.bounding_radius(),
        }
    }

    pub fn aabb(&self) -> Aabb {
        match self {
            Obstacle::Sphere(s) => Aabb::around_point(&s.center, s.radius),
            Obstacle::Box(b) => b.aabb(),
        }
    }

    /// The same obstacle shifted by `-origin`.
    pub fn relative_to(&self, origin: &Config) -> Obstacle {
        match self {
            Obstacle::Sphere(s) => Obstacle::Sphere(Sphere { center: s.center - *origin, radius: s.radius }),
            Obstacle::Box(b) => {
                let mut moved = b.clone();
                moved.center = b.center - *origin;
                Obstacle::Box(moved)
            }
        }
    }
}
