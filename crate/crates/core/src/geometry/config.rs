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
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A point (or displacement) in a 2D or 3D configuration space.
///
/// Unused trailing coordinates of a 2D value are kept at zero so that the
/// arithmetic below never has to branch on the dimension.
#[derive(Clone, Copy, PartialEq)]
pub struct Config {
    coords: [f64; 3],
    dim: u8,
}

impl Config {
    pub fn new(coords: &[f64]) -> Result<Self> {
        let dim = coords.len();
        if dim != 2 && dim != 3 {
            return Err(Error::UnsupportedDimension(dim));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        let mut c = [0.0; 3];
        c[..dim].copy_from_slice(coords);
        Ok(Config { coords: c, dim: dim as u8 })
    }

    pub fn new2(x: f64, y: f64) -> Self {
        Config { coords: [x, y, 0.0], dim: 2 }
    }

    pub fn new3(x: f64, y: f64, z: f64) -> Self {
        Config { coords: [x, y, z], dim: 3 }
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim == 2 || dim == 3, "unsupported dimension {dim}");
        Config { coords: [0.0; 3], dim: dim as u8 }
    }

    /// Builds a config of the given dimension from the first `dim` entries.
    pub(crate) fn from_array(coords: [f64; 3], dim: usize) -> Self {
        let mut c = coords;
        if dim == 2 {
            c[2] = 0.0;
        }
        Config { coords: c, dim: dim as u8 }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim as usize]
    }

    #[inline]
    pub(crate) fn raw(&self) -> &[f64; 3] {
        &self.coords
    }

    #[inline]
    pub fn get(&self, axis: usize) -> f64 {
        self.coords()[axis]
    }

    pub fn with(mut self, axis: usize, value: f64) -> Self {
        assert!(axis < self.dim());
        self.coords[axis] = value;
        self
    }

    #[inline]
    pub fn dot(&self, other: &Config) -> f64 {
        self.coords[0] * other.coords[0]
            + self.coords[1] * other.coords[1]
            + self.coords[2] * other.coords[2]
    }

    #[inline]
    pub fn norm_squared(&self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// Unit vector in the same direction, or `None` for (near) zero vectors.
    pub fn normalized(&self) -> Option<Config> {
        let n = self.norm();
        if n > 1e-12 {
            Some(*self * (1.0 / n))
        } else {
            None
        }
    }

    #[inline]
    pub fn distance(&self, other: &Config) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        (*self - *other).norm()
    }

    pub fn lerp(&self, other: &Config, t: f64) -> Config {
        *self + (*other - *self) * t
    }

    pub fn map(&self, mut f: impl FnMut(usize, f64) -> f64) -> Config {
        let mut c = self.coords;
        for (i, v) in c.iter_mut().enumerate().take(self.dim()) {
            *v = f(i, *v);
        }
        Config { coords: c, dim: self.dim }
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|c| c.is_finite())
    }

    pub(crate) fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, found: self.dim() })
        }
    }
}

/// Euclidean distance between two configurations of equal dimension.
pub fn distance(a: &Config, b: &Config) -> Result<f64> {
    b.check_dim(a.dim())?;
    Ok(a.distance(b))
}

impl fmt::Debug for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coords()).finish()
    }
}

impl Add for Config {
    type Output = Config;
    #[inline]
    fn add(self, rhs: Config) -> Config {
        Config {
            coords: [
                self.coords[0] + rhs.coords[0],
                self.coords[1] + rhs.coords[1],
                self.coords[2] + rhs.coords[2],
            ],
            dim: self.dim,
        }
    }
}

impl Sub for Config {
    type Output = Config;
    #[inline]
    fn sub(self, rhs: Config) -> Config {
        Config {
            coords: [
                self.coords[0] - rhs.coords[0],
                self.coords[1] - rhs.coords[1],
                self.coords[2] - rhs.coords[2],
            ],
            dim: self.dim,
        }
    }
}

impl Mul<f64> for Config {
    type Output = Config;
    #[inline]
    fn mul(self, s: f64) -> Config {
        Config {
            coords: [self.coords[0] * s, self.coords[1] * s, self.coords[2] * s],
            dim: self.dim,
        }
    }
}

impl Neg for Config {
    type Output = Config;
    fn neg(self) -> Config {
        self * -1.0
    }
}

impl Serialize for Config {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Config {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        Config::new(&v).map_err(serde::de::Error::custom)
    }
}
