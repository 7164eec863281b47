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
//! Configuration-space primitives, obstacles and collision queries.

mod checker;
mod config;
mod env;
mod shapes;

pub use checker::{obstacles_within_radius, segment_sample_count, CollisionChecker, ObstacleFeature, SegmentCheckOutcome};
pub use config::{distance, Config};
pub use env::Environment;
pub use shapes::{Aabb, Obstacle, OrientedBox, Rotation, Sphere};
