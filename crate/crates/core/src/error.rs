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
use thiserror::Error;

/// Errors produced by the planning library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("unsupported dimension {0} (only 2 and 3 are supported)")]
    UnsupportedDimension(usize),
    #[error("non-finite coordinate in configuration")]
    NonFinite,
    #[error("invalid obstacle: {0}")]
    InvalidObstacle(String),
    #[error("invalid environment: {0}")]
    InvalidEnvironment(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown tree node {0}")]
    UnknownNode(usize),
    #[error("contract violation: {0}")]
    ContractViolation(String),
    #[error("invalid planning problem: {0}")]
    InvalidProblem(String),
    #[error("no free space: {0}")]
    NoFreeSpace(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
