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
//! Benchmark harness: paired-seed trial suites for initial solutions,
//! anytime convergence and ablations, with CSV and SVG output.

mod config;
mod exec;
mod render;
mod suites;
mod table;

pub use config::{Ablation, AnytimeConfig, BenchConfig, BudgetMode, EnvGroup};
pub use exec::{derive_seed, Execution};
pub use render::{render_svg, write_svg};
pub use suites::{
    run_ablation_suite, run_anytime_suite, run_initial_solution_suite, AblationRow, AblationTable, AnytimeCurves, AnytimeRow,
    SuiteOutput, TrialRecord,
};
pub use table::{MetricsRow, MetricsTable, NULL_MARKER};
