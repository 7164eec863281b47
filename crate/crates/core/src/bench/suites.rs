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
use std::collections::BTreeMap;
use std::path::Path;

use super::config::{Ablation, BenchConfig};
use super::exec::{derive_seed, Execution};
use super::table::{fmt_opt, mean, median, write_rows, MetricsTable};
use crate::episode::GeneratorRegistry;
use crate::error::Result;
use crate::planners::{plan, PlannerReport, Termination, Variant};

/// One planner run inside a suite.
#[derive(Clone, Debug)]
pub struct TrialRecord {
    pub group: String,
    pub trial: usize,
    pub repeat: usize,
    /// Seed the environment and start/goal pair were drawn from.
    pub instance_seed: u64,
    pub variant: Variant,
    pub ablation: Ablation,
    /// Full report including wall-clock fields.
    pub report: PlannerReport,
}

#[derive(Clone, Debug)]
pub struct SuiteOutput {
    pub records: Vec<TrialRecord>,
    pub table: MetricsTable,
}

#[derive(Clone, Copy)]
struct Unit {
    group: usize,
    trial: usize,
    seed: u64,
}

fn units(cfg: &BenchConfig) -> Vec<Unit> {
    let mut out = Vec::new();
    for g in 0..cfg.envs.len() {
        let group_seed = derive_seed(cfg.master_seed, g as u64);
        for t in 0..cfg.trials {
            out.push(Unit { group: g, trial: t, seed: derive_seed(group_seed, t as u64) });
        }
    }
    out
}

fn planner_seed(instance_seed: u64, repeat: usize) -> u64 {
    derive_seed(instance_seed, 1000 + repeat as u64)
}

/// Runs `variants` x `ablations` x repeats on one environment.
fn run_unit(
    cfg: &BenchConfig,
    labels: &[String],
    registry: &GeneratorRegistry,
    unit: Unit,
    variants: &[Variant],
    ablations: &[Ablation],
    paired: bool,
) -> Result<Vec<TrialRecord>> {
    let group = &cfg.envs[unit.group];
    let shared = if paired { Some(group.instance(unit.seed, cfg.min_clearance)?) } else { None };
    let mut out = Vec::new();
    for (vi, &variant) in variants.iter().enumerate() {
        let instance_seed = if paired { unit.seed } else { derive_seed(unit.seed, 100 + vi as u64) };
        let (env, problem) = match &shared {
            Some(s) => s.clone(),
            None => group.instance(instance_seed, cfg.min_clearance)?,
        };
        for repeat in 0..cfg.repeats {
            for &ablation in ablations {
                let params = cfg.params_for(variant, ablation, planner_seed(instance_seed, repeat))?;
                let report = plan(&env, &problem, &params, registry)?.report;
                out.push(TrialRecord {
                    group: labels[unit.group].clone(),
                    trial: unit.trial,
                    repeat,
                    instance_seed,
                    variant,
                    ablation,
                    report,
                });
            }
        }
    }
    Ok(out)
}

fn run_units<T: Send>(
    cfg: &BenchConfig,
    exec: Execution,
    f: impl Fn(Unit) -> Result<T> + Sync + Send,
) -> Result<Vec<T>> {
    exec.map(units(cfg), f).into_iter().collect()
}

fn termination_name(t: Termination) -> &'static str {
    match t {
        Termination::Solved => "solved",
        Termination::CostTarget => "cost_target",
        Termination::TimeLimit => "time_limit",
        Termination::IterationLimit => "iteration_limit",
    }
}

fn write_common(cfg: &BenchConfig, out_dir: &Path, records: &[TrialRecord]) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    // The worker count does not change results, so it is left out.
    let resolved = BenchConfig { workers: None, ..cfg.clone() };
    std::fs::write(out_dir.join("config.json"), serde_json::to_string_pretty(&resolved)? + "\n")?;
    if cfg.write_reports {
        for r in records {
            let dir = out_dir.join("reports").join(&r.group);
            std::fs::create_dir_all(&dir)?;
            let mut name = format!("{:04}_{:02}_{}", r.trial, r.repeat, r.variant.name());
            if r.ablation != Ablation::Full {
                name = format!("{name}_{}", r.ablation.name());
            }
            std::fs::write(dir.join(name + ".json"), r.report.without_timing().to_json()? + "\n")?;
        }
    }
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            vec![
                r.group.clone(),
                r.trial.to_string(),
                r.repeat.to_string(),
                r.instance_seed.to_string(),
                r.variant.name().to_string(),
                r.ablation.name().to_string(),
                r.report.seed.to_string(),
                r.report.success.to_string(),
                termination_name(r.report.termination).to_string(),
                r.report.collision_checks.to_string(),
                r.report.iterations.to_string(),
                fmt_opt(r.report.path_length),
            ]
        })
        .collect();
    write_rows(
        &out_dir.join("runs.csv"),
        &[
            "group",
            "trial",
            "repeat",
            "instance_seed",
            "variant",
            "ablation",
            "planner_seed",
            "success",
            "termination",
            "collision_checks",
            "iterations",
            "path_length",
        ],
        &rows,
    )?;
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            vec![
                r.group.clone(),
                r.trial.to_string(),
                r.repeat.to_string(),
                r.variant.name().to_string(),
                r.ablation.name().to_string(),
                fmt_opt(r.report.wall_time),
            ]
        })
        .collect();
    write_rows(&out_dir.join("runs_timing.csv"), &["group", "trial", "repeat", "variant", "ablation", "wall_time"], &rows)
}

/// Time-to-first-solution comparison of all variants (all six by default)
/// on every environment group.
pub fn run_initial_solution_suite(cfg: &BenchConfig, out_dir: Option<&Path>, exec: Execution) -> Result<SuiteOutput> {
    cfg.validate()?;
    let variants = cfg.variants.clone().unwrap_or_else(|| Variant::ALL.to_vec());
    let labels = cfg.group_labels();
    let registry = GeneratorRegistry::default();
    let records: Vec<TrialRecord> =
        run_units(cfg, exec, |u| run_unit(cfg, &labels, &registry, u, &variants, &[Ablation::Full], cfg.paired))?
            .into_iter()
            .flatten()
            .collect();
    let table = MetricsTable::from_records(&records, &labels, &variants);
    if let Some(dir) = out_dir {
        write_common(cfg, dir, &records)?;
        table.write_metrics_csv(&dir.join("metrics.csv"))?;
        table.write_timing_csv(&dir.join("timing.csv"))?;
    }
    Ok(SuiteOutput { records, table })
}

/// Extra budget a run spent between its first solution and reaching one
/// cost threshold.
#[derive(Clone, Debug, PartialEq)]
pub struct AnytimeRow {
    pub group: String,
    pub variant: Variant,
    pub threshold: f64,
    /// Runs that found any solution.
    pub solved: usize,
    /// Runs whose best cost reached this threshold.
    pub reached: usize,
    /// Runs that reached the strictest threshold; the means below are over
    /// these so that every threshold is averaged over the same runs.
    pub common: usize,
    pub extra_iterations: Option<f64>,
    pub extra_checks: Option<f64>,
    pub extra_time: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct AnytimeCurves {
    pub rows: Vec<AnytimeRow>,
    /// (group, trial, reference cost) of every usable environment.
    pub references: Vec<(String, usize, f64)>,
    /// (group, trial, reason) of environments left out.
    pub excluded: Vec<(String, usize, String)>,
    pub records: Vec<TrialRecord>,
}

struct Extra {
    iterations: u64,
    checks: u64,
    time: Option<f64>,
}

fn extra_to_reach(report: &PlannerReport, target: f64) -> Option<Extra> {
    let first = report.first_solution.as_ref()?;
    let s = report.cost_trace.iter().find(|s| s.cost <= target)?;
    Some(Extra {
        iterations: s.iteration.saturating_sub(first.iteration),
        checks: s.collision_checks.saturating_sub(first.collision_checks),
        time: s.time.zip(first.time).map(|(a, b)| (a - b).max(0.0)),
    })
}

/// Convergence of the anytime variants towards a long reference run.
/// Each run stops once it reaches the strictest threshold.
pub fn run_anytime_suite(cfg: &BenchConfig, out_dir: Option<&Path>, exec: Execution) -> Result<AnytimeCurves> {
    cfg.validate()?;
    let variants = cfg.variants.clone().unwrap_or_else(|| vec![Variant::RrtStar, Variant::ErrtStar]);
    let labels = cfg.group_labels();
    let registry = GeneratorRegistry::default();
    let thresholds = &cfg.anytime.thresholds;
    let strictest = thresholds.iter().cloned().fold(f64::INFINITY, f64::min);

    let per_unit = run_units(cfg, exec, |u| -> Result<(Vec<TrialRecord>, std::result::Result<f64, String>)> {
        let group = &cfg.envs[u.group];
        let (env, problem) = group.instance(u.seed, cfg.min_clearance)?;
        let mut rp = cfg.params_for(cfg.anytime.reference_variant, Ablation::Full, derive_seed(u.seed, 3000))?;
        rp.anytime = rp.variant.is_star();
        rp.max_iterations = Some(cfg.anytime.reference_iterations);
        rp.time_limit = None;
        rp.cost_target = None;
        let reference = plan(&env, &problem, &rp, &registry)?.report;
        let Some(ref_cost) = reference.path_length.filter(|_| reference.success) else {
            return Ok((Vec::new(), Err("reference run found no path".into())));
        };
        let mut records = Vec::new();
        for &variant in &variants {
            for repeat in 0..cfg.repeats {
                let mut p = cfg.params_for(variant, Ablation::Full, planner_seed(u.seed, repeat))?;
                p.anytime = variant.is_star();
                p.cost_target = Some(strictest * ref_cost);
                let report = plan(&env, &problem, &p, &registry)?.report;
                records.push(TrialRecord {
                    group: labels[u.group].clone(),
                    trial: u.trial,
                    repeat,
                    instance_seed: u.seed,
                    variant,
                    ablation: Ablation::Full,
                    report,
                });
            }
        }
        Ok((records, Ok(ref_cost)))
    })?;

    let mut records = Vec::new();
    let mut references = Vec::new();
    let mut excluded = Vec::new();
    for (u, (recs, reference)) in units(cfg).into_iter().zip(per_unit) {
        match reference {
            Ok(c) => references.push((labels[u.group].clone(), u.trial, c)),
            Err(why) => excluded.push((labels[u.group].clone(), u.trial, why)),
        }
        records.extend(recs);
    }
    let ref_of: BTreeMap<(&str, usize), f64> = references.iter().map(|(g, t, c)| ((g.as_str(), *t), *c)).collect();

    let mut rows = Vec::new();
    for g in &labels {
        for &variant in &variants {
            let runs: Vec<(&TrialRecord, f64)> = records
                .iter()
                .filter(|r| &r.group == g && r.variant == variant)
                .map(|r| (r, ref_of[&(r.group.as_str(), r.trial)]))
                .collect();
            let solved = runs.iter().filter(|(r, _)| r.report.first_solution.is_some()).count();
            let common: Vec<&(&TrialRecord, f64)> =
                runs.iter().filter(|(r, c)| extra_to_reach(&r.report, strictest * c).is_some()).collect();
            for &tau in thresholds {
                let reached = runs.iter().filter(|(r, c)| extra_to_reach(&r.report, tau * c).is_some()).count();
                let extras: Vec<Extra> = common.iter().filter_map(|(r, c)| extra_to_reach(&r.report, tau * c)).collect();
                let times: Vec<f64> = extras.iter().filter_map(|e| e.time).collect();
                rows.push(AnytimeRow {
                    group: g.clone(),
                    variant,
                    threshold: tau,
                    solved,
                    reached,
                    common: common.len(),
                    extra_iterations: mean(&extras.iter().map(|e| e.iterations as f64).collect::<Vec<_>>()),
                    extra_checks: mean(&extras.iter().map(|e| e.checks as f64).collect::<Vec<_>>()),
                    extra_time: mean(&times),
                });
            }
        }
    }

    if let Some(dir) = out_dir {
        write_common(cfg, dir, &records)?;
        let main: Vec<Vec<String>> = rows
            .iter()
            .map(|r| {
                vec![
                    r.group.clone(),
                    r.variant.name().to_string(),
                    fmt_opt(Some(r.threshold)),
                    r.solved.to_string(),
                    r.reached.to_string(),
                    r.common.to_string(),
                    fmt_opt(r.extra_iterations),
                    fmt_opt(r.extra_checks),
                ]
            })
            .collect();
        write_rows(
            &dir.join("anytime.csv"),
            &["group", "variant", "threshold", "solved", "reached", "common", "EXTRA_ITER", "EXTRA_COL"],
            &main,
        )?;
        let timing: Vec<Vec<String>> = rows
            .iter()
            .map(|r| vec![r.group.clone(), r.variant.name().to_string(), fmt_opt(Some(r.threshold)), fmt_opt(r.extra_time)])
            .collect();
        write_rows(&dir.join("timing.csv"), &["group", "variant", "threshold", "EXTRA_TIME"], &timing)?;
        let refs: Vec<Vec<String>> =
            references.iter().map(|(g, t, c)| vec![g.clone(), t.to_string(), fmt_opt(Some(*c))]).collect();
        write_rows(&dir.join("references.csv"), &["group", "trial", "reference_cost"], &refs)?;
        let ex: Vec<Vec<String>> = excluded.iter().map(|(g, t, w)| vec![g.clone(), t.to_string(), w.clone()]).collect();
        write_rows(&dir.join("excluded.csv"), &["group", "trial", "reason"], &ex)?;
    }
    Ok(AnytimeCurves { rows, references, excluded, records })
}

/// One mechanism change measured against the full planner on the same
/// environments and seeds.
#[derive(Clone, Debug, PartialEq)]
pub struct AblationRow {
    pub group: String,
    pub variant: Variant,
    pub ablation: Ablation,
    pub runs: usize,
    pub successes: usize,
    pub suc: f64,
    /// Success rate change against the full planner.
    pub d_suc: f64,
    /// Mean checks over successful runs.
    pub col: Option<f64>,
    /// Runs where both this and the full planner succeeded.
    pub paired: usize,
    /// Mean check difference over the paired runs.
    pub d_col: Option<f64>,
    /// Paired runs that needed more checks than the full planner.
    pub col_more: usize,
    pub time: Option<f64>,
    /// Median over paired runs of time / full time, minus one.
    pub d_time_median: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct AblationTable {
    pub rows: Vec<AblationRow>,
    pub records: Vec<TrialRecord>,
}

impl AblationTable {
    pub fn row(&self, group: &str, variant: Variant, ablation: Ablation) -> Option<&AblationRow> {
        self.rows.iter().find(|r| r.group == group && r.variant == variant && r.ablation == ablation)
    }
}

/// Full planner against each configured ablation, always paired.
pub fn run_ablation_suite(cfg: &BenchConfig, out_dir: Option<&Path>, exec: Execution) -> Result<AblationTable> {
    cfg.validate()?;
    let variants = cfg.variants.clone().unwrap_or_else(|| vec![Variant::Errt, Variant::ErrtStar, Variant::ErrtConnect]);
    let mut ablations = vec![Ablation::Full];
    for &a in &cfg.ablations {
        if !ablations.contains(&a) {
            ablations.push(a);
        }
    }
    let labels = cfg.group_labels();
    let registry = GeneratorRegistry::default();
    let records: Vec<TrialRecord> = run_units(cfg, exec, |u| run_unit(cfg, &labels, &registry, u, &variants, &ablations, true))?
        .into_iter()
        .flatten()
        .collect();

    let mut rows = Vec::new();
    for g in &labels {
        for &variant in &variants {
            let of = |a: Ablation| -> Vec<&TrialRecord> {
                records.iter().filter(|r| &r.group == g && r.variant == variant && r.ablation == a).collect()
            };
            let full = of(Ablation::Full);
            let full_suc = full.iter().filter(|r| r.report.success).count() as f64 / full.len().max(1) as f64;
            for &ablation in &ablations {
                let runs = of(ablation);
                let ok: Vec<&&TrialRecord> = runs.iter().filter(|r| r.report.success).collect();
                let suc = ok.len() as f64 / runs.len().max(1) as f64;
                let mut d_col = Vec::new();
                let mut ratios = Vec::new();
                let mut col_more = 0;
                for r in &ok {
                    let Some(f) = full.iter().find(|f| f.trial == r.trial && f.repeat == r.repeat && f.report.success) else {
                        continue;
                    };
                    let d = r.report.collision_checks as f64 - f.report.collision_checks as f64;
                    d_col.push(d);
                    col_more += (d > 0.0) as usize;
                    if let (Some(t), Some(tf)) = (r.report.wall_time, f.report.wall_time) {
                        if tf > 0.0 {
                            ratios.push(t / tf);
                        }
                    }
                }
                rows.push(AblationRow {
                    group: g.clone(),
                    variant,
                    ablation,
                    runs: runs.len(),
                    successes: ok.len(),
                    suc,
                    d_suc: suc - full_suc,
                    col: mean(&ok.iter().map(|r| r.report.collision_checks as f64).collect::<Vec<_>>()),
                    paired: d_col.len(),
                    d_col: mean(&d_col),
                    col_more,
                    time: mean(&ok.iter().filter_map(|r| r.report.wall_time).collect::<Vec<_>>()),
                    d_time_median: median(&ratios).map(|m| m - 1.0),
                });
            }
        }
    }

    if let Some(dir) = out_dir {
        write_common(cfg, dir, &records)?;
        let main: Vec<Vec<String>> = rows
            .iter()
            .map(|r| {
                vec![
                    r.group.clone(),
                    r.variant.name().to_string(),
                    r.ablation.name().to_string(),
                    r.runs.to_string(),
                    r.successes.to_string(),
                    fmt_opt(Some(r.suc)),
                    fmt_opt(Some(r.d_suc)),
                    fmt_opt(r.col),
                    r.paired.to_string(),
                    fmt_opt(r.d_col),
                    r.col_more.to_string(),
                ]
            })
            .collect();
        write_rows(
            &dir.join("ablation.csv"),
            &["group", "variant", "ablation", "runs", "successes", "SUC", "dSUC", "COL", "paired", "dCOL", "COL_MORE"],
            &main,
        )?;
        let timing: Vec<Vec<String>> = rows
            .iter()
            .map(|r| {
                vec![
                    r.group.clone(),
                    r.variant.name().to_string(),
                    r.ablation.name().to_string(),
                    fmt_opt(r.time),
                    fmt_opt(r.d_time_median),
                ]
            })
            .collect();
        write_rows(&dir.join("timing.csv"), &["group", "variant", "ablation", "TIME", "dTIME_MEDIAN"], &timing)?;
    }
    Ok(AblationTable { rows, records })
}
