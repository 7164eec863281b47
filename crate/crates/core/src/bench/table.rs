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
use std::path::Path;

use super::suites::TrialRecord;
use crate::error::Result;
use crate::planners::Variant;

/// Written in place of undefined values (no successes, no baseline).
pub const NULL_MARKER: &str = "null";

pub(crate) fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => format!("{x:.6}"),
        _ => NULL_MARKER.to_string(),
    }
}

pub(crate) fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

pub(crate) fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

pub(crate) fn write_rows(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(std::io::Error::from)?;
    w.write_record(header).map_err(std::io::Error::from)?;
    for r in rows {
        w.write_record(r).map_err(std::io::Error::from)?;
    }
    w.flush()?;
    Ok(())
}

/// Aggregate metrics of one variant on one environment group. COL, LEN,
/// ITER and TIME are means over successful runs.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricsRow {
    pub group: String,
    pub variant: Variant,
    pub runs: usize,
    pub successes: usize,
    pub suc: f64,
    pub col: Option<f64>,
    pub len: Option<f64>,
    pub iter: Option<f64>,
    pub median_col: Option<f64>,
    /// Baseline COL over this variant's COL on runs where both succeed.
    pub col_speedup: Option<f64>,
    pub time: Option<f64>,
    /// Baseline TIME over this variant's TIME on runs where both succeed.
    pub speedup: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MetricsTable {
    pub rows: Vec<MetricsRow>,
}

impl MetricsTable {
    pub fn from_records(records: &[TrialRecord], groups: &[String], variants: &[Variant]) -> Self {
        let mut rows = Vec::new();
        for g in groups {
            for &v in variants {
                let runs: Vec<&TrialRecord> = records.iter().filter(|r| &r.group == g && r.variant == v).collect();
                if runs.is_empty() {
                    continue;
                }
                let ok: Vec<&&TrialRecord> = runs.iter().filter(|r| r.report.success).collect();
                let pick = |f: &dyn Fn(&TrialRecord) -> Option<f64>| ok.iter().filter_map(|r| f(r)).collect::<Vec<f64>>();
                let cols = pick(&|r| Some(r.report.collision_checks as f64));
                let (col_speedup, speedup) = match v.baseline() {
                    b if b != v && variants.contains(&b) => paired_speedups(records, g, v, b),
                    _ => (None, None),
                };
                rows.push(MetricsRow {
                    group: g.clone(),
                    variant: v,
                    runs: runs.len(),
                    successes: ok.len(),
                    suc: ok.len() as f64 / runs.len() as f64,
                    col: mean(&cols),
                    len: mean(&pick(&|r| r.report.path_length)),
                    iter: mean(&pick(&|r| Some(r.report.iterations as f64))),
                    median_col: median(&cols),
                    col_speedup,
                    time: mean(&pick(&|r| r.report.wall_time)),
                    speedup,
                });
            }
        }
        MetricsTable { rows }
    }

    pub fn row(&self, group: &str, variant: Variant) -> Option<&MetricsRow> {
        self.rows.iter().find(|r| r.group == group && r.variant == variant)
    }

    /// Deterministic metrics: identical for identical configs and seeds.
    pub fn write_metrics_csv(&self, path: &Path) -> Result<()> {
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.group.clone(),
                    r.variant.name().to_string(),
                    r.runs.to_string(),
                    r.successes.to_string(),
                    fmt_opt(Some(r.suc)),
                    fmt_opt(r.col),
                    fmt_opt(r.median_col),
                    fmt_opt(r.len),
                    fmt_opt(r.iter),
                    fmt_opt(r.col_speedup),
                ]
            })
            .collect();
        write_rows(path, &["group", "variant", "runs", "successes", "SUC", "COL", "COL_MEDIAN", "LEN", "ITER", "COL_SPEEDUP"], &rows)
    }

    /// Wall-clock metrics, kept apart because they vary between reruns.
    pub fn write_timing_csv(&self, path: &Path) -> Result<()> {
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| vec![r.group.clone(), r.variant.name().to_string(), fmt_opt(r.time), fmt_opt(r.speedup)])
            .collect();
        write_rows(path, &["group", "variant", "TIME", "SPEEDUP"], &rows)
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::from("| group | variant | SUC | COL | LEN | TIME | SPEEDUP |\n|---|---|---|---|---|---|---|\n");
        for r in &self.rows {
            s.push_str(&format!(
                "| {} | {} | {:.0}% | {} | {} | {} | {} |\n",
                r.group,
                r.variant,
                100.0 * r.suc,
                r.col.map_or("-".into(), |x| format!("{x:.0}")),
                r.len.map_or("-".into(), |x| format!("{x:.2}")),
                r.time.map_or("-".into(), |x| format!("{:.1} ms", 1e3 * x)),
                r.speedup.map_or("-".into(), |x| format!("{x:.2}x")),
            ));
        }
        s
    }
}

fn paired_speedups(records: &[TrialRecord], group: &str, variant: Variant, baseline: Variant) -> (Option<f64>, Option<f64>) {
    let mut col = (Vec::new(), Vec::new());
    let mut time = (Vec::new(), Vec::new());
    for r in records.iter().filter(|r| r.group == group && r.variant == variant && r.report.success) {
        let Some(b) = records.iter().find(|b| {
            b.group == group && b.variant == baseline && b.trial == r.trial && b.repeat == r.repeat && b.ablation == r.ablation
        }) else {
            continue;
        };
        if !b.report.success {
            continue;
        }
        col.0.push(b.report.collision_checks as f64);
        col.1.push(r.report.collision_checks as f64);
        if let (Some(tb), Some(tr)) = (b.report.wall_time, r.report.wall_time) {
            time.0.push(tb);
            time.1.push(tr);
        }
    }
    let ratio = |(a, b): (Vec<f64>, Vec<f64>)| match (mean(&a), mean(&b)) {
        (Some(x), Some(y)) if y > 0.0 => Some(x / y),
        _ => None,
    };
    (ratio(col), ratio(time))
}
