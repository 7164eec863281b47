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
//! `errt` command-line tool: environment generation, single planning runs
//! and benchmark suites.
//!
//! Exit status is 0 on success, 1 when planning finds no path and 2 on
//! invalid input or I/O failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use errt::bench::{self, BenchConfig, Execution};
use errt::envgen::{self, EnvSpec};
use errt::episode::GeneratorRegistry;
use errt::geometry::{Config, Environment};
use errt::planners::{self, PlannerParams, Problem, Variant};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "errt", version, about = "Episodic RRT planners and benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random cluttered environment with a start/goal pair.
    GenEnv {
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=3))]
        dim: u8,
        /// Spec JSON file, or a preset name (`desk2d`, or `desk` with --dim).
        #[arg(long)]
        spec: String,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one planner on an environment file.
    Plan {
        #[arg(long)]
        env: PathBuf,
        #[arg(long)]
        planner: String,
        /// Planner parameter JSON; may also hold `start` and `goal`.
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Run a benchmark suite.
    Bench {
        suite: Suite,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Initial,
    Anytime,
    Ablation,
}

enum Failure {
    Invalid(String),
    NoPath,
}

impl From<errt::Error> for Failure {
    fn from(e: errt::Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Invalid(msg.into())
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn resolve_spec(spec: &str, dim: usize) -> Result<EnvSpec, Failure> {
    let path = Path::new(spec);
    let spec = if path.is_file() {
        serde_json::from_str::<EnvSpec>(&read(path)?).map_err(|e| invalid(format!("{}: {e}", path.display())))?
    } else {
        EnvSpec::preset(spec)
            .or_else(|| EnvSpec::preset(&format!("{spec}{dim}d")))
            .ok_or_else(|| invalid(format!("`{spec}` is neither a file nor a preset ({})", EnvSpec::PRESETS.join(", "))))?
    };
    if spec.dim != dim {
        return Err(invalid(format!("spec is {}D but --dim is {dim}", spec.dim)));
    }
    Ok(spec)
}

fn gen_env(dim: u8, spec: &str, seed: u64, out: &Path) -> Result<(), Failure> {
    let spec = resolve_spec(spec, dim as usize)?.with_seed(seed);
    let env = envgen::generate(&spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(bench::derive_seed(seed, 1));
    let problem = envgen::sample_problem(&env, spec.min_clearance, &mut rng)?;
    let mut provenance = env.provenance().cloned().unwrap_or_else(|| serde_json::json!({}));
    provenance["problem"] = serde_json::json!({ "start": problem.start, "goal": problem.goal });
    let env = env.with_provenance(provenance);
    env.save(out)?;
    println!("wrote {} ({} obstacles)", out.display(), env.obstacles().len());
    Ok(())
}

fn config_field(v: &serde_json::Value, key: &str) -> Result<Option<Config>, Failure> {
    match v.get(key) {
        None | Some(serde_json::Value::Null) => Ok(None),
        Some(x) => serde_json::from_value(x.clone()).map(Some).map_err(|e| invalid(format!("{key}: {e}"))),
    }
}

fn load_plan_inputs(env: &Path, planner: &str, params: &Path, seed: u64) -> Result<(Environment, Problem, PlannerParams), Failure> {
    let env = Environment::from_json(&read(env)?).map_err(|e| invalid(format!("{}: {e}", env.display())))?;
    let variant: Variant = planner.parse().map_err(|e: errt::Error| invalid(e.to_string()))?;
    let mut raw: serde_json::Value =
        serde_json::from_str(&read(params)?).map_err(|e| invalid(format!("{}: {e}", params.display())))?;
    let Some(obj) = raw.as_object_mut() else {
        return Err(invalid("params file must hold a JSON object"));
    };
    let mut start = config_field(&serde_json::Value::Object(obj.clone()), "start")?;
    let mut goal = config_field(&serde_json::Value::Object(obj.clone()), "goal")?;
    obj.remove("start");
    obj.remove("goal");
    let mut p: PlannerParams = serde_json::from_value(raw).map_err(|e| invalid(format!("{}: {e}", params.display())))?;
    p.variant = variant;
    p.seed = seed;
    p.validate()?;
    if let Some(stored) = env.provenance().and_then(|v| v.get("problem")) {
        start = start.or(config_field(stored, "start")?);
        goal = goal.or(config_field(stored, "goal")?);
    }
    let (Some(start), Some(goal)) = (start, goal) else {
        return Err(invalid("no start/goal: give them in the params file or generate the environment with gen-env"));
    };
    let problem = Problem { start, goal };
    planners::validate_problem(&env, &problem)?;
    Ok((env, problem, p))
}

fn plan(env: &Path, planner: &str, params: &Path, seed: u64, report: &Path, svg: Option<&Path>) -> Result<(), Failure> {
    let (env, problem, params) = load_plan_inputs(env, planner, params, seed)?;
    let out = planners::plan(&env, &problem, &params, &GeneratorRegistry::default())?;
    let r = &out.report;
    std::fs::write(report, r.to_json()? + "\n").map_err(|e| invalid(format!("{}: {e}", report.display())))?;
    if let Some(svg) = svg {
        let path = r.success.then_some(r.path.as_slice());
        bench::write_svg(svg, &env, &out.trees, path, Some(&problem))?;
    }
    match r.path_length {
        Some(len) if r.success => {
            println!("{}: path length {len:.4}, {} collision checks, {} iterations", r.variant, r.collision_checks, r.iterations);
            Ok(())
        }
        _ => {
            eprintln!("{}: no path ({:?}) after {} iterations", r.variant, r.termination, r.iterations);
            Err(Failure::NoPath)
        }
    }
}

fn run_bench(suite: Suite, config: &Path, out_dir: &Path, workers: Option<usize>) -> Result<(), Failure> {
    let mut cfg = BenchConfig::from_json(&read(config)?).map_err(|e| invalid(format!("{}: {e}", config.display())))?;
    if workers.is_some() {
        cfg.workers = workers;
    }
    cfg.validate()?;
    let exec = Execution::from_workers(cfg.workers);
    match suite {
        Suite::Initial => {
            let out = bench::run_initial_solution_suite(&cfg, Some(out_dir), exec)?;
            print!("{}", out.table.to_markdown());
        }
        Suite::Anytime => {
            let out = bench::run_anytime_suite(&cfg, Some(out_dir), exec)?;
            for r in &out.rows {
                println!(
                    "{} {} {:.2}: reached {}/{}, extra checks {}",
                    r.group,
                    r.variant,
                    r.threshold,
                    r.reached,
                    r.solved,
                    r.extra_checks.map_or("-".into(), |x| format!("{x:.0}"))
                );
            }
            for (g, t, why) in &out.excluded {
                eprintln!("excluded {g} trial {t}: {why}");
            }
        }
        Suite::Ablation => {
            let out = bench::run_ablation_suite(&cfg, Some(out_dir), exec)?;
            for r in &out.rows {
                println!(
                    "{} {} {}: SUC {:.0}% ({:+.0}), dCOL {}",
                    r.group,
                    r.variant,
                    r.ablation.name(),
                    100.0 * r.suc,
                    100.0 * r.d_suc,
                    r.d_col.map_or("-".into(), |x| format!("{x:+.0}"))
                );
            }
        }
    }
    println!("results in {}", out_dir.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::GenEnv { dim, spec, seed, out } => gen_env(*dim, spec, *seed, out),
        Command::Plan { env, planner, params, seed, report, svg } => plan(env, planner, params, *seed, report, svg.as_deref()),
        Command::Bench { suite, config, out_dir, workers } => run_bench(*suite, config, out_dir, *workers),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::NoPath) => ExitCode::from(1),
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
