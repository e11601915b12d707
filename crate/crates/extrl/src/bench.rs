//! Benchmark runner: agent×environment matrices across seeds, with CSV
//! output for summary tables and per-episode learning curves.
//!
//! Runs are embarrassingly parallel and schedule-independent: every
//! (pair, seed) job is a pure function of the config, jobs are farmed
//! out through a local thread pool (capped by `EXTRL_THREADS`), and
//! results are merged in deterministic (pair, seed) order — identical
//! configs produce byte-identical CSV files no matter how they were
//! scheduled.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::envs::{EnvFactory, EnvKind};
use crate::error::ExtrlError;
use crate::interact::run_interaction;
use crate::registry::{parse_agent, parse_env, AgentSpec};
use crate::types::TrainStep;

/// Steps per run when the config does not say.
pub const DEFAULT_RUN_STEPS: u64 = 100_000;
/// Seeds per pair for summary runs when the config does not say.
pub const DEFAULT_RUN_SEEDS: u64 = 5;
/// Episodes per seed for curve runs when the config does not say.
pub const DEFAULT_CURVE_EPISODES: u64 = 10_000;
/// Seeds per pair for curve runs when the config does not say.
pub const DEFAULT_CURVE_SEEDS: u64 = 10;
/// Longest `reverse_history` run accepted without an explicit
/// acknowledgement — each step replays the whole history, so runs cost
/// quadratic time.
pub const REVERSE_HISTORY_STEP_CAP: u64 = 10_000;

/// Per-agent overrides for the learning parameters, keyed by the exact
/// agent spec string they apply to.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AgentOverrides {
    pub learning_rate: Option<f64>,
    pub exploration: Option<f64>,
    pub discount: Option<f64>,
}

/// Everything a benchmark invocation needs, loadable from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    /// Agent spec strings (see the registry grammar).
    pub agents: Vec<String>,
    /// Environment names, including `cartpole*<env>` combinations.
    pub envs: Vec<String>,
    /// Interaction length for summary runs.
    pub steps: u64,
    /// Seeds per pair; defaults to 5 for summary runs and 10 for curves.
    pub seeds: Option<u64>,
    /// True to produce per-episode curves instead of a summary table.
    pub episode_curves: bool,
    /// Episodes per seed for curve runs.
    pub episodes: u64,
    /// Where the CSV goes (curves write a `_mean` companion next to it).
    pub output_path: PathBuf,
    /// Per-agent hyperparameter overrides.
    pub overrides: BTreeMap<String, AgentOverrides>,
    /// Acknowledge the quadratic cost of long `reverse_history` runs.
    pub allow_quadratic: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            agents: Vec::new(),
            envs: Vec::new(),
            steps: DEFAULT_RUN_STEPS,
            seeds: None,
            episode_curves: false,
            episodes: DEFAULT_CURVE_EPISODES,
            output_path: PathBuf::from("result_table.csv"),
            overrides: BTreeMap::new(),
            allow_quadratic: false,
        }
    }
}

/// One line of the summary table.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub agent: String,
    pub env: String,
    pub steps: u64,
    pub seeds: u64,
    pub mean_reward_per_turn: f64,
    pub stderr: f64,
}

/// One per-seed, per-episode sample of a learning curve.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvePoint {
    pub agent: String,
    pub env: String,
    pub seed: u64,
    /// 1-based episode index.
    pub episode: u64,
    pub episode_reward: f64,
}

/// Cross-seed mean of one episode, with a trailing moving average.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveMeanPoint {
    pub agent: String,
    pub env: String,
    pub episode: u64,
    pub mean_episode_reward: f64,
    /// Mean of `mean_episode_reward` over the trailing 100 episodes.
    pub moving_avg_100: f64,
}

/// Everything a curves run produces.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvesOutput {
    pub points: Vec<CurvePoint>,
    pub means: Vec<CurveMeanPoint>,
}

/// Resolve the agent list against the registry, with overrides applied.
fn resolve_agents(config: &BenchConfig) -> Result<Vec<(String, AgentSpec)>, ExtrlError> {
    config
        .agents
        .iter()
        .map(|name| {
            let mut spec = parse_agent(name)?;
            if let Some(o) = config.overrides.get(name) {
                spec = spec.with_overrides(o.learning_rate, o.exploration, o.discount);
            }
            Ok((name.clone(), spec))
        })
        .collect()
}

fn resolve_envs(config: &BenchConfig) -> Result<Vec<(String, EnvFactory)>, ExtrlError> {
    config.envs.iter().map(|name| Ok((name.clone(), parse_env(name)?))).collect()
}

/// Build the local thread pool, honoring `EXTRL_THREADS` when it is set
/// to a positive number.
fn thread_pool() -> Result<rayon::ThreadPool, ExtrlError> {
    let threads =
        std::env::var("EXTRL_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).unwrap_or(0);
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| ExtrlError::ThreadPool(e.to_string()))
}

/// Run the full agent×environment matrix and aggregate per-seed means.
pub fn run_benchmark(config: &BenchConfig) -> Result<Vec<ResultRow>, ExtrlError> {
    if config.steps == 0 {
        return Err(ExtrlError::InvalidArg("steps must be at least 1".into()));
    }
    let seeds = config.seeds.unwrap_or(DEFAULT_RUN_SEEDS);
    if seeds == 0 {
        return Err(ExtrlError::InvalidArg("seeds must be at least 1".into()));
    }
    let agents = resolve_agents(config)?;
    let envs = resolve_envs(config)?;
    if !config.allow_quadratic
        && config.steps > REVERSE_HISTORY_STEP_CAP
        && envs.iter().any(|(_, env)| env.kind == EnvKind::ReverseHistory)
    {
        return Err(ExtrlError::QuadraticCap {
            steps: config.steps,
            cap: REVERSE_HISTORY_STEP_CAP,
        });
    }

    let mut jobs = Vec::new();
    for (agent_name, spec) in &agents {
        for (env_name, envf) in &envs {
            for seed in 0..seeds {
                jobs.push((agent_name, spec, env_name, envf, seed));
            }
        }
    }

    let pool = thread_pool()?;
    let per_run: Vec<f64> = pool.install(|| {
        jobs.par_iter()
            .map(|(_, spec, _, envf, seed)| {
                let (obs_count, action_count) = envf.spaces();
                let factory = spec.factory(*seed, obs_count, action_count);
                Ok(run_interaction(&factory, envf, config.steps, *seed)?.mean_reward_per_turn)
            })
            .collect::<Result<Vec<f64>, ExtrlError>>()
    })?;

    let mut rows = Vec::with_capacity(agents.len() * envs.len());
    let mut cursor = 0usize;
    for (agent_name, _) in &agents {
        for (env_name, _) in &envs {
            let samples = &per_run[cursor..cursor + seeds as usize];
            cursor += seeds as usize;
            let mean = samples.iter().sum::<f64>() / seeds as f64;
            let stderr = if seeds > 1 {
                let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>()
                    / (seeds - 1) as f64;
                (var / seeds as f64).sqrt()
            } else {
                0.0
            };
            rows.push(ResultRow {
                agent: agent_name.clone(),
                env: env_name.clone(),
                steps: config.steps,
                seeds,
                mean_reward_per_turn: mean,
                stderr,
            });
        }
    }
    Ok(rows)
}

/// Episode rewards for one (agent, env, seed) triple, segmented at
/// episode boundaries of the underlying control task.
fn episode_rewards(
    spec: &AgentSpec,
    envf: &EnvFactory,
    episodes: u64,
    seed: u64,
) -> Result<Vec<f64>, ExtrlError> {
    let (obs_count, action_count) = envf.spaces();
    let factory = spec.factory(seed, obs_count, action_count);
    let mut env = envf.instantiate(&factory, seed)?;
    let mut agent = factory.create();
    let mut obs = env.start();
    let mut out = Vec::with_capacity(episodes as usize);
    let mut acc = 0.0;
    while (out.len() as u64) < episodes {
        let action = agent.act(obs);
        let percept = env.step(action);
        agent.train(TrainStep { o_prev: obs, a: action, r: percept.reward, o_next: percept.obs });
        acc += percept.reward;
        if env.episode_ended() {
            out.push(acc);
            acc = 0.0;
        }
        obs = percept.obs;
    }
    Ok(out)
}

/// Run per-episode learning curves for every pair in the config.
///
/// Only environments with episode structure qualify: the bare control
/// task and its combinations.
pub fn run_curves(config: &BenchConfig) -> Result<CurvesOutput, ExtrlError> {
    if config.episodes == 0 {
        return Err(ExtrlError::InvalidArg("episodes must be at least 1".into()));
    }
    let seeds = config.seeds.unwrap_or(DEFAULT_CURVE_SEEDS);
    if seeds == 0 {
        return Err(ExtrlError::InvalidArg("seeds must be at least 1".into()));
    }
    let agents = resolve_agents(config)?;
    let envs = resolve_envs(config)?;
    for (name, env) in &envs {
        let episodic = matches!(env.kind, EnvKind::CartPole | EnvKind::Combined { .. });
        if !episodic {
            return Err(ExtrlError::NonEpisodic(name.clone()));
        }
    }

    let mut jobs = Vec::new();
    for (agent_name, spec) in &agents {
        for (env_name, envf) in &envs {
            for seed in 0..seeds {
                jobs.push((agent_name.clone(), spec, env_name.clone(), envf, seed));
            }
        }
    }

    let pool = thread_pool()?;
    let per_job: Vec<Vec<f64>> = pool.install(|| {
        jobs.par_iter()
            .map(|(_, spec, _, envf, seed)| episode_rewards(spec, envf, config.episodes, *seed))
            .collect::<Result<Vec<Vec<f64>>, ExtrlError>>()
    })?;

    let mut points = Vec::new();
    for ((agent, _, env, _, seed), rewards) in jobs.iter().zip(&per_job) {
        for (i, &r) in rewards.iter().enumerate() {
            points.push(CurvePoint {
                agent: agent.clone(),
                env: env.clone(),
                seed: *seed,
                episode: i as u64 + 1,
                episode_reward: r,
            });
        }
    }

    // Cross-seed means per (agent, env, episode), then the trailing
    // 100-episode moving average over the mean column.
    let mut means = Vec::new();
    let mut job_index = 0usize;
    for (agent_name, _) in &agents {
        for (env_name, _) in &envs {
            let seed_runs = &per_job[job_index..job_index + seeds as usize];
            job_index += seeds as usize;
            let mut mean_column = Vec::with_capacity(config.episodes as usize);
            for e in 0..config.episodes as usize {
                let m = seed_runs.iter().map(|run| run[e]).sum::<f64>() / seeds as f64;
                mean_column.push(m);
            }
            let mut window_sum = 0.0;
            for e in 0..mean_column.len() {
                window_sum += mean_column[e];
                if e >= 100 {
                    window_sum -= mean_column[e - 100];
                }
                let window_len = (e + 1).min(100);
                means.push(CurveMeanPoint {
                    agent: agent_name.clone(),
                    env: env_name.clone(),
                    episode: e as u64 + 1,
                    mean_episode_reward: mean_column[e],
                    moving_avg_100: window_sum / window_len as f64,
                });
            }
        }
    }

    Ok(CurvesOutput { points, means })
}

/// Quote a CSV field if it contains a delimiter, quote, or newline.
fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), ExtrlError> {
    std::fs::write(path, contents)
        .map_err(|source| ExtrlError::Io { context: format!("writing {}", path.display()), source })
}

/// Write the summary table: header plus one line per row, reals with 5
/// decimal places, every line newline-terminated.
pub fn write_result_table(rows: &[ResultRow], path: &Path) -> Result<(), ExtrlError> {
    let mut out = String::from("agent,env,steps,seeds,mean_reward_per_turn,stderr\n");
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{:.5},{:.5}",
            csv_field(&row.agent),
            csv_field(&row.env),
            row.steps,
            row.seeds,
            row.mean_reward_per_turn,
            row.stderr
        );
    }
    write_file(path, &out)
}

/// Companion path for the cross-seed mean table: `curves.csv` →
/// `curves_mean.csv`.
pub fn mean_table_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("curves");
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    path.with_file_name(format!("{stem}_mean.{ext}"))
}

/// Write both curve tables: per-seed episodes at `path` and the
/// cross-seed means (with moving average) at the `_mean` companion.
pub fn write_curve_tables(curves: &CurvesOutput, path: &Path) -> Result<(), ExtrlError> {
    let mut out = String::from("agent,env,seed,episode,episode_reward\n");
    for p in &curves.points {
        let _ = writeln!(
            out,
            "{},{},{},{},{:.5}",
            csv_field(&p.agent),
            csv_field(&p.env),
            p.seed,
            p.episode,
            p.episode_reward
        );
    }
    write_file(path, &out)?;

    let mut mean_out = String::from("agent,env,episode,mean_episode_reward,moving_avg_100\n");
    for p in &curves.means {
        let _ = writeln!(
            mean_out,
            "{},{},{},{:.5},{:.5}",
            csv_field(&p.agent),
            csv_field(&p.env),
            p.episode,
            p.mean_episode_reward,
            p.moving_avg_100
        );
    }
    write_file(&mean_table_path(path), &mean_out)
}
