//! Command-line benchmark runner.
//!
//! Configuration is a JSON file (see `BenchConfig`); every flag below
//! overrides the corresponding config field. Identical configs produce
//! byte-identical CSV output regardless of thread count (`EXTRL_THREADS`
//! caps parallelism).

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use extrl::{
    agent_spec_forms, env_names, mean_table_path, run_benchmark, run_curves, write_curve_tables,
    write_result_table, BenchConfig, DEFAULT_CURVE_EPISODES, DEFAULT_CURVE_SEEDS,
    DEFAULT_RUN_SEEDS, DEFAULT_RUN_STEPS,
};

#[derive(Parser)]
#[command(name = "extrl-bench", about = "Benchmark agents on extended environments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the agent×environment matrix and write a summary table.
    Run(RunArgs),
    /// Run per-episode learning curves on episodic environments.
    Curves(CurvesArgs),
    /// List the registered agents and environments.
    List,
}

#[derive(Args)]
struct CommonArgs {
    /// JSON config file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated agent specs, e.g. "q,rc(q),random"; commas inside
    /// parentheses belong to the agent spec. Repeatable.
    #[arg(long)]
    agents: Vec<String>,
    /// Comma-separated environment names, e.g. "tempting_button,cartpole*ignore_rewards". Repeatable.
    #[arg(long)]
    envs: Vec<String>,
    /// Seeds per pair.
    #[arg(long)]
    seeds: Option<u64>,
    /// Output CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Steps per run.
    #[arg(long)]
    steps: Option<u64>,
    /// Acknowledge the quadratic cost of long reverse_history runs.
    #[arg(long)]
    allow_quadratic: bool,
}

#[derive(Args)]
struct CurvesArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Episodes per seed.
    #[arg(long)]
    episodes: Option<u64>,
}

/// Split a comma-separated list, keeping commas inside parentheses —
/// agent specs like `q(lr=0.2,eps=0.1)` are single entries.
fn split_list(values: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    for value in values {
        let mut depth = 0usize;
        let mut current = String::new();
        for c in value.chars() {
            match c {
                '(' => {
                    depth += 1;
                    current.push(c);
                }
                ')' => {
                    depth = depth.saturating_sub(1);
                    current.push(c);
                }
                ',' if depth == 0 => {
                    if !current.trim().is_empty() {
                        out.push(current.trim().to_string());
                    }
                    current.clear();
                }
                _ => current.push(c),
            }
        }
        if !current.trim().is_empty() {
            out.push(current.trim().to_string());
        }
    }
    out
}

/// Load the config file if given, then lay the shared flags over it.
fn build_config(common: &CommonArgs, default_out: &str) -> Result<BenchConfig> {
    let mut config = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => BenchConfig { output_path: PathBuf::from(default_out), ..BenchConfig::default() },
    };
    if !common.agents.is_empty() {
        config.agents = split_list(&common.agents);
    }
    if !common.envs.is_empty() {
        config.envs = split_list(&common.envs);
    }
    if common.seeds.is_some() {
        config.seeds = common.seeds;
    }
    if let Some(out) = &common.out {
        config.output_path = out.clone();
    }
    if config.agents.is_empty() {
        anyhow::bail!("no agents selected; pass --agents or a config file");
    }
    if config.envs.is_empty() {
        anyhow::bail!("no environments selected; pass --envs or a config file");
    }
    Ok(config)
}

fn cmd_run(args: &RunArgs) -> Result<()> {
    let mut config = build_config(&args.common, "result_table.csv")?;
    if let Some(steps) = args.steps {
        config.steps = steps;
    }
    if args.allow_quadratic {
        config.allow_quadratic = true;
    }
    config.episode_curves = false;
    let rows = run_benchmark(&config)?;
    write_result_table(&rows, &config.output_path)?;
    println!(
        "wrote {} rows ({} steps, {} seeds each) to {}",
        rows.len(),
        config.steps,
        config.seeds.unwrap_or(DEFAULT_RUN_SEEDS),
        config.output_path.display()
    );
    Ok(())
}

fn cmd_curves(args: &CurvesArgs) -> Result<()> {
    let mut config = build_config(&args.common, "curves.csv")?;
    if let Some(episodes) = args.episodes {
        config.episodes = episodes;
    }
    config.episode_curves = true;
    if config.episodes == 0 {
        config.episodes = DEFAULT_CURVE_EPISODES;
    }
    let curves = run_curves(&config)?;
    write_curve_tables(&curves, &config.output_path)?;
    println!(
        "wrote {} curve points ({} seeds per pair) to {} and means to {}",
        curves.points.len(),
        config.seeds.unwrap_or(DEFAULT_CURVE_SEEDS),
        config.output_path.display(),
        mean_table_path(&config.output_path).display()
    );
    Ok(())
}

fn cmd_list() {
    println!("agents:");
    for form in agent_spec_forms() {
        println!("  {form}");
    }
    println!("environments:");
    for name in env_names() {
        println!("  {name}");
    }
    println!("  cartpole*<env>  (combined; env: ignore_rewards, incentivize_learning_rate, self_recognition, tempting_button)");
    println!("defaults: run {DEFAULT_RUN_STEPS} steps x {DEFAULT_RUN_SEEDS} seeds, curves {DEFAULT_CURVE_EPISODES} episodes x {DEFAULT_CURVE_SEEDS} seeds");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Curves(args) => cmd_curves(args),
        Command::List => {
            cmd_list();
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
