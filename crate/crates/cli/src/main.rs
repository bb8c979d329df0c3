//! `elkwolf`: batch front-end for smoothing, model discovery, selection and
//! bifurcation analysis of elk–wolf population data.

mod commands;
mod config;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Result};
use clap::{Parser, Subcommand};

use config::RunConfig;

#[derive(Parser, Debug)]
#[command(name = "elkwolf", version, about = "Elk–wolf population model pipeline")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Population CSV (`year,elk,wolf`).
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// ParamSet key-value file (a0..b7).
    #[arg(long, global = true)]
    params: Option<PathBuf>,
    /// Override a config key, e.g. `--set smooth.restarts=4`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE", value_parser = parse_override)]
    overrides: Vec<(String, String)>,
    /// Worker threads for parallel stages (outputs do not depend on this).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Generate a noisy synthetic population series from the model.
    Synth,
    /// Fit a Gaussian process per series and resample on a fine grid.
    Smooth,
    /// Run the ensemble sparse-regression grid on smoothed data.
    Discover,
    /// Score discovered models by AIC/BIC and pick the best.
    Select,
    /// Integrate a ParamSet or model file.
    Simulate,
    /// Interior equilibria and their stability.
    Equilibria,
    /// One-parameter equilibrium branches and their special points.
    Continue,
    /// Fold and Hopf curves in parameter planes.
    Codim2,
    /// Stable-coexistence intervals per parameter.
    Scan,
    /// Every stage in sequence.
    ReproducePaper,
}

fn parse_override(s: &str) -> Result<(String, String), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected KEY=VALUE, got '{s}'"))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

fn run(cli: Cli) -> Result<Vec<PathBuf>> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| anyhow!("setting up {n} threads: {e}"))?;
    }
    let mut cfg = RunConfig::load(cli.config.as_deref(), &cli.overrides)?;
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    if let Some(o) = cli.out {
        cfg.out = o;
    }
    if cli.input.is_some() {
        cfg.input = cli.input;
    }
    if cli.params.is_some() {
        cfg.params = cli.params;
    }
    cfg.validate()?;
    match cli.command {
        Command::Synth => commands::synth(&cfg),
        Command::Smooth => commands::smooth(&cfg),
        Command::Discover => commands::discover(&cfg),
        Command::Select => commands::select(&cfg),
        Command::Simulate => commands::simulate(&cfg),
        Command::Equilibria => commands::equilibria(&cfg),
        Command::Continue => commands::continuation(&cfg),
        Command::Codim2 => commands::codim2(&cfg),
        Command::Scan => commands::scan(&cfg),
        Command::ReproducePaper => commands::reproduce(&cfg),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
