// Copyright 2026 The pulseprep Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pulseprep::experiment::{
    compare_durations, format_duration_table, replay, run_experiment, sweep_correlations, validate_lu, BaselineTable,
    Budget, ExperimentConfig, RunArtifact, SweepMode,
};
use pulseprep::optimize::{DeConfig, LuFitConfig};
use pulseprep::protocol::ProtocolKind;

/// Exit status for invalid configuration or input files.
const EXIT_CONFIG: u8 = 2;
/// Exit status for solver or optimizer failures.
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(name = "pulseprep", version, about = "Optimize transmon pulse protocols for entanglement resources")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize the protocol described by an experiment config and write its result bundle.
    Run {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// fast, paper or standard
        #[arg(long)]
        budget: Option<Budget>,
        /// Output directory (default: the config's `output`, else $PULSEPREP_OUT/<name>).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare pulse durations of run artifacts with the gate-compiled baselines.
    CompareDurations {
        runs: Vec<PathBuf>,
        /// Use the published pulse durations instead of run artifacts.
        #[arg(long)]
        published: bool,
    },
    /// Fit local unitaries mapping a run's final state onto a canonical state.
    ValidateLu {
        run: PathBuf,
        /// bell, ghz or w (default: the run's protocol)
        #[arg(long)]
        target: Option<ProtocolKind>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sample (w_cost, three-tangle) pairs over a three-qubit template.
    Sweep {
        config: PathBuf,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Output file for the two-column dataset (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-evaluate a run artifact and check it reproduces the recorded state.
    Replay { run: PathBuf },
}

enum Failure {
    Config(String),
    Runtime(String),
}

type Outcome = std::result::Result<(), Failure>;

fn config_err(e: impl std::fmt::Display) -> Failure {
    Failure::Config(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> Failure {
    Failure::Runtime(e.to_string())
}

fn default_out(cfg: &ExperimentConfig) -> Option<PathBuf> {
    if cfg.output.is_some() {
        return None;
    }
    let root = std::env::var_os("PULSEPREP_OUT").map(PathBuf::from).unwrap_or_else(|| PathBuf::from("pulseprep-out"));
    Some(root.join(&cfg.name))
}

fn load_config(path: &Path) -> std::result::Result<ExperimentConfig, Failure> {
    let cfg = ExperimentConfig::load(path).map_err(config_err)?;
    Ok(cfg)
}

fn cmd_run(config: &Path, seed: Option<u64>, budget: Option<Budget>, out: Option<PathBuf>) -> Outcome {
    let mut cfg = load_config(config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(b) = budget {
        cfg.budget = b;
    }
    cfg.validate().map_err(config_err)?;
    let out = out.or_else(|| default_out(&cfg));
    let bundle = run_experiment(&cfg, out.as_deref()).map_err(runtime_err)?;
    for line in bundle.artifact.summary_lines() {
        println!("{line}");
    }
    for f in &bundle.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn cmd_compare(runs: &[PathBuf], published: bool) -> Outcome {
    let mut inputs = Vec::new();
    if published {
        inputs.extend(BaselineTable::ENTRIES.iter().map(|e| (e.kind, e.pulse_dt)));
    }
    for path in runs {
        let run = RunArtifact::load(path).map_err(config_err)?;
        inputs.push((run.template.kind, run.duration_dt));
    }
    if inputs.is_empty() {
        return Err(Failure::Config("give at least one run artifact or --published".into()));
    }
    print!("{}", format_duration_table(&compare_durations(&inputs)));
    println!("# {}", BaselineTable::note());
    Ok(())
}

fn cmd_validate_lu(path: &Path, target: Option<ProtocolKind>, seed: u64) -> Outcome {
    let run = RunArtifact::load(path).map_err(config_err)?;
    let psi = run.qubit_state().map_err(config_err)?;
    let cfg = LuFitConfig {
        de: DeConfig { seed, ..LuFitConfig::default().de },
        ..LuFitConfig::default()
    };
    let report = validate_lu(&psi, target.unwrap_or(run.template.kind), &cfg).map_err(runtime_err)?;
    println!("target {}", report.target);
    println!("bures_before {:.6e}", report.baseline_bures);
    println!("bures {:.6e}", report.bures);
    let angles: Vec<String> = report.angles.iter().map(|a| format!("{a:.8}")).collect();
    println!("angles {}", angles.join(" "));
    Ok(())
}

fn cmd_sweep(config: &Path, samples: usize, seed: Option<u64>, out: Option<PathBuf>) -> Outcome {
    let cfg = load_config(config)?;
    cfg.validate().map_err(config_err)?;
    let dev = cfg.resolve_device().map_err(config_err)?;
    let template = cfg.square_template(dev.dt);
    let bounds = cfg.bounds.for_template(&template).map_err(config_err)?;
    let mode = SweepMode::Random { samples, seed: seed.unwrap_or(cfg.seed) };
    let data = sweep_correlations(&template, &dev.device, &cfg.solver, &bounds, &mode).map_err(runtime_err)?;
    match out {
        Some(path) => {
            std::fs::write(&path, data.to_columns()).map_err(runtime_err)?;
            println!("wrote {} points to {}", data.points.len(), path.display());
        }
        None => print!("{}", data.to_columns()),
    }
    Ok(())
}

fn cmd_replay(path: &Path) -> Outcome {
    let run = RunArtifact::load(path).map_err(config_err)?;
    let report = replay(&run).map_err(runtime_err)?;
    println!("experiment {}", run.name);
    println!("cost {:.9}", report.cost);
    println!("duration_dt {}", report.duration_dt);
    println!("max_amplitude_diff {:.3e}", report.max_amplitude_diff);
    println!("identical {}", report.identical);
    if !report.identical {
        return Err(Failure::Runtime("replayed metrics differ from the recorded run".into()));
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { config, seed, budget, out } => cmd_run(&config, seed, budget, out),
        Command::CompareDurations { runs, published } => cmd_compare(&runs, published),
        Command::ValidateLu { run, target, seed } => cmd_validate_lu(&run, target, seed),
        Command::Sweep { config, samples, seed, out } => cmd_sweep(&config, samples, seed, out),
        Command::Replay { run } => cmd_replay(&run),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}
