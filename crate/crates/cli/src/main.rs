use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use soc_core::harness::{
    evaluate, pretrain, run_experiment, save_tables, sweep, sweep_csv, write_metrics,
    ExperimentConfig, ExperimentResult, SweepParam,
};
use soc_core::mdp::{value_iteration, TabularMdp};
use soc_core::{Error, Result};

#[derive(Parser, Debug)]
#[command(
    name = "soc",
    version,
    about = "Tabular separation-of-concerns RL experiments"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// First seed; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of consecutive seeds; overrides the config.
    #[arg(long, global = true)]
    seeds: Option<usize>,
    /// Output directory; overrides the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Only print warnings and errors.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train and evaluate every seed, writing metrics.csv and the final tables.
    Train { config: PathBuf },
    /// Evaluate saved tables without learning.
    Eval {
        config: PathBuf,
        /// Directory of `.qtable` files, or one with a `seed-<n>` subdirectory per seed.
        #[arg(long)]
        tables: PathBuf,
    },
    /// Learn one agent group's tables under a uniformly random behaviour policy.
    Pretrain {
        config: PathBuf,
        /// Agent group, or `both` for every group.
        #[arg(long)]
        group: String,
        #[arg(long)]
        steps: u64,
    },
    /// One experiment per value of a Catch parameter.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        param: SweepParam,
        #[arg(long, num_args = 1.., value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
    /// Solve a tabular MDP file by value iteration.
    Oracle {
        mdp: PathBuf,
        #[arg(long)]
        gamma: f64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

fn load_config(path: &Path, g: &Global) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(path).map_err(|e| match e {
        Error::Io(io) => Error::Config(format!("{}: {io}", path.display())),
        e => e,
    })?;
    if let Some(s) = g.seed {
        cfg.run.seed = s;
    }
    if let Some(n) = g.seeds {
        cfg.run.seeds = n;
    }
    if let Some(o) = &g.out {
        cfg.run.out = Some(o.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn out_dir(cfg: &ExperimentConfig) -> PathBuf {
    cfg.run.out.clone().unwrap_or_else(|| PathBuf::from("out"))
}

fn seed_dir(root: &Path, seed: u64) -> PathBuf {
    root.join(format!("seed-{seed}"))
}

fn report(result: &ExperimentResult) {
    let m = result.final_mean();
    log::info!(
        "epoch {}: mean reward {:.3}, mean steps {:.1}, performance {:.3}, comm frequency {:.3}",
        m.epoch,
        m.mean_reward,
        m.mean_steps,
        m.performance,
        m.comm_frequency
    );
}

fn train(cfg: &ExperimentConfig) -> Result<()> {
    let out = out_dir(cfg);
    let result = run_experiment(cfg)?;
    write_metrics(&result, &out.join("metrics.csv"))?;
    for run in &result.runs {
        save_tables(&seed_dir(&out.join("tables"), run.seed), &run.tables)?;
    }
    report(&result);
    log::info!("wrote {}", out.display());
    Ok(())
}

fn eval(cfg: &ExperimentConfig, tables: &Path) -> Result<()> {
    let out = out_dir(cfg);
    let per_seed = cfg
        .run
        .seed_list()
        .iter()
        .all(|&s| seed_dir(tables, s).is_dir());
    let result = if per_seed {
        let mut runs = Vec::new();
        for seed in cfg.run.seed_list() {
            let mut c = cfg.clone();
            c.run.seed = seed;
            c.run.seeds = 1;
            c.learn.init_tables = Some(seed_dir(tables, seed));
            runs.extend(evaluate(&c)?.runs);
        }
        ExperimentResult::from_runs(runs)?
    } else {
        let mut c = cfg.clone();
        c.learn.init_tables = Some(tables.to_path_buf());
        evaluate(&c)?
    };
    write_metrics(&result, &out.join("eval.csv"))?;
    report(&result);
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let g = &cli.global;
    match &cli.command {
        Command::Train { config } => train(&load_config(config, g)?),
        Command::Eval { config, tables } => eval(&load_config(config, g)?, tables),
        Command::Pretrain {
            config,
            group,
            steps,
        } => {
            let cfg = load_config(config, g)?;
            let out = out_dir(&cfg);
            for seed in cfg.run.seed_list() {
                let tables = pretrain(&cfg, group, *steps, seed)?;
                save_tables(&seed_dir(&out.join("tables"), seed), &tables)?;
                log::info!("seed {seed}: pretrained {} table(s)", tables.len());
            }
            Ok(())
        }
        Command::Sweep {
            config,
            param,
            values,
        } => {
            let cfg = load_config(config, g)?;
            let points = sweep(&cfg, *param, values)?;
            let out = out_dir(&cfg);
            std::fs::create_dir_all(&out)?;
            std::fs::write(
                out.join(format!("sweep_{}.csv", param.name())),
                sweep_csv(*param, &points),
            )?;
            for p in &points {
                println!(
                    "{} = {}: performance {:.3}, comm frequency {:.3}",
                    param.name(),
                    p.value,
                    p.final_performance(),
                    p.final_comm_frequency()
                );
            }
            Ok(())
        }
        Command::Oracle { mdp, gamma, tol } => {
            let mdp = TabularMdp::load(mdp)?;
            let q = value_iteration(&mdp, *gamma, *tol)?;
            println!("state,value,action");
            for s in 0..mdp.n_states() {
                println!("{s},{},{}", q.max_value(s), q.greedy_action(s));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let level = if cli.global.quiet { "warn" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_config_error() {
        2
    } else {
        3
    }
}
