//! Experiment runner: alternating training and evaluation phases over
//! several seeds, per-epoch metrics, CSV output, pre-training, transfer
//! and parameter sweeps.

mod build;
pub mod config;
mod linear;
mod sweep;
mod transfer;

use std::fmt::Write as _;
use std::path::Path;

use rand::Rng as _;

pub use build::build_controller;
pub use config::{Decomposition, EnvKind, ExperimentConfig, Learner};
pub use linear::LinearPacBoy;
pub use sweep::{
    sweep, sweep_act_interval, sweep_comm_penalty, sweep_comm_reward, sweep_csv, SweepParam,
    SweepPoint,
};
pub use transfer::{load_tables_into, pretrain, save_tables, transfer_load, NamedTable};

use crate::depgraph::{classify, schedule_for, DependencyGraph, TrainingSchedule};
use crate::error::{Error, Result};
use crate::learn::QTable;
use crate::mdp::FlatEnvironment;
use crate::rng::{self, Rng};
use crate::soc::{Phase, SocSystem};

/// What the runner needs to know about one environment step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub reward: f64,
    pub terminal: bool,
    pub communicated: bool,
}

/// Anything the runner can train and evaluate.
pub trait Controller: Send {
    fn begin_episode(&mut self, seed: u64);
    fn is_terminal(&self) -> bool;
    fn step(&mut self, phase: Phase) -> Result<StepOutcome>;
    /// A learning step under a uniformly random behaviour policy.
    fn step_random(&mut self) -> Result<StepOutcome>;
    /// Task performance of the episode so far (fruit fraction or catch).
    fn performance(&self) -> f64;
    /// Hash of every learned parameter.
    fn digest(&self) -> u64;
    /// Group name of each agent, in agent order.
    fn agent_groups(&self) -> Vec<String>;
    fn set_frozen(&mut self, agent: usize, frozen: bool);
    fn tables(&self) -> Vec<NamedTable>;
    /// Replaces the table called `name`. `Ok(false)` if there is none.
    fn load_table(&mut self, name: &str, table: QTable) -> Result<bool>;
}

impl<E> Controller for SocSystem<E>
where
    E: FlatEnvironment + Send,
{
    fn begin_episode(&mut self, seed: u64) {
        SocSystem::begin_episode(self, seed);
    }

    fn is_terminal(&self) -> bool {
        SocSystem::is_terminal(self)
    }

    fn step(&mut self, phase: Phase) -> Result<StepOutcome> {
        let r = SocSystem::step(self, phase)?;
        Ok(StepOutcome {
            reward: r.flat_reward,
            terminal: r.terminal,
            communicated: self.communicated(&r),
        })
    }

    fn step_random(&mut self) -> Result<StepOutcome> {
        let r = self.step_with_epsilon(1.0)?;
        Ok(StepOutcome {
            reward: r.flat_reward,
            terminal: r.terminal,
            communicated: self.communicated(&r),
        })
    }

    fn performance(&self) -> f64 {
        self.env().performance()
    }

    fn digest(&self) -> u64 {
        SocSystem::digest(self)
    }

    fn agent_groups(&self) -> Vec<String> {
        self.agents().iter().map(|a| a.group.clone()).collect()
    }

    fn set_frozen(&mut self, agent: usize, frozen: bool) {
        SocSystem::set_frozen(self, agent, frozen);
    }

    fn tables(&self) -> Vec<NamedTable> {
        let mut out: Vec<NamedTable> = Vec::new();
        for (i, a) in self.agents().iter().enumerate() {
            let idx = self.table_index(i);
            if out.iter().all(|t| t.name != self.table_names()[idx]) {
                out.push(NamedTable {
                    name: self.table_names()[idx].clone(),
                    group: a.group.clone(),
                    table: self.tables()[idx].clone(),
                });
            }
        }
        out
    }

    fn load_table(&mut self, name: &str, table: QTable) -> Result<bool> {
        match self.table_names().iter().position(|n| n == name) {
            Some(idx) => self.replace_table(idx, table).map(|_| true),
            None => Ok(false),
        }
    }
}

/// Evaluation results for one epoch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochMetrics {
    /// 1-based.
    pub epoch: usize,
    pub mean_reward: f64,
    pub mean_steps: f64,
    /// Fraction of spawned fruit eaten (Pac-Boy, fruit grid) or catch rate.
    pub performance: f64,
    /// Fraction of steps with a non-silent communication action.
    pub comm_frequency: f64,
}

#[derive(Debug, Clone)]
pub struct SeedRun {
    pub seed: u64,
    pub epochs: Vec<EpochMetrics>,
    /// Tables at the end of the run.
    pub tables: Vec<NamedTable>,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub runs: Vec<SeedRun>,
    /// Per-epoch mean over seeds.
    pub mean: Vec<EpochMetrics>,
}

impl ExperimentResult {
    /// Combines per-seed runs of equal length.
    pub fn from_runs(runs: Vec<SeedRun>) -> Result<Self> {
        if runs.is_empty() || runs.iter().any(|r| r.epochs.len() != runs[0].epochs.len()) {
            return Err(Error::InvalidArgument(
                "runs must be non-empty and of equal length".into(),
            ));
        }
        let mean = mean_series(&runs);
        Ok(Self { runs, mean })
    }

    pub fn final_mean(&self) -> &EpochMetrics {
        self.mean.last().expect("at least one epoch")
    }
}

/// Group-level training phases as per-agent frozen masks.
fn training_masks(cfg: &ExperimentConfig, agent_groups: &[String]) -> Result<Vec<Vec<bool>>> {
    let mut groups: Vec<String> = Vec::new();
    for g in agent_groups {
        if !groups.contains(g) {
            groups.push(g.clone());
        }
    }
    let mut graph = DependencyGraph::new(groups.iter().cloned())?;
    for (dependent, on) in &cfg.agents.depends {
        graph
            .add_dependency(dependent, on)
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    let order: Vec<usize> = match &cfg.learn.order {
        Some(names) => names
            .iter()
            .map(|n| graph.index_of(n))
            .collect::<Result<_>>()?,
        None => (0..groups.len()).collect(),
    };
    let schedule = schedule_for(
        classify(&graph),
        cfg.learn.schedule,
        cfg.learn.rounds,
        Some(&order),
    )?;
    if let TrainingSchedule::CoordinateDescent { .. } = schedule {
        log::info!("cyclic dependencies: training groups one at a time");
    }
    let phases = schedule.phases(groups.len())?;
    Ok(phases
        .into_iter()
        .map(|p| {
            agent_groups
                .iter()
                .map(|g| {
                    let gi = groups.iter().position(|x| x == g).expect("group listed");
                    p.frozen[gi] || cfg.learn.freeze.contains(g)
                })
                .collect()
        })
        .collect())
}

/// Runs `steps` training steps, splitting them evenly over the schedule's
/// phases. Starts with a fresh episode.
fn train_phase(
    ctl: &mut dyn Controller,
    masks: &[Vec<bool>],
    steps: u64,
    episodes: &mut Rng,
) -> Result<()> {
    ctl.begin_episode(episodes.gen());
    let per = steps / masks.len() as u64;
    for (k, mask) in masks.iter().enumerate() {
        for (i, &f) in mask.iter().enumerate() {
            ctl.set_frozen(i, f);
        }
        let n = if k + 1 == masks.len() {
            steps - per * k as u64
        } else {
            per
        };
        for _ in 0..n {
            if ctl.is_terminal() {
                ctl.begin_episode(episodes.gen());
            }
            ctl.step(Phase::Train)?;
        }
    }
    Ok(())
}

/// Greedy evaluation for `steps` steps. Episode statistics come from the
/// episodes completed within the budget; the unfinished tail is only used
/// when no episode completed.
fn eval_phase(
    ctl: &mut dyn Controller,
    epoch: usize,
    steps: u64,
    episodes: &mut Rng,
) -> Result<EpochMetrics> {
    let before = ctl.digest();
    ctl.begin_episode(episodes.gen());
    let (mut rewards, mut lengths, mut perf) = (Vec::new(), Vec::new(), Vec::new());
    let (mut ep_reward, mut ep_len, mut comm) = (0.0, 0u64, 0u64);
    for _ in 0..steps {
        if ctl.is_terminal() {
            ctl.begin_episode(episodes.gen());
        }
        let o = ctl.step(Phase::Eval)?;
        ep_reward += o.reward;
        ep_len += 1;
        comm += o.communicated as u64;
        if o.terminal {
            rewards.push(ep_reward);
            lengths.push(ep_len as f64);
            perf.push(ctl.performance());
            (ep_reward, ep_len) = (0.0, 0);
        }
    }
    if rewards.is_empty() {
        rewards.push(ep_reward);
        lengths.push(ep_len as f64);
        perf.push(ctl.performance());
    }
    if ctl.digest() != before {
        return Err(Error::InvalidArgument(
            "evaluation modified learned parameters".into(),
        ));
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    Ok(EpochMetrics {
        epoch,
        mean_reward: mean(&rewards),
        mean_steps: mean(&lengths),
        performance: mean(&perf),
        comm_frequency: comm as f64 / steps as f64,
    })
}

/// One seed of an experiment. With `train` false only evaluation phases run.
pub fn run_seed(cfg: &ExperimentConfig, seed: u64, train: bool) -> Result<SeedRun> {
    let mut ctl = build_controller(cfg, seed)?;
    let masks = training_masks(cfg, &ctl.agent_groups())?;
    let mut episodes = rng::stream(seed, "episodes");
    let mut epochs = Vec::with_capacity(cfg.run.epochs);
    for epoch in 1..=cfg.run.epochs {
        if train && cfg.run.train_steps > 0 {
            train_phase(ctl.as_mut(), &masks, cfg.run.train_steps, &mut episodes)?;
        }
        let m = eval_phase(ctl.as_mut(), epoch, cfg.run.eval_steps, &mut episodes)?;
        log::debug!(
            "seed {seed} epoch {epoch}: reward {:.3} steps {:.1} performance {:.3}",
            m.mean_reward,
            m.mean_steps,
            m.performance
        );
        epochs.push(m);
    }
    Ok(SeedRun {
        seed,
        epochs,
        tables: ctl.tables(),
    })
}

fn mean_series(runs: &[SeedRun]) -> Vec<EpochMetrics> {
    let n = runs.len() as f64;
    (0..runs[0].epochs.len())
        .map(|e| {
            let avg =
                |f: fn(&EpochMetrics) -> f64| runs.iter().map(|r| f(&r.epochs[e])).sum::<f64>() / n;
            EpochMetrics {
                epoch: e + 1,
                mean_reward: avg(|m| m.mean_reward),
                mean_steps: avg(|m| m.mean_steps),
                performance: avg(|m| m.performance),
                comm_frequency: avg(|m| m.comm_frequency),
            }
        })
        .collect()
}

/// Runs every seed of `cfg` in parallel.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    run_seeds(cfg, true)
}

/// Evaluation-only run, typically with `learn.init_tables` set.
pub fn evaluate(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    run_seeds(cfg, false)
}

fn run_seeds(cfg: &ExperimentConfig, train: bool) -> Result<ExperimentResult> {
    cfg.validate()?;
    let seeds = cfg.run.seed_list();
    let runs: Vec<Result<SeedRun>> = std::thread::scope(|scope| {
        let handles: Vec<_> = seeds
            .iter()
            .map(|&seed| scope.spawn(move || run_seed(cfg, seed, train)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("experiment thread panicked"))
            .collect()
    });
    ExperimentResult::from_runs(runs.into_iter().collect::<Result<Vec<_>>>()?)
}

pub const CSV_HEADER: &str =
    "seed,epoch,mean_reward,mean_steps,fruit_fraction_or_catch_rate,comm_frequency";

fn csv_row(out: &mut String, seed: &str, m: &EpochMetrics) {
    let _ = writeln!(
        out,
        "{seed},{},{},{},{},{}",
        m.epoch, m.mean_reward, m.mean_steps, m.performance, m.comm_frequency
    );
}

/// Per-seed rows followed by the mean rows (seed column `mean`).
pub fn metrics_csv(result: &ExperimentResult) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for run in &result.runs {
        for m in &run.epochs {
            csv_row(&mut out, &run.seed.to_string(), m);
        }
    }
    for m in &result.mean {
        csv_row(&mut out, "mean", m);
    }
    out
}

pub fn write_metrics(result: &ExperimentResult, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, metrics_csv(result))?;
    Ok(())
}
