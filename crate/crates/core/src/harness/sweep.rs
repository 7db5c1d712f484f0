use std::fmt::Write as _;

use super::config::{Decomposition, EnvKind, ExperimentConfig};
use super::{run_experiment, ExperimentResult};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    CommBonus,
    CommPenalty,
    /// The high-level agent's act interval.
    ActInterval,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::CommBonus => "comm_bonus",
            SweepParam::CommPenalty => "comm_penalty",
            SweepParam::ActInterval => "act_interval",
        }
    }
}

impl std::str::FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "comm_bonus" => Ok(SweepParam::CommBonus),
            "comm_penalty" => Ok(SweepParam::CommPenalty),
            "act_interval" => Ok(SweepParam::ActInterval),
            _ => Err(Error::Config(format!("unknown sweep parameter `{s}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub value: f64,
    pub result: ExperimentResult,
}

impl SweepPoint {
    pub fn final_performance(&self) -> f64 {
        self.result.final_mean().performance
    }

    pub fn final_comm_frequency(&self) -> f64 {
        self.result.final_mean().comm_frequency
    }
}

fn require_catch(cfg: &ExperimentConfig) -> Result<()> {
    if cfg.env.kind != EnvKind::Catch || cfg.agents.decomposition != Decomposition::HighLow {
        return Err(Error::Config(
            "sweeps need the catch high_low decomposition".into(),
        ));
    }
    Ok(())
}

/// One full experiment per value, in the given order.
pub fn sweep(cfg: &ExperimentConfig, param: SweepParam, values: &[f64]) -> Result<Vec<SweepPoint>> {
    require_catch(cfg)?;
    if values.is_empty() {
        return Err(Error::Config("sweep needs at least one value".into()));
    }
    let mut out = Vec::with_capacity(values.len());
    for &value in values {
        let mut c = cfg.clone();
        match param {
            SweepParam::CommBonus => c.learn.comm_bonus = value,
            SweepParam::CommPenalty => c.learn.comm_penalty = value,
            SweepParam::ActInterval => {
                if value < 1.0 || value.fract() != 0.0 {
                    return Err(Error::Config(format!(
                        "act interval {value} is not a positive integer"
                    )));
                }
                c.agents.group_mut("high")?.act_interval = value as usize;
            }
        }
        log::info!("sweep {} = {value}", param.name());
        out.push(SweepPoint {
            value,
            result: run_experiment(&c)?,
        });
    }
    Ok(out)
}

pub fn sweep_comm_reward(cfg: &ExperimentConfig, values: &[f64]) -> Result<Vec<SweepPoint>> {
    sweep(cfg, SweepParam::CommBonus, values)
}

/// Needs the silent request enabled and the high-level agent acting every step.
pub fn sweep_comm_penalty(cfg: &ExperimentConfig, values: &[f64]) -> Result<Vec<SweepPoint>> {
    require_catch(cfg)?;
    let high = cfg.agents.group("high");
    if !high.comm_noop || high.act_interval != 1 {
        return Err(Error::Config(
            "a comm_penalty sweep needs high.comm_noop = true and high.act_interval = 1".into(),
        ));
    }
    sweep(cfg, SweepParam::CommPenalty, values)
}

/// Learning curves per high-level act interval. Acting too often tends
/// to slow learning down; acting too rarely lowers the final catch rate.
pub fn sweep_act_interval(cfg: &ExperimentConfig, intervals: &[usize]) -> Result<Vec<SweepPoint>> {
    let values: Vec<f64> = intervals.iter().map(|&k| k as f64).collect();
    sweep(cfg, SweepParam::ActInterval, &values)
}

/// Mean learning curve of every sweep point.
pub fn sweep_csv(param: SweepParam, points: &[SweepPoint]) -> String {
    let mut out = format!(
        "{},epoch,mean_reward,mean_steps,fruit_fraction_or_catch_rate,comm_frequency\n",
        param.name()
    );
    for p in points {
        for m in &p.result.mean {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                p.value, m.epoch, m.mean_reward, m.mean_steps, m.performance, m.comm_frequency
            );
        }
    }
    out
}
