//! Experiment configuration files.
//!
//! ```text
//! # comment
//! [env]
//! name = catch
//! [agents]
//! decomposition = high_low
//! high.act_interval = 2
//! depends: low <- high
//! [run]
//! epochs = 50
//! ```
//!
//! Sections are `env`, `agents`, `aggregator`, `learn` and `run`. Unknown
//! sections, keys and agent groups are errors. Defaults depend on the
//! environment and are listed on [`ExperimentConfig::defaults_for`].

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::depgraph::SchedulePolicy;
use crate::error::{Error, Result};
use crate::learn::{EpsilonSchedule, TieBreak};
use crate::soc::{Aggregator, Vote};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvKind {
    PacBoy,
    Catch,
    FruitGrid,
    FallingFruit,
}

impl FromStr for EnvKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pacboy" => Ok(EnvKind::PacBoy),
            "catch" => Ok(EnvKind::Catch),
            "fruitgrid" => Ok(EnvKind::FruitGrid),
            "fallingfruit" => Ok(EnvKind::FallingFruit),
            _ => Err(Error::Config(format!(
                "unknown environment `{s}` (expected pacboy, catch, fruitgrid or fallingfruit)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decomposition {
    /// Pac-Boy: fruit and ghost agents scoring every flat action.
    Ensemble,
    /// Catch: a communicating high-level agent and a paddle-moving low-level agent.
    HighLow,
    /// Fruit grid: horizontal and vertical agents.
    Split,
    /// Falling fruit, body then arm.
    Acyclic,
    /// Falling fruit, body and arm depending on each other.
    Cyclic,
    /// One agent with the whole state.
    Flat,
}

impl FromStr for Decomposition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "ensemble" => Decomposition::Ensemble,
            "high_low" => Decomposition::HighLow,
            "split" => Decomposition::Split,
            "acyclic" => Decomposition::Acyclic,
            "cyclic" => Decomposition::Cyclic,
            "flat" => Decomposition::Flat,
            _ => return Err(Error::Config(format!("unknown decomposition `{s}`"))),
        })
    }
}

impl Decomposition {
    /// Agent groups this decomposition creates.
    pub fn groups(self) -> &'static [&'static str] {
        match self {
            Decomposition::Ensemble => &["fruits", "ghosts"],
            Decomposition::HighLow => &["high", "low"],
            Decomposition::Split => &["horizontal", "vertical"],
            Decomposition::Acyclic | Decomposition::Cyclic => &["body", "arm"],
            Decomposition::Flat => &["flat"],
        }
    }

    fn default_for(env: EnvKind) -> Self {
        match env {
            EnvKind::PacBoy => Decomposition::Ensemble,
            EnvKind::Catch => Decomposition::HighLow,
            EnvKind::FruitGrid => Decomposition::Split,
            EnvKind::FallingFruit => Decomposition::Acyclic,
        }
    }

    fn supports(self, env: EnvKind) -> bool {
        matches!(
            (env, self),
            (EnvKind::PacBoy, Decomposition::Ensemble)
                | (EnvKind::Catch, Decomposition::HighLow | Decomposition::Flat)
                | (
                    EnvKind::FruitGrid,
                    Decomposition::Split | Decomposition::Flat
                )
                | (
                    EnvKind::FallingFruit,
                    Decomposition::Acyclic | Decomposition::Cyclic | Decomposition::Flat
                )
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Learner {
    Soc,
    /// Linear function approximation over the one-hot Pac-Boy features.
    Linear,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvConfig {
    pub kind: EnvKind,
    pub maze: Option<PathBuf>,
    pub size: u8,
    pub width: u8,
    pub height: u8,
    pub fruits: usize,
    pub time_limit: Option<u32>,
    pub reach: u8,
    pub max_steps: u16,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupConfig {
    pub gamma: f64,
    pub alpha: f64,
    pub act_interval: usize,
    pub share_table: bool,
    pub comm_noop: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentsConfig {
    pub decomposition: Decomposition,
    pub groups: BTreeMap<String, GroupConfig>,
    /// `(dependent, depended_on)` group pairs.
    pub depends: Vec<(String, String)>,
}

impl AgentsConfig {
    pub fn group(&self, name: &str) -> &GroupConfig {
        &self.groups[name]
    }

    pub fn group_mut(&mut self, name: &str) -> Result<&mut GroupConfig> {
        self.groups
            .get_mut(name)
            .ok_or_else(|| Error::Config(format!("no agent group `{name}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnConfig {
    pub learner: Learner,
    pub epsilon: EpsilonSchedule,
    /// Discount and step size of the linear learner.
    pub gamma: f64,
    pub alpha: f64,
    pub comm_bonus: f64,
    pub comm_penalty: f64,
    pub tie_break: TieBreak,
    pub schedule: SchedulePolicy,
    pub rounds: usize,
    /// Group order for coordinate descent; declaration order when absent.
    pub order: Option<Vec<String>>,
    pub init_tables: Option<PathBuf>,
    pub freeze: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub epochs: usize,
    pub train_steps: u64,
    pub eval_steps: u64,
    pub seed: u64,
    pub seeds: usize,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn seed_list(&self) -> Vec<u64> {
        (0..self.seeds as u64).map(|i| self.seed + i).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub env: EnvConfig,
    pub agents: AgentsConfig,
    pub aggregator: Aggregator,
    pub learn: LearnConfig,
    pub run: RunConfig,
}

impl ExperimentConfig {
    /// Defaults for `env` with its default decomposition.
    ///
    /// Pac-Boy: SoC discount 0.4, step size 1 for fruit agents and 0.1 for
    /// ghost agents, exploration fixed at 0.1, 20000 training and 10000
    /// evaluation steps per epoch; the linear learner uses discount 0.9,
    /// step size 0.005 and exploration annealed from 1 to 0 over 150000
    /// steps. Catch: 1000/1000 steps per epoch, step size 0.1, discounts
    /// 0.99 (high) and 0.65 (low), high-level act interval 2, exploration
    /// annealed from 1 to 0.01 over 10000 steps, comm bonus 0.1.
    pub fn defaults_for(env: EnvKind) -> Self {
        Self::defaults(env, Decomposition::default_for(env))
    }

    fn defaults(env: EnvKind, decomposition: Decomposition) -> Self {
        let sched = |i, f, n| EpsilonSchedule::new(i, f, n).expect("valid default schedule");
        let group = |gamma, alpha| GroupConfig {
            gamma,
            alpha,
            act_interval: 1,
            share_table: false,
            comm_noop: false,
        };
        let mut groups = BTreeMap::new();
        let (epsilon, train_steps, eval_steps, epochs) = match env {
            EnvKind::PacBoy => {
                groups.insert("fruits".into(), group(0.4, 1.0));
                groups.insert(
                    "ghosts".into(),
                    GroupConfig {
                        share_table: true,
                        ..group(0.4, 0.1)
                    },
                );
                (sched(0.1, 0.1, 0), 20_000, 10_000, 100)
            }
            EnvKind::Catch => {
                groups.insert(
                    "high".into(),
                    GroupConfig {
                        act_interval: 2,
                        ..group(0.99, 0.1)
                    },
                );
                groups.insert("low".into(), group(0.65, 0.1));
                (sched(1.0, 0.01, 10_000), 1_000, 1_000, 200)
            }
            EnvKind::FruitGrid | EnvKind::FallingFruit => {
                for g in decomposition.groups() {
                    groups.insert((*g).into(), group(0.9, 0.5));
                }
                (sched(1.0, 0.05, 20_000), 2_000, 1_000, 50)
            }
        };
        if decomposition == Decomposition::Flat {
            groups.clear();
            let (gamma, alpha) = if env == EnvKind::Catch {
                (0.99, 0.1)
            } else {
                (0.9, 0.5)
            };
            groups.insert("flat".into(), group(gamma, alpha));
        }
        Self {
            env: EnvConfig {
                kind: env,
                maze: None,
                size: crate::envs::catch::DEFAULT_SIZE,
                width: 10,
                height: 10,
                fruits: 1,
                time_limit: Some(100),
                reach: 2,
                max_steps: crate::envs::pacboy::EPISODE_LIMIT,
            },
            agents: AgentsConfig {
                decomposition,
                groups,
                depends: Vec::new(),
            },
            aggregator: Aggregator::QSum,
            learn: LearnConfig {
                learner: Learner::Soc,
                epsilon,
                gamma: 0.9,
                alpha: 0.005,
                comm_bonus: 0.1,
                comm_penalty: 0.0,
                tie_break: TieBreak::Random,
                schedule: SchedulePolicy::Strict,
                rounds: 1,
                order: None,
                init_tables: None,
                freeze: Vec::new(),
            },
            run: RunConfig {
                epochs,
                train_steps,
                eval_steps,
                seed: 1,
                seeds: 5,
                out: None,
            },
        }
    }

    /// Switches to the linear Pac-Boy learner with its own defaults.
    pub fn use_linear_learner(&mut self) {
        self.learn.learner = Learner::Linear;
        self.learn.gamma = 0.9;
        self.learn.alpha = 0.005;
        self.learn.epsilon = EpsilonSchedule::new(1.0, 0.0, 150_000).expect("valid schedule");
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::parse(&text)?;
        // Relative paths are relative to the config file.
        if let Some(dir) = path.parent() {
            for p in [
                &mut cfg.env.maze,
                &mut cfg.learn.init_tables,
                &mut cfg.run.out,
            ]
            .into_iter()
            .flatten()
            {
                if p.is_relative() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let raw = RawConfig::parse(text)?;
        raw.build()
    }

    pub fn validate(&self) -> Result<()> {
        if !self.agents.decomposition.supports(self.env.kind) {
            return Err(Error::Config(format!(
                "decomposition {:?} is not available for {:?}",
                self.agents.decomposition, self.env.kind
            )));
        }
        if self.learn.learner == Learner::Linear && self.env.kind != EnvKind::PacBoy {
            return Err(Error::Config(
                "the linear learner is only available for pacboy".into(),
            ));
        }
        if self.run.epochs == 0 || self.run.seeds == 0 {
            return Err(Error::Config(
                "run.epochs and run.seeds must be positive".into(),
            ));
        }
        if self.run.eval_steps == 0 {
            return Err(Error::Config("run.eval_steps must be positive".into()));
        }
        for (name, g) in &self.agents.groups {
            if !(0.0..=1.0).contains(&g.gamma) || !(0.0..=1.0).contains(&g.alpha) {
                return Err(Error::Config(format!(
                    "{name}: gamma and alpha must lie in [0,1]"
                )));
            }
            if g.act_interval == 0 {
                return Err(Error::Config(format!(
                    "{name}.act_interval must be at least 1"
                )));
            }
        }
        if self.learn.comm_bonus < 0.0 || self.learn.comm_penalty < 0.0 {
            return Err(Error::Config(
                "comm_bonus and comm_penalty must be nonnegative".into(),
            ));
        }
        let known = self.agents.decomposition.groups();
        let names = self
            .agents
            .depends
            .iter()
            .flat_map(|(a, b)| [a, b])
            .chain(self.learn.freeze.iter())
            .chain(self.learn.order.iter().flatten());
        for n in names {
            if !known.contains(&n.as_str()) {
                return Err(Error::Config(format!(
                    "unknown agent group `{n}` (expected one of {known:?})"
                )));
            }
        }
        if self.learn.rounds == 0 {
            return Err(Error::Config("learn.rounds must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug)]
struct Entry {
    line: usize,
    value: String,
}

#[derive(Debug, Default)]
struct RawConfig {
    values: BTreeMap<(String, String), Entry>,
    depends: Vec<(usize, String, String)>,
}

const SECTIONS: [&str; 5] = ["env", "agents", "aggregator", "learn", "run"];
const GROUP_KEYS: [&str; 5] = ["gamma", "alpha", "act_interval", "share_table", "comm_noop"];

fn known_key(section: &str, key: &str) -> bool {
    let keys: &[&str] = match section {
        "env" => &[
            "name",
            "maze",
            "size",
            "width",
            "height",
            "fruits",
            "time_limit",
            "reach",
            "max_steps",
        ],
        "agents" => &["decomposition"],
        "aggregator" => &["kind", "p"],
        "learn" => &[
            "learner",
            "epsilon",
            "epsilon_initial",
            "epsilon_final",
            "epsilon_anneal_steps",
            "gamma",
            "alpha",
            "comm_bonus",
            "comm_penalty",
            "tie_break",
            "schedule",
            "rounds",
            "order",
            "init_tables",
            "freeze",
        ],
        "run" => &[
            "epochs",
            "train_steps",
            "eval_steps",
            "seed",
            "seeds",
            "out",
        ],
        _ => &[],
    };
    keys.contains(&key)
        || (section == "agents"
            && key
                .split_once('.')
                .is_some_and(|(_, k)| GROUP_KEYS.contains(&k)))
}

impl RawConfig {
    fn parse(text: &str) -> Result<Self> {
        let mut raw = RawConfig::default();
        let mut section: Option<String> = None;
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { line: line_no, msg };
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| err(format!("unterminated section header `{line}`")))?
                    .trim();
                if !SECTIONS.contains(&name) {
                    return Err(err(format!("unknown section [{name}]")));
                }
                section = Some(name.to_string());
                continue;
            }
            let sec = section
                .as_deref()
                .ok_or_else(|| err("key outside of any section".into()))?;
            if let Some(rest) = line.strip_prefix("depends:") {
                if sec != "agents" {
                    return Err(err("`depends:` lines belong in [agents]".into()));
                }
                let (dependent, on) = rest.split_once("<-").ok_or_else(|| {
                    err(format!(
                        "expected `depends: <group> <- <group>`, got `{line}`"
                    ))
                })?;
                raw.depends
                    .push((line_no, dependent.trim().to_string(), on.trim().to_string()));
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if !known_key(sec, key) {
                return Err(err(format!("unknown key `{key}` in [{sec}]")));
            }
            let prev = raw.values.insert(
                (sec.to_string(), key.to_string()),
                Entry {
                    line: line_no,
                    value: value.to_string(),
                },
            );
            if prev.is_some() {
                return Err(err(format!("duplicate key `{key}` in [{sec}]")));
            }
        }
        Ok(raw)
    }

    fn get(&self, section: &str, key: &str) -> Option<&Entry> {
        self.values.get(&(section.to_string(), key.to_string()))
    }

    fn typed<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<T>> {
        match self.get(section, key) {
            None => Ok(None),
            Some(e) => e.value.parse().map(Some).map_err(|_| Error::Parse {
                line: e.line,
                msg: format!("bad value `{}` for {section}.{key}", e.value),
            }),
        }
    }

    fn set<T: FromStr>(&self, section: &str, key: &str, slot: &mut T) -> Result<()> {
        if let Some(v) = self.typed(section, key)? {
            *slot = v;
        }
        Ok(())
    }

    fn list(&self, section: &str, key: &str) -> Option<Vec<String>> {
        self.get(section, key).map(|e| {
            e.value
                .split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect()
        })
    }

    fn build(self) -> Result<ExperimentConfig> {
        let env: EnvKind = self
            .typed::<String>("env", "name")?
            .ok_or_else(|| Error::Config("[env] name is required".into()))?
            .parse()?;
        let decomposition = match self.typed::<String>("agents", "decomposition")? {
            Some(d) => d.parse()?,
            None => Decomposition::default_for(env),
        };
        let mut cfg = ExperimentConfig::defaults(env, decomposition);

        if let Some(l) = self.typed::<String>("learn", "learner")? {
            match l.as_str() {
                "soc" => {}
                "linear" => cfg.use_linear_learner(),
                _ => return Err(Error::Config(format!("unknown learner `{l}`"))),
            }
        }

        let e = &mut cfg.env;
        if let Some(m) = self.typed::<String>("env", "maze")? {
            e.maze = Some(PathBuf::from(m));
        }
        self.set("env", "size", &mut e.size)?;
        self.set("env", "width", &mut e.width)?;
        self.set("env", "height", &mut e.height)?;
        self.set("env", "fruits", &mut e.fruits)?;
        self.set("env", "reach", &mut e.reach)?;
        self.set("env", "max_steps", &mut e.max_steps)?;
        if let Some(t) = self.typed::<String>("env", "time_limit")? {
            e.time_limit = match t.as_str() {
                "none" => None,
                _ => Some(
                    t.parse()
                        .map_err(|_| Error::Config(format!("bad time_limit `{t}`")))?,
                ),
            };
        }

        for ((sec, key), entry) in &self.values {
            if sec != "agents" {
                continue;
            }
            let Some((group, field)) = key.split_once('.') else {
                continue;
            };
            let known = decomposition.groups();
            let g = cfg.agents.groups.get_mut(group).ok_or_else(|| Error::Parse {
                line: entry.line,
                msg: format!("unknown agent group `{group}` for {decomposition:?} (expected one of {known:?})"),
            })?;
            let bad = || Error::Parse {
                line: entry.line,
                msg: format!("bad value `{}` for {key}", entry.value),
            };
            let v = entry.value.as_str();
            match field {
                "gamma" => g.gamma = v.parse().map_err(|_| bad())?,
                "alpha" => g.alpha = v.parse().map_err(|_| bad())?,
                "act_interval" => g.act_interval = v.parse().map_err(|_| bad())?,
                "share_table" => g.share_table = v.parse().map_err(|_| bad())?,
                "comm_noop" => g.comm_noop = v.parse().map_err(|_| bad())?,
                _ => unreachable!("group keys are checked while parsing"),
            }
        }
        cfg.agents.depends = self
            .depends
            .iter()
            .map(|(_, a, b)| (a.clone(), b.clone()))
            .collect();

        if let Some(kind) = self.typed::<String>("aggregator", "kind")? {
            let p: f64 = self.typed("aggregator", "p")?.unwrap_or(1.0);
            cfg.aggregator = match kind.as_str() {
                "qsum" => Aggregator::QSum,
                "majority" => Aggregator::Vote(Vote::Majority),
                "rank" => Aggregator::Vote(Vote::Rank),
                "power_mean" => Aggregator::Vote(Vote::PowerMean(p)),
                _ => return Err(Error::Config(format!("unknown aggregator `{kind}`"))),
            };
        } else if self.get("aggregator", "p").is_some() {
            return Err(Error::Config(
                "aggregator.p requires kind = power_mean".into(),
            ));
        }

        let l = &mut cfg.learn;
        let eps = l.epsilon;
        let (mut init, mut fin, mut steps) = (eps.initial, eps.final_value, eps.anneal_steps);
        if let Some(c) = self.typed::<f64>("learn", "epsilon")? {
            (init, fin, steps) = (c, c, 0);
        }
        self.set("learn", "epsilon_initial", &mut init)?;
        self.set("learn", "epsilon_final", &mut fin)?;
        self.set("learn", "epsilon_anneal_steps", &mut steps)?;
        l.epsilon =
            EpsilonSchedule::new(init, fin, steps).map_err(|e| Error::Config(e.to_string()))?;
        self.set("learn", "gamma", &mut l.gamma)?;
        self.set("learn", "alpha", &mut l.alpha)?;
        self.set("learn", "comm_bonus", &mut l.comm_bonus)?;
        self.set("learn", "comm_penalty", &mut l.comm_penalty)?;
        self.set("learn", "rounds", &mut l.rounds)?;
        if let Some(t) = self.typed::<String>("learn", "tie_break")? {
            l.tie_break = match t.as_str() {
                "random" => TieBreak::Random,
                "lowest" => TieBreak::LowestIndex,
                _ => return Err(Error::Config(format!("unknown tie_break `{t}`"))),
            };
        }
        if let Some(s) = self.typed::<String>("learn", "schedule")? {
            l.schedule = match s.as_str() {
                "strict" => SchedulePolicy::Strict,
                "best_effort" => SchedulePolicy::BestEffort,
                _ => return Err(Error::Config(format!("unknown schedule `{s}`"))),
            };
        }
        l.order = self.list("learn", "order");
        if let Some(p) = self.typed::<String>("learn", "init_tables")? {
            l.init_tables = Some(PathBuf::from(p));
        }
        l.freeze = self.list("learn", "freeze").unwrap_or_default();

        let r = &mut cfg.run;
        self.set("run", "epochs", &mut r.epochs)?;
        self.set("run", "train_steps", &mut r.train_steps)?;
        self.set("run", "eval_steps", &mut r.eval_steps)?;
        self.set("run", "seed", &mut r.seed)?;
        self.set("run", "seeds", &mut r.seeds)?;
        if let Some(o) = self.typed::<String>("run", "out")? {
            r.out = Some(PathBuf::from(o));
        }

        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pacboy_defaults() {
        let c = ExperimentConfig::parse("[env]\nname = pacboy\n").unwrap();
        assert_eq!(c.run.train_steps, 20_000);
        assert_eq!(c.run.eval_steps, 10_000);
        assert_eq!(c.agents.group("fruits").gamma, 0.4);
        assert_eq!(c.agents.group("fruits").alpha, 1.0);
        assert_eq!(c.agents.group("ghosts").alpha, 0.1);
        assert_eq!(c.learn.epsilon.value(0), 0.1);
        assert_eq!(c.learn.epsilon.value(1_000_000), 0.1);
        assert_eq!(c.run.seed_list(), vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn linear_defaults() {
        let c =
            ExperimentConfig::parse("[env]\nname = pacboy\n[learn]\nlearner = linear\n").unwrap();
        assert_eq!((c.learn.gamma, c.learn.alpha), (0.9, 0.005));
        assert_eq!(c.learn.epsilon.value(0), 1.0);
        assert_eq!(c.learn.epsilon.value(150_000), 0.0);
    }

    #[test]
    fn full_catch_config() {
        let text = "\
# catch with a silent request
[env]
name = catch
size = 24
[agents]
decomposition = high_low
high.act_interval = 1
high.comm_noop = true
low.gamma = 0.6
depends: low <- high
depends: high <- low
[learn]
comm_penalty = 0.05
schedule = best_effort
[run]
epochs = 3
seeds = 2
seed = 7
";
        let c = ExperimentConfig::parse(text).unwrap();
        assert_eq!(c.agents.group("high").act_interval, 1);
        assert!(c.agents.group("high").comm_noop);
        assert_eq!(c.agents.group("low").gamma, 0.6);
        assert_eq!(c.agents.depends.len(), 2);
        assert_eq!(c.learn.schedule, SchedulePolicy::BestEffort);
        assert_eq!(c.run.seed_list(), vec![7, 8]);
    }

    #[test]
    fn errors_point_at_lines() {
        let e = ExperimentConfig::parse("[env]\nname = catch\ncolour = red\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e}");
        let e = ExperimentConfig::parse("[env]\nname = catch\n[agents]\nfruits.gamma = 0.5\n")
            .unwrap_err();
        assert!(matches!(e, Error::Parse { line: 4, .. }), "{e}");
        let e = ExperimentConfig::parse("[env]\nname = catch\n[run]\nepochs = many\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 4, .. }), "{e}");
        let e = ExperimentConfig::parse("[bogus]\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }), "{e}");
        assert!(ExperimentConfig::parse("[env]\nname = catch\n[env]\nname = catch\n").is_err());
        assert!(ExperimentConfig::parse("[run]\nepochs = 3\n").is_err());
        assert!(
            ExperimentConfig::parse("[env]\nname = catch\n[agents]\ndepends: low <- nobody\n")
                .is_err()
        );
        assert!(ExperimentConfig::parse(
            "[env]\nname = catch\n[agents]\ndecomposition = ensemble\n"
        )
        .is_err());
        assert!(
            ExperimentConfig::parse("[env]\nname = catch\n[learn]\nlearner = linear\n").is_err()
        );
        assert!(ExperimentConfig::parse("name = catch\n")
            .unwrap_err()
            .is_config_error());
    }

    #[test]
    fn aggregator_kinds() {
        let c = ExperimentConfig::parse(
            "[env]\nname = pacboy\n[aggregator]\nkind = power_mean\np = 2\n",
        )
        .unwrap();
        assert_eq!(c.aggregator, Aggregator::Vote(Vote::PowerMean(2.0)));
        assert!(ExperimentConfig::parse("[env]\nname = pacboy\n[aggregator]\np = 2\n").is_err());
    }
}
