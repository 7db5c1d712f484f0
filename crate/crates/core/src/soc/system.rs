use std::collections::BTreeMap;

use super::{project, AgentSpec, Aggregator, Comm, JointState, LocalTransition};
use crate::error::{Error, Result};
use crate::learn::{argmax, epsilon_greedy_with, q_update, EpsilonSchedule, QTable, TieBreak};
use crate::mdp::FlatEnvironment;
use crate::rng::{self, Rng};

/// Training learns and explores; evaluation acts greedily and leaves every
/// table untouched.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Train,
    Eval,
}

/// One agent's part of a [`StepRecord`].
#[derive(Debug, Clone, PartialEq)]
pub struct AgentStep {
    pub state: usize,
    /// Index into the agent's own action set (the flat action in ensemble mode).
    pub action: usize,
    pub env_action: Option<usize>,
    pub comm_action: Option<usize>,
    pub reward: f64,
    pub next_state: usize,
    pub terminal: bool,
    /// False when the agent repeated a held action.
    pub decided: bool,
    pub active: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord<S> {
    /// Step index within the episode.
    pub t: u64,
    pub flat_state: S,
    pub flat_action: usize,
    pub flat_reward: f64,
    pub next_flat_state: S,
    pub terminal: bool,
    /// Communication visible to the agents while they acted.
    pub observed_comm: Vec<Option<Comm>>,
    /// Communication emitted this step, visible from the next step.
    pub emitted_comm: Vec<Option<Comm>>,
    pub agents: Vec<AgentStep>,
}

impl<S> StepRecord<S> {
    /// Whether any agent emitted a comm action other than its silent one.
    pub fn communicated(&self, silent: impl Fn(usize) -> Option<usize>) -> bool {
        self.emitted_comm
            .iter()
            .enumerate()
            .any(|(i, c)| matches!(c, Some(Comm::Symbol(s)) if silent(i) != Some(*s)))
    }
}

#[derive(Debug, Clone, Copy)]
struct Held {
    action: usize,
    env: Option<usize>,
    comm: Option<usize>,
}

/// Decision awaiting its (possibly multi-step) backup.
#[derive(Debug, Clone, Copy)]
struct Pending {
    state: usize,
    action: usize,
    ret: f64,
    discount: f64,
}

/// Agents, their tables, an aggregator and the flat environment they act on.
pub struct SocSystem<E: FlatEnvironment> {
    env: E,
    agents: Vec<AgentSpec<E::State>>,
    table_of: Vec<usize>,
    tables: Vec<QTable>,
    table_names: Vec<String>,
    aggregator: Aggregator,
    epsilon: EpsilonSchedule,
    tie: TieBreak,
    rng: Rng,
    frozen: Vec<bool>,
    last_comm: Vec<Option<Comm>>,
    held: Vec<Option<Held>>,
    pending: Vec<Option<Pending>>,
    t: u64,
    train_steps: u64,
}

impl<E: FlatEnvironment> SocSystem<E> {
    pub fn new(
        env: E,
        agents: Vec<AgentSpec<E::State>>,
        aggregator: Aggregator,
        epsilon: EpsilonSchedule,
        seed: u64,
    ) -> Result<Self> {
        if agents.is_empty() {
            return Err(Error::InvalidArgument(
                "a SoC system needs at least one agent".into(),
            ));
        }
        let flat = env.num_actions();
        for a in &agents {
            if a.env_actions + a.comm_actions == 0 {
                return Err(Error::InvalidArgument(format!(
                    "agent {} has no actions",
                    a.name
                )));
            }
            if a.act_interval == 0 {
                return Err(Error::InvalidArgument(format!(
                    "agent {} has act interval 0",
                    a.name
                )));
            }
            if a.n_states == 0 {
                return Err(Error::InvalidArgument(format!(
                    "agent {} has no states",
                    a.name
                )));
            }
            if !(0.0..=1.0).contains(&a.gamma) || !(0.0..=1.0).contains(&a.alpha) {
                return Err(Error::InvalidArgument(format!(
                    "agent {}: gamma {} and alpha {} must lie in [0,1]",
                    a.name, a.gamma, a.alpha
                )));
            }
            if a.silent_comm.is_some_and(|s| s >= a.comm_actions) {
                return Err(Error::InvalidArgument(format!(
                    "agent {}: silent comm out of range",
                    a.name
                )));
            }
        }
        match &aggregator {
            Aggregator::Composite(map) => {
                let sizes: Vec<usize> = agents.iter().map(|a| a.env_actions).collect();
                if map.sizes() != sizes.as_slice() {
                    return Err(Error::Aggregation(format!(
                        "composite map sizes {:?} do not match agents {sizes:?}",
                        map.sizes()
                    )));
                }
                if map.flat_size() != flat {
                    return Err(Error::Aggregation(format!(
                        "composite map covers {} flat actions, environment has {flat}",
                        map.flat_size()
                    )));
                }
            }
            _ => {
                if let Some(a) = agents
                    .iter()
                    .find(|a| a.env_actions != flat || a.comm_actions != 0 || a.act_interval != 1)
                {
                    return Err(Error::Aggregation(format!(
                        "ensemble agent {} must score all {flat} flat actions every step without comm",
                        a.name
                    )));
                }
            }
        }

        let mut keyed: BTreeMap<String, usize> = BTreeMap::new();
        let mut table_of = Vec::with_capacity(agents.len());
        let mut tables: Vec<QTable> = Vec::new();
        let mut table_names = Vec::new();
        for a in &agents {
            let existing = a.table_key.as_ref().and_then(|k| keyed.get(k).copied());
            let idx = match existing {
                Some(idx) => {
                    let t = &tables[idx];
                    if t.n_states() != a.n_states || t.n_actions() != a.joint_actions() {
                        return Err(Error::DimensionMismatch(format!(
                            "agent {} cannot share a {}x{} table",
                            a.name,
                            t.n_states(),
                            t.n_actions()
                        )));
                    }
                    idx
                }
                None => {
                    tables.push(QTable::new(a.n_states, a.joint_actions()));
                    let name = a.table_key.clone().unwrap_or_else(|| a.name.clone());
                    if table_names.contains(&name) {
                        return Err(Error::InvalidArgument(format!(
                            "duplicate table name {name}"
                        )));
                    }
                    table_names.push(name.clone());
                    if a.table_key.is_some() {
                        keyed.insert(name, tables.len() - 1);
                    }
                    tables.len() - 1
                }
            };
            table_of.push(idx);
        }

        let n = agents.len();
        let mut sys = Self {
            env,
            agents,
            table_of,
            tables,
            table_names,
            aggregator,
            epsilon,
            tie: TieBreak::Random,
            rng: rng::stream(seed, "soc"),
            frozen: vec![false; n],
            last_comm: Vec::new(),
            held: vec![None; n],
            pending: vec![None; n],
            t: 0,
            train_steps: 0,
        };
        sys.begin_episode(rng::derive_seed(seed, "first-episode"));
        Ok(sys)
    }

    pub fn with_tie_break(mut self, tie: TieBreak) -> Self {
        self.tie = tie;
        self
    }

    pub fn env(&self) -> &E {
        &self.env
    }

    pub fn agents(&self) -> &[AgentSpec<E::State>] {
        &self.agents
    }

    pub fn aggregator(&self) -> &Aggregator {
        &self.aggregator
    }

    pub fn epsilon(&self) -> &EpsilonSchedule {
        &self.epsilon
    }

    pub fn set_epsilon(&mut self, epsilon: EpsilonSchedule) {
        self.epsilon = epsilon;
    }

    /// Training steps taken so far; drives the exploration schedule.
    pub fn train_steps(&self) -> u64 {
        self.train_steps
    }

    pub fn table(&self, agent: usize) -> &QTable {
        &self.tables[self.table_of[agent]]
    }

    pub fn table_index(&self, agent: usize) -> usize {
        self.table_of[agent]
    }

    pub fn tables(&self) -> &[QTable] {
        &self.tables
    }

    pub fn table_names(&self) -> &[String] {
        &self.table_names
    }

    /// Table indices used by agents of `group`, in first-use order.
    pub fn group_tables(&self, group: &str) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, a) in self.agents.iter().enumerate() {
            if a.group == group && !out.contains(&self.table_of[i]) {
                out.push(self.table_of[i]);
            }
        }
        out
    }

    pub fn groups(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for a in &self.agents {
            if !out.contains(&a.group) {
                out.push(a.group.clone());
            }
        }
        out
    }

    pub fn table_mut(&mut self, index: usize) -> &mut QTable {
        &mut self.tables[index]
    }

    /// Replaces table `index`; dimensions must match.
    pub fn replace_table(&mut self, index: usize, table: QTable) -> Result<()> {
        let cur = self
            .tables
            .get(index)
            .ok_or_else(|| Error::IndexOutOfRange(format!("table {index}")))?;
        if cur.n_states() != table.n_states() || cur.n_actions() != table.n_actions() {
            return Err(Error::DimensionMismatch(format!(
                "table {} is {}x{}, got {}x{}",
                self.table_names[index],
                cur.n_states(),
                cur.n_actions(),
                table.n_states(),
                table.n_actions()
            )));
        }
        self.tables[index] = table;
        Ok(())
    }

    pub fn is_frozen(&self, agent: usize) -> bool {
        self.frozen[agent]
    }

    pub fn set_frozen(&mut self, agent: usize, frozen: bool) {
        self.frozen[agent] = frozen;
        if frozen {
            self.pending[agent] = None;
        }
    }

    pub fn set_group_frozen(&mut self, group: &str, frozen: bool) -> Result<()> {
        let members: Vec<usize> = (0..self.agents.len())
            .filter(|&i| self.agents[i].group == group)
            .collect();
        if members.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "no agent group named {group}"
            )));
        }
        for i in members {
            self.set_frozen(i, frozen);
        }
        Ok(())
    }

    /// Order-sensitive hash of every table.
    pub fn digest(&self) -> u64 {
        self.tables.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, t| {
            (h ^ t.digest()).wrapping_mul(0x100_0000_01b3)
        })
    }

    pub fn joint_state(&self) -> JointState<E::State> {
        JointState {
            flat: self.env.state().clone(),
            last_comm: self.last_comm.clone(),
        }
    }

    pub fn is_terminal(&self) -> bool {
        self.env.is_terminal()
    }

    /// Step index within the current episode.
    pub fn episode_step(&self) -> u64 {
        self.t
    }

    /// Starts a new episode: environment reset, comm channel back to the
    /// initial symbol, held actions and pending backups dropped.
    pub fn begin_episode(&mut self, seed: u64) -> E::State {
        let s = self.env.reset(seed);
        self.last_comm = self
            .agents
            .iter()
            .map(|a| (a.comm_actions > 0).then_some(Comm::Initial))
            .collect();
        self.held.iter_mut().for_each(|h| *h = None);
        self.pending.iter_mut().for_each(|p| *p = None);
        self.t = 0;
        s
    }

    /// Starts a new episode and lets `setup` place the environment in a
    /// chosen state before the first step.
    pub fn begin_episode_with<F>(&mut self, seed: u64, setup: F) -> Result<E::State>
    where
        F: FnOnce(&mut E) -> Result<()>,
    {
        self.begin_episode(seed);
        setup(&mut self.env)?;
        Ok(self.env.state().clone())
    }

    /// Like [`step`](Self::step) but with exploration rate `epsilon` in place
    /// of the schedule (used for random-behaviour pre-training).
    pub fn step_with_epsilon(&mut self, epsilon: f64) -> Result<StepRecord<E::State>> {
        self.step_inner(Phase::Train, Some(epsilon))
    }

    pub fn step(&mut self, phase: Phase) -> Result<StepRecord<E::State>> {
        self.step_inner(phase, None)
    }

    fn step_inner(
        &mut self,
        phase: Phase,
        eps_override: Option<f64>,
    ) -> Result<StepRecord<E::State>> {
        if self.env.is_terminal() {
            return Err(Error::StepAfterTerminal);
        }
        let learning = phase == Phase::Train;
        let eps = match (phase, eps_override) {
            (Phase::Eval, _) => 0.0,
            (Phase::Train, Some(e)) => e,
            (Phase::Train, None) => self.epsilon.value(self.train_steps),
        };
        let n = self.agents.len();
        let joint = self.joint_state();
        let mut states = Vec::with_capacity(n);
        let mut active = Vec::with_capacity(n);
        for a in &self.agents {
            states.push(project(a, &joint)?);
            active.push(a.is_active(&joint.flat));
        }
        let mut decided = vec![false; n];

        let flat_action = match &self.aggregator {
            Aggregator::Composite(map) => {
                let mut env_actions = Vec::with_capacity(n);
                for i in 0..n {
                    let agent = &self.agents[i];
                    let due =
                        self.held[i].is_none() || self.t.is_multiple_of(agent.act_interval as u64);
                    if due {
                        let agent_eps = if self.frozen[i] { 0.0 } else { eps };
                        let row = self.tables[self.table_of[i]].row(states[i]);
                        let action = epsilon_greedy_with(row, agent_eps, self.tie, &mut self.rng)?;
                        let (env, comm) = agent.split(action);
                        self.held[i] = Some(Held { action, env, comm });
                        self.pending[i] = (learning && !self.frozen[i]).then_some(Pending {
                            state: states[i],
                            action,
                            ret: 0.0,
                            discount: 1.0,
                        });
                        decided[i] = true;
                    }
                    env_actions.push(self.held[i].and_then(|h| h.env));
                }
                super::aggregate_composite(map, &env_actions)?
            }
            ens => {
                let rows: Vec<&[f64]> = (0..n)
                    .filter(|&i| active[i])
                    .map(|i| self.tables[self.table_of[i]].row(states[i]))
                    .collect();
                let flat = self.env.num_actions();
                let scores = if rows.is_empty() {
                    vec![0.0; flat]
                } else {
                    ens.combine(&rows)?
                };
                let a = if eps > 0.0 {
                    epsilon_greedy_with(&scores, eps, self.tie, &mut self.rng)?
                } else {
                    argmax(&scores, self.tie, &mut self.rng)
                };
                for (i, h) in self.held.iter_mut().enumerate() {
                    *h = Some(Held {
                        action: a,
                        env: Some(a),
                        comm: None,
                    });
                    decided[i] = true;
                }
                a
            }
        };

        let result = self.env.step(flat_action)?;
        let emitted: Vec<Option<Comm>> = self
            .held
            .iter()
            .zip(&self.agents)
            .map(|(h, a)| {
                (a.comm_actions > 0).then(|| Comm::Symbol(h.and_then(|h| h.comm).unwrap_or(0)))
            })
            .collect();
        let observed = std::mem::replace(&mut self.last_comm, emitted.clone());
        let next_joint = JointState {
            flat: result.state.clone(),
            last_comm: emitted.clone(),
        };

        let ensemble = self.aggregator.is_ensemble();
        let mut steps = Vec::with_capacity(n);
        for i in 0..n {
            let agent = &self.agents[i];
            let held = self.held[i].expect("every agent holds an action after selection");
            let next_state = project(agent, &next_joint)?;
            let ctx = LocalTransition {
                prev: &joint.flat,
                next: &result.state,
                flat_reward: result.reward,
                flat_terminal: result.terminal,
                env_action: held.env,
                comm_action: held.comm,
                observed: &observed,
            };
            let (reward, terminal) = if active[i] {
                ((agent.reward)(&ctx), (agent.terminal)(&ctx))
            } else {
                (0.0, false)
            };
            let table = &mut self.tables[self.table_of[i]];
            if learning && !self.frozen[i] && active[i] {
                if ensemble {
                    q_update(
                        table,
                        states[i],
                        held.action,
                        reward,
                        next_state,
                        terminal,
                        agent.gamma,
                        agent.alpha,
                    )?;
                } else if let Some(p) = self.pending[i].as_mut() {
                    p.ret += p.discount * reward;
                    p.discount *= agent.gamma;
                    let closes = terminal
                        || result.terminal
                        || (self.t + 1).is_multiple_of(agent.act_interval as u64);
                    if closes {
                        let target = if terminal {
                            p.ret
                        } else {
                            p.ret + p.discount * table.max_value(next_state)
                        };
                        table.update_toward(p.state, p.action, target, agent.alpha)?;
                        self.pending[i] = None;
                    }
                }
            }
            if terminal && !ensemble {
                // Re-decide on the next step instead of carrying a stale hold.
                self.held[i] = None;
                self.pending[i] = None;
            }
            steps.push(AgentStep {
                state: states[i],
                action: held.action,
                env_action: held.env,
                comm_action: held.comm,
                reward,
                next_state,
                terminal,
                decided: decided[i],
                active: active[i],
            });
        }

        let t = self.t;
        self.t += 1;
        if learning {
            self.train_steps += 1;
        }
        Ok(StepRecord {
            t,
            flat_state: joint.flat,
            flat_action,
            flat_reward: result.reward,
            next_flat_state: result.state,
            terminal: result.terminal,
            observed_comm: observed,
            emitted_comm: emitted,
            agents: steps,
        })
    }

    /// Whether `record` contains a non-silent communication action.
    pub fn communicated(&self, record: &StepRecord<E::State>) -> bool {
        record.communicated(|i| self.agents[i].silent_comm)
    }

    /// Greedy joint action of agent `agent` in local state `state`, lowest
    /// index on ties.
    pub fn greedy_local(&self, agent: usize, state: usize) -> usize {
        self.table(agent).greedy_action(state)
    }
}

impl<E: FlatEnvironment + std::fmt::Debug> std::fmt::Debug for SocSystem<E> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SocSystem")
            .field("env", &self.env)
            .field("agents", &self.agents)
            .field("aggregator", &self.aggregator)
            .field("tables", &self.table_names)
            .finish_non_exhaustive()
    }
}
