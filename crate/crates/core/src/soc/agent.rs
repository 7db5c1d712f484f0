use std::fmt;
use std::sync::Arc;

use super::{Comm, JointState};

/// One agent's view of a flat transition, handed to its reward and
/// termination predicates.
#[derive(Debug)]
pub struct LocalTransition<'a, S> {
    pub prev: &'a S,
    pub next: &'a S,
    pub flat_reward: f64,
    pub flat_terminal: bool,
    /// The agent's environment action; in ensemble mode the flat action.
    pub env_action: Option<usize>,
    pub comm_action: Option<usize>,
    /// Communication the agent observed when acting (emitted one step earlier).
    pub observed: &'a [Option<Comm>],
}

pub type Projection<S> = Arc<dyn Fn(&JointState<S>) -> usize + Send + Sync>;
pub type RewardFn<S> = Arc<dyn for<'a> Fn(&LocalTransition<'a, S>) -> f64 + Send + Sync>;
pub type TerminalFn<S> = Arc<dyn for<'a> Fn(&LocalTransition<'a, S>) -> bool + Send + Sync>;
pub type ActiveFn<S> = Arc<dyn Fn(&S) -> bool + Send + Sync>;

/// Declaration of one agent. Built with [`AgentSpec::new`] and the
/// chainable setters; defaults are the flat reward, flat termination,
/// always active, act every step.
#[derive(Clone)]
pub struct AgentSpec<S> {
    pub name: String,
    /// Agents in one group are frozen, saved and loaded together.
    pub group: String,
    pub n_states: usize,
    pub projection: Projection<S>,
    pub env_actions: usize,
    pub comm_actions: usize,
    /// The comm action that counts as staying silent, if any.
    pub silent_comm: Option<usize>,
    pub reward: RewardFn<S>,
    pub terminal: TerminalFn<S>,
    pub active: Option<ActiveFn<S>>,
    pub gamma: f64,
    pub alpha: f64,
    pub act_interval: usize,
    /// Agents naming the same table key share one Q-table.
    pub table_key: Option<String>,
}

impl<S> AgentSpec<S> {
    pub fn new(
        name: impl Into<String>,
        group: impl Into<String>,
        n_states: usize,
        projection: Projection<S>,
    ) -> Self {
        Self {
            name: name.into(),
            group: group.into(),
            n_states,
            projection,
            env_actions: 0,
            comm_actions: 0,
            silent_comm: None,
            reward: Arc::new(|t| t.flat_reward),
            terminal: Arc::new(|t| t.flat_terminal),
            active: None,
            gamma: 0.9,
            alpha: 0.1,
            act_interval: 1,
            table_key: None,
        }
    }

    pub fn with_env_actions(mut self, n: usize) -> Self {
        self.env_actions = n;
        self
    }

    pub fn with_comm_actions(mut self, n: usize, silent: Option<usize>) -> Self {
        self.comm_actions = n;
        self.silent_comm = silent;
        self
    }

    pub fn with_reward(mut self, f: RewardFn<S>) -> Self {
        self.reward = f;
        self
    }

    pub fn with_terminal(mut self, f: TerminalFn<S>) -> Self {
        self.terminal = f;
        self
    }

    pub fn with_active(mut self, f: ActiveFn<S>) -> Self {
        self.active = Some(f);
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_act_interval(mut self, k: usize) -> Self {
        self.act_interval = k;
        self
    }

    pub fn with_shared_table(mut self, key: impl Into<String>) -> Self {
        self.table_key = Some(key.into());
        self
    }

    /// Size of the agent's own action set, `max(|E|,1) * max(|C|,1)`.
    pub fn joint_actions(&self) -> usize {
        self.env_actions.max(1) * self.comm_actions.max(1)
    }

    /// Splits a joint action index into (environment, communication) parts.
    pub fn split(&self, action: usize) -> (Option<usize>, Option<usize>) {
        let c = self.comm_actions.max(1);
        (
            (self.env_actions > 0).then_some(action / c),
            (self.comm_actions > 0).then_some(action % c),
        )
    }

    pub fn is_active(&self, state: &S) -> bool {
        self.active.as_ref().is_none_or(|f| f(state))
    }
}

impl<S> fmt::Debug for AgentSpec<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AgentSpec")
            .field("name", &self.name)
            .field("group", &self.group)
            .field("n_states", &self.n_states)
            .field("env_actions", &self.env_actions)
            .field("comm_actions", &self.comm_actions)
            .field("gamma", &self.gamma)
            .field("alpha", &self.alpha)
            .field("act_interval", &self.act_interval)
            .field("table_key", &self.table_key)
            .finish_non_exhaustive()
    }
}
