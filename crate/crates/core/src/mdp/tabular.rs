//! Explicit-matrix MDPs, a text loader and the value-iteration oracle.
//!
//! Text format:
//!
//! ```text
//! states S actions A
//! s a s' prob reward
//! ...
//! terminal s1 s2 ...
//! ```
//!
//! Unlisted transitions have probability 0. `#` starts a comment.

use std::path::Path;

use rand::Rng as _;

use super::{FlatEnvironment, StepResult};
use crate::error::{Error, Result};
use crate::learn::QTable;
use crate::rng::{self, Rng};

const STOCHASTIC_TOL: f64 = 1e-9;
const MAX_SWEEPS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct TabularMdp {
    n_states: usize,
    n_actions: usize,
    // Indexed [(s * n_actions + a) * n_states + s'].
    transition: Vec<f64>,
    reward: Vec<f64>,
    terminal: Vec<bool>,
}

impl TabularMdp {
    /// An MDP with all transition probabilities zero; fill with [`set`](Self::set).
    pub fn new(n_states: usize, n_actions: usize) -> Result<Self> {
        if n_states == 0 || n_actions == 0 {
            return Err(Error::InvalidMdp(
                "need at least one state and one action".into(),
            ));
        }
        let len = n_states * n_actions * n_states;
        Ok(Self {
            n_states,
            n_actions,
            transition: vec![0.0; len],
            reward: vec![0.0; len],
            terminal: vec![false; n_states],
        })
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    fn idx(&self, s: usize, a: usize, s2: usize) -> usize {
        (s * self.n_actions + a) * self.n_states + s2
    }

    pub fn set(&mut self, s: usize, a: usize, s2: usize, prob: f64, reward: f64) -> Result<()> {
        if s >= self.n_states || a >= self.n_actions || s2 >= self.n_states {
            return Err(Error::IndexOutOfRange(format!("transition ({s},{a},{s2})")));
        }
        if !prob.is_finite() || !reward.is_finite() {
            return Err(Error::NonFinite(format!("transition ({s},{a},{s2})")));
        }
        let i = self.idx(s, a, s2);
        self.transition[i] = prob;
        self.reward[i] = reward;
        Ok(())
    }

    pub fn set_terminal(&mut self, s: usize) -> Result<()> {
        if s >= self.n_states {
            return Err(Error::IndexOutOfRange(format!("terminal state {s}")));
        }
        self.terminal[s] = true;
        Ok(())
    }

    pub fn is_terminal(&self, s: usize) -> bool {
        self.terminal[s]
    }

    pub fn prob(&self, s: usize, a: usize, s2: usize) -> f64 {
        self.transition[self.idx(s, a, s2)]
    }

    pub fn reward(&self, s: usize, a: usize, s2: usize) -> f64 {
        self.reward[self.idx(s, a, s2)]
    }

    pub fn transition_row(&self, s: usize, a: usize) -> &[f64] {
        let i = self.idx(s, a, 0);
        &self.transition[i..i + self.n_states]
    }

    /// Checks that every row is a probability distribution. Rows of
    /// terminal states may instead be left entirely empty.
    pub fn validate(&self) -> Result<()> {
        for s in 0..self.n_states {
            for a in 0..self.n_actions {
                let row = self.transition_row(s, a);
                if let Some(p) = row.iter().find(|&&p| p < 0.0) {
                    return Err(Error::InvalidMdp(format!(
                        "P[{s}][{a}] has negative entry {p}"
                    )));
                }
                let total: f64 = row.iter().sum();
                if self.terminal[s] && total == 0.0 {
                    continue;
                }
                if (total - 1.0).abs() > STOCHASTIC_TOL {
                    return Err(Error::InvalidMdp(format!("P[{s}][{a}] sums to {total}")));
                }
            }
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let err = |line: usize, msg: String| Error::Parse { line, msg };
        let mut mdp: Option<TabularMdp> = None;
        let mut seen_terminal = false;
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let Some(m) = mdp.as_mut() else {
                if toks.len() != 4 || toks[0] != "states" || toks[2] != "actions" {
                    return Err(err(
                        ln,
                        format!("expected `states S actions A`, got `{line}`"),
                    ));
                }
                let s = toks[1]
                    .parse()
                    .map_err(|_| err(ln, "bad state count".into()))?;
                let a = toks[3]
                    .parse()
                    .map_err(|_| err(ln, "bad action count".into()))?;
                mdp = Some(TabularMdp::new(s, a).map_err(|e| err(ln, e.to_string()))?);
                continue;
            };
            if toks[0] == "terminal" {
                if seen_terminal {
                    return Err(err(ln, "duplicate terminal line".into()));
                }
                seen_terminal = true;
                for t in &toks[1..] {
                    let s: usize = t.parse().map_err(|_| err(ln, format!("bad state `{t}`")))?;
                    m.set_terminal(s).map_err(|e| err(ln, e.to_string()))?;
                }
                continue;
            }
            if seen_terminal {
                return Err(err(ln, "transition after the terminal line".into()));
            }
            if toks.len() != 5 {
                return Err(err(
                    ln,
                    format!("expected `s a s' prob reward`, got `{line}`"),
                ));
            }
            let s: usize = toks[0].parse().map_err(|_| err(ln, "bad state".into()))?;
            let a: usize = toks[1].parse().map_err(|_| err(ln, "bad action".into()))?;
            let s2: usize = toks[2]
                .parse()
                .map_err(|_| err(ln, "bad next state".into()))?;
            let p: f64 = toks[3]
                .parse()
                .map_err(|_| err(ln, "bad probability".into()))?;
            let r: f64 = toks[4].parse().map_err(|_| err(ln, "bad reward".into()))?;
            if s < m.n_states && a < m.n_actions && s2 < m.n_states && m.prob(s, a, s2) != 0.0 {
                return Err(err(ln, format!("duplicate transition ({s},{a},{s2})")));
            }
            m.set(s, a, s2, p, r).map_err(|e| err(ln, e.to_string()))?;
        }
        let mdp = mdp.ok_or_else(|| err(1, "empty MDP file".into()))?;
        mdp.validate()?;
        Ok(mdp)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// `sum_s' P[s][a][s'] (R[s][a][s'] + gamma * max_a' Q(s', a'))`, with
    /// terminal states contributing no bootstrap.
    pub fn backup(&self, q: &QTable, s: usize, a: usize, gamma: f64) -> f64 {
        let base = self.idx(s, a, 0);
        let mut acc = 0.0;
        for s2 in 0..self.n_states {
            let p = self.transition[base + s2];
            if p == 0.0 {
                continue;
            }
            let v = if self.terminal[s2] {
                0.0
            } else {
                q.max_value(s2)
            };
            acc += p * (self.reward[base + s2] + gamma * v);
        }
        acc
    }

    /// Largest Bellman-optimality residual of `q` over non-terminal entries.
    pub fn bellman_residual(&self, q: &QTable, gamma: f64) -> f64 {
        let mut worst: f64 = 0.0;
        for s in (0..self.n_states).filter(|&s| !self.terminal[s]) {
            for a in 0..self.n_actions {
                worst = worst.max((q.get(s, a) - self.backup(q, s, a, gamma)).abs());
            }
        }
        worst
    }
}

/// Optimal action values by synchronous value iteration.
///
/// Iterates until the Bellman residual of the returned table is below
/// `tol`. Terminal states keep Q = 0.
pub fn value_iteration(mdp: &TabularMdp, gamma: f64, tol: f64) -> Result<QTable> {
    mdp.validate()?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "tolerance {tol} must be positive"
        )));
    }
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidArgument(format!(
            "discount {gamma} outside [0,1]"
        )));
    }
    let (ns, na) = (mdp.n_states, mdp.n_actions);
    let mut q = QTable::new(ns, na);
    let mut next = QTable::new(ns, na);
    for _ in 0..MAX_SWEEPS {
        let mut residual: f64 = 0.0;
        for s in 0..ns {
            for a in 0..na {
                let v = if mdp.terminal[s] {
                    0.0
                } else {
                    mdp.backup(&q, s, a, gamma)
                };
                residual = residual.max((v - q.get(s, a)).abs());
                next.set(s, a, v)?;
            }
        }
        if residual < tol {
            return Ok(q);
        }
        std::mem::swap(&mut q, &mut next);
    }
    Err(Error::NotConverged(MAX_SWEEPS))
}

/// Where a [`TabularEnv`] episode starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartState {
    Fixed(usize),
    UniformNonTerminal,
}

/// Samples trajectories from a [`TabularMdp`].
#[derive(Debug, Clone)]
pub struct TabularEnv {
    mdp: TabularMdp,
    start: StartState,
    state: usize,
    terminal: bool,
    rng: Rng,
}

impl TabularEnv {
    pub fn new(mdp: TabularMdp, start: StartState) -> Result<Self> {
        mdp.validate()?;
        match start {
            StartState::Fixed(s) if s >= mdp.n_states => {
                return Err(Error::IndexOutOfRange(format!("start state {s}")));
            }
            StartState::UniformNonTerminal if mdp.terminal.iter().all(|&t| t) => {
                return Err(Error::InvalidMdp("no non-terminal start state".into()));
            }
            _ => {}
        }
        let state = match start {
            StartState::Fixed(s) => s,
            StartState::UniformNonTerminal => 0,
        };
        Ok(Self {
            terminal: mdp.terminal[state],
            mdp,
            start,
            state,
            rng: rng::from_seed(0),
        })
    }

    pub fn mdp(&self) -> &TabularMdp {
        &self.mdp
    }
}

impl FlatEnvironment for TabularEnv {
    type State = usize;

    fn state_space_size(&self) -> u128 {
        self.mdp.n_states as u128
    }

    fn num_actions(&self) -> usize {
        self.mdp.n_actions
    }

    fn state(&self) -> &usize {
        &self.state
    }

    fn state_index(&self, state: &usize) -> u128 {
        *state as u128
    }

    fn is_terminal(&self) -> bool {
        self.terminal
    }

    fn reset(&mut self, seed: u64) -> usize {
        self.rng = rng::from_seed(seed);
        self.state = match self.start {
            StartState::Fixed(s) => s,
            StartState::UniformNonTerminal => loop {
                let s = self.rng.gen_range(0..self.mdp.n_states);
                if !self.mdp.terminal[s] {
                    break s;
                }
            },
        };
        self.terminal = self.mdp.terminal[self.state];
        self.state
    }

    fn step(&mut self, action: usize) -> Result<StepResult<usize>> {
        if self.terminal {
            return Err(Error::StepAfterTerminal);
        }
        if action >= self.mdp.n_actions {
            return Err(Error::InvalidAction {
                action,
                size: self.mdp.n_actions,
            });
        }
        let row = self.mdp.transition_row(self.state, action);
        let u: f64 = self.rng.gen();
        let mut acc = 0.0;
        let mut next = row.iter().rposition(|&p| p > 0.0).unwrap_or(self.state);
        for (s2, &p) in row.iter().enumerate() {
            acc += p;
            if u < acc {
                next = s2;
                break;
            }
        }
        let reward = self.mdp.reward(self.state, action, next);
        self.state = next;
        self.terminal = self.mdp.terminal[next];
        Ok(StepResult {
            state: next,
            reward,
            terminal: self.terminal,
        })
    }

    fn performance(&self) -> f64 {
        if self.terminal {
            1.0
        } else {
            0.0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::run_episode;
    use proptest::prelude::*;

    fn chain3() -> TabularMdp {
        // 0 -> 1 -> 2 (terminal) moving right; reward 1 on entering 2.
        TabularMdp::parse(
            "states 3 actions 1\n\
             0 0 1 1.0 0\n\
             1 0 2 1.0 1\n\
             terminal 2\n",
        )
        .unwrap()
    }

    #[test]
    fn geometric_self_loop() {
        let mut m = TabularMdp::new(1, 1).unwrap();
        m.set(0, 0, 0, 1.0, 1.0).unwrap();
        let q = value_iteration(&m, 0.5, 1e-9).unwrap();
        assert!((q.get(0, 0) - 2.0).abs() < 1e-8);
    }

    #[test]
    fn zero_rewards_give_zero_values() {
        let mut m = TabularMdp::new(3, 2).unwrap();
        for s in 0..3 {
            m.set(s, 0, (s + 1) % 3, 0.5, 0.0).unwrap();
            m.set(s, 0, s, 0.5, 0.0).unwrap();
            m.set(s, 1, 0, 1.0, 0.0).unwrap();
        }
        let q = value_iteration(&m, 0.9, 1e-9).unwrap();
        assert!(q.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn hand_unrolled_chain() {
        let m = TabularMdp::parse(
            "states 3 actions 1\n\
             0 0 1 1 0\n\
             1 0 2 1 1\n\
             terminal 2\n",
        )
        .unwrap();
        let q = value_iteration(&m, 0.9, 1e-9).unwrap();
        // Q(s1) = 1 on entering the terminal; Q(s0) = 0.9 * Q(s1).
        assert!((q.get(1, 0) - 1.0).abs() < 1e-9);
        assert!((q.get(0, 0) - 0.9).abs() < 1e-9);
        assert_eq!(q.get(2, 0), 0.0);
    }

    #[test]
    fn three_state_chain_with_reward_on_last_move() {
        // s0 -> s1 -> s2 -> terminal s3, reward 1 only on the final move,
        // so Q(s0) = 0.81 and Q(s1) = 0.9.
        let m = TabularMdp::parse(
            "states 4 actions 1\n\
             0 0 1 1 0\n\
             1 0 2 1 0\n\
             2 0 3 1 1\n\
             terminal 3\n",
        )
        .unwrap();
        let q = value_iteration(&m, 0.9, 1e-9).unwrap();
        assert!((q.get(0, 0) - 0.81).abs() < 1e-9);
        assert!((q.get(1, 0) - 0.9).abs() < 1e-9);
        assert!((q.get(2, 0) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn non_stochastic_rows_are_rejected() {
        let mut m = TabularMdp::new(2, 1).unwrap();
        m.set(0, 0, 1, 0.7, 0.0).unwrap();
        m.set(1, 0, 1, 1.0, 0.0).unwrap();
        assert!(matches!(
            value_iteration(&m, 0.9, 1e-9),
            Err(Error::InvalidMdp(_))
        ));
        m.set(0, 0, 0, -0.3, 0.0).unwrap();
        assert!(m.validate().is_err());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        assert!(matches!(TabularMdp::parse(""), Err(Error::Parse { .. })));
        assert!(matches!(
            TabularMdp::parse("states 2 actions 1\n0 0 1 1 0\n0 0 1 0.5 0\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            TabularMdp::parse("states 2 actions 1\n0 0 7 1 0\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn env_rollout_and_errors() {
        let mut env = TabularEnv::new(chain3(), StartState::Fixed(0)).unwrap();
        let trace = run_episode(&mut env, |_| 0, 10, 1).unwrap();
        assert_eq!(trace.len(), 2);
        assert_eq!(trace.rewards(), vec![0.0, 1.0]);
        assert!(matches!(env.step(0), Err(Error::StepAfterTerminal)));
        let one = run_episode(&mut env, |_| 0, 1, 1).unwrap();
        assert_eq!(one.len(), 1);
        assert!(matches!(
            run_episode(&mut env, |_| 3, 5, 1),
            Err(Error::InvalidAction { action: 3, .. })
        ));
        assert!(run_episode(&mut env, |_| 0, 0, 1).is_err());
    }

    fn random_mdp(ns: usize, na: usize, weights: &[f64], rewards: &[f64]) -> TabularMdp {
        let mut m = TabularMdp::new(ns, na).unwrap();
        for s in 0..ns {
            for a in 0..na {
                let base = (s * na + a) * ns;
                let row = &weights[base..base + ns];
                let total: f64 = row.iter().sum();
                for s2 in 0..ns {
                    m.set(s, a, s2, row[s2] / total, rewards[base + s2])
                        .unwrap();
                }
            }
        }
        m.set_terminal(ns - 1).unwrap();
        m
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn value_iteration_satisfies_bellman(
            weights in proptest::collection::vec(0.01f64..1.0, 4 * 3 * 4),
            rewards in proptest::collection::vec(-1.0f64..1.0, 4 * 3 * 4),
            gamma in 0.0f64..0.95,
        ) {
            let m = random_mdp(4, 3, &weights, &rewards);
            let tol = 1e-9;
            let q = value_iteration(&m, gamma, tol).unwrap();
            prop_assert!(m.bellman_residual(&q, gamma) < tol);
            for a in 0..3 {
                prop_assert_eq!(q.get(3, a), 0.0);
            }
        }
    }
}
