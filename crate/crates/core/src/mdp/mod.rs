//! Flat MDP interface, discounted returns and episode rollouts.

pub mod tabular;

pub use tabular::{value_iteration, TabularEnv, TabularMdp};

use crate::error::{Error, Result};

/// Result of one environment step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepResult<S> {
    pub state: S,
    pub reward: f64,
    pub terminal: bool,
}

/// The single-agent task behind a step interface.
///
/// Actions are indices into the action set `0..num_actions()`. All
/// stochasticity comes from a generator reseeded by [`reset`], so equal
/// seeds and equal action sequences give identical episodes.
///
/// [`reset`]: FlatEnvironment::reset
pub trait FlatEnvironment {
    type State: Clone + PartialEq + std::fmt::Debug;

    /// Number of distinct flat states (saturating at `u128::MAX`).
    fn state_space_size(&self) -> u128;
    fn num_actions(&self) -> usize;
    fn state(&self) -> &Self::State;
    /// Bijective index of a state in `0..state_space_size()`.
    fn state_index(&self, state: &Self::State) -> u128;
    fn is_terminal(&self) -> bool;
    fn reset(&mut self, seed: u64) -> Self::State;
    /// Advances one step. Stepping a terminated episode is an error.
    fn step(&mut self, action: usize) -> Result<StepResult<Self::State>>;
    /// Fraction of the episode's goal achieved so far, in `[0, 1]`.
    fn performance(&self) -> f64;
}

/// Discount factor validated to lie in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscountedReturnSpec {
    gamma: f64,
}

impl DiscountedReturnSpec {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::InvalidArgument(format!(
                "discount {gamma} outside [0,1]"
            )));
        }
        Ok(Self { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn discounted_return(&self, rewards: &[f64]) -> f64 {
        discounted_return(rewards, self.gamma)
    }
}

/// `sum_k gamma^k * rewards[k]`; zero for an empty sequence.
pub fn discounted_return(rewards: &[f64], gamma: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&gamma));
    // Horner from the back keeps it to one multiply per reward.
    rewards.iter().rev().fold(0.0, |acc, r| r + gamma * acc)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transition<S> {
    pub state: S,
    pub action: usize,
    pub reward: f64,
    pub next_state: S,
    pub terminal: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeTrace<S> {
    pub transitions: Vec<Transition<S>>,
}

impl<S> EpisodeTrace<S> {
    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    pub fn rewards(&self) -> Vec<f64> {
        self.transitions.iter().map(|t| t.reward).collect()
    }

    pub fn total_reward(&self) -> f64 {
        self.transitions.iter().map(|t| t.reward).sum()
    }
}

/// Resets `env` with `seed` and follows `policy` for at most `max_steps`
/// steps, stopping early at a terminal state.
pub fn run_episode<E, P>(
    env: &mut E,
    mut policy: P,
    max_steps: usize,
    seed: u64,
) -> Result<EpisodeTrace<E::State>>
where
    E: FlatEnvironment,
    P: FnMut(&E::State) -> usize,
{
    if max_steps == 0 {
        return Err(Error::InvalidArgument(
            "max_steps must be at least 1".into(),
        ));
    }
    let mut state = env.reset(seed);
    let mut transitions = Vec::new();
    while transitions.len() < max_steps && !env.is_terminal() {
        let action = policy(&state);
        if action >= env.num_actions() {
            return Err(Error::InvalidAction {
                action,
                size: env.num_actions(),
            });
        }
        let step = env.step(action)?;
        transitions.push(Transition {
            state,
            action,
            reward: step.reward,
            next_state: step.state.clone(),
            terminal: step.terminal,
        });
        state = step.state;
    }
    Ok(EpisodeTrace { transitions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn returns() {
        assert_eq!(discounted_return(&[0.0, 0.0, 0.0], 0.9), 0.0);
        assert_eq!(discounted_return(&[1.0, 1.0, 1.0], 0.5), 1.75);
        assert_eq!(discounted_return(&[5.0, 2.0], 0.0), 5.0);
        assert_eq!(discounted_return(&[], 0.3), 0.0);
        assert!(DiscountedReturnSpec::new(1.01).is_err());
        assert!(DiscountedReturnSpec::new(-0.1).is_err());
    }

    proptest! {
        #[test]
        fn return_is_linear(
            pairs in proptest::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 0..30),
            a in -3.0f64..3.0, b in -3.0f64..3.0, gamma in 0.0f64..=1.0,
        ) {
            let r1: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let r2: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            let mixed: Vec<f64> = pairs.iter().map(|p| a * p.0 + b * p.1).collect();
            let lhs = discounted_return(&mixed, gamma);
            let rhs = a * discounted_return(&r1, gamma) + b * discounted_return(&r2, gamma);
            prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs()));
        }
    }
}
