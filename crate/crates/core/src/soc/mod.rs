//! Separation-of-concerns systems: several agents, each with its own view
//! of the joint state, its own reward and discount, cooperating through an
//! aggregator on one flat environment.

mod agent;
pub mod aggregate;
pub mod presets;
mod system;

pub use agent::{AgentSpec, LocalTransition};
pub use aggregate::{
    aggregate_composite, aggregate_qsum, aggregate_vote, Aggregator, CompositeMap, Vote,
};
pub use system::{AgentStep, Phase, SocSystem, StepRecord};

/// A communication symbol as seen by the recipient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Comm {
    /// Placeholder observed before the sender has emitted anything.
    Initial,
    Symbol(usize),
}

impl Comm {
    pub fn symbol(self) -> Option<usize> {
        match self {
            Comm::Initial => None,
            Comm::Symbol(c) => Some(c),
        }
    }
}

/// Flat state plus every agent's communication action from the previous
/// step. `last_comm[i]` is `None` exactly when agent `i` has no
/// communication actions.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState<S> {
    pub flat: S,
    pub last_comm: Vec<Option<Comm>>,
}

/// Agent `agent`'s local state index for `joint`.
pub fn project<S>(agent: &AgentSpec<S>, joint: &JointState<S>) -> crate::Result<usize> {
    let s = (agent.projection)(joint);
    if s >= agent.n_states {
        return Err(crate::Error::IndexOutOfRange(format!(
            "agent {} projected to state {s} of {}",
            agent.name, agent.n_states
        )));
    }
    Ok(s)
}

/// Flat reward plus `comm_bonus` when the agent did what was requested.
/// No request (`None`) earns no bonus.
pub fn compose_low_level_reward(
    flat_reward: f64,
    own_env_action: usize,
    requested_action: Option<usize>,
    comm_bonus: f64,
) -> f64 {
    if requested_action == Some(own_env_action) {
        flat_reward + comm_bonus
    } else {
        flat_reward
    }
}

/// Flat reward minus `comm_penalty` unless the agent stayed silent.
pub fn compose_high_level_reward(
    flat_reward: f64,
    comm_action: usize,
    silent: Option<usize>,
    comm_penalty: f64,
) -> f64 {
    if silent == Some(comm_action) {
        flat_reward
    } else {
        flat_reward - comm_penalty
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LEFT: usize = 0;
    const RIGHT: usize = 2;
    const SILENT: Option<usize> = Some(3);

    #[test]
    fn low_level_reward() {
        assert_eq!(compose_low_level_reward(0.0, LEFT, Some(LEFT), 0.1), 0.1);
        assert_eq!(compose_low_level_reward(1.0, RIGHT, Some(LEFT), 0.1), 1.0);
        assert_eq!(compose_low_level_reward(0.0, LEFT, Some(LEFT), 0.0), 0.0);
        assert_eq!(compose_low_level_reward(0.0, LEFT, None, 0.1), 0.0);
    }

    #[test]
    fn high_level_reward() {
        assert_eq!(compose_high_level_reward(1.0, 3, SILENT, 0.05), 1.0);
        assert_eq!(compose_high_level_reward(0.0, LEFT, SILENT, 0.05), -0.05);
        assert_eq!(compose_high_level_reward(-1.0, LEFT, SILENT, 0.0), -1.0);
    }

    #[test]
    fn projection_range_is_checked() {
        let agent = AgentSpec::new(
            "a",
            "g",
            3,
            std::sync::Arc::new(|j: &JointState<usize>| j.flat),
        );
        let ok = JointState {
            flat: 2,
            last_comm: vec![],
        };
        assert_eq!(project(&agent, &ok).unwrap(), 2);
        let bad = JointState {
            flat: 3,
            last_comm: vec![],
        };
        assert!(project(&agent, &bad).is_err());
    }
}
