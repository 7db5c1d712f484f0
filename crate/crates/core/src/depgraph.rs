//! Declared dependencies between agents and the training schedules they
//! call for.
//!
//! An edge `i -> j` says agent `j`'s transition dynamics depend on agent
//! `i`'s policy. Without edges every agent can learn in parallel; with an
//! acyclic graph parallel learning still settles; a cycle may not, so a
//! strict policy trains one agent at a time with the others frozen.

use std::collections::BTreeSet;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::mdp::FlatEnvironment;
use crate::rng::Rng;
use crate::soc::{Phase, SocSystem};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyGraph {
    agents: Vec<String>,
    edges: BTreeSet<(usize, usize)>,
}

impl DependencyGraph {
    pub fn new<I, S>(agents: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let agents: Vec<String> = agents.into_iter().map(Into::into).collect();
        for (i, a) in agents.iter().enumerate() {
            if agents[..i].contains(a) {
                return Err(Error::InvalidArgument(format!("agent {a} declared twice")));
            }
        }
        Ok(Self {
            agents,
            edges: BTreeSet::new(),
        })
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.agents
            .iter()
            .position(|a| a == name)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown agent {name}")))
    }

    /// Records that `dependent`'s dynamics depend on `on`'s policy.
    pub fn add_dependency(&mut self, dependent: &str, on: &str) -> Result<()> {
        let (j, i) = (self.index_of(dependent)?, self.index_of(on)?);
        self.add_edge(i, j)
    }

    pub fn add_edge(&mut self, from: usize, to: usize) -> Result<()> {
        let n = self.agents.len();
        if from >= n || to >= n {
            return Err(Error::IndexOutOfRange(format!(
                "edge {from}->{to} among {n} agents"
            )));
        }
        if from == to {
            return Err(Error::InvalidArgument(format!(
                "self-dependency on {}",
                self.agents[from]
            )));
        }
        self.edges.insert((from, to));
        Ok(())
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    fn has_cycle(&self) -> bool {
        // Kahn's algorithm: a cycle leaves nodes with nonzero in-degree.
        let n = self.agents.len();
        let mut indeg = vec![0usize; n];
        for &(_, j) in &self.edges {
            indeg[j] += 1;
        }
        let mut ready: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut seen = 0;
        while let Some(i) = ready.pop() {
            seen += 1;
            for &(_, j) in self.edges.range((i, 0)..(i + 1, 0)) {
                indeg[j] -= 1;
                if indeg[j] == 0 {
                    ready.push(j);
                }
            }
        }
        seen < n
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityClass {
    Independent,
    Acyclic,
    Cyclic,
}

pub fn classify(graph: &DependencyGraph) -> StabilityClass {
    if graph.edges.is_empty() {
        StabilityClass::Independent
    } else if graph.has_cycle() {
        StabilityClass::Cyclic
    } else {
        StabilityClass::Acyclic
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SchedulePolicy {
    #[default]
    Strict,
    BestEffort,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TrainingSchedule {
    Parallel,
    /// `rounds` passes over `order`, training one agent per phase.
    CoordinateDescent {
        rounds: usize,
        order: Vec<usize>,
    },
}

/// One phase of a schedule: which agents are frozen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchedulePhase {
    pub frozen: Vec<bool>,
}

impl TrainingSchedule {
    pub fn coordinate_descent(rounds: usize, order: Vec<usize>) -> Result<Self> {
        if rounds == 0 {
            return Err(Error::Schedule(
                "coordinate descent needs at least one round".into(),
            ));
        }
        if order.is_empty() {
            return Err(Error::Schedule(
                "coordinate descent needs an agent order".into(),
            ));
        }
        Ok(TrainingSchedule::CoordinateDescent { rounds, order })
    }

    /// The frozen sets, in execution order, for a system of `n_agents`.
    pub fn phases(&self, n_agents: usize) -> Result<Vec<SchedulePhase>> {
        match self {
            TrainingSchedule::Parallel => Ok(vec![SchedulePhase {
                frozen: vec![false; n_agents],
            }]),
            TrainingSchedule::CoordinateDescent { rounds, order } => {
                if let Some(&bad) = order.iter().find(|&&i| i >= n_agents) {
                    return Err(Error::Schedule(format!(
                        "order names agent {bad} of {n_agents}"
                    )));
                }
                let mut out = Vec::with_capacity(rounds * order.len());
                for _ in 0..*rounds {
                    for &learner in order {
                        out.push(SchedulePhase {
                            frozen: (0..n_agents).map(|i| i != learner).collect(),
                        });
                    }
                }
                Ok(out)
            }
        }
    }
}

/// Picks a schedule for a dependency class.
pub fn schedule_for(
    class: StabilityClass,
    policy: SchedulePolicy,
    rounds: usize,
    order: Option<&[usize]>,
) -> Result<TrainingSchedule> {
    match (class, policy) {
        (StabilityClass::Cyclic, SchedulePolicy::Strict) => {
            let order = order
                .ok_or_else(|| Error::Schedule("coordinate descent needs an agent order".into()))?;
            TrainingSchedule::coordinate_descent(rounds, order.to_vec())
        }
        (StabilityClass::Cyclic, SchedulePolicy::BestEffort) => {
            log::warn!("cyclic dependencies trained in parallel; convergence is not guaranteed");
            Ok(TrainingSchedule::Parallel)
        }
        _ => Ok(TrainingSchedule::Parallel),
    }
}

/// Trains `system` through every phase of `schedule`, `steps_per_phase`
/// steps each, starting fresh episodes with seeds from `episodes`. Frozen
/// agents act greedily and are not updated. Every agent is unfrozen
/// afterwards.
pub fn run_schedule<E: FlatEnvironment>(
    system: &mut SocSystem<E>,
    schedule: &TrainingSchedule,
    steps_per_phase: u64,
    episodes: &mut Rng,
) -> Result<()> {
    let n = system.agents().len();
    let phases = schedule.phases(n)?;
    for phase in phases {
        for (i, &f) in phase.frozen.iter().enumerate() {
            system.set_frozen(i, f);
        }
        system.begin_episode(episodes.gen());
        for _ in 0..steps_per_phase {
            if system.is_terminal() {
                system.begin_episode(episodes.gen());
            }
            system.step(Phase::Train)?;
        }
    }
    for i in 0..n {
        system.set_frozen(i, false);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> DependencyGraph {
        let mut g = DependencyGraph::new((0..n).map(|i| format!("a{i}"))).unwrap();
        for &(i, j) in edges {
            g.add_edge(i, j).unwrap();
        }
        g
    }

    #[test]
    fn classes() {
        assert_eq!(classify(&graph(2, &[])), StabilityClass::Independent);
        assert_eq!(classify(&graph(2, &[(0, 1)])), StabilityClass::Acyclic);
        assert_eq!(
            classify(&graph(2, &[(0, 1), (1, 0)])),
            StabilityClass::Cyclic
        );
        assert_eq!(
            classify(&graph(3, &[(0, 1), (1, 2), (2, 0)])),
            StabilityClass::Cyclic
        );
        assert_eq!(
            classify(&graph(3, &[(0, 1), (0, 2), (1, 2)])),
            StabilityClass::Acyclic
        );
    }

    #[test]
    fn named_dependencies() {
        let mut g = DependencyGraph::new(["body", "arm"]).unwrap();
        g.add_dependency("arm", "body").unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1)]);
        assert!(g.add_dependency("arm", "arm").is_err());
        assert!(g.add_dependency("leg", "arm").is_err());
        assert!(DependencyGraph::new(["x", "x"]).is_err());
    }

    #[test]
    fn schedules() {
        let s = schedule_for(StabilityClass::Acyclic, SchedulePolicy::Strict, 1, None).unwrap();
        assert_eq!(s, TrainingSchedule::Parallel);
        let s = schedule_for(
            StabilityClass::Cyclic,
            SchedulePolicy::Strict,
            1,
            Some(&[0, 1]),
        )
        .unwrap();
        let phases = s.phases(2).unwrap();
        assert_eq!(phases.len(), 2);
        assert_eq!(phases[0].frozen, vec![false, true]);
        assert_eq!(phases[1].frozen, vec![true, false]);
        let s = schedule_for(StabilityClass::Cyclic, SchedulePolicy::BestEffort, 1, None).unwrap();
        assert_eq!(s, TrainingSchedule::Parallel);
        assert!(schedule_for(StabilityClass::Cyclic, SchedulePolicy::Strict, 1, None).is_err());
        assert!(schedule_for(
            StabilityClass::Cyclic,
            SchedulePolicy::Strict,
            0,
            Some(&[0])
        )
        .is_err());
        assert!(TrainingSchedule::coordinate_descent(1, vec![2])
            .unwrap()
            .phases(2)
            .is_err());
    }

    proptest! {
        #[test]
        fn classification_ignores_relabeling(
            n in 2usize..6,
            raw in proptest::collection::vec((0usize..6, 0usize..6), 0..10),
            perm_seed in any::<u64>(),
        ) {
            let edges: Vec<(usize, usize)> = raw.into_iter().map(|(i, j)| (i % n, j % n)).filter(|(i, j)| i != j).collect();
            let mut perm: Vec<usize> = (0..n).collect();
            let mut rng = crate::rng::from_seed(perm_seed);
            rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut rng);
            let relabeled: Vec<(usize, usize)> = edges.iter().map(|&(i, j)| (perm[i], perm[j])).collect();
            prop_assert_eq!(classify(&graph(n, &edges)), classify(&graph(n, &relabeled)));
        }
    }
}
