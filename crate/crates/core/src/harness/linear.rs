use crate::envs::{PacBoy, PacBoyState};
use crate::error::Result;
use crate::learn::{
    argmax, epsilon_greedy_with, linear_q_update, EpsilonSchedule, LinearQ, PacBoyFeatures, QTable,
    TieBreak,
};
use crate::mdp::FlatEnvironment;
use crate::rng::{self, Rng};
use crate::soc::Phase;

use super::{Controller, NamedTable, StepOutcome};

/// Single Q-learner with a linear model over the one-hot Pac-Boy features.
/// The episode is terminal for it only when no fruit is left.
#[derive(Debug, Clone)]
pub struct LinearPacBoy {
    env: PacBoy,
    layout: PacBoyFeatures,
    model: LinearQ,
    gamma: f64,
    alpha: f64,
    epsilon: EpsilonSchedule,
    tie: TieBreak,
    rng: Rng,
    train_steps: u64,
    frozen: bool,
    x: Vec<usize>,
    x_next: Vec<usize>,
    q: Vec<f64>,
}

impl LinearPacBoy {
    pub fn new(env: PacBoy, gamma: f64, alpha: f64, epsilon: EpsilonSchedule, seed: u64) -> Self {
        let layout = PacBoyFeatures::for_maze(env.maze());
        Self {
            model: LinearQ::new(layout.size(), env.num_actions()),
            env,
            layout,
            gamma,
            alpha,
            epsilon,
            tie: TieBreak::Random,
            rng: rng::stream(seed, "linear"),
            train_steps: 0,
            frozen: false,
            x: Vec::new(),
            x_next: Vec::new(),
            q: Vec::new(),
        }
    }

    pub fn model(&self) -> &LinearQ {
        &self.model
    }

    fn step_eps(&mut self, learn: bool, eps: f64) -> Result<StepOutcome> {
        let prev: PacBoyState = *self.env.state();
        self.layout.extract_into(&prev, &mut self.x);
        self.model.values_into(&self.x, &mut self.q);
        let a = if eps > 0.0 {
            epsilon_greedy_with(&self.q, eps, self.tie, &mut self.rng)?
        } else {
            argmax(&self.q, self.tie, &mut self.rng)
        };
        let r = self.env.step(a)?;
        if learn {
            self.layout.extract_into(&r.state, &mut self.x_next);
            let terminal = r.state.fruits == 0;
            linear_q_update(
                &mut self.model,
                &self.x,
                a,
                r.reward,
                &self.x_next,
                terminal,
                self.gamma,
                self.alpha,
            )?;
            self.train_steps += 1;
        }
        Ok(StepOutcome {
            reward: r.reward,
            terminal: r.terminal,
            communicated: false,
        })
    }
}

impl Controller for LinearPacBoy {
    fn begin_episode(&mut self, seed: u64) {
        self.env.reset(seed);
    }

    fn is_terminal(&self) -> bool {
        self.env.is_terminal()
    }

    fn step(&mut self, phase: Phase) -> Result<StepOutcome> {
        match phase {
            Phase::Train if !self.frozen => {
                let eps = self.epsilon.value(self.train_steps);
                self.step_eps(true, eps)
            }
            _ => self.step_eps(false, 0.0),
        }
    }

    fn step_random(&mut self) -> Result<StepOutcome> {
        self.step_eps(!self.frozen, 1.0)
    }

    fn performance(&self) -> f64 {
        self.env.performance()
    }

    fn digest(&self) -> u64 {
        self.model.digest()
    }

    fn agent_groups(&self) -> Vec<String> {
        vec!["linear".into()]
    }

    fn set_frozen(&mut self, _agent: usize, frozen: bool) {
        self.frozen = frozen;
    }

    fn tables(&self) -> Vec<NamedTable> {
        Vec::new()
    }

    fn load_table(&mut self, _name: &str, _table: QTable) -> Result<bool> {
        Ok(false)
    }
}
