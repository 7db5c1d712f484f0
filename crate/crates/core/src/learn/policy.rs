use rand::Rng;

use crate::error::{Error, Result};

/// How ties between equally valued actions are broken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Uniformly at random from the caller's generator.
    #[default]
    Random,
    /// Always the lowest tied index. Useful for reproducible tests.
    LowestIndex,
}

/// Index of the maximum entry. `values` must be nonempty.
pub fn argmax<R: Rng + ?Sized>(values: &[f64], tie: TieBreak, rng: &mut R) -> usize {
    debug_assert!(!values.is_empty());
    let mut best = 0;
    let mut ties = 1u32;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
            ties = 1;
        } else if v == values[best] && tie == TieBreak::Random {
            // Reservoir sampling over the tied set.
            ties += 1;
            if rng.gen_range(0..ties) == 0 {
                best = i;
            }
        }
    }
    best
}

/// Epsilon-greedy selection with random tie-breaking.
pub fn epsilon_greedy<R: Rng + ?Sized>(values: &[f64], epsilon: f64, rng: &mut R) -> Result<usize> {
    epsilon_greedy_with(values, epsilon, TieBreak::Random, rng)
}

/// With probability `epsilon` a uniformly random action, otherwise the greedy one.
pub fn epsilon_greedy_with<R: Rng + ?Sized>(
    values: &[f64],
    epsilon: f64,
    tie: TieBreak,
    rng: &mut R,
) -> Result<usize> {
    if values.is_empty() {
        return Err(Error::InvalidArgument(
            "epsilon-greedy over an empty action set".into(),
        ));
    }
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::InvalidArgument(format!(
            "epsilon {epsilon} outside [0,1]"
        )));
    }
    if epsilon > 0.0 && rng.gen::<f64>() < epsilon {
        return Ok(rng.gen_range(0..values.len()));
    }
    Ok(argmax(values, tie, rng))
}

/// Linearly annealed exploration rate, constant after `anneal_steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonSchedule {
    pub initial: f64,
    pub final_value: f64,
    pub anneal_steps: u64,
}

impl EpsilonSchedule {
    pub fn new(initial: f64, final_value: f64, anneal_steps: u64) -> Result<Self> {
        for v in [initial, final_value] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidArgument(format!("epsilon {v} outside [0,1]")));
            }
        }
        Ok(Self {
            initial,
            final_value,
            anneal_steps,
        })
    }

    pub fn constant(epsilon: f64) -> Result<Self> {
        Self::new(epsilon, epsilon, 0)
    }

    pub fn value(&self, step: u64) -> f64 {
        if step >= self.anneal_steps {
            return self.final_value;
        }
        let frac = step as f64 / self.anneal_steps as f64;
        self.initial + (self.final_value - self.initial) * frac
    }
}

/// Step-size rule for tabular learners that track visit counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LearningRate {
    Constant(f64),
    /// Starts at `initial` and decays harmonically with the visit count:
    /// `alpha_n = 1 / (1/initial + n - 1)`.
    Harmonic {
        initial: f64,
    },
    /// `alpha_n = n^-exponent`; Robbins-Monro for exponents in (0.5, 1].
    Polynomial {
        exponent: f64,
    },
}

impl LearningRate {
    /// Step size for the `visit`-th update (1-based) of an entry.
    pub fn alpha(&self, visit: u64) -> f64 {
        match *self {
            LearningRate::Constant(a) => a,
            LearningRate::Harmonic { initial } => {
                1.0 / (1.0 / initial + visit.saturating_sub(1) as f64)
            }
            LearningRate::Polynomial { exponent } => (visit.max(1) as f64).powf(-exponent),
        }
    }
}
