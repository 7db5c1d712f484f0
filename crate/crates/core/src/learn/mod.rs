//! Tabular and linear Q-learning, exploration policies and persistence.

pub mod features;
pub mod linear;
pub mod persist;
pub mod policy;
pub mod qtable;

pub use features::{pacboy_feature_extract, PacBoyFeatures};
pub use linear::{linear_q_update, LinearQ};
pub use policy::{
    argmax, epsilon_greedy, epsilon_greedy_with, EpsilonSchedule, LearningRate, TieBreak,
};
pub use qtable::{q_update, QTable};
