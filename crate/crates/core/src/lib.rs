//! Separation-of-concerns reinforcement learning.
//!
//! A single-agent task is decomposed into several concurrently trained
//! agents, each with its own projection of the state, its own reward and
//! discount, and optionally communication actions that other agents observe
//! one step later. An aggregator turns the agents' outputs into one action
//! of the underlying (flat) environment.
//!
//! The crate is organised as:
//!
//! - [`mdp`]: flat environment interface, returns, explicit tabular MDPs and
//!   the value-iteration oracle.
//! - [`envs`]: Pac-Boy, Catch, fruit collection and falling fruit.
//! - [`learn`]: Q-tables, linear Q-learning, epsilon-greedy selection and
//!   persistence.
//! - [`soc`]: agent specifications, projections, the delayed communication
//!   channel, aggregators and the stepping loop.
//! - [`depgraph`]: dependency declarations, classification and training
//!   schedules.
//! - [`harness`]: configuration, experiments, metrics, pre-training and
//!   parameter sweeps.

pub mod depgraph;
pub mod envs;
pub mod error;
pub mod harness;
pub mod learn;
pub mod mdp;
pub mod rng;
pub mod soc;

pub use error::{Error, Result};
