//! Pac-Boy: a Pac-Man-like maze with randomly placed fruit and two
//! randomly wandering ghosts.
//!
//! Within a step Pac-Boy moves first (a blocked move leaves it in place),
//! then each ghost moves to a uniformly chosen adjacent walkable cell.
//! Pac-Boy touches a ghost when it lands on the ghost's cell or the ghost
//! lands on Pac-Boy's new cell; this also catches the two swapping places.
//! Each fruit eaten pays +1 and each ghost touched pays -10. Contact does
//! not end the episode; it ends when the last fruit is eaten or after the
//! step limit.

use std::sync::Arc;

use rand::Rng as _;

use super::{Direction, Maze};
use crate::error::{Error, Result};
use crate::mdp::{FlatEnvironment, StepResult};
use crate::rng::{self, Rng};

pub const EPISODE_LIMIT: u16 = 300;
pub const FRUIT_REWARD: f64 = 1.0;
pub const GHOST_PENALTY: f64 = -10.0;
pub const GHOSTS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PacBoyState {
    /// Walkable-cell index of Pac-Boy.
    pub pacboy: u8,
    pub ghosts: [u8; GHOSTS],
    /// Bit `k` set while fruit slot `k` holds a fruit.
    pub fruits: u128,
    pub steps: u16,
    /// Fruits present at reset.
    pub spawned: u8,
}

impl PacBoyState {
    pub fn fruit_count(&self) -> u32 {
        self.fruits.count_ones()
    }

    pub fn has_fruit(&self, slot: u8) -> bool {
        self.fruits >> slot & 1 == 1
    }

    pub fn is_terminal(&self, limit: u16) -> bool {
        self.fruits == 0 || self.steps >= limit
    }
}

/// Whether Pac-Boy touched each ghost during the step `prev -> next`.
pub fn ghost_contacts(prev: &PacBoyState, next: &PacBoyState) -> [bool; GHOSTS] {
    std::array::from_fn(|g| next.pacboy == prev.ghosts[g] || next.pacboy == next.ghosts[g])
}

/// Start-of-episode state: each fruit slot filled with probability 1/2.
pub fn pacboy_reset(maze: &Maze, rng: &mut Rng) -> PacBoyState {
    let mut fruits = 0u128;
    for slot in 0..maze.fruit_slot_count() {
        if rng.gen::<bool>() {
            fruits |= 1 << slot;
        }
    }
    let mut ghosts = [0u8; GHOSTS];
    ghosts.copy_from_slice(&maze.ghost_starts()[..GHOSTS]);
    PacBoyState {
        pacboy: maze.pacboy_start(),
        ghosts,
        fruits,
        steps: 0,
        spawned: fruits.count_ones() as u8,
    }
}

pub fn pacboy_step(
    maze: &Maze,
    state: &PacBoyState,
    action: Direction,
    limit: u16,
    rng: &mut Rng,
) -> Result<(PacBoyState, f64, bool)> {
    if state.is_terminal(limit) {
        return Err(Error::StepAfterTerminal);
    }
    let mut next = *state;
    next.pacboy = maze.move_from(state.pacboy, action);
    let mut reward = 0.0;
    if let Some(slot) = maze.fruit_slot(next.pacboy) {
        if next.has_fruit(slot) {
            next.fruits &= !(1u128 << slot);
            reward += FRUIT_REWARD;
        }
    }
    for g in 0..GHOSTS {
        let nb = maze.neighbors(state.ghosts[g]);
        next.ghosts[g] = nb[rng.gen_range(0..nb.len())];
    }
    for touched in ghost_contacts(state, &next) {
        if touched {
            reward += GHOST_PENALTY;
        }
    }
    next.steps += 1;
    Ok((next, reward, next.is_terminal(limit)))
}

/// Pac-Boy behind the [`FlatEnvironment`] interface. Actions are
/// [`Direction`] indices.
#[derive(Debug, Clone)]
pub struct PacBoy {
    maze: Arc<Maze>,
    limit: u16,
    state: PacBoyState,
    rng: Rng,
}

impl PacBoy {
    pub fn new(maze: Maze) -> Result<Self> {
        Self::with_limit(Arc::new(maze), EPISODE_LIMIT)
    }

    pub fn with_limit(maze: Arc<Maze>, limit: u16) -> Result<Self> {
        if maze.ghost_starts().len() != GHOSTS {
            return Err(Error::InvalidArgument(format!(
                "Pac-Boy needs exactly {GHOSTS} ghost starts, maze has {}",
                maze.ghost_starts().len()
            )));
        }
        if limit == 0 {
            return Err(Error::InvalidArgument(
                "episode limit must be positive".into(),
            ));
        }
        let mut rng = rng::from_seed(0);
        let state = pacboy_reset(&maze, &mut rng);
        Ok(Self {
            maze,
            limit,
            state,
            rng,
        })
    }

    pub fn maze(&self) -> &Arc<Maze> {
        &self.maze
    }

    pub fn limit(&self) -> u16 {
        self.limit
    }

    /// Replaces the current state, e.g. to set up a specific situation.
    pub fn set_state(&mut self, state: PacBoyState) {
        self.state = state;
    }
}

impl FlatEnvironment for PacBoy {
    type State = PacBoyState;

    fn state_space_size(&self) -> u128 {
        let cells = self.maze.walkable_count() as u128;
        let fruit_layouts = 1u128
            .checked_shl(self.maze.fruit_slot_count() as u32)
            .unwrap_or(u128::MAX);
        cells
            .saturating_mul(fruit_layouts)
            .saturating_mul(cells.pow(GHOSTS as u32))
    }

    fn num_actions(&self) -> usize {
        4
    }

    fn state(&self) -> &PacBoyState {
        &self.state
    }

    fn state_index(&self, s: &PacBoyState) -> u128 {
        let cells = self.maze.walkable_count() as u128;
        let mut idx = s.fruits;
        for &g in s.ghosts.iter().rev() {
            idx = idx * cells + g as u128;
        }
        idx * cells + s.pacboy as u128
    }

    fn is_terminal(&self) -> bool {
        self.state.is_terminal(self.limit)
    }

    fn reset(&mut self, seed: u64) -> PacBoyState {
        self.rng = rng::from_seed(seed);
        self.state = pacboy_reset(&self.maze, &mut self.rng);
        self.state
    }

    fn step(&mut self, action: usize) -> Result<StepResult<PacBoyState>> {
        let dir = Direction::from_index(action)?;
        let (next, reward, terminal) =
            pacboy_step(&self.maze, &self.state, dir, self.limit, &mut self.rng)?;
        self.state = next;
        Ok(StepResult {
            state: next,
            reward,
            terminal,
        })
    }

    fn performance(&self) -> f64 {
        if self.state.spawned == 0 {
            return 1.0;
        }
        1.0 - self.state.fruit_count() as f64 / self.state.spawned as f64
    }
}
