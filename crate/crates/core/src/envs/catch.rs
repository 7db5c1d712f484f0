//! Catch: a single-cell ball falls straight down an N x N screen and a
//! single-cell paddle on the bottom row has to be under it when it lands.

use rand::Rng as _;

use super::{clamp_add, Shift};
use crate::error::{Error, Result};
use crate::mdp::{FlatEnvironment, StepResult};
use crate::rng::{self, Rng};

pub const DEFAULT_SIZE: u8 = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CatchState {
    pub ball_col: u8,
    pub ball_row: u8,
    pub paddle: u8,
    pub size: u8,
}

impl CatchState {
    pub fn is_terminal(&self) -> bool {
        self.ball_row + 1 >= self.size
    }
}

/// Ball at a uniformly random column of the top row, paddle centred.
pub fn catch_reset(size: u8, rng: &mut Rng) -> Result<CatchState> {
    if size < 2 {
        return Err(Error::InvalidArgument(format!(
            "catch grid size {size} < 2"
        )));
    }
    Ok(CatchState {
        ball_col: rng.gen_range(0..size),
        ball_row: 0,
        paddle: size / 2,
        size,
    })
}

/// Moves the paddle (clamped), drops the ball one row, and pays +1 or -1
/// when the ball reaches the bottom row.
pub fn catch_step(state: &CatchState, action: Shift) -> Result<(CatchState, f64, bool)> {
    if state.is_terminal() {
        return Err(Error::StepAfterTerminal);
    }
    let mut next = *state;
    next.paddle = clamp_add(state.paddle, action.delta(), state.size - 1);
    next.ball_row += 1;
    if next.is_terminal() {
        let reward = if next.ball_col == next.paddle {
            1.0
        } else {
            -1.0
        };
        return Ok((next, reward, true));
    }
    Ok((next, 0.0, false))
}

#[derive(Debug, Clone)]
pub struct Catch {
    state: CatchState,
    caught: bool,
    rng: Rng,
}

impl Catch {
    pub fn new(size: u8) -> Result<Self> {
        let mut rng = rng::from_seed(0);
        let state = catch_reset(size, &mut rng)?;
        Ok(Self {
            state,
            caught: false,
            rng,
        })
    }

    pub fn size(&self) -> u8 {
        self.state.size
    }

    pub fn set_state(&mut self, state: CatchState) {
        self.state = state;
        self.caught = false;
    }
}

impl FlatEnvironment for Catch {
    type State = CatchState;

    fn state_space_size(&self) -> u128 {
        (self.state.size as u128).pow(3)
    }

    fn num_actions(&self) -> usize {
        3
    }

    fn state(&self) -> &CatchState {
        &self.state
    }

    fn state_index(&self, s: &CatchState) -> u128 {
        let n = s.size as u128;
        s.ball_col as u128 + n * (s.ball_row as u128 + n * s.paddle as u128)
    }

    fn is_terminal(&self) -> bool {
        self.state.is_terminal()
    }

    fn reset(&mut self, seed: u64) -> CatchState {
        self.rng = rng::from_seed(seed);
        self.state =
            catch_reset(self.state.size, &mut self.rng).expect("size validated at construction");
        self.caught = false;
        self.state
    }

    fn step(&mut self, action: usize) -> Result<StepResult<CatchState>> {
        let (next, reward, terminal) = catch_step(&self.state, Shift::from_index(action)?)?;
        self.state = next;
        self.caught = reward > 0.0;
        Ok(StepResult {
            state: next,
            reward,
            terminal,
        })
    }

    fn performance(&self) -> f64 {
        if self.caught {
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

    fn at(col: u8, row: u8, paddle: u8) -> CatchState {
        CatchState {
            ball_col: col,
            ball_row: row,
            paddle,
            size: 24,
        }
    }

    #[test]
    fn catching_and_missing() {
        let (s, r, done) = catch_step(&at(5, 22, 5), Shift::NoOp).unwrap();
        assert_eq!((r, done, s.ball_row), (1.0, true, 23));
        let (_, r, done) = catch_step(&at(5, 22, 0), Shift::Left).unwrap();
        assert_eq!((r, done), (-1.0, true));
        let (s, r, done) = catch_step(&at(5, 0, 12), Shift::Right).unwrap();
        assert_eq!((r, done, s.paddle, s.ball_row), (0.0, false, 13, 1));
    }

    #[test]
    fn paddle_clamps_at_edges() {
        let (s, _, _) = catch_step(&at(5, 3, 23), Shift::Right).unwrap();
        assert_eq!(s.paddle, 23);
        let (s, _, _) = catch_step(&at(5, 3, 0), Shift::Left).unwrap();
        assert_eq!(s.paddle, 0);
    }

    #[test]
    fn stepping_after_terminal_fails() {
        assert!(matches!(
            catch_step(&at(5, 23, 5), Shift::NoOp),
            Err(Error::StepAfterTerminal)
        ));
        let mut env = Catch::new(24).unwrap();
        env.reset(0);
        assert!(matches!(env.step(3), Err(Error::InvalidAction { .. })));
        assert!(Catch::new(1).is_err());
    }

    #[test]
    fn episode_length_is_size_minus_one() {
        let mut env = Catch::new(24).unwrap();
        for seed in 0..200 {
            let trace = run_episode(&mut env, |_| (seed % 3) as usize, 1000, seed).unwrap();
            assert_eq!(trace.len(), 23);
            let s = env.reset(seed);
            assert_eq!(s.ball_row, 0);
            assert_eq!(s.paddle, 12);
        }
    }

    #[test]
    fn ball_column_is_uniform() {
        let mut env = Catch::new(24).unwrap();
        let n = 100_000u64;
        let mut counts = [0usize; 24];
        for seed in 0..n {
            counts[env.reset(seed).ball_col as usize] += 1;
        }
        let exp = n as f64 / 24.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - exp).powi(2) / exp).sum();
        // 0.01 upper critical value of chi-square with 23 degrees of freedom.
        assert!(chi2 < 41.64, "chi2 {chi2}");
    }
}
