//! Fruit collection on a small grid with 8-directional moves plus no-op.
//!
//! The flat action index is `vertical * 3 + horizontal`, each axis a
//! [`Shift`]: horizontal west/no-op/east, vertical north/no-op/south. So
//! index 4 is no-op and index 2 is north-east. Reward is +1 exactly when
//! the last fruit is collected.

use rand::seq::index::sample;
use rand::Rng as _;

use super::{clamp_add, Shift};
use crate::error::{Error, Result};
use crate::mdp::{FlatEnvironment, StepResult};
use crate::rng::{self, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FruitGridShape {
    pub width: u8,
    pub height: u8,
}

impl FruitGridShape {
    pub fn cells(&self) -> usize {
        self.width as usize * self.height as usize
    }

    pub fn cell(&self, x: u8, y: u8) -> usize {
        y as usize * self.width as usize + x as usize
    }

    fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 || self.cells() > 128 {
            return Err(Error::InvalidArgument(format!(
                "fruit grid {}x{} must have between 1 and 128 cells",
                self.width, self.height
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FruitGridState {
    pub x: u8,
    pub y: u8,
    /// Bit `y * width + x` set while a fruit sits on that cell.
    pub fruits: u128,
    pub steps: u32,
}

impl FruitGridState {
    pub fn fruit_count(&self) -> u32 {
        self.fruits.count_ones()
    }
}

/// Splits a flat action into its (horizontal, vertical) components.
pub fn split_action(action: usize) -> Result<(Shift, Shift)> {
    if action >= 9 {
        return Err(Error::InvalidAction { action, size: 9 });
    }
    Ok((
        Shift::from_index(action % 3)?,
        Shift::from_index(action / 3)?,
    ))
}

pub fn compose_action(horizontal: Shift, vertical: Shift) -> usize {
    vertical.index() * 3 + horizontal.index()
}

pub fn fruitgrid_step(
    shape: &FruitGridShape,
    state: &FruitGridState,
    action: usize,
) -> Result<(FruitGridState, f64, bool)> {
    if state.fruits == 0 {
        return Err(Error::StepAfterTerminal);
    }
    let (h, v) = split_action(action)?;
    let mut next = *state;
    next.x = clamp_add(state.x, h.delta(), shape.width - 1);
    next.y = clamp_add(state.y, v.delta(), shape.height - 1);
    next.fruits &= !(1u128 << shape.cell(next.x, next.y));
    next.steps += 1;
    if next.fruits == 0 {
        return Ok((next, 1.0, true));
    }
    Ok((next, 0.0, false))
}

#[derive(Debug, Clone)]
pub struct FruitGrid {
    shape: FruitGridShape,
    n_fruits: usize,
    time_limit: Option<u32>,
    state: FruitGridState,
    spawned: u32,
    rng: Rng,
}

impl FruitGrid {
    /// `time_limit` truncates episodes (terminal with reward 0) after that
    /// many steps; `None` lets an episode run until every fruit is taken.
    pub fn new(shape: FruitGridShape, n_fruits: usize, time_limit: Option<u32>) -> Result<Self> {
        shape.validate()?;
        if n_fruits == 0 || n_fruits >= shape.cells() {
            return Err(Error::InvalidArgument(format!(
                "{n_fruits} fruits on a {}-cell grid",
                shape.cells()
            )));
        }
        if time_limit == Some(0) {
            return Err(Error::InvalidArgument("time limit must be positive".into()));
        }
        let mut env = Self {
            shape,
            n_fruits,
            time_limit,
            state: FruitGridState {
                x: 0,
                y: 0,
                fruits: 0,
                steps: 0,
            },
            spawned: 0,
            rng: rng::from_seed(0),
        };
        env.reset(0);
        Ok(env)
    }

    pub fn shape(&self) -> FruitGridShape {
        self.shape
    }

    /// Places the agent and fruits explicitly. A fruit under the agent is
    /// collected immediately.
    pub fn set_state(&mut self, mut state: FruitGridState) -> Result<()> {
        if state.x >= self.shape.width || state.y >= self.shape.height {
            return Err(Error::InvalidArgument("agent outside the grid".into()));
        }
        state.fruits &= !(1u128 << self.shape.cell(state.x, state.y));
        self.spawned = state.fruit_count();
        self.state = state;
        Ok(())
    }
}

impl FlatEnvironment for FruitGrid {
    type State = FruitGridState;

    fn state_space_size(&self) -> u128 {
        let cells = self.shape.cells() as u128;
        cells.saturating_mul(1u128.checked_shl(cells as u32).unwrap_or(u128::MAX))
    }

    fn num_actions(&self) -> usize {
        9
    }

    fn state(&self) -> &FruitGridState {
        &self.state
    }

    fn state_index(&self, s: &FruitGridState) -> u128 {
        s.fruits
            .saturating_mul(self.shape.cells() as u128)
            .saturating_add(self.shape.cell(s.x, s.y) as u128)
    }

    fn is_terminal(&self) -> bool {
        self.state.fruits == 0 || self.time_limit.is_some_and(|l| self.state.steps >= l)
    }

    fn reset(&mut self, seed: u64) -> FruitGridState {
        self.rng = rng::from_seed(seed);
        let cells = self.shape.cells();
        let agent = self.rng.gen_range(0..cells);
        let mut fruits = 0u128;
        for i in sample(&mut self.rng, cells - 1, self.n_fruits) {
            // Skip over the agent's cell.
            let cell = if i >= agent { i + 1 } else { i };
            fruits |= 1 << cell;
        }
        let w = self.shape.width as usize;
        self.state = FruitGridState {
            x: (agent % w) as u8,
            y: (agent / w) as u8,
            fruits,
            steps: 0,
        };
        self.spawned = self.n_fruits as u32;
        self.state
    }

    fn step(&mut self, action: usize) -> Result<StepResult<FruitGridState>> {
        if self.is_terminal() {
            return Err(Error::StepAfterTerminal);
        }
        let (next, reward, mut terminal) = fruitgrid_step(&self.shape, &self.state, action)?;
        self.state = next;
        terminal |= self.is_terminal();
        Ok(StepResult {
            state: next,
            reward,
            terminal,
        })
    }

    fn performance(&self) -> f64 {
        if self.spawned == 0 {
            return 1.0;
        }
        1.0 - self.state.fruit_count() as f64 / self.spawned as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SHAPE: FruitGridShape = FruitGridShape {
        width: 10,
        height: 10,
    };

    fn state(x: u8, y: u8, fruits: &[(u8, u8)]) -> FruitGridState {
        FruitGridState {
            x,
            y,
            fruits: fruits
                .iter()
                .fold(0, |m, &(fx, fy)| m | 1 << SHAPE.cell(fx, fy)),
            steps: 0,
        }
    }

    #[test]
    fn last_fruit_pays_and_terminates() {
        let s = state(3, 3, &[(4, 3)]);
        let (n, r, done) =
            fruitgrid_step(&SHAPE, &s, compose_action(Shift::Right, Shift::NoOp)).unwrap();
        assert_eq!((r, done, n.fruits), (1.0, true, 0));
    }

    #[test]
    fn intermediate_fruit_pays_nothing() {
        let s = state(3, 3, &[(4, 2), (9, 9)]);
        let (n, r, done) = fruitgrid_step(&SHAPE, &s, 2).unwrap(); // north-east
        assert_eq!((n.x, n.y), (4, 2));
        assert_eq!((r, done, n.fruit_count()), (0.0, false, 1));
    }

    #[test]
    fn noop_keeps_state() {
        let s = state(0, 0, &[(9, 9)]);
        let (n, r, _) = fruitgrid_step(&SHAPE, &s, 4).unwrap();
        assert_eq!((n.x, n.y, n.fruits, r), (s.x, s.y, s.fruits, 0.0));
        assert!(fruitgrid_step(&SHAPE, &s, 9).is_err());
    }

    #[test]
    fn moves_clamp_at_borders() {
        let s = state(0, 0, &[(9, 9)]);
        let (n, _, _) = fruitgrid_step(&SHAPE, &s, 0).unwrap(); // north-west
        assert_eq!((n.x, n.y), (0, 0));
    }

    #[test]
    fn east_north_composes_to_north_east() {
        assert_eq!(compose_action(Shift::Right, Shift::Left), 2);
        assert_eq!(split_action(2).unwrap(), (Shift::Right, Shift::Left));
    }

    #[test]
    fn reset_places_fruits_off_the_agent() {
        let mut env = FruitGrid::new(SHAPE, 5, None).unwrap();
        for seed in 0..500 {
            let s = env.reset(seed);
            assert_eq!(s.fruit_count(), 5);
            assert_eq!(s.fruits >> SHAPE.cell(s.x, s.y) & 1, 0);
            assert!(s.fruits < 1 << 100);
        }
        assert!(FruitGrid::new(SHAPE, 100, None).is_err());
    }

    #[test]
    fn time_limit_truncates() {
        let mut env = FruitGrid::new(SHAPE, 1, Some(3)).unwrap();
        env.set_state(state(0, 0, &[(9, 9)])).unwrap();
        assert!(!env.step(4).unwrap().terminal);
        assert!(!env.step(4).unwrap().terminal);
        let last = env.step(4).unwrap();
        assert!(last.terminal);
        assert_eq!(last.reward, 0.0);
        assert!(env.step(4).is_err());
    }
}
