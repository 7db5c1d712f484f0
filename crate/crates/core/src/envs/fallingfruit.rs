//! Falling fruit: a body moves along the bottom row and carries a basket
//! on an arm that can be offset up to `reach` cells either side of it.
//! The fruit falls one row per step. The flat action is the pair
//! (body move, arm move), indexed `body * 3 + arm`.

use rand::Rng as _;

use super::{clamp_add, Shift};
use crate::error::{Error, Result};
use crate::mdp::{FlatEnvironment, StepResult};
use crate::rng::{self, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FallingFruitShape {
    pub width: u8,
    pub height: u8,
    pub reach: u8,
}

impl Default for FallingFruitShape {
    fn default() -> Self {
        Self {
            width: 10,
            height: 10,
            reach: 2,
        }
    }
}

impl FallingFruitShape {
    pub fn basket(&self, state: &FallingFruitState) -> u8 {
        (state.body as i32 + state.arm as i32).clamp(0, self.width as i32 - 1) as u8
    }

    pub fn arm_positions(&self) -> usize {
        2 * self.reach as usize + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FallingFruitState {
    pub body: u8,
    pub arm: i8,
    pub fruit_col: u8,
    pub fruit_row: u8,
}

pub fn compose_action(body: Shift, arm: Shift) -> usize {
    body.index() * 3 + arm.index()
}

pub fn split_action(action: usize) -> Result<(Shift, Shift)> {
    if action >= 9 {
        return Err(Error::InvalidAction { action, size: 9 });
    }
    Ok((
        Shift::from_index(action / 3)?,
        Shift::from_index(action % 3)?,
    ))
}

/// +1 when the fruit lands in the basket, -1 when it lands elsewhere.
pub fn fallingfruit_step(
    shape: &FallingFruitShape,
    state: &FallingFruitState,
    action: (Shift, Shift),
) -> Result<(FallingFruitState, f64, bool)> {
    if state.fruit_row + 1 >= shape.height {
        return Err(Error::StepAfterTerminal);
    }
    let (body, arm) = action;
    let mut next = *state;
    next.body = clamp_add(state.body, body.delta(), shape.width - 1);
    let reach = shape.reach as i32;
    next.arm = (state.arm as i32 + arm.delta()).clamp(-reach, reach) as i8;
    next.fruit_row += 1;
    if next.fruit_row + 1 >= shape.height {
        let reward = if shape.basket(&next) == next.fruit_col {
            1.0
        } else {
            -1.0
        };
        return Ok((next, reward, true));
    }
    Ok((next, 0.0, false))
}

#[derive(Debug, Clone)]
pub struct FallingFruit {
    shape: FallingFruitShape,
    state: FallingFruitState,
    caught: bool,
    rng: Rng,
}

impl FallingFruit {
    pub fn new(shape: FallingFruitShape) -> Result<Self> {
        if shape.width == 0 || shape.height < 2 || shape.reach as usize >= shape.width as usize {
            return Err(Error::InvalidArgument(format!(
                "bad falling-fruit shape {shape:?}"
            )));
        }
        let mut env = Self {
            shape,
            state: FallingFruitState {
                body: 0,
                arm: 0,
                fruit_col: 0,
                fruit_row: 0,
            },
            caught: false,
            rng: rng::from_seed(0),
        };
        env.reset(0);
        Ok(env)
    }

    pub fn shape(&self) -> FallingFruitShape {
        self.shape
    }

    pub fn set_state(&mut self, state: FallingFruitState) {
        self.state = state;
        self.caught = false;
    }
}

impl FlatEnvironment for FallingFruit {
    type State = FallingFruitState;

    fn state_space_size(&self) -> u128 {
        let w = self.shape.width as u128;
        w * self.shape.arm_positions() as u128 * w * self.shape.height as u128
    }

    fn num_actions(&self) -> usize {
        9
    }

    fn state(&self) -> &FallingFruitState {
        &self.state
    }

    fn state_index(&self, s: &FallingFruitState) -> u128 {
        let w = self.shape.width as u128;
        let arm = (s.arm as i32 + self.shape.reach as i32) as u128;
        let arms = self.shape.arm_positions() as u128;
        s.body as u128 + w * (arm + arms * (s.fruit_col as u128 + w * s.fruit_row as u128))
    }

    fn is_terminal(&self) -> bool {
        self.state.fruit_row + 1 >= self.shape.height
    }

    fn reset(&mut self, seed: u64) -> FallingFruitState {
        self.rng = rng::from_seed(seed);
        self.state = FallingFruitState {
            body: self.shape.width / 2,
            arm: 0,
            fruit_col: self.rng.gen_range(0..self.shape.width),
            fruit_row: 0,
        };
        self.caught = false;
        self.state
    }

    fn step(&mut self, action: usize) -> Result<StepResult<FallingFruitState>> {
        let (next, reward, terminal) =
            fallingfruit_step(&self.shape, &self.state, split_action(action)?)?;
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
    use proptest::prelude::*;

    const SHAPE: FallingFruitShape = FallingFruitShape {
        width: 10,
        height: 10,
        reach: 2,
    };

    fn st(body: u8, arm: i8, col: u8, row: u8) -> FallingFruitState {
        FallingFruitState {
            body,
            arm,
            fruit_col: col,
            fruit_row: row,
        }
    }

    #[test]
    fn catch_and_miss() {
        let (_, r, done) =
            fallingfruit_step(&SHAPE, &st(4, 1, 5, 8), (Shift::NoOp, Shift::NoOp)).unwrap();
        assert_eq!((r, done), (1.0, true));
        let (_, r, done) =
            fallingfruit_step(&SHAPE, &st(4, 0, 7, 8), (Shift::NoOp, Shift::NoOp)).unwrap();
        assert_eq!((r, done), (-1.0, true));
    }

    #[test]
    fn arm_clamps_at_reach() {
        let (s, _, _) =
            fallingfruit_step(&SHAPE, &st(4, 2, 0, 0), (Shift::NoOp, Shift::Right)).unwrap();
        assert_eq!(s.arm, 2);
        let (s, _, _) =
            fallingfruit_step(&SHAPE, &st(4, -2, 0, 0), (Shift::Left, Shift::Left)).unwrap();
        assert_eq!((s.arm, s.body), (-2, 3));
    }

    #[test]
    fn pair_encoding() {
        assert_eq!(compose_action(Shift::Left, Shift::Right), 2);
        assert_eq!(split_action(2).unwrap(), (Shift::Left, Shift::Right));
        assert!(split_action(9).is_err());
    }

    proptest! {
        #[test]
        fn basket_is_clamped_body_plus_arm(
            seed in 0u64..1000,
            actions in proptest::collection::vec(0usize..9, 9),
        ) {
            let mut env = FallingFruit::new(SHAPE).unwrap();
            env.reset(seed);
            for a in actions {
                if env.is_terminal() { break; }
                let s = env.step(a).unwrap().state;
                let expect = (s.body as i32 + s.arm as i32).clamp(0, 9) as u8;
                prop_assert_eq!(SHAPE.basket(&s), expect);
                prop_assert!(s.arm.unsigned_abs() <= SHAPE.reach);
            }
        }
    }
}
