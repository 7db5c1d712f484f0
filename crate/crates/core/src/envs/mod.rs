//! The four benchmark environments.

pub mod catch;
pub mod fallingfruit;
pub mod fruitgrid;
pub mod maze;
pub mod pacboy;

pub use catch::{catch_reset, catch_step, Catch, CatchState};
pub use fallingfruit::{fallingfruit_step, FallingFruit, FallingFruitShape, FallingFruitState};
pub use fruitgrid::{fruitgrid_step, FruitGrid, FruitGridShape, FruitGridState};
pub use maze::{Maze, MazeError};
pub use pacboy::{pacboy_reset, pacboy_step, PacBoy, PacBoyState};

use crate::error::{Error, Result};

/// Pac-Boy movement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    North,
    South,
    East,
    West,
}

impl Direction {
    pub const ALL: [Direction; 4] = [
        Direction::North,
        Direction::South,
        Direction::East,
        Direction::West,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Result<Self> {
        Self::ALL
            .get(i)
            .copied()
            .ok_or(Error::InvalidAction { action: i, size: 4 })
    }

    /// Parses `N`, `S`, `E` or `W`.
    pub fn from_symbol(c: char) -> Result<Self> {
        match c {
            'N' => Ok(Direction::North),
            'S' => Ok(Direction::South),
            'E' => Ok(Direction::East),
            'W' => Ok(Direction::West),
            _ => Err(Error::InvalidArgument(format!(
                "unknown direction symbol {c:?}"
            ))),
        }
    }

    /// (row, column) offset.
    pub fn delta(self) -> (isize, isize) {
        match self {
            Direction::North => (-1, 0),
            Direction::South => (1, 0),
            Direction::East => (0, 1),
            Direction::West => (0, -1),
        }
    }
}

/// One-dimensional move: `{left, no-op, right}`, indexed 0, 1, 2.
///
/// Also used for the vertical axis of the fruit grid, where `Left` is
/// north and `Right` is south.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shift {
    Left,
    NoOp,
    Right,
}

impl Shift {
    pub const ALL: [Shift; 3] = [Shift::Left, Shift::NoOp, Shift::Right];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Result<Self> {
        Self::ALL
            .get(i)
            .copied()
            .ok_or(Error::InvalidAction { action: i, size: 3 })
    }

    pub fn delta(self) -> i32 {
        self as i32 - 1
    }
}

pub(crate) fn clamp_add(pos: u8, delta: i32, max: u8) -> u8 {
    (pos as i32 + delta).clamp(0, max as i32) as u8
}
