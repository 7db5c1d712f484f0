//! Pac-Boy maze files.
//!
//! Line 1 is `expect <walkable-count>`. The grid follows, one row per line:
//! `#` wall, `.` walkable, `P` Pac-Boy start, `G` ghost start. Cells
//! outside the grid are walls. Walkable cells are indexed in row-major
//! order; fruit positions are the walkable cells other than `P`, in the
//! same order.

use std::path::Path;

use thiserror::Error;

use super::Direction;

/// Largest maze the fruit bitmask supports (128 fruit slots plus the start).
pub const MAX_WALKABLE: usize = 129;

const CANONICAL: &str = include_str!("../../assets/pacboy.maze");

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MazeError {
    #[error("missing `expect <count>` header")]
    MissingHeader,
    #[error("line {line}: bad header `{text}`")]
    BadHeader { line: usize, text: String },
    #[error("line {line}, column {column}: unexpected glyph {glyph:?}")]
    BadGlyph {
        line: usize,
        column: usize,
        glyph: char,
    },
    #[error("line {line}: row width {found} differs from {expected}")]
    RaggedRow {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("header expects {expected} walkable cells, found {found}")]
    CountMismatch { expected: usize, found: usize },
    #[error("walkable cells are disconnected ({reachable} of {total} reachable)")]
    Disconnected { reachable: usize, total: usize },
    #[error("expected exactly one Pac-Boy start, found {0}")]
    PacBoyStart(usize),
    #[error("no ghost start cell")]
    NoGhosts,
    #[error("{0} walkable cells exceeds the supported maximum")]
    TooLarge(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Maze {
    width: usize,
    height: usize,
    walkable_grid: Vec<bool>,
    // (row, col) of each walkable cell, row-major.
    cells: Vec<(usize, usize)>,
    pacboy_start: u8,
    ghost_starts: Vec<u8>,
    // Destination for each direction; the cell itself when blocked.
    moves: Vec<[u8; 4]>,
    neighbors: Vec<Vec<u8>>,
    fruit_slot: Vec<Option<u8>>,
    slot_cell: Vec<u8>,
}

impl Maze {
    pub fn parse(text: &str) -> Result<Maze, MazeError> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (hline, header) = lines.next().ok_or(MazeError::MissingHeader)?;
        let mut htoks = header.split_whitespace();
        if htoks.next() != Some("expect") {
            return Err(MazeError::MissingHeader);
        }
        let expected: usize = htoks
            .next()
            .and_then(|t| t.parse().ok())
            .filter(|_| htoks.next().is_none())
            .ok_or_else(|| MazeError::BadHeader {
                line: hline + 1,
                text: header.to_string(),
            })?;

        let mut walkable_grid = Vec::new();
        let mut width = None;
        let mut height = 0;
        let mut pac = Vec::new();
        let mut ghosts = Vec::new();
        for (i, line) in lines {
            let row: Vec<char> = line.trim_end().chars().collect();
            match width {
                None => width = Some(row.len()),
                Some(w) if w != row.len() => {
                    return Err(MazeError::RaggedRow {
                        line: i + 1,
                        expected: w,
                        found: row.len(),
                    })
                }
                _ => {}
            }
            for (c, &ch) in row.iter().enumerate() {
                let open = match ch {
                    '#' => false,
                    '.' => true,
                    'P' => {
                        pac.push((height, c));
                        true
                    }
                    'G' => {
                        ghosts.push((height, c));
                        true
                    }
                    _ => {
                        return Err(MazeError::BadGlyph {
                            line: i + 1,
                            column: c + 1,
                            glyph: ch,
                        })
                    }
                };
                walkable_grid.push(open);
            }
            height += 1;
        }
        let width = width.unwrap_or(0);

        let cells: Vec<(usize, usize)> = (0..height)
            .flat_map(|r| (0..width).map(move |c| (r, c)))
            .filter(|&(r, c)| walkable_grid[r * width + c])
            .collect();
        if cells.len() != expected {
            return Err(MazeError::CountMismatch {
                expected,
                found: cells.len(),
            });
        }
        if cells.len() > MAX_WALKABLE {
            return Err(MazeError::TooLarge(cells.len()));
        }
        if pac.len() != 1 {
            return Err(MazeError::PacBoyStart(pac.len()));
        }
        if ghosts.is_empty() {
            return Err(MazeError::NoGhosts);
        }

        let mut index = vec![None; width * height];
        for (i, &(r, c)) in cells.iter().enumerate() {
            index[r * width + c] = Some(i as u8);
        }
        let at = |r: isize, c: isize| -> Option<u8> {
            if r < 0 || c < 0 || r as usize >= height || c as usize >= width {
                None
            } else {
                index[r as usize * width + c as usize]
            }
        };
        let mut moves = Vec::with_capacity(cells.len());
        let mut neighbors = Vec::with_capacity(cells.len());
        for (i, &(r, c)) in cells.iter().enumerate() {
            let mut m = [i as u8; 4];
            let mut nb = Vec::new();
            for d in Direction::ALL {
                let (dr, dc) = d.delta();
                if let Some(j) = at(r as isize + dr, c as isize + dc) {
                    m[d.index()] = j;
                    nb.push(j);
                }
            }
            moves.push(m);
            neighbors.push(nb);
        }

        // Connectivity by flood fill from the first walkable cell.
        if !cells.is_empty() {
            let mut seen = vec![false; cells.len()];
            let mut stack = vec![0u8];
            seen[0] = true;
            let mut reachable = 1;
            while let Some(i) = stack.pop() {
                for &j in &neighbors[i as usize] {
                    if !seen[j as usize] {
                        seen[j as usize] = true;
                        reachable += 1;
                        stack.push(j);
                    }
                }
            }
            if reachable != cells.len() {
                return Err(MazeError::Disconnected {
                    reachable,
                    total: cells.len(),
                });
            }
        }

        let idx = |(r, c): (usize, usize)| index[r * width + c].expect("start cells are walkable");
        let pacboy_start = idx(pac[0]);
        let ghost_starts = ghosts.into_iter().map(idx).collect();
        let mut fruit_slot = vec![None; cells.len()];
        let mut slot_cell = Vec::new();
        for (i, slot) in fruit_slot.iter_mut().enumerate() {
            if i as u8 != pacboy_start {
                *slot = Some(slot_cell.len() as u8);
                slot_cell.push(i as u8);
            }
        }

        Ok(Maze {
            width,
            height,
            walkable_grid,
            cells,
            pacboy_start,
            ghost_starts,
            moves,
            neighbors,
            fruit_slot,
            slot_cell,
        })
    }

    pub fn load(path: &Path) -> crate::Result<Maze> {
        Ok(Self::parse(&std::fs::read_to_string(path)?)?)
    }

    /// The shipped 76-cell maze with two ghost starts.
    pub fn canonical() -> Maze {
        Self::parse(CANONICAL).expect("canonical maze is valid")
    }

    pub fn canonical_text() -> &'static str {
        CANONICAL
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn is_walkable(&self, row: usize, col: usize) -> bool {
        row < self.height && col < self.width && self.walkable_grid[row * self.width + col]
    }

    pub fn walkable_count(&self) -> usize {
        self.cells.len()
    }

    pub fn cell_position(&self, cell: u8) -> (usize, usize) {
        self.cells[cell as usize]
    }

    pub fn cell_at(&self, row: usize, col: usize) -> Option<u8> {
        self.cells
            .iter()
            .position(|&p| p == (row, col))
            .map(|i| i as u8)
    }

    pub fn pacboy_start(&self) -> u8 {
        self.pacboy_start
    }

    pub fn ghost_starts(&self) -> &[u8] {
        &self.ghost_starts
    }

    /// Destination of a move; the cell itself when a wall blocks it.
    pub fn move_from(&self, cell: u8, dir: Direction) -> u8 {
        self.moves[cell as usize][dir.index()]
    }

    pub fn neighbors(&self, cell: u8) -> &[u8] {
        &self.neighbors[cell as usize]
    }

    pub fn fruit_slot_count(&self) -> usize {
        self.slot_cell.len()
    }

    pub fn fruit_slot(&self, cell: u8) -> Option<u8> {
        self.fruit_slot[cell as usize]
    }

    pub fn slot_cell(&self, slot: u8) -> u8 {
        self.slot_cell[slot as usize]
    }
}
