use crate::envs::pacboy::PacBoyState;
use crate::envs::Maze;

/// One-hot encoding of every Pac-Boy agent's local state, concatenated.
///
/// Block layout: one block of `cells` features per fruit position (the
/// fruit agent's Pac-Boy position), followed by one block of `cells^2`
/// features per ghost (the ghost agent's Pac-Boy/ghost pair). A fruit
/// block is active only while its fruit is present.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PacBoyFeatures {
    pub cells: usize,
    pub fruit_slots: usize,
    pub ghosts: usize,
}

impl PacBoyFeatures {
    pub fn for_maze(maze: &Maze) -> Self {
        Self {
            cells: maze.walkable_count(),
            fruit_slots: maze.fruit_slot_count(),
            ghosts: maze.ghost_starts().len(),
        }
    }

    pub fn size(&self) -> usize {
        self.fruit_slots * self.cells + self.ghosts * self.cells * self.cells
    }

    pub fn extract_into(&self, state: &PacBoyState, out: &mut Vec<usize>) {
        out.clear();
        let pac = state.pacboy as usize;
        let mut bits = state.fruits;
        while bits != 0 {
            let slot = bits.trailing_zeros() as usize;
            out.push(slot * self.cells + pac);
            bits &= bits - 1;
        }
        let base = self.fruit_slots * self.cells;
        let block = self.cells * self.cells;
        for (g, &ghost) in state.ghosts.iter().enumerate() {
            out.push(base + g * block + pac * self.cells + ghost as usize);
        }
    }
}

/// Active feature indices of `state` under `layout`.
pub fn pacboy_feature_extract(state: &PacBoyState, layout: &PacBoyFeatures) -> Vec<usize> {
    let mut out = Vec::with_capacity(layout.fruit_slots + layout.ghosts);
    layout.extract_into(state, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::pacboy::PacBoy;
    use crate::mdp::FlatEnvironment;

    #[test]
    fn canonical_feature_space() {
        let maze = Maze::canonical();
        let layout = PacBoyFeatures::for_maze(&maze);
        assert_eq!(layout.size(), 75 * 76 + 2 * 76 * 76);
        assert_eq!(layout.size(), 17_252);
    }

    #[test]
    fn empty_fruit_state_has_two_features() {
        let maze = Maze::canonical();
        let layout = PacBoyFeatures::for_maze(&maze);
        let mut env = PacBoy::new(maze).unwrap();
        let mut s = env.reset(3);
        s.fruits = 0;
        let f = pacboy_feature_extract(&s, &layout);
        assert_eq!(f.len(), 2);
        assert!(f.iter().all(|&j| (75 * 76..17_252).contains(&j)));
    }

    #[test]
    fn typical_state_has_about_forty_features() {
        let maze = Maze::canonical();
        let layout = PacBoyFeatures::for_maze(&maze);
        let mut env = PacBoy::new(maze).unwrap();
        let n = 2000;
        let total: usize = (0..n)
            .map(|seed| pacboy_feature_extract(&env.reset(seed), &layout).len())
            .sum();
        let mean = total as f64 / n as f64;
        // 37.5 expected fruits plus the two ghost blocks.
        assert!((mean - 39.5).abs() < 1.0, "mean active features {mean}");
    }
}
