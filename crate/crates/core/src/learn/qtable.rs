use crate::error::{Error, Result};

/// Dense state-by-action value table.
///
/// Dimensions are fixed at construction. Entries are always finite.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    n_states: usize,
    n_actions: usize,
    initial: f64,
    values: Vec<f64>,
}

impl QTable {
    pub fn new(n_states: usize, n_actions: usize) -> Self {
        Self {
            n_states,
            n_actions,
            initial: 0.0,
            values: vec![0.0; n_states * n_actions],
        }
    }

    pub fn with_initial(n_states: usize, n_actions: usize, initial: f64) -> Result<Self> {
        if !initial.is_finite() {
            return Err(Error::NonFinite(format!("initial value {initial}")));
        }
        Ok(Self {
            n_states,
            n_actions,
            initial,
            values: vec![initial; n_states * n_actions],
        })
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn initial(&self) -> f64 {
        self.initial
    }

    pub fn get(&self, s: usize, a: usize) -> f64 {
        self.values[s * self.n_actions + a]
    }

    pub fn set(&mut self, s: usize, a: usize, value: f64) -> Result<()> {
        self.check(s, a)?;
        if !value.is_finite() {
            return Err(Error::NonFinite(format!("Q({s},{a}) = {value}")));
        }
        self.values[s * self.n_actions + a] = value;
        Ok(())
    }

    pub fn row(&self, s: usize) -> &[f64] {
        &self.values[s * self.n_actions..(s + 1) * self.n_actions]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_value(&self, s: usize) -> f64 {
        self.row(s)
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Greedy action with lowest-index tie-breaking.
    pub fn greedy_action(&self, s: usize) -> usize {
        let row = self.row(s);
        let mut best = 0;
        for (a, &v) in row.iter().enumerate().skip(1) {
            if v > row[best] {
                best = a;
            }
        }
        best
    }

    pub fn max_abs_diff(&self, other: &QTable) -> Result<f64> {
        if self.n_states != other.n_states || self.n_actions != other.n_actions {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.n_states, self.n_actions, other.n_states, other.n_actions
            )));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Hash over the exact bit patterns of every entry.
    pub fn digest(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |x: u64| {
            for b in x.to_le_bytes() {
                h ^= u64::from(b);
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        };
        eat(self.n_states as u64);
        eat(self.n_actions as u64);
        for v in &self.values {
            eat(v.to_bits());
        }
        h
    }

    pub(crate) fn check(&self, s: usize, a: usize) -> Result<()> {
        if s >= self.n_states || a >= self.n_actions {
            return Err(Error::IndexOutOfRange(format!(
                "({s},{a}) in a {}x{} table",
                self.n_states, self.n_actions
            )));
        }
        Ok(())
    }

    /// Moves Q(s,a) a fraction `alpha` towards `target`. Returns the TD error.
    pub fn update_toward(&mut self, s: usize, a: usize, target: f64, alpha: f64) -> Result<f64> {
        self.check(s, a)?;
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidArgument(format!(
                "learning rate {alpha} outside [0,1]"
            )));
        }
        if !target.is_finite() {
            return Err(Error::NonFinite(format!("target {target}")));
        }
        let idx = s * self.n_actions + a;
        let delta = target - self.values[idx];
        self.values[idx] += alpha * delta;
        Ok(delta)
    }
}

/// One Q-learning backup on entry `(s, a)`.
///
/// `target = r + gamma * max_a' Q(s_next, a')`, with the bootstrap dropped on
/// terminal transitions. Returns the TD error.
#[allow(clippy::too_many_arguments)]
pub fn q_update(
    table: &mut QTable,
    s: usize,
    a: usize,
    r: f64,
    s_next: usize,
    terminal: bool,
    gamma: f64,
    alpha: f64,
) -> Result<f64> {
    if !r.is_finite() {
        return Err(Error::NonFinite(format!("reward {r}")));
    }
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidArgument(format!(
            "discount {gamma} outside [0,1]"
        )));
    }
    let target = if terminal {
        r
    } else {
        table.check(s_next, 0)?;
        r + gamma * table.max_value(s_next)
    };
    table.update_toward(s, a, target, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_alpha_leaves_table_unchanged() {
        let mut t = QTable::new(3, 2);
        t.set(1, 1, 0.7).unwrap();
        let before = t.clone();
        q_update(&mut t, 0, 1, 5.0, 1, false, 0.9, 0.0).unwrap();
        assert_eq!(t, before);
    }

    #[test]
    fn full_step_on_zero_table() {
        let mut t = QTable::new(2, 4);
        q_update(&mut t, 0, 2, 1.0, 1, false, 0.4, 1.0).unwrap();
        assert_eq!(t.get(0, 2), 1.0);
    }

    #[test]
    fn hand_evaluated_update() {
        let mut t = QTable::new(2, 2);
        t.set(0, 0, 0.5).unwrap();
        t.set(1, 1, 2.0).unwrap();
        q_update(&mut t, 0, 0, 1.0, 1, false, 0.9, 0.1).unwrap();
        // 0.5 + 0.1 * (1 + 0.9 * 2 - 0.5)
        assert!((t.get(0, 0) - 0.73).abs() < 1e-12);
    }

    #[test]
    fn terminal_drops_bootstrap() {
        let mut t = QTable::new(2, 1);
        t.set(1, 0, 100.0).unwrap();
        q_update(&mut t, 0, 0, 1.0, 1, true, 0.9, 1.0).unwrap();
        assert_eq!(t.get(0, 0), 1.0);
    }

    #[test]
    fn errors() {
        let mut t = QTable::new(2, 2);
        assert!(matches!(
            q_update(&mut t, 2, 0, 0.0, 0, false, 0.9, 0.1),
            Err(Error::IndexOutOfRange(_))
        ));
        assert!(matches!(
            q_update(&mut t, 0, 0, 0.0, 5, false, 0.9, 0.1),
            Err(Error::IndexOutOfRange(_))
        ));
        assert!(matches!(
            q_update(&mut t, 0, 0, f64::NAN, 1, false, 0.9, 0.1),
            Err(Error::NonFinite(_))
        ));
        assert!(q_update(&mut t, 0, 0, 0.0, 1, false, 0.9, 1.5).is_err());
    }

    proptest! {
        #[test]
        fn only_the_updated_entry_changes(
            init in proptest::collection::vec(-5.0f64..5.0, 12),
            s in 0usize..4, a in 0usize..3, s2 in 0usize..4,
            r in -3.0f64..3.0, gamma in 0.0f64..=1.0, alpha in 0.0f64..=1.0,
            terminal: bool,
        ) {
            let mut t = QTable::new(4, 3);
            for (i, v) in init.iter().enumerate() {
                t.set(i / 3, i % 3, *v).unwrap();
            }
            let before = t.clone();
            q_update(&mut t, s, a, r, s2, terminal, gamma, alpha).unwrap();
            for i in 0..4 {
                for j in 0..3 {
                    if (i, j) != (s, a) {
                        prop_assert_eq!(t.get(i, j).to_bits(), before.get(i, j).to_bits());
                    }
                }
            }
        }
    }
}
