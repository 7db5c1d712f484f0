use crate::error::{Error, Result};

/// Linear action-value model over sparse binary features.
///
/// `Q(x, a) = sum of w_a[j] over the active features j of x`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearQ {
    n_features: usize,
    n_actions: usize,
    // Action-major: weights[a * n_features + j].
    weights: Vec<f64>,
}

impl LinearQ {
    pub fn new(n_features: usize, n_actions: usize) -> Self {
        Self {
            n_features,
            n_actions,
            weights: vec![0.0; n_features * n_actions],
        }
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn weight(&self, a: usize, j: usize) -> f64 {
        self.weights[a * self.n_features + j]
    }

    pub fn set_weight(&mut self, a: usize, j: usize, w: f64) -> Result<()> {
        if a >= self.n_actions || j >= self.n_features {
            return Err(Error::IndexOutOfRange(format!("weight ({a},{j})")));
        }
        if !w.is_finite() {
            return Err(Error::NonFinite(format!("weight {w}")));
        }
        self.weights[a * self.n_features + j] = w;
        Ok(())
    }

    fn check_features(&self, x: &[usize]) -> Result<()> {
        match x.iter().find(|&&j| j >= self.n_features) {
            Some(j) => Err(Error::IndexOutOfRange(format!(
                "feature {j} with {} features",
                self.n_features
            ))),
            None => Ok(()),
        }
    }

    pub fn value(&self, x: &[usize], a: usize) -> f64 {
        let block = &self.weights[a * self.n_features..(a + 1) * self.n_features];
        x.iter().map(|&j| block[j]).sum()
    }

    pub fn values_into(&self, x: &[usize], out: &mut Vec<f64>) {
        out.clear();
        out.extend((0..self.n_actions).map(|a| self.value(x, a)));
    }

    pub fn max_value(&self, x: &[usize]) -> f64 {
        (0..self.n_actions)
            .map(|a| self.value(x, a))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn digest(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for v in &self.weights {
            for b in v.to_bits().to_le_bytes() {
                h ^= u64::from(b);
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        }
        h
    }

    pub(crate) fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Semi-gradient Q-learning step for [`LinearQ`].
///
/// `delta = r + gamma * max_a' Q(x_next, a') - Q(x, a)` (no bootstrap on
/// terminal transitions), then `w_a[j] += alpha * delta` for each active `j`.
#[allow(clippy::too_many_arguments)]
pub fn linear_q_update(
    model: &mut LinearQ,
    x: &[usize],
    a: usize,
    r: f64,
    x_next: &[usize],
    terminal: bool,
    gamma: f64,
    alpha: f64,
) -> Result<f64> {
    if a >= model.n_actions {
        return Err(Error::IndexOutOfRange(format!("action {a}")));
    }
    if !r.is_finite() {
        return Err(Error::NonFinite(format!("reward {r}")));
    }
    if !(0.0..=1.0).contains(&alpha) || !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidArgument(format!(
            "alpha {alpha}, gamma {gamma}"
        )));
    }
    model.check_features(x)?;
    let bootstrap = if terminal {
        0.0
    } else {
        model.check_features(x_next)?;
        gamma * model.max_value(x_next)
    };
    let delta = r + bootstrap - model.value(x, a);
    let base = a * model.n_features;
    for &j in x {
        model.weights[base + j] += alpha * delta;
    }
    Ok(delta)
}
