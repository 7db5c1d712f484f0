//! Aggregators: composing per-agent environment actions into one flat
//! action, or combining per-agent action preferences over the flat set.

use crate::error::{Error, Result};

/// A declared bijection from the product of the agents' environment-action
/// sets onto the flat action set.
///
/// The flat action is `sum_i e_i * place_i`. Sorted by place value the
/// agents must form a mixed-radix number system: the smallest place is 1
/// and each next place is the previous place times the previous size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositeMap {
    sizes: Vec<usize>,
    places: Vec<usize>,
    flat: usize,
}

impl CompositeMap {
    /// `sizes[i]` is agent `i`'s environment-action count (0 for agents that
    /// only communicate); `places[i]` is ignored for those agents.
    pub fn new(sizes: Vec<usize>, places: Vec<usize>) -> Result<Self> {
        if sizes.len() != places.len() {
            return Err(Error::Aggregation(format!(
                "{} action-set sizes but {} place values",
                sizes.len(),
                places.len()
            )));
        }
        let mut digits: Vec<(usize, usize)> = sizes
            .iter()
            .zip(&places)
            .filter(|(&s, _)| s > 0)
            .map(|(&s, &p)| (p, s))
            .collect();
        if digits.is_empty() {
            return Err(Error::Aggregation(
                "no agent has environment actions".into(),
            ));
        }
        digits.sort_unstable();
        let mut expect = 1usize;
        for (place, size) in digits {
            if place != expect {
                return Err(Error::Aggregation(format!(
                    "place values {places:?} do not form a mixed radix for sizes {sizes:?}"
                )));
            }
            expect = expect
                .checked_mul(size)
                .ok_or_else(|| Error::Aggregation("flat action set too large".into()))?;
        }
        Ok(Self {
            sizes,
            places,
            flat: expect,
        })
    }

    /// First agent least significant.
    pub fn mixed_radix(sizes: &[usize]) -> Result<Self> {
        let mut places = Vec::with_capacity(sizes.len());
        let mut place = 1;
        for &s in sizes {
            places.push(place);
            if s > 0 {
                place *= s;
            }
        }
        Self::new(sizes.to_vec(), places)
    }

    pub fn flat_size(&self) -> usize {
        self.flat
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Inverse of [`aggregate_composite`].
    pub fn decompose(&self, flat: usize) -> Result<Vec<Option<usize>>> {
        if flat >= self.flat {
            return Err(Error::InvalidAction {
                action: flat,
                size: self.flat,
            });
        }
        Ok(self
            .sizes
            .iter()
            .zip(&self.places)
            .map(|(&s, &p)| (s > 0).then(|| flat / p % s))
            .collect())
    }
}

pub fn aggregate_composite(map: &CompositeMap, env_actions: &[Option<usize>]) -> Result<usize> {
    if env_actions.len() != map.sizes.len() {
        return Err(Error::Aggregation(format!(
            "expected {} components, got {}",
            map.sizes.len(),
            env_actions.len()
        )));
    }
    let mut flat = 0;
    for (i, ((&size, &place), e)) in map
        .sizes
        .iter()
        .zip(&map.places)
        .zip(env_actions)
        .enumerate()
    {
        match (size, *e) {
            (0, _) => {}
            (_, None) => {
                return Err(Error::Aggregation(format!(
                    "agent {i} supplied no environment action"
                )))
            }
            (s, Some(e)) if e >= s => return Err(Error::InvalidAction { action: e, size: s }),
            (_, Some(e)) => flat += e * place,
        }
    }
    Ok(flat)
}

fn check_lengths(values: &[&[f64]]) -> Result<usize> {
    let first = values
        .first()
        .ok_or_else(|| Error::Aggregation("no preference vectors".into()))?
        .len();
    if first == 0 {
        return Err(Error::Aggregation("empty preference vector".into()));
    }
    if let Some(v) = values.iter().find(|v| v.len() != first) {
        return Err(Error::Aggregation(format!(
            "vector of length {} among length {first}",
            v.len()
        )));
    }
    Ok(first)
}

/// Elementwise sum of the agents' action values.
pub fn aggregate_qsum(values: &[&[f64]]) -> Result<Vec<f64>> {
    let n = check_lengths(values)?;
    let mut out = vec![0.0; n];
    for v in values {
        for (o, x) in out.iter_mut().zip(v.iter()) {
            *o += x;
        }
    }
    Ok(out)
}

/// Voting rules over the flat action set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Vote {
    /// One vote per agent for its greedy action (lowest index on ties).
    Majority,
    /// Borda count: an action ranked `r` (0 = best) earns `n_actions - r`.
    Rank,
    /// Generalised mean of the agents' values with exponent `p`.
    PowerMean(f64),
}

pub fn aggregate_vote(values: &[&[f64]], vote: Vote) -> Result<Vec<f64>> {
    let n = check_lengths(values)?;
    let mut out = vec![0.0; n];
    match vote {
        Vote::Majority => {
            for v in values {
                let best = (1..n).fold(0, |b, a| if v[a] > v[b] { a } else { b });
                out[best] += 1.0;
            }
        }
        Vote::Rank => {
            let mut order: Vec<usize> = (0..n).collect();
            for v in values {
                // Stable sort keeps lower indices ahead among equal values.
                order.sort_by(|&a, &b| v[b].total_cmp(&v[a]));
                for (rank, &a) in order.iter().enumerate() {
                    out[a] += (n - rank) as f64;
                }
                order.sort_unstable();
            }
        }
        Vote::PowerMean(p) => {
            if !p.is_finite() || p == 0.0 {
                return Err(Error::Aggregation(format!(
                    "power-mean exponent {p} must be finite and nonzero"
                )));
            }
            let integral = p.fract() == 0.0;
            if !integral && values.iter().any(|v| v.iter().any(|&x| x < 0.0)) {
                return Err(Error::Aggregation(format!(
                    "negative value with fractional exponent {p}"
                )));
            }
            let agents = values.len() as f64;
            for (a, o) in out.iter_mut().enumerate() {
                let mean = values.iter().map(|v| v[a].powf(p)).sum::<f64>() / agents;
                // Odd integer exponents keep the sign of the mean.
                *o = mean.signum() * mean.abs().powf(1.0 / p);
            }
        }
    }
    Ok(out)
}

/// How a SoC system turns agent outputs into one flat action.
#[derive(Debug, Clone, PartialEq)]
pub enum Aggregator {
    /// Agents choose environment-action components.
    Composite(CompositeMap),
    QSum,
    Vote(Vote),
}

impl Aggregator {
    pub fn is_ensemble(&self) -> bool {
        !matches!(self, Aggregator::Composite(_))
    }

    /// Scores over the flat set for the ensemble variants.
    pub fn combine(&self, values: &[&[f64]]) -> Result<Vec<f64>> {
        match self {
            Aggregator::Composite(_) => Err(Error::Aggregation(
                "composite aggregator has no preference scores".into(),
            )),
            Aggregator::QSum => aggregate_qsum(values),
            Aggregator::Vote(v) => aggregate_vote(values, *v),
        }
    }
}
