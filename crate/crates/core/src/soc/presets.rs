//! Ready-made agent decompositions for the bundled environments.

use std::sync::Arc;

use super::{
    compose_high_level_reward, compose_low_level_reward, AgentSpec, Aggregator, Comm, CompositeMap,
    JointState, SocSystem,
};
use crate::envs::pacboy::{ghost_contacts, GHOSTS, GHOST_PENALTY};
use crate::envs::{
    Catch, CatchState, FallingFruit, FallingFruitShape, FallingFruitState, FruitGrid,
    FruitGridShape, FruitGridState, PacBoy, PacBoyState,
};
use crate::error::{Error, Result};
use crate::learn::EpsilonSchedule;
use crate::mdp::FlatEnvironment;

#[derive(Debug, Clone)]
pub struct PacBoyParams {
    pub fruit_gamma: f64,
    pub ghost_gamma: f64,
    pub fruit_alpha: f64,
    pub ghost_alpha: f64,
    pub share_ghost_table: bool,
    pub aggregator: Aggregator,
    pub epsilon: EpsilonSchedule,
}

impl Default for PacBoyParams {
    fn default() -> Self {
        Self {
            fruit_gamma: 0.4,
            ghost_gamma: 0.4,
            fruit_alpha: 1.0,
            ghost_alpha: 0.1,
            share_ghost_table: true,
            aggregator: Aggregator::QSum,
            epsilon: EpsilonSchedule::constant(0.1).expect("valid constant"),
        }
    }
}

/// One agent per fruit position and one per ghost.
///
/// A fruit agent sees only Pac-Boy's cell, is active while its fruit is
/// present, and earns +1 when that fruit is eaten. A ghost agent sees the
/// (Pac-Boy, ghost) cell pair and pays the contact penalty for its ghost.
pub fn pacboy_agents(env: &PacBoy, p: &PacBoyParams) -> Vec<AgentSpec<PacBoyState>> {
    let maze = env.maze();
    let cells = maze.walkable_count();
    let mut agents = Vec::with_capacity(maze.fruit_slot_count() + GHOSTS);
    for slot in 0..maze.fruit_slot_count() as u8 {
        let eaten = move |t: &super::LocalTransition<'_, PacBoyState>| {
            t.prev.has_fruit(slot) && !t.next.has_fruit(slot)
        };
        agents.push(
            AgentSpec::new(
                format!("fruit-{slot}"),
                "fruits",
                cells,
                Arc::new(|j: &JointState<PacBoyState>| j.flat.pacboy as usize),
            )
            .with_env_actions(4)
            .with_active(Arc::new(move |s: &PacBoyState| s.has_fruit(slot)))
            .with_reward(Arc::new(move |t| if eaten(t) { 1.0 } else { 0.0 }))
            .with_terminal(Arc::new(eaten))
            .with_gamma(p.fruit_gamma)
            .with_alpha(p.fruit_alpha),
        );
    }
    for g in 0..GHOSTS {
        let mut spec = AgentSpec::new(
            format!("ghost-{g}"),
            "ghosts",
            cells * cells,
            Arc::new(move |j: &JointState<PacBoyState>| {
                j.flat.pacboy as usize * cells + j.flat.ghosts[g] as usize
            }),
        )
        .with_env_actions(4)
        .with_reward(Arc::new(move |t| {
            if ghost_contacts(t.prev, t.next)[g] {
                GHOST_PENALTY
            } else {
                0.0
            }
        }))
        // Running out of time is a truncation, not a terminal state.
        .with_terminal(Arc::new(|t| t.next.fruits == 0))
        .with_gamma(p.ghost_gamma)
        .with_alpha(p.ghost_alpha);
        if p.share_ghost_table {
            spec = spec.with_shared_table("ghosts");
        }
        agents.push(spec);
    }
    agents
}

pub fn pacboy_soc(env: PacBoy, p: &PacBoyParams, seed: u64) -> Result<SocSystem<PacBoy>> {
    if !p.aggregator.is_ensemble() {
        return Err(Error::Config(
            "Pac-Boy agents need an ensemble aggregator".into(),
        ));
    }
    let agents = pacboy_agents(&env, p);
    SocSystem::new(env, agents, p.aggregator.clone(), p.epsilon, seed)
}

/// Half-width of the low-level Catch agent's view around its paddle.
pub const CATCH_WINDOW_HALF: i32 = 7;
/// Rows above the paddle (inclusive) the low-level agent can see.
pub const CATCH_WINDOW_DEPTH: i32 = 8;
const WINDOW_CELLS: usize = ((2 * CATCH_WINDOW_HALF + 1) * CATCH_WINDOW_DEPTH) as usize;

#[derive(Debug, Clone, Copy)]
pub struct CatchParams {
    pub comm_bonus: f64,
    pub comm_penalty: f64,
    /// Adds a fourth, silent request to the high-level agent.
    pub comm_noop: bool,
    pub high_interval: usize,
    pub high_gamma: f64,
    pub low_gamma: f64,
    pub alpha: f64,
    pub epsilon: EpsilonSchedule,
}

impl Default for CatchParams {
    fn default() -> Self {
        Self {
            comm_bonus: 0.1,
            comm_penalty: 0.0,
            comm_noop: false,
            high_interval: 2,
            high_gamma: 0.99,
            low_gamma: 0.65,
            alpha: 0.1,
            epsilon: EpsilonSchedule::new(1.0, 0.01, 10_000).expect("valid schedule"),
        }
    }
}

/// The low-level agent's window cell for `s`, or `None` when the ball is
/// outside it.
pub fn catch_window(s: &CatchState) -> Option<usize> {
    let dx = s.ball_col as i32 - s.paddle as i32;
    let dy = s.size as i32 - 1 - s.ball_row as i32;
    (dx.abs() <= CATCH_WINDOW_HALF && dy < CATCH_WINDOW_DEPTH)
        .then(|| ((dx + CATCH_WINDOW_HALF) * CATCH_WINDOW_DEPTH + dy) as usize)
}

/// High-level agent 0 sees the whole screen and only sends movement
/// requests; low-level agent 1 moves the paddle, sees the ball only near
/// the paddle, and observes the last request.
pub fn catch_agents(size: u8, p: &CatchParams) -> Vec<AgentSpec<CatchState>> {
    let n = size as usize;
    let requests = if p.comm_noop { 4 } else { 3 };
    let silent = p.comm_noop.then_some(3);
    let penalty = p.comm_penalty;
    let high = AgentSpec::new(
        "high",
        "high",
        n * n * n,
        Arc::new(move |j: &JointState<CatchState>| {
            let s = &j.flat;
            s.ball_col as usize + n * (s.ball_row as usize + n * s.paddle as usize)
        }),
    )
    .with_comm_actions(requests, silent)
    .with_reward(Arc::new(move |t| {
        compose_high_level_reward(t.flat_reward, t.comm_action.unwrap_or(0), silent, penalty)
    }))
    .with_gamma(p.high_gamma)
    .with_alpha(p.alpha)
    .with_act_interval(p.high_interval);

    let bonus = p.comm_bonus;
    let low = AgentSpec::new(
        "low",
        "low",
        (WINDOW_CELLS + 1) * (requests + 1),
        Arc::new(|j: &JointState<CatchState>| {
            let req = match j.last_comm[0] {
                Some(Comm::Symbol(c)) => c + 1,
                _ => 0,
            };
            req * (WINDOW_CELLS + 1) + catch_window(&j.flat).unwrap_or(WINDOW_CELLS)
        }),
    )
    .with_env_actions(3)
    .with_reward(Arc::new(move |t| {
        let requested = t.observed[0]
            .and_then(Comm::symbol)
            .filter(|&c| Some(c) != silent);
        compose_low_level_reward(t.flat_reward, t.env_action.unwrap_or(0), requested, bonus)
    }))
    .with_gamma(p.low_gamma)
    .with_alpha(p.alpha);
    vec![high, low]
}

/// Composite map for the high/low pair: the low-level agent's move is the flat action.
pub fn catch_map() -> CompositeMap {
    CompositeMap::mixed_radix(&[0, 3]).expect("valid map")
}

pub fn catch_soc(size: u8, p: &CatchParams, seed: u64) -> Result<SocSystem<Catch>> {
    let env = Catch::new(size)?;
    SocSystem::new(
        env,
        catch_agents(size, p),
        Aggregator::Composite(catch_map()),
        p.epsilon,
        seed,
    )
}

/// Learning settings shared by the small composite presets.
#[derive(Debug, Clone, Copy)]
pub struct TabularParams {
    pub gamma: f64,
    pub alpha: f64,
    pub epsilon: EpsilonSchedule,
}

impl Default for TabularParams {
    fn default() -> Self {
        Self {
            gamma: 0.9,
            alpha: 0.5,
            epsilon: EpsilonSchedule::constant(1.0).expect("valid constant"),
        }
    }
}

fn first_fruit(shape: &FruitGridShape, s: &FruitGridState) -> Option<(u8, u8)> {
    (s.fruits != 0).then(|| {
        let cell = s.fruits.trailing_zeros() as u8;
        (cell % shape.width, cell / shape.width)
    })
}

/// Horizontal agent 0 and vertical agent 1, each seeing only its own axis
/// (agent coordinate, fruit coordinate) and rewarded for lining up with the
/// fruit on that axis. Meant for the single-fruit grid.
pub fn fruitgrid_split_agents(
    shape: FruitGridShape,
    p: &TabularParams,
) -> Vec<AgentSpec<FruitGridState>> {
    let axis = |name: &str, extent: u8, pick: fn(&FruitGridState, (u8, u8)) -> (u8, u8)| {
        let e = extent as usize;
        let proj = move |s: &FruitGridState| {
            let (me, fruit) = pick(s, first_fruit(&shape, s).unwrap_or((s.x, s.y)));
            me as usize * e + fruit as usize
        };
        let aligned =
            move |t: &super::LocalTransition<'_, FruitGridState>| match first_fruit(&shape, t.prev)
            {
                Some(f) => {
                    let (me, fruit) = pick(t.next, f);
                    me == fruit
                }
                None => false,
            };
        AgentSpec::new(
            name,
            name,
            e * e,
            Arc::new(move |j: &JointState<FruitGridState>| proj(&j.flat)),
        )
        .with_env_actions(3)
        .with_reward(Arc::new(move |t| if aligned(t) { 1.0 } else { 0.0 }))
        .with_terminal(Arc::new(aligned))
        .with_gamma(p.gamma)
        .with_alpha(p.alpha)
    };
    vec![
        axis("horizontal", shape.width, |s, f| (s.x, f.0)),
        axis("vertical", shape.height, |s, f| (s.y, f.1)),
    ]
}

/// Horizontal component least significant, matching the grid's action index.
pub fn fruitgrid_map() -> CompositeMap {
    CompositeMap::mixed_radix(&[3, 3]).expect("valid map")
}

pub fn fruitgrid_split(
    env: FruitGrid,
    p: &TabularParams,
    seed: u64,
) -> Result<SocSystem<FruitGrid>> {
    let agents = fruitgrid_split_agents(env.shape(), p);
    SocSystem::new(
        env,
        agents,
        Aggregator::Composite(fruitgrid_map()),
        p.epsilon,
        seed,
    )
}

/// How the falling-fruit task is split between body and arm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FallingFruitSplit {
    /// The body tracks the fruit column on its own; the arm sees the body
    /// and is rewarded for the catch.
    Acyclic,
    /// Both see everything; the body is rewarded for the catch and the arm
    /// for keeping the basket under the fruit.
    Cyclic,
}

pub fn fallingfruit_agents(
    env: &FallingFruit,
    split: FallingFruitSplit,
    p: &TabularParams,
) -> Vec<AgentSpec<FallingFruitState>> {
    let shape = env.shape();
    let w = shape.width as usize;
    let h = shape.height as usize;
    let arms = shape.arm_positions();
    let reach = shape.reach as i32;
    let full = move |j: &JointState<FallingFruitState>| {
        let s = &j.flat;
        let arm = (s.arm as i32 + reach) as usize;
        ((s.fruit_row as usize * w + s.fruit_col as usize) * w + s.body as usize) * arms + arm
    };
    let (body, arm) = match split {
        FallingFruitSplit::Acyclic => {
            let body = AgentSpec::new(
                "body",
                "body",
                w * h * w,
                Arc::new(move |j: &JointState<FallingFruitState>| {
                    let s = &j.flat;
                    (s.fruit_row as usize * w + s.fruit_col as usize) * w + s.body as usize
                }),
            )
            .with_reward(Arc::new(|t| {
                if t.next.body == t.next.fruit_col {
                    1.0
                } else {
                    0.0
                }
            }));
            let arm = AgentSpec::new("arm", "arm", w * h * w * arms, Arc::new(full));
            (body, arm)
        }
        FallingFruitSplit::Cyclic => {
            let body = AgentSpec::new("body", "body", w * h * w * arms, Arc::new(full));
            let arm = AgentSpec::new("arm", "arm", w * h * w * arms, Arc::new(full)).with_reward(
                Arc::new(move |t| {
                    if shape.basket(t.next) == t.next.fruit_col {
                        1.0
                    } else {
                        0.0
                    }
                }),
            );
            (body, arm)
        }
    };
    [body, arm]
        .into_iter()
        .map(|a| {
            a.with_env_actions(3)
                .with_gamma(p.gamma)
                .with_alpha(p.alpha)
        })
        .collect()
}

/// Body move above arm move, matching the environment's action index.
pub fn fallingfruit_map() -> CompositeMap {
    CompositeMap::new(vec![3, 3], vec![3, 1]).expect("valid map")
}

pub fn fallingfruit_soc(
    env: FallingFruit,
    split: FallingFruitSplit,
    p: &TabularParams,
    seed: u64,
) -> Result<SocSystem<FallingFruit>> {
    let agents = fallingfruit_agents(&env, split, p);
    SocSystem::new(
        env,
        agents,
        Aggregator::Composite(fallingfruit_map()),
        p.epsilon,
        seed,
    )
}

/// Largest flat state space a single-table flat agent will allocate.
pub const FLAT_TABLE_LIMIT: usize = 1 << 24;

/// A single agent seeing the whole flat state through `index`.
pub fn flat_agent<S: 'static>(
    n_states: usize,
    actions: usize,
    index: impl Fn(&S) -> usize + Send + Sync + 'static,
    p: &TabularParams,
) -> Result<AgentSpec<S>> {
    if n_states > FLAT_TABLE_LIMIT {
        return Err(Error::Config(format!(
            "flat state space of {n_states} is too large for a table"
        )));
    }
    Ok(AgentSpec::new(
        "flat",
        "flat",
        n_states,
        Arc::new(move |j: &JointState<S>| index(&j.flat)),
    )
    .with_env_actions(actions)
    .with_gamma(p.gamma)
    .with_alpha(p.alpha))
}

fn flat_soc<E: FlatEnvironment>(
    env: E,
    agent: AgentSpec<E::State>,
    p: &TabularParams,
    seed: u64,
) -> Result<SocSystem<E>> {
    let map = CompositeMap::mixed_radix(&[env.num_actions()])?;
    SocSystem::new(
        env,
        vec![agent],
        Aggregator::Composite(map),
        p.epsilon,
        seed,
    )
}

pub fn catch_flat_agent(size: u8, p: &TabularParams) -> Result<AgentSpec<CatchState>> {
    let n = size as usize;
    flat_agent(
        n * n * n,
        3,
        move |s: &CatchState| {
            s.ball_col as usize + n * (s.ball_row as usize + n * s.paddle as usize)
        },
        p,
    )
}

pub fn catch_flat(size: u8, p: &TabularParams, seed: u64) -> Result<SocSystem<Catch>> {
    flat_soc(Catch::new(size)?, catch_flat_agent(size, p)?, p, seed)
}

/// Flat agent for the single-fruit grid: (agent cell, fruit cell).
pub fn fruitgrid_flat_agent(
    shape: FruitGridShape,
    p: &TabularParams,
) -> Result<AgentSpec<FruitGridState>> {
    let cells = shape.cells();
    flat_agent(
        cells * cells,
        9,
        move |s: &FruitGridState| {
            let me = shape.cell(s.x, s.y);
            let fruit = if s.fruits == 0 {
                me
            } else {
                s.fruits.trailing_zeros() as usize
            };
            me * cells + fruit
        },
        p,
    )
}

pub fn fruitgrid_flat(
    env: FruitGrid,
    p: &TabularParams,
    seed: u64,
) -> Result<SocSystem<FruitGrid>> {
    let agent = fruitgrid_flat_agent(env.shape(), p)?;
    flat_soc(env, agent, p, seed)
}

pub fn fallingfruit_flat_agent(
    shape: FallingFruitShape,
    p: &TabularParams,
) -> Result<AgentSpec<FallingFruitState>> {
    let (w, h, arms) = (
        shape.width as usize,
        shape.height as usize,
        shape.arm_positions(),
    );
    flat_agent(
        w * arms * w * h,
        9,
        move |s: &FallingFruitState| {
            let arm = (s.arm as i32 + shape.reach as i32) as usize;
            s.body as usize + w * (arm + arms * (s.fruit_col as usize + w * s.fruit_row as usize))
        },
        p,
    )
}

pub fn fallingfruit_flat(
    env: FallingFruit,
    p: &TabularParams,
    seed: u64,
) -> Result<SocSystem<FallingFruit>> {
    let agent = fallingfruit_flat_agent(env.shape(), p)?;
    flat_soc(env, agent, p, seed)
}
