use std::sync::Arc;

use super::config::{Decomposition, EnvKind, ExperimentConfig, Learner};
use super::{load_tables_into, Controller, LinearPacBoy};
use crate::envs::fallingfruit::FallingFruitShape;
use crate::envs::fruitgrid::FruitGridShape;
use crate::envs::{Catch, FallingFruit, FruitGrid, Maze, PacBoy};
use crate::error::{Error, Result};
use crate::mdp::FlatEnvironment;
use crate::soc::presets::{self, CatchParams, FallingFruitSplit, PacBoyParams, TabularParams};
use crate::soc::{AgentSpec, Aggregator, SocSystem};

fn pacboy_env(cfg: &ExperimentConfig) -> Result<PacBoy> {
    let maze = match &cfg.env.maze {
        Some(p) => Maze::load(p)?,
        None => Maze::canonical(),
    };
    PacBoy::with_limit(Arc::new(maze), cfg.env.max_steps)
}

/// Applies each group's discount, step size and act interval.
fn finish<E>(
    cfg: &ExperimentConfig,
    env: E,
    agents: Vec<AgentSpec<E::State>>,
    aggregator: Aggregator,
    seed: u64,
) -> Result<Box<dyn Controller>>
where
    E: FlatEnvironment + Send + 'static,
{
    let agents = agents
        .into_iter()
        .map(|a| {
            let g = cfg.agents.group(&a.group);
            a.with_gamma(g.gamma)
                .with_alpha(g.alpha)
                .with_act_interval(g.act_interval)
        })
        .collect();
    let sys = SocSystem::new(env, agents, aggregator, cfg.learn.epsilon, seed)?
        .with_tie_break(cfg.learn.tie_break);
    Ok(Box::new(sys))
}

/// Builds the learner described by `cfg` for one seed, loading tables
/// from `learn.init_tables` when set.
pub fn build_controller(cfg: &ExperimentConfig, seed: u64) -> Result<Box<dyn Controller>> {
    cfg.validate()?;
    let e = &cfg.env;
    let tab = TabularParams {
        epsilon: cfg.learn.epsilon,
        ..TabularParams::default()
    };
    let decomposition = cfg.agents.decomposition;
    let mut ctl: Box<dyn Controller> = match (e.kind, cfg.learn.learner) {
        (EnvKind::PacBoy, Learner::Linear) => Box::new(LinearPacBoy::new(
            pacboy_env(cfg)?,
            cfg.learn.gamma,
            cfg.learn.alpha,
            cfg.learn.epsilon,
            seed,
        )),
        (_, Learner::Linear) => {
            return Err(Error::Config(
                "the linear learner is only available for pacboy".into(),
            ))
        }
        (EnvKind::PacBoy, Learner::Soc) => {
            if !cfg.aggregator.is_ensemble() {
                return Err(Error::Config("pacboy needs an ensemble aggregator".into()));
            }
            let env = pacboy_env(cfg)?;
            let p = PacBoyParams {
                share_ghost_table: cfg.agents.group("ghosts").share_table,
                ..PacBoyParams::default()
            };
            let agents = presets::pacboy_agents(&env, &p);
            finish(cfg, env, agents, cfg.aggregator.clone(), seed)?
        }
        (EnvKind::Catch, Learner::Soc) => {
            let env = Catch::new(e.size)?;
            if decomposition == Decomposition::Flat {
                let agent = presets::catch_flat_agent(e.size, &tab)?;
                finish(
                    cfg,
                    env,
                    vec![agent],
                    Aggregator::Composite(crate::soc::CompositeMap::mixed_radix(&[3])?),
                    seed,
                )?
            } else {
                let p = CatchParams {
                    comm_bonus: cfg.learn.comm_bonus,
                    comm_penalty: cfg.learn.comm_penalty,
                    comm_noop: cfg.agents.group("high").comm_noop,
                    ..CatchParams::default()
                };
                let agents = presets::catch_agents(e.size, &p);
                finish(
                    cfg,
                    env,
                    agents,
                    Aggregator::Composite(presets::catch_map()),
                    seed,
                )?
            }
        }
        (EnvKind::FruitGrid, Learner::Soc) => {
            if e.fruits != 1 {
                return Err(Error::Config(format!(
                    "{decomposition:?} fruitgrid agents need fruits = 1"
                )));
            }
            let shape = FruitGridShape {
                width: e.width,
                height: e.height,
            };
            let env = FruitGrid::new(shape, e.fruits, e.time_limit)?;
            if decomposition == Decomposition::Flat {
                let agent = presets::fruitgrid_flat_agent(shape, &tab)?;
                finish(
                    cfg,
                    env,
                    vec![agent],
                    Aggregator::Composite(crate::soc::CompositeMap::mixed_radix(&[9])?),
                    seed,
                )?
            } else {
                let agents = presets::fruitgrid_split_agents(shape, &tab);
                finish(
                    cfg,
                    env,
                    agents,
                    Aggregator::Composite(presets::fruitgrid_map()),
                    seed,
                )?
            }
        }
        (EnvKind::FallingFruit, Learner::Soc) => {
            let shape = FallingFruitShape {
                width: e.width,
                height: e.height,
                reach: e.reach,
            };
            let env = FallingFruit::new(shape)?;
            match decomposition {
                Decomposition::Flat => {
                    let agent = presets::fallingfruit_flat_agent(shape, &tab)?;
                    finish(
                        cfg,
                        env,
                        vec![agent],
                        Aggregator::Composite(crate::soc::CompositeMap::mixed_radix(&[9])?),
                        seed,
                    )?
                }
                d => {
                    let split = if d == Decomposition::Cyclic {
                        FallingFruitSplit::Cyclic
                    } else {
                        FallingFruitSplit::Acyclic
                    };
                    let agents = presets::fallingfruit_agents(&env, split, &tab);
                    finish(
                        cfg,
                        env,
                        agents,
                        Aggregator::Composite(presets::fallingfruit_map()),
                        seed,
                    )?
                }
            }
        }
    };
    if let Some(dir) = &cfg.learn.init_tables {
        load_tables_into(ctl.as_mut(), dir)?;
    }
    Ok(ctl)
}
