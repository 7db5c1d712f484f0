use std::path::Path;

use rand::Rng as _;

use super::config::ExperimentConfig;
use super::{build_controller, Controller};
use crate::error::{Error, Result};
use crate::learn::persist::{load_qtable, save_qtable};
use crate::learn::QTable;
use crate::rng;

/// A Q-table with the name it is saved under and its agent group.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedTable {
    pub name: String,
    pub group: String,
    pub table: QTable,
}

/// Writes each table to `<dir>/<name>.qtable`.
pub fn save_tables(dir: &Path, tables: &[NamedTable]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for t in tables {
        save_qtable(&t.table, &dir.join(format!("{}.qtable", t.name)))?;
    }
    Ok(())
}

/// Loads every `<name>.qtable` in `dir` that matches one of the
/// controller's tables. Returns how many were loaded; finding none is an
/// error.
pub fn load_tables_into(ctl: &mut dyn Controller, dir: &Path) -> Result<usize> {
    let mut loaded = 0;
    for t in ctl.tables() {
        let path = dir.join(format!("{}.qtable", t.name));
        if path.exists() {
            let table = load_qtable(&path)?;
            if !ctl.load_table(&t.name, table)? {
                return Err(Error::InvalidArgument(format!("no table named {}", t.name)));
            }
            loaded += 1;
        }
    }
    if loaded == 0 {
        return Err(Error::Config(format!(
            "no matching tables in {}",
            dir.display()
        )));
    }
    Ok(loaded)
}

/// Drives the environment with uniformly random actions for `steps` steps,
/// updating only the tables of `group` (`both` or `all` for every group).
/// Returns those tables.
pub fn pretrain(
    cfg: &ExperimentConfig,
    group: &str,
    steps: u64,
    seed: u64,
) -> Result<Vec<NamedTable>> {
    let mut ctl = build_controller(cfg, seed)?;
    let groups = ctl.agent_groups();
    let all = matches!(group, "both" | "all");
    if !all && !groups.iter().any(|g| g == group) {
        return Err(Error::Config(format!(
            "unknown agent group `{group}` (have {groups:?})"
        )));
    }
    for (i, g) in groups.iter().enumerate() {
        ctl.set_frozen(i, !all && g != group);
    }
    let mut episodes = rng::stream(seed, "pretrain");
    ctl.begin_episode(episodes.gen());
    for _ in 0..steps {
        if ctl.is_terminal() {
            ctl.begin_episode(episodes.gen());
        }
        ctl.step_random()?;
    }
    Ok(ctl
        .tables()
        .into_iter()
        .filter(|t| all || t.group == group)
        .collect())
}

/// A controller for `cfg` starting from the tables in `dir`. Groups listed
/// in `freeze` are frozen.
pub fn transfer_load(
    cfg: &ExperimentConfig,
    dir: &Path,
    freeze: &[&str],
    seed: u64,
) -> Result<Box<dyn Controller>> {
    let mut cfg = cfg.clone();
    cfg.learn.init_tables = Some(dir.to_path_buf());
    let mut ctl = build_controller(&cfg, seed)?;
    let groups = ctl.agent_groups();
    for (i, g) in groups.iter().enumerate() {
        if freeze.contains(&g.as_str()) {
            ctl.set_frozen(i, true);
        }
    }
    Ok(ctl)
}
