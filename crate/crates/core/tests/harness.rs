use std::path::PathBuf;

use soc_core::harness::*;
use soc_core::learn::persist::save_qtable;
use soc_core::learn::QTable;
use soc_core::soc::Phase;
use soc_core::Error;

fn small(env: EnvKind) -> ExperimentConfig {
    let mut c = ExperimentConfig::defaults_for(env);
    c.run.epochs = 3;
    c.run.seeds = 2;
    c.run.train_steps = 500;
    c.run.eval_steps = 300;
    c
}

fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

#[test]
fn csv_has_one_row_per_seed_and_epoch_plus_means() {
    for env in [
        EnvKind::Catch,
        EnvKind::FruitGrid,
        EnvKind::FallingFruit,
        EnvKind::PacBoy,
    ] {
        let c = small(env);
        let csv = metrics_csv(&run_experiment(&c).unwrap());
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        let rows = &lines[1..];
        assert_eq!(rows.len(), 3 * 2 + 3, "{env:?}");
        assert_eq!(rows.iter().filter(|r| r.starts_with("mean,")).count(), 3);
        assert!(rows[..6].iter().all(|r| !r.starts_with("mean,")));
    }
}

#[test]
fn reruns_reproduce_the_csv_byte_for_byte() {
    for env in [EnvKind::Catch, EnvKind::PacBoy] {
        let c = small(env);
        let a = metrics_csv(&run_experiment(&c).unwrap());
        let b = metrics_csv(&run_experiment(&c).unwrap());
        assert_eq!(a, b);
    }
    let mut c = small(EnvKind::PacBoy);
    c.use_linear_learner();
    assert_eq!(
        metrics_csv(&run_experiment(&c).unwrap()),
        metrics_csv(&run_experiment(&c).unwrap())
    );
}

#[test]
fn seeds_change_results() {
    let mut c = small(EnvKind::Catch);
    c.run.seeds = 1;
    let a = run_experiment(&c).unwrap();
    c.run.seed = 99;
    let b = run_experiment(&c).unwrap();
    assert_ne!(a.runs[0].tables, b.runs[0].tables);
}

#[test]
fn mean_rows_average_the_seeds() {
    let r = run_experiment(&small(EnvKind::Catch)).unwrap();
    for (e, m) in r.mean.iter().enumerate() {
        let avg = (r.runs[0].epochs[e].performance + r.runs[1].epochs[e].performance) / 2.0;
        assert!((m.performance - avg).abs() < 1e-12);
        assert_eq!(m.epoch, e + 1);
    }
}

#[test]
fn evaluation_leaves_loaded_tables_bit_identical() {
    let c = small(EnvKind::Catch);
    let trained = run_experiment(&c).unwrap();
    let dir = tempfile::tempdir().unwrap();
    save_tables(dir.path(), &trained.runs[0].tables).unwrap();
    let mut e = c.clone();
    e.run.seeds = 1;
    e.learn.init_tables = Some(dir.path().to_path_buf());
    let evaluated = evaluate(&e).unwrap();
    assert_eq!(evaluated.runs[0].tables, trained.runs[0].tables);
    assert_eq!(evaluated.mean.len(), c.run.epochs);
}

#[test]
fn eval_only_runs_never_learn() {
    let mut ctl = build_controller(&small(EnvKind::PacBoy), 4).unwrap();
    let before = ctl.digest();
    ctl.begin_episode(1);
    for _ in 0..2_000 {
        if ctl.is_terminal() {
            ctl.begin_episode(2);
        }
        ctl.step(Phase::Eval).unwrap();
    }
    assert_eq!(ctl.digest(), before);
}

#[test]
fn pretrained_tables_transfer_and_stay_frozen() {
    let c = small(EnvKind::PacBoy);
    let fruits = pretrain(&c, "fruits", 20_000, 1).unwrap();
    assert_eq!(fruits.len(), 75);
    assert!(fruits
        .iter()
        .all(|t| t.group == "fruits" && t.table.n_states() == 76 && t.table.n_actions() == 4));
    assert!(fruits
        .iter()
        .any(|t| t.table.values().iter().any(|&v| v != 0.0)));

    let dir = tempfile::tempdir().unwrap();
    save_tables(dir.path(), &fruits).unwrap();
    let mut ctl = transfer_load(&c, dir.path(), &["fruits"], 1).unwrap();
    let loaded: Vec<_> = ctl
        .tables()
        .into_iter()
        .filter(|t| t.group == "fruits")
        .collect();
    assert_eq!(loaded, fruits);

    ctl.begin_episode(3);
    for _ in 0..5_000 {
        if ctl.is_terminal() {
            ctl.begin_episode(4);
        }
        ctl.step(Phase::Train).unwrap();
    }
    let after = ctl.tables();
    assert_eq!(
        after
            .iter()
            .filter(|t| t.group == "fruits")
            .cloned()
            .collect::<Vec<_>>(),
        fruits
    );
    let ghosts = after.iter().find(|t| t.name == "ghosts").unwrap();
    assert!(ghosts.table.values().iter().any(|&v| v != 0.0));
}

#[test]
fn pretraining_one_group_leaves_the_other_untouched() {
    let c = small(EnvKind::PacBoy);
    let ghosts = pretrain(&c, "ghosts", 10_000, 2).unwrap();
    assert_eq!(ghosts.len(), 1);
    assert_eq!(ghosts[0].name, "ghosts");
    assert_eq!(pretrain(&c, "both", 1_000, 2).unwrap().len(), 76);
    assert!(matches!(
        pretrain(&c, "walls", 10, 2),
        Err(Error::Config(_))
    ));
}

#[test]
fn table_round_trip_is_bit_identical() {
    let r = run_experiment(&small(EnvKind::FallingFruit)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    save_tables(dir.path(), &r.runs[1].tables).unwrap();
    let mut c = small(EnvKind::FallingFruit);
    c.learn.init_tables = Some(dir.path().to_path_buf());
    let ctl = build_controller(&c, 17).unwrap();
    assert_eq!(ctl.tables(), r.runs[1].tables);
}

#[test]
fn fruit_sized_table_does_not_fit_a_ghost_slot() {
    let dir = tempfile::tempdir().unwrap();
    save_qtable(&QTable::new(76, 4), &dir.path().join("ghosts.qtable")).unwrap();
    let mut c = small(EnvKind::PacBoy);
    c.learn.init_tables = Some(dir.path().to_path_buf());
    match build_controller(&c, 1) {
        Err(Error::DimensionMismatch(msg)) => assert!(msg.contains("5776"), "{msg}"),
        other => panic!("expected a dimension mismatch, got {:?}", other.err()),
    }
}

#[test]
fn missing_tables_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = small(EnvKind::Catch);
    c.learn.init_tables = Some(dir.path().to_path_buf());
    assert!(build_controller(&c, 1).is_err());
}

#[test]
fn sweeps_produce_one_point_per_value() {
    let c = small(EnvKind::Catch);
    let pts = sweep_comm_reward(&c, &[0.0, 0.1, 2.0]).unwrap();
    assert_eq!(
        pts.iter().map(|p| p.value).collect::<Vec<_>>(),
        vec![0.0, 0.1, 2.0]
    );
    let csv = sweep_csv(SweepParam::CommBonus, &pts);
    assert_eq!(csv.lines().count(), 1 + 3 * c.run.epochs);

    let single = sweep_comm_reward(&c, &[0.1]).unwrap();
    let direct = run_experiment(&c).unwrap();
    assert_eq!(metrics_csv(&single[0].result), metrics_csv(&direct));

    let curves = sweep_act_interval(&c, &[1, 2, 4]).unwrap();
    assert_eq!(curves.len(), 3);
    assert!(curves.iter().all(|p| p.result.mean.len() == c.run.epochs));
}

#[test]
fn penalty_sweep_needs_a_silent_request() {
    let mut c = small(EnvKind::Catch);
    assert!(matches!(
        sweep_comm_penalty(&c, &[0.0]),
        Err(Error::Config(_))
    ));
    c.agents.group_mut("high").unwrap().comm_noop = true;
    assert!(sweep_comm_penalty(&c, &[0.0]).is_err());
    c.agents.group_mut("high").unwrap().act_interval = 1;
    let pts = sweep_comm_penalty(&c, &[0.0, 0.05, 0.1]).unwrap();
    let column: Vec<f64> = pts.iter().map(|p| p.value).collect();
    assert_eq!(column, vec![0.0, 0.05, 0.1]);
    assert!(pts
        .iter()
        .all(|p| (0.0..=1.0).contains(&p.final_comm_frequency())));
}

#[test]
fn sweeps_need_catch() {
    assert!(sweep_comm_reward(&small(EnvKind::PacBoy), &[0.1]).is_err());
    assert!(sweep_comm_reward(&small(EnvKind::Catch), &[]).is_err());
}

#[test]
fn bundled_configs_parse() {
    let mut n = 0;
    for entry in std::fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "cfg") {
            let c =
                ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            c.validate().unwrap();
            n += 1;
        }
    }
    assert!(n >= 5);
}

#[test]
fn cyclic_groups_train_one_at_a_time() {
    let text = "[env]\nname = fallingfruit\n[agents]\ndecomposition = cyclic\ndepends: body <- arm\ndepends: arm <- body\n[learn]\nschedule = strict\nrounds = 2\norder = arm, body\n[run]\nepochs = 2\nseeds = 1\ntrain_steps = 400\neval_steps = 100\n";
    let c = ExperimentConfig::parse(text).unwrap();
    let a = run_experiment(&c).unwrap();
    let b = run_experiment(&c).unwrap();
    assert_eq!(a.runs[0].tables, b.runs[0].tables);
}

#[test]
fn unknown_dependency_group_is_a_config_error() {
    let text = "[env]\nname = fallingfruit\n[agents]\ndecomposition = acyclic\ndepends: arm <- legs\n[run]\nepochs = 1\nseeds = 1\n";
    let err = ExperimentConfig::parse(text)
        .and_then(|c| run_experiment(&c).map(|_| ()))
        .unwrap_err();
    assert!(err.is_config_error(), "{err}");
}

#[test]
fn frozen_groups_from_config_are_never_updated() {
    let mut c = small(EnvKind::Catch);
    c.learn.freeze = vec!["high".into()];
    let r = run_experiment(&c).unwrap();
    for run in &r.runs {
        let high = run.tables.iter().find(|t| t.group == "high").unwrap();
        assert!(high.table.values().iter().all(|&v| v == 0.0));
        let low = run.tables.iter().find(|t| t.group == "low").unwrap();
        assert!(low.table.values().iter().any(|&v| v != 0.0));
    }
}
