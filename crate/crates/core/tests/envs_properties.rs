use proptest::prelude::*;
use soc_core::envs::*;
use soc_core::mdp::{run_episode, FlatEnvironment};

fn actions(n: usize, len: usize) -> impl Strategy<Value = Vec<usize>> {
    proptest::collection::vec(0..n, len)
}

/// Steps `env` through `acts` from `seed`, resetting on terminal states.
fn trace<E: FlatEnvironment>(env: &mut E, seed: u64, acts: &[usize]) -> Vec<(E::State, f64, bool)> {
    env.reset(seed);
    let mut reset = seed;
    acts.iter()
        .map(|&a| {
            if env.is_terminal() {
                reset = reset.wrapping_add(1);
                env.reset(reset);
            }
            let r = env.step(a).unwrap();
            (r.state, r.reward, r.terminal)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pacboy_episode_reward_is_fruit_minus_contacts(seed in any::<u64>(), acts in actions(4, 300)) {
        let mut env = PacBoy::new(Maze::canonical()).unwrap();
        let start = env.reset(seed);
        let mut total = 0.0;
        let mut fruits = start.fruit_count();
        let mut i = 0;
        while !env.is_terminal() {
            let r = env.step(acts[i % acts.len()]).unwrap();
            prop_assert!(r.state.fruit_count() <= fruits);
            prop_assert!(r.state.steps <= 300);
            fruits = r.state.fruit_count();
            total += r.reward;
            i += 1;
        }
        let eaten = (start.fruit_count() - fruits) as f64;
        let contacts = (eaten - total) / 10.0;
        prop_assert!(contacts >= 0.0 && contacts.fract() == 0.0, "total {total}, eaten {eaten}");
        prop_assert!(eaten <= start.spawned as f64);
    }

    #[test]
    fn catch_episodes_last_size_minus_one_steps(seed in any::<u64>(), size in 2u8..40, acts in actions(3, 64)) {
        let mut env = Catch::new(size).unwrap();
        let mut i = 0;
        let t = run_episode(&mut env, |_| { i += 1; acts[i % acts.len()] }, 1_000, seed).unwrap();
        prop_assert_eq!(t.len(), size as usize - 1);
        for (k, tr) in t.transitions.iter().enumerate() {
            prop_assert_eq!(tr.next_state.ball_row as usize, k + 1);
            prop_assert!(tr.next_state.paddle < size);
        }
    }

    #[test]
    fn fruitgrid_positions_stay_inside(seed in any::<u64>(), acts in actions(9, 200)) {
        let shape = FruitGridShape { width: 7, height: 5 };
        let mut env = FruitGrid::new(shape, 3, Some(100)).unwrap();
        for (s, _, _) in trace(&mut env, seed, &acts) {
            prop_assert!(s.x < 7 && s.y < 5);
            prop_assert_eq!(s.fruits >> shape.cell(s.x, s.y) & 1, 0);
        }
    }

    #[test]
    fn basket_is_clamped_body_plus_arm(seed in any::<u64>(), acts in actions(9, 200)) {
        let shape = FallingFruitShape::default();
        let mut env = FallingFruit::new(shape).unwrap();
        for (s, _, _) in trace(&mut env, seed, &acts) {
            let expected = (s.body as i32 + s.arm as i32).clamp(0, shape.width as i32 - 1);
            prop_assert_eq!(shape.basket(&s) as i32, expected);
            prop_assert!(s.arm.unsigned_abs() <= shape.reach);
        }
    }

    #[test]
    fn equal_seeds_and_actions_give_equal_traces(seed in any::<u64>(), acts in actions(3, 400)) {
        let mut a = PacBoy::new(Maze::canonical()).unwrap();
        let mut b = PacBoy::new(Maze::canonical()).unwrap();
        let pa: Vec<usize> = acts.iter().map(|&x| x % 4).collect();
        prop_assert_eq!(trace(&mut a, seed, &pa), trace(&mut b, seed, &pa));

        let mut a = Catch::new(24).unwrap();
        let mut b = Catch::new(24).unwrap();
        prop_assert_eq!(trace(&mut a, seed, &acts), trace(&mut b, seed, &acts));

        let shape = FruitGridShape { width: 10, height: 10 };
        let mut a = FruitGrid::new(shape, 4, Some(100)).unwrap();
        let mut b = FruitGrid::new(shape, 4, Some(100)).unwrap();
        prop_assert_eq!(trace(&mut a, seed, &acts), trace(&mut b, seed, &acts));

        let mut a = FallingFruit::new(FallingFruitShape::default()).unwrap();
        let mut b = FallingFruit::new(FallingFruitShape::default()).unwrap();
        prop_assert_eq!(trace(&mut a, seed, &acts), trace(&mut b, seed, &acts));
    }

    #[test]
    fn state_index_is_in_range(seed in any::<u64>(), acts in actions(4, 100)) {
        let mut env = PacBoy::new(Maze::canonical()).unwrap();
        let size = env.state_space_size();
        for (s, _, _) in trace(&mut env, seed, &acts) {
            prop_assert!(env.state_index(&s) < size);
        }
        let mut env = Catch::new(24).unwrap();
        let size = env.state_space_size();
        let three: Vec<usize> = acts.iter().map(|&a| a % 3).collect();
        for (s, _, _) in trace(&mut env, seed, &three) {
            prop_assert!(env.state_index(&s) < size);
        }
    }
}

#[test]
fn every_catch_seed_runs_the_full_fall() {
    let mut env = Catch::new(24).unwrap();
    for seed in 0..2_000 {
        let t = run_episode(&mut env, |_| 1, 100, seed).unwrap();
        assert_eq!(t.len(), 23, "seed {seed}");
    }
}
