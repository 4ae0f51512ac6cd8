mod common;

use common::{each_move_sequence, rng, table_game};
use proptest::prelude::*;
use std::sync::Arc;
use workbench_core::game::{play, solve, GameSpec, Item, OneStrategy, Player, SolveOptions, TwoStrategy, WinCondition};
use workbench_core::topology::{enumerate_topologies, CoverClass, FiniteSpace, PointSet};

/// Every Markov table for Two, as strategies.
fn markov_tables(game: &GameSpec) -> Vec<TwoStrategy> {
    let sizes: Vec<usize> = game.pool().iter().map(Vec::len).collect();
    let slots = sizes.len() * game.horizon();
    let mut out = Vec::new();
    let mut choice = vec![0usize; slots];
    loop {
        let table = choice.chunks(sizes.len()).map(<[usize]>::to_vec).collect();
        out.push(TwoStrategy::Markov { table });
        let mut i = 0;
        loop {
            if i == slots {
                return out;
            }
            choice[i] += 1;
            if choice[i] < sizes[i % sizes.len()] {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

fn cover_game(space: &Arc<FiniteSpace>, mask: u64, horizon: usize) -> Option<GameSpec> {
    let opens: Vec<u32> = space.proper_opens().iter().map(|u| u.0).collect();
    if opens.is_empty() {
        return None;
    }
    // moves: up to three families of proper opens chosen by bits of `mask`
    let mut pool: Vec<Vec<Item>> = (0..3)
        .map(|k| opens.iter().enumerate().filter(|(i, _)| mask >> (k * 8 + i) & 1 == 1).map(|(_, &u)| u).collect())
        .filter(|m: &Vec<Item>| !m.is_empty())
        .collect();
    pool.sort();
    pool.dedup();
    if pool.is_empty() {
        return None;
    }
    GameSpec::new(horizon, pool, WinCondition::class(space, CoverClass::OpenCover)).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn witnesses_replay_against_every_opponent(seed in any::<u64>()) {
        let game = table_game(&mut rng(seed));
        let r = solve(&game, &SolveOptions::default()).unwrap();
        prop_assert!(!(r.two_has_markov && r.one_has_predetermined));
        match r.winner_full {
            Player::Two => {
                let tau = r.two_full.as_ref().unwrap();
                let mut checked = 0;
                each_move_sequence(game.pool().len(), game.horizon(), |ms| {
                    let sigma = OneStrategy::Predetermined { moves: ms.to_vec() };
                    assert_eq!(play(&game, &sigma, tau).unwrap().winner, Player::Two);
                    checked += 1;
                });
                prop_assert!(checked > 0);
                prop_assert!(r.one_full.is_none());
            }
            Player::One => {
                let sigma = r.one_full.as_ref().unwrap();
                for tau in markov_tables(&game) {
                    prop_assert_eq!(play(&game, sigma, &tau).unwrap().winner, Player::One);
                }
                prop_assert!(r.two_full.is_none() && !r.two_has_markov);
            }
        }
        if let Some(sigma) = &r.one_predetermined {
            for tau in markov_tables(&game) {
                prop_assert_eq!(play(&game, sigma, &tau).unwrap().winner, Player::One);
            }
        }
    }

    #[test]
    fn extra_turns_keep_cover_wins(space_ix in any::<prop::sample::Index>(), mask in any::<u64>(), horizon in 1usize..=2) {
        let spaces: Vec<FiniteSpace> = (1..=3).flat_map(enumerate_topologies).collect();
        let space = Arc::new(space_ix.get(&spaces).clone());
        let Some(game) = cover_game(&space, mask, horizon) else { return Ok(()) };
        let opts = SolveOptions::default();
        let now = solve(&game, &opts).unwrap();
        let later = solve(&game.with_horizon(horizon + 1).unwrap(), &opts).unwrap();
        if now.winner_full == Player::Two {
            prop_assert_eq!(later.winner_full, Player::Two);
        }
        if now.two_has_markov {
            prop_assert!(later.two_has_markov);
        }
    }
}

#[cfg(feature = "parallel")]
#[test]
fn reports_do_not_depend_on_worker_count() {
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let mut r = rng(3);
    for _ in 0..40 {
        let game = table_game(&mut r);
        let a = one.install(|| solve(&game, &SolveOptions::default()).unwrap());
        let b = four.install(|| solve(&game, &SolveOptions::default()).unwrap());
        assert_eq!(a, b);
    }
}

#[test]
fn discrete_point_games() {
    // One offering the same two-point cover twice cannot stop a cover; offering singletons can.
    let space = Arc::new(FiniteSpace::discrete(2));
    let win = WinCondition::class(&space, CoverClass::OpenCover);
    let (a, b) = (PointSet::singleton(0).0, PointSet::singleton(1).0);
    let g = GameSpec::new(2, vec![vec![a, b]], win.clone()).unwrap();
    assert!(solve(&g, &SolveOptions::default()).unwrap().two_has_markov);
    let h = GameSpec::new(2, vec![vec![a], vec![b]], win).unwrap();
    assert!(solve(&h, &SolveOptions::default()).unwrap().one_has_predetermined);
}
