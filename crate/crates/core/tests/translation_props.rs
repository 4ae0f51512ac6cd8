mod common;

use common::{each_move_sequence, rng, table_game};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;
use workbench_core::game::{solve, GameSpec, Item, SolveOptions, SolveReport, TwoStrategy, WinCondition};
use workbench_core::topology::{enumerate_ideals, enumerate_topologies, PointSet};
use workbench_core::translation::{
    check_condition_i, check_condition_ii, duality_instances, transfer_full, transfer_markov, LeqReport, Pairing,
    TranslationPair,
};

/// A random pair from a game on `h_pool` into `g`, plus the H-runs it maps winning G-runs onto.
fn random_pair(r: &mut ChaCha8Rng, g: &GameSpec, h_pool: &[Vec<Item>]) -> (TranslationPair, BTreeSet<Vec<Item>>) {
    let horizon = g.horizon();
    let mut moves: HashMap<(usize, Vec<Item>), Vec<Item>> = HashMap::new();
    let mut picks: HashMap<(usize, Item, Vec<Item>), Item> = HashMap::new();
    for n in 0..horizon {
        for b in h_pool {
            let image = g.pool()[r.gen_range(0..g.pool().len())].clone();
            for &x in &image {
                picks.insert((n, x, b.clone()), b[r.gen_range(0..b.len())]);
            }
            moves.insert((n, b.clone()), image);
        }
    }
    let mut image_runs = BTreeSet::new();
    each_move_sequence(h_pool.len(), horizon, |ms| {
        let images: Vec<&Vec<Item>> = ms.iter().enumerate().map(|(n, &m)| &moves[&(n, h_pool[m].clone())]).collect();
        let sizes: Vec<usize> = images.iter().map(|i| i.len()).collect();
        let mut k = vec![0usize; horizon];
        loop {
            let run: Vec<Item> = (0..horizon).map(|n| images[n][k[n]]).collect();
            if g.win().holds(&run) {
                image_runs.insert((0..horizon).map(|n| picks[&(n, run[n], h_pool[ms[n]].clone())]).collect());
            }
            let mut i = 0;
            while i < horizon {
                k[i] += 1;
                if k[i] < sizes[i] {
                    break;
                }
                k[i] = 0;
                i += 1;
            }
            if i == horizon {
                break;
            }
        }
    });
    let pair = TranslationPair::new(
        "random",
        move |n, b| moves.get(&(n, b.to_vec())).cloned().unwrap_or_default(),
        move |n, x, b| picks.get(&(n, x, b.to_vec())).copied(),
    );
    (pair, image_runs)
}

fn random_pool(r: &mut ChaCha8Rng) -> Vec<Vec<Item>> {
    let mut pool = BTreeSet::new();
    for _ in 0..r.gen_range(1..=3) {
        let mut mv: Vec<Item> = (0..4).filter(|_| r.gen_bool(0.5)).collect();
        if mv.is_empty() {
            mv.push(r.gen_range(0..4));
        }
        pool.insert(mv);
    }
    pool.into_iter().collect()
}

/// `(pair, target)` where the target's winning runs contain every translated
/// winning source run, plus random extra runs.
fn derived_target(r: &mut ChaCha8Rng, g: &GameSpec) -> (TranslationPair, GameSpec) {
    let h_pool = random_pool(r);
    let (pair, mut runs) = random_pair(r, g, &h_pool);
    each_move_sequence(4, g.horizon(), |s| {
        if r.gen_bool(0.1) {
            runs.insert(s.iter().map(|&x| x as Item).collect());
        }
    });
    (pair, GameSpec::new(g.horizon(), h_pool, WinCondition::Table(runs)).unwrap())
}

fn wins_every_play(game: &GameSpec, tau: &TwoStrategy) -> bool {
    let mut ok = true;
    each_move_sequence(game.pool().len(), game.horizon(), |ms| {
        let picks: Option<Vec<Item>> = (0..ms.len())
            .map(|t| tau.decide(t, &ms[..=t]).ok().and_then(|i| game.pool()[ms[t]].get(i).copied()))
            .collect();
        ok &= picks.is_some_and(|p| game.win().holds(&p));
    });
    ok
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn verified_pairs_transfer_wins(seed in any::<u64>(), derived in any::<bool>()) {
        let mut r = rng(seed);
        let g = table_game(&mut r);
        let (pair, h) = if derived {
            derived_target(&mut r, &g)
        } else {
            let h_pool = random_pool(&mut r);
            let pair = random_pair(&mut r, &g, &h_pool).0;
            let table = table_game(&mut r);
            let h = GameSpec::new(g.horizon(), h_pool, WinCondition::Table(match table.win() {
                WinCondition::Table(t) => t.iter().filter(|s| s.len() == g.horizon()).cloned().collect(),
                _ => unreachable!(),
            }));
            match h {
                Ok(h) => (pair, h),
                Err(_) => return Ok(()),
            }
        };
        check_condition_i(&pair, &g, &h).unwrap();
        let c2 = check_condition_ii(&pair, g.win(), h.win(), &g, &h, 1_000_000).unwrap();
        if derived {
            prop_assert!(c2.holds);
        }
        if !c2.holds {
            return Ok(());
        }
        let sg = solve(&g, &SolveOptions::default()).unwrap();
        if let Some(tau) = &sg.two_full {
            prop_assert!(wins_every_play(&h, &transfer_full(&pair, &g, &h, tau).unwrap()));
        }
        if let Some(tau) = &sg.two_markov {
            let t = transfer_markov(&pair, &g, &h, tau).unwrap();
            prop_assert!(matches!(t, TwoStrategy::Markov { .. }), "Markov transfer must stay Markov");
            prop_assert!(wins_every_play(&h, &t));
        }
    }

    #[test]
    fn composed_pairs_pass_both_conditions(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g1 = table_game(&mut r);
        let (p12, g2) = derived_target(&mut r, &g1);
        let (p23, g3) = derived_target(&mut r, &g2);
        let chain = p12.compose(&p23);
        check_condition_i(&chain, &g1, &g3).unwrap();
        prop_assert!(check_condition_ii(&chain, g1.win(), g3.win(), &g1, &g3, 1_000_000).unwrap().holds);
    }
}

#[test]
fn duality_reverses_the_transfer_order() {
    let opts = SolveOptions::default();
    let mut groups = 0;
    for n in 1..=2 {
        for space in enumerate_topologies(n) {
            let space = Arc::new(space);
            let ideals: Vec<Vec<PointSet>> = enumerate_ideals(&space).iter().map(|i| i.members().to_vec()).collect();
            for pairing in [Pairing::Covers, Pairing::DenseOpen, Pairing::ClusterNeighborhood] {
                for horizon in 1..=2 {
                    let insts = duality_instances(&space, &ideals, pairing, 3, horizon).0;
                    let solved: Vec<(SolveReport, SolveReport)> =
                        insts.iter().map(|i| (solve(&i.g, &opts).unwrap(), solve(&i.h, &opts).unwrap())).collect();
                    groups += 1;
                    for (gi, hi) in &solved {
                        for (gj, hj) in &solved {
                            let on_g = LeqReport::from_reports(gi, gj);
                            let on_h = LeqReport::from_reports(hj, hi);
                            if on_g.two_wins && on_g.two_markov {
                                assert!(on_h.two_wins && on_h.one_cannot_predetermine);
                            }
                            assert_eq!(on_h.two_wins, on_g.two_wins);
                            assert_eq!(on_h.two_markov, on_g.one_cannot_predetermine);
                            assert_eq!(on_h.one_cannot_predetermine, on_g.two_markov);
                        }
                    }
                }
            }
        }
    }
    assert!(groups > 0);
}
