//! Seeded random generators shared by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use workbench_core::game::{GameSpec, Item, WinCondition};
use workbench_core::rational::{int, rat, Rat};
use workbench_core::setvalued::{convexify, graph_closure, Affine, CompactSet, Interval, PiecewiseFn, SetValuedMap};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A rational `p/q` with `|p| ≤ span` and `q ∈ {1, 2, 4}`.
pub fn small_rat(r: &mut ChaCha8Rng, span: i64) -> Rat {
    let q = [1, 2, 4][r.gen_range(0..3)];
    rat(r.gen_range(-span * q..=span * q), q)
}

/// One to three intervals or points with endpoints on a quarter grid in `[-3, 3]`.
pub fn compact_set(r: &mut ChaCha8Rng) -> CompactSet {
    let parts = (0..r.gen_range(1..=3))
        .map(|_| {
            let lo = rat(r.gen_range(-12..=12), 4);
            if r.gen_bool(0.3) {
                Interval::point(lo)
            } else {
                let hi = &lo + rat(r.gen_range(0..=6), 4);
                Interval::new(lo, hi).unwrap()
            }
        })
        .collect();
    CompactSet::new(parts).unwrap()
}

/// How the breakpoint values of a random function are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Values {
    /// Always a one-sided limit.
    Limits,
    /// Usually a one-sided limit, sometimes arbitrary.
    Mixed,
}

/// A piecewise-affine function on `[0, 1]` with up to four cells.
pub fn piecewise(r: &mut ChaCha8Rng, values: Values) -> PiecewiseFn {
    let k = r.gen_range(1..=4);
    let mut inner: Vec<i64> = Vec::new();
    while inner.len() < k - 1 {
        let x = r.gen_range(1..8);
        if !inner.contains(&x) {
            inner.push(x);
        }
    }
    inner.sort_unstable();
    let mut breaks = vec![int(0)];
    breaks.extend(inner.iter().map(|&x| rat(x, 8)));
    breaks.push(int(1));
    let cells: Vec<Affine> = (0..k).map(|_| Affine::new(small_rat(r, 2), small_rat(r, 2))).collect();
    let vals = breaks
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let left = (i > 0).then(|| cells[i - 1].eval(x));
            let right = (i < k).then(|| cells[i].eval(x));
            if values == Values::Mixed && r.gen_bool(0.2) {
                return small_rat(r, 2);
            }
            match (left, right) {
                (Some(l), Some(rt)) => {
                    if r.gen_bool(0.5) {
                        l
                    } else {
                        rt
                    }
                }
                (Some(l), None) => l,
                (None, Some(rt)) => rt,
                (None, None) => unreachable!(),
            }
        })
        .collect();
    PiecewiseFn::new(breaks, cells, vals).unwrap()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Closure,
    Hull,
    Raw,
}

pub struct CorpusMap {
    pub kind: Kind,
    pub f: PiecewiseFn,
    pub phi: SetValuedMap,
}

pub fn build(kind: Kind, f: &PiecewiseFn) -> SetValuedMap {
    match kind {
        Kind::Closure => graph_closure(f),
        Kind::Hull => convexify(&graph_closure(f)),
        Kind::Raw => SetValuedMap::from_function(f),
    }
}

/// Graph closures, their convex hulls and raw graphs of random functions.
pub fn corpus(seed: u64, size: usize) -> Vec<CorpusMap> {
    let mut r = rng(seed);
    (0..size)
        .map(|i| {
            let kind = [Kind::Closure, Kind::Hull, Kind::Raw][i % 3];
            let values = if r.gen_bool(0.5) { Values::Limits } else { Values::Mixed };
            let f = piecewise(&mut r, values);
            let phi = build(kind, &f);
            CorpusMap { kind, f, phi }
        })
        .collect()
}

/// Visits every sequence of length `len` over `0..base`, first index fastest.
pub fn each_move_sequence(base: usize, len: usize, mut visit: impl FnMut(&[usize])) {
    let mut seq = vec![0usize; len];
    loop {
        visit(&seq);
        let mut i = 0;
        loop {
            if i == len {
                return;
            }
            seq[i] += 1;
            if seq[i] < base {
                break;
            }
            seq[i] = 0;
            i += 1;
        }
    }
}

/// Up to three moves over items `0..4`, horizon up to 3, a random table of winning runs.
pub fn table_game(r: &mut impl Rng) -> GameSpec {
    let horizon = r.gen_range(1..=3);
    let mut pool: BTreeSet<Vec<Item>> = BTreeSet::new();
    for _ in 0..r.gen_range(1..=3) {
        let mut mv: Vec<Item> = (0..4).filter(|_| r.gen_bool(0.5)).collect();
        if mv.is_empty() {
            mv.push(r.gen_range(0..4));
        }
        pool.insert(mv);
    }
    let mut table = BTreeSet::new();
    each_move_sequence(4, horizon, |s| {
        if r.gen_bool(0.5) {
            table.insert(s.iter().map(|&x| x as Item).collect::<Vec<_>>());
        }
    });
    GameSpec::new(horizon, pool.into_iter().collect(), WinCondition::Table(table)).unwrap()
}
