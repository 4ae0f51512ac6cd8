//! Exact solving by backward induction, plus the searches for Markov
//! strategies of Two and predetermined strategies of One.

use super::strategy::{OneStrategy, TwoStrategy};
use super::transversal::minimal_transversals;
use super::{GameError, GameSpec, Item, Player};
use serde::Serialize;
use std::collections::HashMap;

pub const DEFAULT_BUDGET: u64 = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    /// Cap on positions expanded, and separately on strategy candidates examined.
    pub budget: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { budget: DEFAULT_BUDGET }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolveReport {
    pub winner_full: Player,
    pub two_has_markov: bool,
    pub one_has_predetermined: bool,
    pub one_full: Option<OneStrategy>,
    pub two_full: Option<TwoStrategy>,
    pub two_markov: Option<TwoStrategy>,
    pub one_predetermined: Option<OneStrategy>,
    /// Positions expanded, including those touched by the strategy searches.
    pub nodes: u64,
    pub minimal_transversals: usize,
    /// Tuples of per-turn pick sets examined by the Markov search.
    pub markov_candidates: u64,
    /// Partial move sequences examined by the predetermined search.
    pub predetermined_candidates: u64,
}

/// Memoized game tree: `value(prefix)` is true when Two wins from the
/// position reached by the picks in `prefix`.
struct Tree<'a> {
    game: &'a GameSpec,
    memo: HashMap<Vec<Item>, bool>,
    nodes: u64,
    budget: u64,
}

impl<'a> Tree<'a> {
    fn new(game: &'a GameSpec, budget: u64) -> Self {
        Tree { game, memo: HashMap::new(), nodes: 0, budget }
    }

    fn value(&mut self, prefix: &mut Vec<Item>) -> Result<bool, GameError> {
        if let Some(&v) = self.memo.get(prefix.as_slice()) {
            return Ok(v);
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(GameError::BudgetExceeded { budget: self.budget });
        }
        let v = if prefix.len() == self.game.horizon() {
            self.game.two_wins(prefix)
        } else {
            let game = self.game;
            let mut all = true;
            for mv in game.pool() {
                let mut any = false;
                for &x in mv {
                    prefix.push(x);
                    let r = self.value(prefix);
                    prefix.pop();
                    if r? {
                        any = true;
                        break;
                    }
                }
                if !any {
                    all = false;
                    break;
                }
            }
            all
        };
        self.memo.insert(prefix.clone(), v);
        Ok(v)
    }

    fn value_of(&mut self, prefix: &[Item]) -> Result<bool, GameError> {
        self.value(&mut prefix.to_vec())
    }
}

type Subtree = Result<(HashMap<Vec<Item>, bool>, u64), GameError>;

fn solve_subtree(game: &GameSpec, x: Item, budget: u64) -> Subtree {
    let mut t = Tree::new(game, budget);
    t.value(&mut vec![x])?;
    Ok((t.memo, t.nodes))
}

#[cfg(feature = "parallel")]
fn solve_subtrees(game: &GameSpec, items: &[Item], budget: u64) -> Vec<Subtree> {
    use rayon::prelude::*;
    items.par_iter().map(|&x| solve_subtree(game, x, budget)).collect()
}

#[cfg(not(feature = "parallel"))]
fn solve_subtrees(game: &GameSpec, items: &[Item], budget: u64) -> Vec<Subtree> {
    items.iter().map(|&x| solve_subtree(game, x, budget)).collect()
}

/// Solves the game and searches for restricted winning strategies.
/// The subtrees below each first pick are solved independently (in parallel
/// when enabled) and merged, so results do not depend on the worker count.
pub fn solve(game: &GameSpec, opts: &SolveOptions) -> Result<SolveReport, GameError> {
    let budget = opts.budget;
    let mut tree = Tree::new(game, budget);
    tree.nodes = 1;
    for sub in solve_subtrees(game, &game.items(), budget) {
        let (memo, nodes) = sub?;
        tree.nodes += nodes;
        tree.memo.extend(memo);
    }
    if tree.nodes > budget {
        return Err(GameError::BudgetExceeded { budget });
    }
    let root = tree.value(&mut Vec::new())?;
    let winner_full = if root { Player::Two } else { Player::One };

    let (one_full, two_full) = match winner_full {
        Player::Two => (None, Some(extract_two(&mut tree)?)),
        Player::One => (Some(extract_one(&mut tree)?), None),
    };

    let transversals = minimal_transversals(game.pool());
    let mut markov_candidates = 0;
    let markov = markov_search(&mut tree, &transversals, &mut markov_candidates)?;
    let mut predetermined_candidates = 0;
    let predetermined = predetermined_search(&mut tree, &mut predetermined_candidates)?;

    Ok(SolveReport {
        winner_full,
        two_has_markov: markov.is_some(),
        one_has_predetermined: predetermined.is_some(),
        one_full,
        two_full,
        two_markov: markov,
        one_predetermined: predetermined.map(|moves| OneStrategy::Predetermined { moves }),
        nodes: tree.nodes,
        minimal_transversals: transversals.len(),
        markov_candidates,
        predetermined_candidates,
    })
}

/// `S_1(A, B)` at the surrogate level: One has no winning predetermined strategy.
pub fn s1_holds(game: &GameSpec, opts: &SolveOptions) -> Result<bool, GameError> {
    Ok(!solve(game, opts)?.one_has_predetermined)
}

fn extract_two(tree: &mut Tree) -> Result<TwoStrategy, GameError> {
    fn go(
        tree: &mut Tree,
        moves: &mut Vec<usize>,
        picks: &mut Vec<Item>,
        out: &mut Vec<(Vec<usize>, usize)>,
    ) -> Result<(), GameError> {
        let game = tree.game;
        for (m, mv) in game.pool().iter().enumerate() {
            let mut chosen = None;
            for (k, &x) in mv.iter().enumerate() {
                picks.push(x);
                let v = tree.value(picks);
                picks.pop();
                if v? {
                    chosen = Some((k, x));
                    break;
                }
            }
            let (k, x) = chosen.expect("Two wins at every position reached by the strategy");
            moves.push(m);
            out.push((moves.clone(), k));
            if moves.len() < game.horizon() {
                picks.push(x);
                go(tree, moves, picks, out)?;
                picks.pop();
            }
            moves.pop();
        }
        Ok(())
    }
    let mut out = Vec::new();
    go(tree, &mut Vec::new(), &mut Vec::new(), &mut out)?;
    Ok(TwoStrategy::full(out))
}

fn extract_one(tree: &mut Tree) -> Result<OneStrategy, GameError> {
    fn go(tree: &mut Tree, picks: &mut Vec<Item>, out: &mut Vec<(Vec<Item>, usize)>) -> Result<(), GameError> {
        let game = tree.game;
        let mut chosen = None;
        'moves: for (m, mv) in game.pool().iter().enumerate() {
            for &x in mv {
                picks.push(x);
                let v = tree.value(picks);
                picks.pop();
                if v? {
                    continue 'moves;
                }
            }
            chosen = Some(m);
            break;
        }
        let m = chosen.expect("One wins at every position reached by the strategy");
        out.push((picks.clone(), m));
        if picks.len() + 1 < game.horizon() {
            for &x in &game.pool()[m] {
                picks.push(x);
                go(tree, picks, out)?;
                picks.pop();
            }
        }
        Ok(())
    }
    let mut out = Vec::new();
    go(tree, &mut Vec::new(), &mut out)?;
    Ok(OneStrategy::full(out))
}

fn extend(prefixes: &[Vec<Item>], items: &[Item]) -> Vec<Vec<Item>> {
    let mut out = Vec::with_capacity(prefixes.len() * items.len());
    for p in prefixes {
        for &x in items {
            let mut q = p.clone();
            q.push(x);
            out.push(q);
        }
    }
    out
}

fn bump(counter: &mut u64, budget: u64) -> Result<(), GameError> {
    *counter += 1;
    if *counter > budget {
        Err(GameError::BudgetExceeded { budget })
    } else {
        Ok(())
    }
}

/// A Markov strategy picks, at turn `n`, from a set `S_n` that meets every
/// move; it wins iff every sequence in `S_1 × … × S_h` wins. Shrinking the
/// sets only helps, so the earlier turns range over minimal transversals and
/// the last turn takes every item that completes all prefixes to a win.
fn markov_search(
    tree: &mut Tree,
    transversals: &[Vec<Item>],
    candidates: &mut u64,
) -> Result<Option<TwoStrategy>, GameError> {
    fn go(
        tree: &mut Tree,
        transversals: &[Vec<Item>],
        universe: &[Item],
        prefixes: Vec<Vec<Item>>,
        chosen: &mut Vec<Vec<Item>>,
        candidates: &mut u64,
    ) -> Result<bool, GameError> {
        let game = tree.game;
        if chosen.len() + 1 == game.horizon() {
            bump(candidates, tree.budget)?;
            let mut good = Vec::new();
            'items: for &y in universe {
                for p in &prefixes {
                    let mut q = p.clone();
                    q.push(y);
                    if !tree.value(&mut q)? {
                        continue 'items;
                    }
                }
                good.push(y);
            }
            if game.pool().iter().all(|mv| mv.iter().any(|x| good.contains(x))) {
                chosen.push(good);
                return Ok(true);
            }
            return Ok(false);
        }
        for t in transversals {
            let next = extend(&prefixes, t);
            let mut viable = true;
            for q in &next {
                if !tree.value_of(q)? {
                    viable = false;
                    break;
                }
            }
            if !viable {
                continue;
            }
            bump(candidates, tree.budget)?;
            chosen.push(t.clone());
            if go(tree, transversals, universe, next, chosen, candidates)? {
                return Ok(true);
            }
            chosen.pop();
        }
        Ok(false)
    }
    let universe = tree.game.items();
    let mut chosen = Vec::new();
    if !go(tree, transversals, &universe, vec![Vec::new()], &mut chosen, candidates)? {
        return Ok(None);
    }
    let table = chosen
        .iter()
        .map(|s| {
            tree.game
                .pool()
                .iter()
                .map(|mv| mv.iter().position(|x| s.contains(x)).expect("pick set meets every move"))
                .collect()
        })
        .collect();
    Ok(Some(TwoStrategy::Markov { table }))
}

/// Lexicographically first move sequence against which every run of picks loses for Two.
fn predetermined_search(tree: &mut Tree, candidates: &mut u64) -> Result<Option<Vec<usize>>, GameError> {
    fn go(
        tree: &mut Tree,
        prefixes: Vec<Vec<Item>>,
        moves: &mut Vec<usize>,
        candidates: &mut u64,
    ) -> Result<bool, GameError> {
        let game = tree.game;
        if moves.len() == game.horizon() {
            return Ok(true);
        }
        for (m, mv) in game.pool().iter().enumerate() {
            let next = extend(&prefixes, mv);
            let mut viable = true;
            for q in &next {
                if tree.value_of(q)? {
                    viable = false;
                    break;
                }
            }
            if !viable {
                continue;
            }
            bump(candidates, tree.budget)?;
            moves.push(m);
            if go(tree, next, moves, candidates)? {
                return Ok(true);
            }
            moves.pop();
        }
        Ok(false)
    }
    let mut moves = Vec::new();
    Ok(go(tree, vec![Vec::new()], &mut moves, candidates)?.then_some(moves))
}
