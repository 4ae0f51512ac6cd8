//! Translating Two's strategies from one selection game to another.
//!
//! A pair `(t_one, t_two)` maps each move `B` of the target game `H` to a move
//! of the source game `G`, and a pick `x` from that move back to a pick from
//! `B`. If every translated pick lands in `B` (condition i) and every winning
//! run of picks in `G` translates to a winning run in `H` (condition ii), then
//! any winning strategy of Two in `G` yields one in `H` of the same strength.

mod builtin;
mod duality;

pub use builtin::{desk_instance, BuiltinName, DeskInstance};
pub use duality::{
    duality_instances, reflection_admissible, verify_duality, Admissibility, DualityInstance, DualityReport,
    Enumeration, Pairing,
};

use crate::game::{
    all_move_sequences, first_loss_for_two, solve, GameError, GameSpec, Item, Play, Player, SolveOptions, SolveReport,
    TwoStrategy, WinCondition,
};
use serde::Serialize;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TranslationError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("condition (i) fails: {0}")]
    ConditionI(String),
    #[error("unknown translation or universe `{0}`")]
    UnregisteredUniverse(String),
    #[error("transferred strategy loses the play {0:?}")]
    TransferUnsound(Box<Play>),
    #[error("the source strategy does not win the source game")]
    SourceLoses,
}

pub type MoveMap = Arc<dyn Fn(usize, &[Item]) -> Vec<Item> + Send + Sync>;
pub type PickMap = Arc<dyn Fn(usize, Item, &[Item]) -> Option<Item> + Send + Sync>;

/// `t_one(turn, H-move) -> G-move` and `t_two(turn, G-pick, H-move) -> H-pick`.
#[derive(Clone)]
pub struct TranslationPair {
    pub name: String,
    pub t_one: MoveMap,
    pub t_two: PickMap,
}

impl fmt::Debug for TranslationPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TranslationPair({})", self.name)
    }
}

impl TranslationPair {
    pub fn new(
        name: impl Into<String>,
        t_one: impl Fn(usize, &[Item]) -> Vec<Item> + Send + Sync + 'static,
        t_two: impl Fn(usize, Item, &[Item]) -> Option<Item> + Send + Sync + 'static,
    ) -> Self {
        TranslationPair { name: name.into(), t_one: Arc::new(t_one), t_two: Arc::new(t_two) }
    }

    /// Moves pass through unchanged and picks are kept.
    pub fn identity() -> Self {
        TranslationPair::new("identity", |_, b| b.to_vec(), |_, x, _| Some(x))
    }

    /// `self` translates G1 to G2 and `next` translates G2 to G3; the result translates G1 to G3.
    pub fn compose(&self, next: &TranslationPair) -> TranslationPair {
        let (a1, a2) = (Arc::clone(&self.t_one), Arc::clone(&self.t_two));
        let (b1, b2) = (Arc::clone(&next.t_one), Arc::clone(&next.t_two));
        let (c1, c2) = (Arc::clone(&b1), b1);
        TranslationPair {
            name: format!("{} then {}", self.name, next.name),
            t_one: Arc::new(move |n, b3| a1(n, &c1(n, b3))),
            t_two: Arc::new(move |n, x, b3| {
                let b2_move = c2(n, b3);
                let y = a2(n, x, &b2_move)?;
                b2(n, y, b3)
            }),
        }
    }
}

fn move_key(mv: &[Item]) -> Vec<Item> {
    let mut k = mv.to_vec();
    k.sort_unstable();
    k
}

/// Looks up moves of a pool irrespective of item order.
struct PoolIndex(HashMap<Vec<Item>, usize>);

impl PoolIndex {
    fn new(game: &GameSpec) -> Self {
        PoolIndex(game.pool().iter().enumerate().map(|(i, m)| (move_key(m), i)).collect())
    }

    fn get(&self, mv: &[Item]) -> Option<usize> {
        self.0.get(&move_key(mv)).copied()
    }
}

/// Images of `t_one` lie in G's pool and every translated pick lies in its H-move,
/// for every turn below the horizon and every H-move.
pub fn check_condition_i(pair: &TranslationPair, g: &GameSpec, h: &GameSpec) -> Result<(), TranslationError> {
    let index = PoolIndex::new(g);
    for n in 0..h.horizon() {
        for b in h.pool() {
            let image = (pair.t_one)(n, b);
            if index.get(&image).is_none() {
                return Err(TranslationError::ConditionI(format!(
                    "turn {n}: image {image:?} of {b:?} is not a source move"
                )));
            }
            for &x in &image {
                match (pair.t_two)(n, x, b) {
                    Some(y) if b.contains(&y) => {}
                    other => {
                        return Err(TranslationError::ConditionI(format!(
                            "turn {n}: pick {x} from {image:?} translates to {other:?}, outside {b:?}"
                        )))
                    }
                }
            }
        }
    }
    Ok(())
}

/// A run of H-moves, a run of picks from their translations, and the translated picks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub h_moves: Vec<usize>,
    pub g_picks: Vec<Item>,
    pub h_picks: Vec<Item>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionII {
    pub holds: bool,
    pub counterexample: Option<Counterexample>,
    pub runs_checked: u64,
}

/// Every run of H-moves and every run of picks from their translations that
/// satisfies `c` is mapped to picks satisfying `d`. Runs are visited in
/// lexicographic order and the first failure is reported.
pub fn check_condition_ii(
    pair: &TranslationPair,
    c: &WinCondition,
    d: &WinCondition,
    g: &GameSpec,
    h: &GameSpec,
    budget: u64,
) -> Result<ConditionII, TranslationError> {
    check_condition_i(pair, g, h)?;
    let mut runs = 0u64;
    for h_moves in all_move_sequences(h.pool().len(), h.horizon()) {
        let images: Vec<Vec<Item>> = h_moves.iter().enumerate().map(|(n, &m)| (pair.t_one)(n, &h.pool()[m])).collect();
        for choice in all_move_sequences_ragged(&images) {
            runs += 1;
            if runs > budget {
                return Err(GameError::BudgetExceeded { budget }.into());
            }
            let g_picks: Vec<Item> = choice.iter().enumerate().map(|(n, &k)| images[n][k]).collect();
            if !c.holds(&g_picks) {
                continue;
            }
            let h_picks: Vec<Item> = g_picks
                .iter()
                .enumerate()
                .map(|(n, &x)| (pair.t_two)(n, x, &h.pool()[h_moves[n]]).expect("checked by condition (i)"))
                .collect();
            if !d.holds(&h_picks) {
                return Ok(ConditionII {
                    holds: false,
                    counterexample: Some(Counterexample { h_moves, g_picks, h_picks }),
                    runs_checked: runs,
                });
            }
        }
    }
    Ok(ConditionII { holds: true, counterexample: None, runs_checked: runs })
}

/// Index tuples `(k_0, …)` with `k_i < lists[i].len()`, lexicographically.
fn all_move_sequences_ragged(lists: &[Vec<Item>]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let len = lists.len();
    let mut next = if lists.iter().any(|l| l.is_empty()) { None } else { Some(vec![0; len]) };
    std::iter::from_fn(move || {
        let current = next.take()?;
        let mut succ = current.clone();
        let mut i = len;
        while i > 0 {
            i -= 1;
            succ[i] += 1;
            if succ[i] < lists[i].len() {
                next = Some(succ);
                break;
            }
            succ[i] = 0;
        }
        Some(current)
    })
}

fn h_pick_index(pair: &TranslationPair, n: usize, x: Item, b: &[Item]) -> Result<usize, TranslationError> {
    let y = (pair.t_two)(n, x, b)
        .ok_or_else(|| TranslationError::ConditionI(format!("turn {n}: no translation for pick {x}")))?;
    b.iter()
        .position(|&z| z == y)
        .ok_or_else(|| TranslationError::ConditionI(format!("turn {n}: translated pick {y} is outside {b:?}")))
}

/// `τ_H(B, n) = t_two(n, τ_G(t_one(n, B), n), B)`
pub fn transfer_markov(
    pair: &TranslationPair,
    g: &GameSpec,
    h: &GameSpec,
    tau_g: &TwoStrategy,
) -> Result<TwoStrategy, TranslationError> {
    let index = PoolIndex::new(g);
    let mut table = Vec::with_capacity(h.horizon());
    for n in 0..h.horizon() {
        let mut row = Vec::with_capacity(h.pool().len());
        for b in h.pool() {
            let image = (pair.t_one)(n, b);
            let gm = index
                .get(&image)
                .ok_or_else(|| TranslationError::ConditionI(format!("image {image:?} is not a source move")))?;
            let k = tau_g.decide(n, &[gm])?;
            let x = *g.pool()[gm]
                .get(k)
                .ok_or_else(|| GameError::MalformedStrategy(format!("item index {k} out of range")))?;
            row.push(h_pick_index(pair, n, x, b)?);
        }
        table.push(row);
    }
    Ok(TwoStrategy::Markov { table })
}

/// Full-strategy transfer: H's history of moves is translated move by move
/// into a G history, which `tau_g` answers.
pub fn transfer_full(
    pair: &TranslationPair,
    g: &GameSpec,
    h: &GameSpec,
    tau_g: &TwoStrategy,
) -> Result<TwoStrategy, TranslationError> {
    let index = PoolIndex::new(g);
    let mut entries = Vec::new();
    for len in 1..=h.horizon() {
        for h_moves in all_move_sequences(h.pool().len(), len) {
            let mut g_moves = Vec::with_capacity(len);
            for (n, &m) in h_moves.iter().enumerate() {
                let image = (pair.t_one)(n, &h.pool()[m]);
                g_moves.push(
                    index
                        .get(&image)
                        .ok_or_else(|| TranslationError::ConditionI(format!("image {image:?} is not a source move")))?,
                );
            }
            let n = len - 1;
            let gm = g_moves[n];
            let k = tau_g.decide(n, &g_moves)?;
            let x = *g.pool()[gm]
                .get(k)
                .ok_or_else(|| GameError::MalformedStrategy(format!("item index {k} out of range")))?;
            entries.push((h_moves.clone(), h_pick_index(pair, n, x, &h.pool()[h_moves[n]])?));
        }
    }
    Ok(TwoStrategy::full(entries))
}

/// Outcome of transferring a strategy and replaying it against every run of H-moves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransferCheck {
    pub source_wins: bool,
    pub strategy: TwoStrategy,
    pub target_wins: bool,
    pub losing_play: Option<Play>,
}

impl TransferCheck {
    pub fn sound(&self) -> bool {
        !self.source_wins || self.target_wins
    }

    pub fn into_result(self) -> Result<TwoStrategy, TranslationError> {
        match (self.source_wins, self.losing_play) {
            (false, _) => Err(TranslationError::SourceLoses),
            (true, Some(p)) => Err(TranslationError::TransferUnsound(Box::new(p))),
            (true, None) => Ok(self.strategy),
        }
    }
}

fn check_transfer(
    g: &GameSpec,
    h: &GameSpec,
    tau_g: &TwoStrategy,
    tau_h: TwoStrategy,
) -> Result<TransferCheck, TranslationError> {
    let source_wins = first_loss_for_two(g, tau_g)?.is_none();
    let losing_play = first_loss_for_two(h, &tau_h)?;
    Ok(TransferCheck { source_wins, target_wins: losing_play.is_none(), strategy: tau_h, losing_play })
}

pub fn verify_markov_transfer(
    pair: &TranslationPair,
    g: &GameSpec,
    h: &GameSpec,
    tau_g: &TwoStrategy,
) -> Result<TransferCheck, TranslationError> {
    check_transfer(g, h, tau_g, transfer_markov(pair, g, h, tau_g)?)
}

pub fn verify_full_transfer(
    pair: &TranslationPair,
    g: &GameSpec,
    h: &GameSpec,
    tau_g: &TwoStrategy,
) -> Result<TransferCheck, TranslationError> {
    check_transfer(g, h, tau_g, transfer_full(pair, g, h, tau_g)?)
}

/// The four transfer implications of `G ≤_II H`, read off two solved games.
/// The two about One lacking a winning strategy are reported only; at a
/// finite horizon they are complements of solved flags, not theorems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LeqReport {
    pub two_wins: bool,
    pub two_markov: bool,
    pub one_cannot_win: bool,
    pub one_cannot_predetermine: bool,
    pub finite_surrogate: bool,
}

impl LeqReport {
    pub fn from_reports(g: &SolveReport, h: &SolveReport) -> Self {
        let imp = |a: bool, b: bool| !a || b;
        LeqReport {
            two_wins: imp(g.winner_full == Player::Two, h.winner_full == Player::Two),
            two_markov: imp(g.two_has_markov, h.two_has_markov),
            one_cannot_win: imp(g.winner_full != Player::One, h.winner_full != Player::One),
            one_cannot_predetermine: imp(!g.one_has_predetermined, !h.one_has_predetermined),
            finite_surrogate: true,
        }
    }

    pub fn compute(g: &GameSpec, h: &GameSpec, opts: &SolveOptions) -> Result<Self, TranslationError> {
        Ok(LeqReport::from_reports(&solve(g, opts)?, &solve(h, opts)?))
    }
}
